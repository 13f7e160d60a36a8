#pragma once

// Mean sinΘ per method against the varied parameter, as a static SVG 1.1 chart.

#include <cstddef>
#include <string>
#include <vector>

#include "hetero_spectra/cli/results.hpp"

namespace hs::cli {

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;        // over rows with a finite sin_theta
  std::size_t count = 0;
};

struct Series {
  Method method = Method::svd;
  std::vector<SeriesPoint> points;  // ascending x
};

struct PlotData {
  VaryParam param = VaryParam::kappa;
  std::vector<Series> series;  // canonical method order
};

/// Groups by (method, value). Throws ResultsFormatError if rows disagree on
/// the varied parameter. Series without any finite value are dropped.
PlotData summarize_results(const std::vector<ResultRecord>& records);

/// Each point carries data-x / data-mean / data-count attributes and a
/// <title> tooltip, numbers at 17 significant digits. A log x-axis is used
/// when all x > 0 and max/min ≥ 20.
std::string render_svg(const PlotData& data);

}  // namespace hs::cli
