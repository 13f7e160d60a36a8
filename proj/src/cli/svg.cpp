#include "hetero_spectra/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "hetero_spectra/cli/matrix_io.hpp"

namespace hs::cli {

namespace {

constexpr double kWidth = 760;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 170;  // legend column
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

PlotData summarize_results(const std::vector<ResultRecord>& records) {
  PlotData data;
  if (records.empty()) return data;
  data.param = records.front().param;

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<int, std::map<double, Acc>> groups;  // method index -> x -> acc
  for (const auto& rec : records) {
    if (rec.param != data.param) {
      throw ResultsFormatError("rows vary different parameters ('" +
                               std::string(vary_param_name(data.param)) + "' and '" +
                               std::string(vary_param_name(rec.param)) + "')");
    }
    auto& acc = groups[static_cast<int>(rec.method)][rec.value];
    if (std::isfinite(rec.sin_theta)) {
      acc.sum += rec.sin_theta;
      ++acc.count;
    }
  }
  for (Method m : kAllMethods) {
    const auto it = groups.find(static_cast<int>(m));
    if (it == groups.end()) continue;
    Series s{m, {}};
    for (const auto& [x, acc] : it->second)
      if (acc.count > 0) s.points.push_back({x, acc.sum / static_cast<double>(acc.count), acc.count});
    if (!s.points.empty()) data.series.push_back(std::move(s));
  }
  return data;
}

std::string render_svg(const PlotData& data) {
  double xmin = INFINITY, xmax = -INFINITY, ymax = 0.0;
  for (const auto& s : data.series)
    for (const auto& pt : s.points) {
      xmin = std::min(xmin, pt.x);
      xmax = std::max(xmax, pt.x);
      ymax = std::max(ymax, pt.mean);
    }
  if (data.series.empty()) xmin = xmax = 0.0;
  const bool log_x = xmin > 0.0 && xmax / xmin >= 20.0;
  const double ytop = ymax > 1.0 ? std::ceil(ymax * 10.0) / 10.0 : 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto tx = [&](double x) {
    if (xmax == xmin) return kLeft + plot_w / 2.0;
    const double t = log_x ? (std::log10(x) - std::log10(xmin)) / (std::log10(xmax) - std::log10(xmin))
                           : (x - xmin) / (xmax - xmin);
    return kLeft + t * plot_w;
  };
  auto ty = [&](double y) { return kTop + (1.0 - y / ytop) * plot_h; };

  const std::string param(vary_param_name(data.param));
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<title>Mean sin theta distance vs " << escape(param) << "</title>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  // axes
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\"/>\n</g>\n";

  svg << "<g class=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = ytop * i / 5.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(ty(y) + 4)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& s : data.series)
    for (const auto& pt : s.points) xs.push_back(pt.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    svg << "<text x=\"" << fixed(tx(x)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text class=\"xlabel\" x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 18
      << "\" text-anchor=\"middle\">" << escape(param) << (log_x ? " (log scale)" : "")
      << "</text>\n";
  svg << "<text class=\"ylabel\" x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\">mean sin theta</text>\n";

  for (std::size_t k = 0; k < data.series.size(); ++k) {
    const auto& s = data.series[k];
    const char* color = kPalette[static_cast<std::size_t>(s.method) % std::size(kPalette)];
    const std::string tag(method_tag(s.method));
    const std::string label(method_label(s.method));
    svg << "<g class=\"series\" data-method=\"" << tag << "\">\n";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) svg << ' ';
      svg << fixed(tx(s.points[i].x)) << ',' << fixed(ty(s.points[i].mean));
    }
    svg << "\"/>\n";
    for (const auto& pt : s.points) {
      svg << "<circle cx=\"" << fixed(tx(pt.x)) << "\" cy=\"" << fixed(ty(pt.mean))
          << "\" r=\"3\" fill=\"" << color << "\" data-x=\"" << format_double(pt.x)
          << "\" data-mean=\"" << format_double(pt.mean) << "\" data-count=\"" << pt.count
          << "\"><title>" << escape(label) << ", " << escape(param) << " = "
          << format_double(pt.x) << ": mean sin theta " << format_double(pt.mean) << " over "
          << pt.count << " runs</title></circle>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < data.series.size(); ++k) {
    const auto& s = data.series[k];
    const char* color = kPalette[static_cast<std::size_t>(s.method) % std::size(kPalette)];
    const double y = kTop + 10 + 22.0 * static_cast<double>(k);
    const double x = kWidth - kRight + 20;
    svg << "<g class=\"legend-entry\" data-method=\"" << method_tag(s.method) << "\">"
        << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24 << "\" y2=\"" << y
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << x + 32 << "\" y=\"" << y + 4 << "\">"
        << escape(method_label(s.method)) << "</text></g>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace hs::cli
