#pragma once

// Results CSV, version 1:
//
//   # hetero-spectra results v1
//   method,param,value,replicate,sin_theta,wall_ms,status
//   rmtfa,kappa,3,0,0.26125...,,ok
//
// wall_ms is empty unless timing was requested; a failed method has
// sin_theta "nan".

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetero_spectra/simlab.hpp"

namespace hs::cli {

inline constexpr const char* kResultsVersionLine = "# hetero-spectra results v1";
inline constexpr const char* kResultsHeader = "method,param,value,replicate,sin_theta,wall_ms,status";

class ResultsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResultRecord {
  Method method = Method::svd;
  VaryParam param = VaryParam::kappa;
  double value = 0.0;
  int replicate = 0;
  double sin_theta = 0.0;
  std::optional<double> wall_ms;
  std::string status;
};

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Throws ResultsFormatError naming the offending line.
std::vector<ResultRecord> read_results_csv(std::istream& in);

}  // namespace hs::cli
