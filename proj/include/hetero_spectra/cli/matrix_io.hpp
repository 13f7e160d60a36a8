#pragma once

// Reading and writing symmetric matrices as dense CSV or Matrix Market array.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetero_spectra/matcore.hpp"

namespace hs::cli {

enum class MatrixFormat { csv_dense, matrix_market_array };

/// Parse failure; line and column are 1-based, 0 when not applicable.
class MatrixParseError : public std::runtime_error {
 public:
  MatrixParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Largest relative |a_ij − a_ji| accepted (then symmetrized by averaging).
inline constexpr double kSymmetryTolerance = 1e-10;

struct ParsedMatrix {
  SymMatrix matrix;
  std::vector<std::string> warnings;
};

/// "%%MatrixMarket" first line selects Matrix Market, anything else CSV.
MatrixFormat detect_format(std::string_view text);

ParsedMatrix parse_matrix(std::string_view text,
                          std::optional<MatrixFormat> format = std::nullopt);
ParsedMatrix read_matrix_file(const std::filesystem::path& path,
                              std::optional<MatrixFormat> format = std::nullopt);

/// %.17g, so a written double reads back exactly.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const SymMatrix& m);
void write_matrix_market(std::ostream& out, const SymMatrix& m);

}  // namespace hs::cli
