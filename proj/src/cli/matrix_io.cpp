#include "hetero_spectra/cli/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hs::cli {

MatrixParseError::MatrixParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string where(std::size_t line, std::size_t col) {
  std::ostringstream s;
  s << "line " << line;
  if (col > 0) s << ", column " << col;
  return s.str();
}

double parse_number(std::string_view raw, std::size_t line, std::size_t col) {
  const std::string_view tok = trim(raw);
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.empty() || ec != std::errc() || ptr != last) {
    throw MatrixParseError(where(line, col) + ": non-numeric token '" + std::string(tok) + "'",
                           line, col);
  }
  if (!std::isfinite(v)) {
    throw MatrixParseError(where(line, col) + ": non-finite value '" + std::string(tok) + "'",
                           line, col);
  }
  return v;
}

// Where each entry came from, for error messages.
struct Located {
  Matrix values;
  std::vector<std::size_t> line_of;  // row-major
  std::vector<std::size_t> col_of;
};

Located parse_csv(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t last_content = 0;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (!trim(lines[i]).empty()) last_content = i + 1;
  if (last_content == 0) throw MatrixParseError("empty matrix file", 0, 0);

  std::vector<double> data;
  std::vector<std::size_t> line_of, col_of;
  std::size_t cols = 0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < last_content; ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (trim(line).empty()) throw MatrixParseError(where(lineno, 0) + ": blank row", lineno, 0);
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto tok = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      ++field;
      data.push_back(parse_number(tok, lineno, field));
      line_of.push_back(lineno);
      col_of.push_back(field);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = field;
    } else if (field != cols) {
      throw MatrixParseError(where(lineno, 0) + ": expected " + std::to_string(cols) +
                                 " fields, found " + std::to_string(field),
                             lineno, 0);
    }
    ++rows;
  }
  return Located{Matrix(rows, cols, std::move(data)), std::move(line_of), std::move(col_of)};
}

Located parse_matrix_market(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw MatrixParseError("empty matrix file", 0, 0);

  std::istringstream banner{std::string(trim(lines[0]))};
  std::string tag, object, layout, field, symmetry;
  banner >> tag >> object >> layout >> field >> symmetry;
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (tag != "%%MatrixMarket" || object != "matrix") {
    throw MatrixParseError("line 1: not a Matrix Market matrix header", 1, 0);
  }
  if (layout != "array") {
    throw MatrixParseError("line 1: only the array layout is supported, got '" + layout + "'", 1, 0);
  }
  if (field != "real" && field != "double" && field != "integer") {
    throw MatrixParseError("line 1: unsupported field '" + field + "'", 1, 0);
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw MatrixParseError("line 1: unsupported symmetry '" + symmetry + "'", 1, 0);
  }

  std::size_t i = 1;
  auto skip_comments = [&] {
    while (i < lines.size()) {
      const auto t = trim(lines[i]);
      if (!t.empty() && t.front() != '%') break;
      ++i;
    }
  };
  skip_comments();
  if (i >= lines.size()) throw MatrixParseError("missing size line", 0, 0);
  const std::size_t size_line = i + 1;
  std::istringstream sizes{std::string(trim(lines[i]))};
  long long m = -1, n = -1;
  std::string extra;
  if (!(sizes >> m >> n) || (sizes >> extra) || m <= 0 || n <= 0) {
    throw MatrixParseError(where(size_line, 0) + ": expected 'rows cols'", size_line, 0);
  }
  ++i;
  if (symmetric && m != n) {
    throw MatrixParseError(where(size_line, 0) + ": symmetric matrix must be square, got " +
                               std::to_string(m) + " vs " + std::to_string(n),
                           size_line, 0);
  }

  const auto rows = static_cast<std::size_t>(m);
  const auto cols = static_cast<std::size_t>(n);
  Located out{Matrix(rows, cols), std::vector<std::size_t>(rows * cols),
              std::vector<std::size_t>(rows * cols, 1)};
  // Column-major; the symmetric variant lists only the lower triangle.
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = symmetric ? c : 0; r < rows; ++r) {
      skip_comments();
      if (i >= lines.size()) {
        throw MatrixParseError("unexpected end of file: expected entry (" + std::to_string(r + 1) +
                                   ", " + std::to_string(c + 1) + ")",
                               lines.size(), 0);
      }
      const std::size_t lineno = i + 1;
      const double v = parse_number(lines[i], lineno, 1);
      out.values(r, c) = v;
      out.line_of[r * cols + c] = lineno;
      if (symmetric) {
        out.values(c, r) = v;
        out.line_of[c * cols + r] = lineno;
      }
      ++i;
    }
  }
  skip_comments();
  if (i < lines.size()) {
    throw MatrixParseError(where(i + 1, 0) + ": more entries than the declared size", i + 1, 0);
  }
  return out;
}

}  // namespace

MatrixFormat detect_format(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text.substr(start).rfind("%%MatrixMarket", 0) == 0) {
    return MatrixFormat::matrix_market_array;
  }
  return MatrixFormat::csv_dense;
}

ParsedMatrix parse_matrix(std::string_view text, std::optional<MatrixFormat> format) {
  const MatrixFormat fmt = format.value_or(detect_format(text));
  Located loc = fmt == MatrixFormat::csv_dense ? parse_csv(text) : parse_matrix_market(text);
  Matrix& a = loc.values;
  if (a.rows() != a.cols()) {
    throw MatrixParseError("dimension mismatch: matrix is " + std::to_string(a.rows()) + " x " +
                               std::to_string(a.cols()) + " (" + std::to_string(a.rows()) +
                               " rows vs " + std::to_string(a.cols()) +
                               " columns); a square matrix is required",
                           0, 0);
  }
  const std::size_t p = a.rows();
  double scale = 1.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, std::abs(a(i, j)));

  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double gap = std::abs(a(i, j) - a(j, i));
      if (gap > worst) {
        worst = gap;
        wi = i;
        wj = j;
      }
    }

  ParsedMatrix out{SymMatrix(p), {}};
  if (worst > 0.0) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "asymmetry " << worst << " between (" << wi + 1 << "," << wj + 1 << ") and (" << wj + 1
        << "," << wi + 1 << ")";
    if (worst > kSymmetryTolerance * scale) {
      const std::size_t line = loc.line_of[wi * p + wj];
      const std::size_t col = loc.col_of[wi * p + wj];
      throw MatrixParseError(where(line, col) + ": " + msg.str() + " exceeds tolerance", line, col);
    }
    out.warnings.push_back(msg.str() + " within tolerance; symmetrized by averaging");
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out.matrix.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return out;
}

ParsedMatrix read_matrix_file(const std::filesystem::path& path,
                              std::optional<MatrixFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixParseError("cannot open '" + path.string() + "'", 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), format);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& out, const SymMatrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_market(std::ostream& out, const SymMatrix& m) {
  out << "%%MatrixMarket matrix array real symmetric\n";
  out << m.dim() << ' ' << m.dim() << '\n';
  for (std::size_t c = 0; c < m.dim(); ++c)
    for (std::size_t r = c; r < m.dim(); ++r) out << format_double(m(r, c)) << '\n';
}

}  // namespace hs::cli
