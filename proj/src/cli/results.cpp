#include "hetero_spectra/cli/results.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "hetero_spectra/cli/matrix_io.hpp"

namespace hs::cli {

namespace {

// Status text is free-form (exception messages); keep it to one CSV field.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double to_double(const std::string& s, std::size_t lineno, const char* field) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ResultsFormatError("line " + std::to_string(lineno) + ": bad " + field + " '" + s + "'");
  }
  return v;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsVersionLine << '\n' << kResultsHeader << '\n';
  for (const auto& row : rows) {
    out << method_tag(row.method) << ',' << vary_param_name(row.param) << ','
        << format_double(row.value) << ',' << row.replicate << ','
        << (std::isnan(row.sin_theta) ? std::string("nan") : format_double(row.sin_theta)) << ','
        << (row.wall_ms ? format_double(*row.wall_ms) : std::string()) << ','
        << sanitize(row.status) << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next() || line != kResultsVersionLine) {
    throw ResultsFormatError("line 1: expected '" + std::string(kResultsVersionLine) + "'");
  }
  if (!next() || line != kResultsHeader) {
    throw ResultsFormatError("line 2: expected header '" + std::string(kResultsHeader) + "'");
  }

  std::vector<ResultRecord> records;
  while (next()) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) {
      throw ResultsFormatError("line " + std::to_string(lineno) + ": expected 7 fields, found " +
                               std::to_string(f.size()));
    }
    ResultRecord rec;
    const auto method = parse_method(f[0]);
    if (!method) throw ResultsFormatError("line " + std::to_string(lineno) + ": unknown method '" + f[0] + "'");
    rec.method = *method;
    const auto param = parse_vary_param(f[1]);
    if (!param) throw ResultsFormatError("line " + std::to_string(lineno) + ": unknown param '" + f[1] + "'");
    rec.param = *param;
    rec.value = to_double(f[2], lineno, "value");
    const double rep = to_double(f[3], lineno, "replicate");
    if (rep < 0 || rep != std::floor(rep)) {
      throw ResultsFormatError("line " + std::to_string(lineno) + ": bad replicate '" + f[3] + "'");
    }
    rec.replicate = static_cast<int>(rep);
    rec.sin_theta = to_double(f[4], lineno, "sin_theta");
    if (!f[5].empty()) rec.wall_ms = to_double(f[5], lineno, "wall_ms");
    rec.status = f[6];
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace hs::cli
