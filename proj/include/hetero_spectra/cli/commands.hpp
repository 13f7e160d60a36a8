#pragma once

// The hetero-spectra command line: solve | simulate | plot.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;         // unreadable or malformed input
inline constexpr int kExitInvalid = 2;       // bad arguments or config; empty plot data
inline constexpr int kExitNotConverged = 3;  // solve: outputs written anyway

struct SolveOptions {
  std::filesystem::path input;
  std::string method;
  std::optional<double> tau;
  std::optional<long long> rank;
  std::filesystem::path out_dir;
  int max_iter = 1000;
};

/// Writes L.csv, D.csv, trace.csv and summary.json into out_dir.
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  int jobs = 1;
  bool timing = false;
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

int cmd_plot(const std::filesystem::path& results, const std::filesystem::path& svg_out,
             std::ostream& out, std::ostream& err);

/// Full argument parsing; --jobs defaults to $HETERO_SPECTRA_JOBS, else 1.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hs::cli
