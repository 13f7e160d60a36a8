#pragma once

// JSON experiment configs. Unknown fields are rejected.
//
//   {
//     "baseline": {"n": 200, "p": 50, "r": 5, "kappa": 3, "omega": 1},
//     "vary": {"param": "kappa", "values": [3, 10, 100]},
//     "methods": ["svd", "dd", "hpca", "dhpca", "hpca_plus", "rmtfa", "si"],
//     "replicates": 10,
//     "seed": 0,
//     "tau_rule": "sigma_r_sq_over_16"
//   }
//
// baseline fields, replicates, seed and tau_rule are optional; tau_rule may
// also be a positive number.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hetero_spectra/simlab.hpp"

namespace hs::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig read_config_file(const std::filesystem::path& path);

std::string config_to_json(const ExperimentConfig& config);

}  // namespace hs::cli
