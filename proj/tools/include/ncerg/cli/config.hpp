#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ncerg::cli {

inline const std::vector<std::string> kCommands{
    "balls",         "growth",           "folner",       "dyadic",   "walk-dominate",
    "maximal",       "ergodic-converge", "transference", "iterated", "subgroup"};

struct ExperimentConfig {
  std::string command;
  std::string group = "Z";  ///< Z | Zd:<d> | heisenberg | cyclic:<m>^<d> | locfin
  std::string action;       ///< shift:<m> | heisenberg:<q> | conj:<d> | flip:<levels>
  int n = 4;
  int rmax = 32;
  int d = 1;
  std::int64_t window = 256;
  std::string metric = "linf";
  int sites = 16;
  int dim = 2;
  int trials = 10;
  int samples = 10'000;
  std::vector<int> schedule;
  std::vector<int> folner;
  std::vector<double> ps;
  std::vector<double> lambdas;
  std::uint64_t seed = 1;
  bool exact = false;
  std::string out;
  std::size_t cap = 0;  ///< 0 selects the library default

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys and wrong types are errors.
ExperimentConfig from_json(const nlohmann::json& j);
/// Sorted keys, no whitespace.
std::string canonical(const ExperimentConfig& config);

/// Rejects unknown commands, malformed group/action specs and out-of-range
/// sizes with std::invalid_argument.
void validate(const ExperimentConfig& config);

}  // namespace ncerg::cli
