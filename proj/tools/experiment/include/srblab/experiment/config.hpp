#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srblab/map_system.hpp"
#include "srblab/ulam.hpp"

namespace srblab::experiment {

struct MapSpec {
  MapFamily family = MapFamily::doubling;
  std::optional<int> d;             // linear_circle (default 2), viana (default 16)
  double slope = 2.0;               // tent
  double a = 2.0;                   // quadratic
  double t = 0.0;                   // perturbed_circle
  std::optional<double> a0;         // viana; empty = Misiurewicz parameter
  double alpha = 0.01;              // viana
  std::optional<double> half_width; // viana; empty = automatic

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

struct SweepSpec {
  std::string param = "slope";
  double from = 1.5;
  double to = 2.0;
  std::size_t steps = 11;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct OrbitSpec {
  std::size_t n_iters = 100000;
  std::size_t sample_size = 64;
  std::size_t retry_budget = 64;

  friend bool operator==(const OrbitSpec&, const OrbitSpec&) = default;
};

struct UlamSpec {
  std::size_t bins = 4096;
  std::size_t ambient_bins = 4096;
  std::size_t plane_bins = 64;
  SolveMode mode = SolveMode::power;
  double tol = 1e-12;
  std::size_t max_iters = 100000;

  friend bool operator==(const UlamSpec&, const UlamSpec&) = default;
};

struct InduceSpec {
  std::optional<double> delta_left;
  std::optional<double> delta_right;
  std::size_t tau_max = 20;
  double tol = 1e-12;
  bool exact = false;  // analytic tower (doubling only)

  friend bool operator==(const InduceSpec&, const InduceSpec&) = default;
};

struct TailSpec {
  double lambda = 0.3;
  double delta = 0.05;
  double epsilon = 0.1;
  std::size_t n_max = 200;
  std::size_t sample_size = 10000;
  std::string profile_file;  // synthetic injection: fit a profile read from CSV

  friend bool operator==(const TailSpec&, const TailSpec&) = default;
};

struct SmbSpec {
  std::size_t n = 1000;
  std::size_t seeds = 32;

  friend bool operator==(const SmbSpec&, const SmbSpec&) = default;
};

struct ProbeSpec {
  double B = 1.0;
  double beta = 1.0;
  std::size_t samples = 1000;

  friend bool operator==(const ProbeSpec&, const ProbeSpec&) = default;
};

struct ExperimentConfig {
  MapSpec map;
  SweepSpec sweep;
  OrbitSpec orbit;
  UlamSpec ulam;
  InduceSpec induce;
  TailSpec tail;
  SmbSpec smb;
  ProbeSpec probe;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Line-oriented "key = value" text; '#' starts a comment. Unknown keys and
// malformed values raise ConfigError with the line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

// Every key accepted by parse_config, in serialization order.
const std::vector<std::string>& config_keys();

// Applies `param = value` to a map spec (sweep parameter names: d, slope, a,
// t, a0, alpha).
MapSpec with_parameter(MapSpec spec, std::string_view param, double value);

MapSystem build_map(const MapSpec& spec);

}  // namespace srblab::experiment
