#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anolab/harness.hpp"

namespace anolab {

/// Resolved contents of a `key = value` experiment file.
///
/// Keys: problem, dim, condition, samples, separation, batch_size, optimizer,
/// lr, lr_schedule, beta1, beta1_schedule, beta2, epsilon, weight_decay,
/// steps, seeds, sigma, sigmas, record_every, x0.
///
/// beta1, beta2 and beta1_schedule stay unset unless given; each optimizer
/// then keeps its preset value (0.92 / 0.99 / constant for the Ano family).
struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<std::string> optimizers{"ano"};
  double lr = 1e-3;
  ScheduleKind lr_schedule = ScheduleKind::kLrConstant;
  std::optional<double> beta1;
  std::optional<ScheduleKind> beta1_schedule;
  std::optional<double> beta2;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  std::int64_t steps = 10000;
  int seeds = 5;
  double sigma = 0.0;
  std::vector<double> sigmas{std::begin(kDefaultSigmas), std::end(kDefaultSigmas)};
  std::int64_t record_every = 100;
  StartPoint x0;

  /// preset(name) with this config's overrides applied.
  OptimizerSpec optimizer_spec(std::string_view name) const;

  /// Single-run configuration for the first optimizer.
  RunConfig run_config(std::uint64_t seed = 0) const;

  std::vector<NamedOptimizer> named_optimizers() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the config text. Throws ConfigError carrying the key and the
/// 1-based line number (0 for cross-key checks).
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a file. Throws IoError if it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Canonical serialization; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

}  // namespace anolab
