#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anolab/optim.hpp"
#include "anolab/problems.hpp"

namespace anolab {

enum class ProblemKind { kQuadratic, kRosenbrock, kLogreg, kFlat };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kQuadratic;
  std::size_t dim = 10;
  double condition = 10.0;       // quadratic
  std::size_t samples = 2000;    // logreg
  double separation = 2.0;       // logreg
  std::size_t batch_size = 32;   // logreg

  /// The logreg dataset is drawn from `seed`; the other kinds ignore it.
  ProblemPtr build(std::uint64_t seed) const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Initial point: a named initializer or explicit coordinates.
struct StartPoint {
  enum class Kind { kDefault, kZeros, kOnes, kNormal, kExplicit };
  Kind kind = Kind::kDefault;
  std::vector<double> values;  // kExplicit only

  /// kDefault is the problem's conventional start; kNormal draws N(0, 1)
  /// from the kInit stream of `seed`.
  std::vector<double> resolve(const Problem& problem, std::uint64_t seed) const;

  friend bool operator==(const StartPoint&, const StartPoint&) = default;
};

struct RunConfig {
  ProblemSpec problem;
  OptimizerSpec optimizer;
  std::int64_t steps = 10000;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::int64_t record_every = 100;
  StartPoint x0;
  /// Extra steps to record besides 1, multiples of record_every, and the
  /// last step.
  std::vector<std::int64_t> checkpoints;

  /// Throws ConfigError.
  void validate() const;
};

struct TraceRow {
  std::int64_t k = 0;
  double loss = 0.0;           // f(x_k)
  double grad_norm_sq = 0.0;   // |grad f(x_k)|^2, exact gradient
  double lr = 0.0;
  double beta1 = 0.0;
  double mismatch_rate = 0.0;  // sign(m_k) vs sign(grad f(x_k))
  double param_norm = 0.0;     // |x_k|

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct Trace {
  std::vector<TraceRow> rows;
  /// Step at which the run hit a non-finite loss, gradient or parameter.
  std::optional<std::int64_t> diverged_at;
  /// Parameters after the last completed step.
  std::vector<double> final_x;

  bool diverged() const noexcept { return diverged_at.has_value(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Runs `config.steps` updates on a problem built from config.problem.
Trace run(const RunConfig& config);

/// Same loop on a caller-supplied problem (config.problem is ignored).
Trace run(const RunConfig& config, const Problem& problem);

/// Fraction of coordinates with nonzero true gradient where tri_sign(m)
/// differs from tri_sign(grad). 0 when every gradient coordinate is zero.
double mismatch_rate(std::span<const double> m, std::span<const double> true_grad);

/// Prefix minimum of the recorded squared gradient norms, as (k, min) pairs.
/// Throws DomainError on an empty trace.
std::vector<std::pair<std::int64_t, double>> running_min_envelope(const Trace& trace);

/// Least-squares slope of ln(y) against ln(k). Needs >= 3 points, all
/// coordinates > 0; throws DomainError otherwise.
double fit_loglog_slope(std::span<const std::pair<double, double>> points);

struct SummaryRow {
  std::string group;
  std::string optimizer;
  double sigma = 0.0;
  std::string metric;
  std::vector<double> per_seed;  // one value per seed, NaN for diverged runs
  double mean = 0.0;             // over non-diverged seeds
  double ci95 = 0.0;             // 1.96 * sample stddev / sqrt(seeds)
  int seeds = 0;                 // seeds included in mean
  int diverged = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Aggregates per-seed values. A non-finite value marks a diverged seed: it
/// is counted in `diverged` and left out of the mean. ci95 is NaN with fewer
/// than two included seeds.
SummaryRow summarize(std::string group, std::string optimizer, double sigma, std::string metric,
                     std::span<const double> values);

struct NamedOptimizer {
  std::string name;
  OptimizerSpec spec;
};

struct SweepOptions {
  int seeds = 5;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned jobs = 0;
};

/// Default noise levels for sweeps.
inline constexpr double kDefaultSigmas[] = {0.0, 0.01, 0.05, 0.10, 0.20};

/// Runs every (sigma, optimizer, seed) triple from `base` (seed i uses
/// base.seed + i) and returns, per (sigma, optimizer), one row per metric:
/// final_loss, final_grad_norm_sq and, for logreg, final_accuracy.
std::vector<SummaryRow> noise_sweep(std::span<const double> sigmas,
                                    std::span<const NamedOptimizer> optimizers,
                                    const RunConfig& base, const SweepOptions& options);

/// Ablation row label and preset, in display order.
struct AblationRow {
  std::string_view label;
  Preset preset;
};
extern const std::vector<AblationRow> kAblationRows;

/// The ablation presets with base.optimizer's lr schedule, epsilon and
/// weight decay applied; betas and beta1 schedule come from each preset.
std::vector<NamedOptimizer> ablation_optimizers(const OptimizerSpec& base);

/// One summary group per ablation row, in order.
std::vector<SummaryRow> ablation_grid(const RunConfig& base, const SweepOptions& options);

/// Final metrics of one run: loss, squared gradient norm and accuracy (NaN
/// unless the problem is logreg), evaluated at trace.final_x.
struct FinalMetrics {
  double loss = 0.0;
  double grad_norm_sq = 0.0;
  double accuracy = 0.0;
};
FinalMetrics final_metrics(const Problem& problem, const Trace& trace);

/// Runs `configs` on up to `jobs` threads; results are in input order.
std::vector<Trace> run_many(std::span<const RunConfig> configs, unsigned jobs);

}  // namespace anolab
