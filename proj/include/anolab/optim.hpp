#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "anolab/schedules.hpp"

namespace anolab {

// Composable first-order update engine.
//
// Every optimizer here is one instance of
//
//   x <- x - lr_k * (magnitude / divisor) * direction - lr_k * weight_decay * x
//
// where magnitude, direction and divisor are picked from independent axes.
// Ano is {yogi divisor, |g| magnitude, sign(m) direction}; Adam/AdamW is
// {adam divisor, |m_hat| magnitude, sign(m) direction}; Signum has divisor 1
// and unit magnitude. Lion does not fit the pattern (it takes the sign of an
// interpolation of m and g) and has its own step.

enum class SecondMoment { kNone, kAdam, kYogi };
enum class Magnitude { kGradAbs, kMomAbs, kUnit };
enum class Direction { kMomSign, kGradSign };
enum class StepRule { kComposable, kLion };

struct OptimizerSpec {
  SecondMoment second_moment = SecondMoment::kYogi;
  Magnitude magnitude = Magnitude::kGradAbs;
  Direction direction = Direction::kMomSign;
  /// Divide m by (1 - beta1^k), and v by (1 - beta2^k) for the adam kind.
  bool bias_correct = false;
  ScheduleKind beta1_schedule = ScheduleKind::kB1Constant;
  double beta1 = 0.92;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  /// Decoupled: applied as -lr_k * weight_decay * x.
  double weight_decay = 0.0;
  ScheduleKind lr_schedule = ScheduleKind::kLrConstant;
  double base_lr = 1e-3;
  StepRule rule = StepRule::kComposable;

  Schedule beta1_sched() const { return {beta1_schedule, beta1}; }
  Schedule lr_sched() const { return {lr_schedule, base_lr}; }

  /// Throws ConfigError when a field is out of range. epsilon may be 0.
  void validate() const;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

enum class Preset {
  kAno,
  kAnolog,
  kAnoSqrt,
  kAnoAll,
  kAdam,
  kAdamW,
  kYogi,
  kSignumWd,
  kYogiSignum,
  kSignumWdGradNorm,
  kAdamGradNorm,
  kGrams,
  kLion,
};

inline constexpr Preset kAllPresets[] = {
    Preset::kAno,      Preset::kAnolog,     Preset::kAnoSqrt,         Preset::kAnoAll,
    Preset::kAdam,     Preset::kAdamW,      Preset::kYogi,            Preset::kSignumWd,
    Preset::kYogiSignum, Preset::kSignumWdGradNorm, Preset::kAdamGradNorm, Preset::kGrams,
    Preset::kLion,
};

std::string_view preset_name(Preset preset) noexcept;

/// Throws ConfigError for unknown names.
Preset parse_preset(std::string_view name);

OptimizerSpec preset(Preset preset);
OptimizerSpec preset(std::string_view name);

/// Per-run optimizer memory. `k` is the index of the next update (1-based).
struct OptState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t k = 1;

  OptState() = default;
  explicit OptState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}

  std::size_t dim() const noexcept { return m.size(); }

  friend bool operator==(const OptState&, const OptState&) = default;
};

/// -1, 0 or +1. sign(0) is 0.
constexpr int tri_sign(double x) noexcept { return (x > 0.0) - (x < 0.0); }

std::vector<double> ema_update_m(std::span<const double> m, std::span<const double> g,
                                 double beta1);
std::vector<double> yogi_update_v(std::span<const double> v, std::span<const double> g,
                                  double beta2);
std::vector<double> adam_update_v(std::span<const double> v, std::span<const double> g,
                                  double beta2);

/// Hyperparameter values in effect for one update.
struct StepInfo {
  double lr = 0.0;
  double beta1 = 0.0;
};

/// Applies one update in place: advances `state` (m, v, k) and moves `x`.
/// Dispatches to lion_step when spec.rule is kLion. On error neither `x`
/// nor `state` is modified.
///
/// Throws DimensionError on length mismatch and NumericError naming the first
/// non-finite coordinate of g or x.
StepInfo step(const OptimizerSpec& spec, OptState& state, std::span<double> x,
              std::span<const double> g);

struct LionParams {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double lr = 1e-4;
  double weight_decay = 0.0;
};

/// Lion: x -= lr * (sign(beta1 * m + (1 - beta1) * g) + weight_decay * x),
/// then m = beta2 * m + (1 - beta2) * g. Same error contract as step().
void lion_step(OptState& state, std::span<double> x, std::span<const double> g,
               const LionParams& params);

}  // namespace anolab
