#include "anolab/optim.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "anolab/errors.hpp"

namespace anolab {
namespace {

constexpr std::array<std::pair<Preset, std::string_view>, 13> kPresetNames{{
    {Preset::kAno, "ano"},
    {Preset::kAnolog, "anolog"},
    {Preset::kAnoSqrt, "ano_sqrt"},
    {Preset::kAnoAll, "ano_all"},
    {Preset::kAdam, "adam"},
    {Preset::kAdamW, "adamw"},
    {Preset::kYogi, "yogi"},
    {Preset::kSignumWd, "signum_wd"},
    {Preset::kYogiSignum, "yogi_signum"},
    {Preset::kSignumWdGradNorm, "signum_wd_gradnorm"},
    {Preset::kAdamGradNorm, "adam_gradnorm"},
    {Preset::kGrams, "grams"},
    {Preset::kLion, "lion"},
}};

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void require_finite(std::span<const double> values, const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(std::string(name) + "[" + std::to_string(i) + "] is not finite (" +
                             std::to_string(values[i]) + ")",
                         i);
    }
  }
}

void check_step_args(const OptState& state, std::span<const double> x,
                     std::span<const double> g) {
  require_same_length(x.size(), g.size(), "step: x and g");
  require_same_length(x.size(), state.m.size(), "step: x and state.m");
  require_same_length(x.size(), state.v.size(), "step: x and state.v");
  if (state.k < 1) throw DomainError("step: state.k must be >= 1");
  require_finite(g, "g");
  require_finite(x, "x");
}

inline double ema(double m, double g, double beta1) { return beta1 * m + (1.0 - beta1) * g; }

inline double yogi(double v, double g, double beta2) {
  const double g2 = g * g;
  return v - (1.0 - beta2) * tri_sign(v - g2) * g2;
}

inline double adam(double v, double g, double beta2) {
  return beta2 * v + (1.0 - beta2) * g * g;
}

template <typename F>
std::vector<double> elementwise(std::span<const double> a, std::span<const double> g, F f,
                                const char* what) {
  require_same_length(a.size(), g.size(), what);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], g[i]);
  return out;
}

}  // namespace

void OptimizerSpec::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)", "beta1");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)", "beta2");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be finite and >= 0", "epsilon");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("weight_decay must be finite and >= 0", "weight_decay");
  }
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) {
    throw ConfigError("lr must be finite and > 0", "lr");
  }
  if (!is_lr_kind(lr_schedule)) {
    throw ConfigError("lr_schedule must be a learning-rate schedule", "lr_schedule");
  }
  if (!is_beta1_kind(beta1_schedule)) {
    throw ConfigError("beta1_schedule must be a beta1 schedule", "beta1_schedule");
  }
}

std::string_view preset_name(Preset preset) noexcept {
  for (const auto& [p, name] : kPresetNames) {
    if (p == preset) return name;
  }
  return "?";
}

Preset parse_preset(std::string_view name) {
  for (const auto& [p, n] : kPresetNames) {
    if (n == name) return p;
  }
  throw ConfigError("unknown optimizer preset '" + std::string(name) + "'", "optimizer");
}

OptimizerSpec preset(Preset p) {
  // Ano-derived rows keep Ano's betas; the named baselines use their usual ones.
  OptimizerSpec ano;
  OptimizerSpec adam = ano;
  adam.second_moment = SecondMoment::kAdam;
  adam.magnitude = Magnitude::kMomAbs;
  adam.bias_correct = true;
  adam.beta1 = 0.9;
  adam.beta2 = 0.999;

  switch (p) {
    case Preset::kAno:
      return ano;
    case Preset::kAnolog:
      ano.beta1_schedule = ScheduleKind::kB1Log;
      return ano;
    case Preset::kAnoSqrt:
      ano.beta1_schedule = ScheduleKind::kB1Sqrt;
      return ano;
    case Preset::kAnoAll:
      ano.beta1_schedule = ScheduleKind::kB1Harmonic;
      return ano;
    case Preset::kAdam:
    case Preset::kAdamW:
      // Weight decay is always decoupled, so the two differ only by name.
      return adam;
    case Preset::kGrams:
      adam.direction = Direction::kGradSign;
      return adam;
    case Preset::kYogi: {
      OptimizerSpec s = adam;
      s.second_moment = SecondMoment::kYogi;
      s.bias_correct = false;
      return s;
    }
    case Preset::kSignumWd: {
      OptimizerSpec s = ano;
      s.second_moment = SecondMoment::kNone;
      s.magnitude = Magnitude::kUnit;
      s.beta1 = 0.9;
      return s;
    }
    case Preset::kYogiSignum:
      ano.magnitude = Magnitude::kUnit;
      return ano;
    case Preset::kSignumWdGradNorm:
      ano.second_moment = SecondMoment::kNone;
      return ano;
    case Preset::kAdamGradNorm:
      ano.second_moment = SecondMoment::kAdam;
      return ano;
    case Preset::kLion: {
      OptimizerSpec s = ano;
      s.rule = StepRule::kLion;
      s.second_moment = SecondMoment::kNone;
      s.magnitude = Magnitude::kUnit;
      s.beta1 = 0.9;
      s.beta2 = 0.99;
      return s;
    }
  }
  throw ConfigError("unhandled preset");
}

OptimizerSpec preset(std::string_view name) { return preset(parse_preset(name)); }

std::vector<double> ema_update_m(std::span<const double> m, std::span<const double> g,
                                 double beta1) {
  return elementwise(m, g, [beta1](double a, double b) { return ema(a, b, beta1); },
                     "ema_update_m");
}

std::vector<double> yogi_update_v(std::span<const double> v, std::span<const double> g,
                                  double beta2) {
  return elementwise(v, g, [beta2](double a, double b) { return yogi(a, b, beta2); },
                     "yogi_update_v");
}

std::vector<double> adam_update_v(std::span<const double> v, std::span<const double> g,
                                  double beta2) {
  return elementwise(v, g, [beta2](double a, double b) { return adam(a, b, beta2); },
                     "adam_update_v");
}

StepInfo step(const OptimizerSpec& spec, OptState& state, std::span<double> x,
              std::span<const double> g) {
  check_step_args(state, x, g);
  const std::int64_t k = state.k;
  const double lr = lr_at(spec.lr_sched(), k);

  if (spec.rule == StepRule::kLion) {
    lion_step(state, x, g, {spec.beta1, spec.beta2, lr, spec.weight_decay});
    return {lr, spec.beta1};
  }

  const double beta1 = beta1_at(spec.beta1_sched(), k);
  const double beta2 = spec.beta2;
  const double decay = lr * spec.weight_decay;

  double m_scale = 1.0;
  double v_scale = 1.0;
  if (spec.bias_correct) {
    m_scale = 1.0 - std::pow(beta1, static_cast<double>(k));
    if (spec.second_moment == SecondMoment::kAdam) {
      v_scale = 1.0 - std::pow(beta2, static_cast<double>(k));
    }
  }

  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gi = g[i];
    const double m = ema(state.m[i], gi, beta1);
    double v = state.v[i];
    switch (spec.second_moment) {
      case SecondMoment::kNone:
        break;
      case SecondMoment::kAdam:
        v = adam(v, gi, beta2);
        break;
      case SecondMoment::kYogi:
        v = yogi(v, gi, beta2);
        break;
    }
    state.m[i] = m;
    state.v[i] = v;

    double magnitude = 1.0;
    switch (spec.magnitude) {
      case Magnitude::kGradAbs:
        magnitude = std::abs(gi);
        break;
      case Magnitude::kMomAbs:
        magnitude = std::abs(spec.bias_correct ? m / m_scale : m);
        break;
      case Magnitude::kUnit:
        break;
    }
    const int direction = spec.direction == Direction::kMomSign ? tri_sign(m) : tri_sign(gi);
    const double divisor = spec.second_moment == SecondMoment::kNone
                               ? 1.0
                               : std::sqrt(v / v_scale) + spec.epsilon;

    double move = 0.0;
    if (direction != 0 && magnitude != 0.0) move = (magnitude / divisor) * direction;
    x[i] = x[i] - lr * move - decay * x[i];
  }
  ++state.k;
  return {lr, beta1};
}

void lion_step(OptState& state, std::span<double> x, std::span<const double> g,
               const LionParams& params) {
  check_step_args(state, x, g);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = params.beta1 * state.m[i] + (1.0 - params.beta1) * g[i];
    x[i] = x[i] - params.lr * (tri_sign(c) + params.weight_decay * x[i]);
    state.m[i] = params.beta2 * state.m[i] + (1.0 - params.beta2) * g[i];
  }
  ++state.k;
}

}  // namespace anolab
