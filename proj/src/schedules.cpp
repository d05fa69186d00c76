#include "anolab/schedules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "anolab/errors.hpp"

namespace anolab {
namespace {

constexpr std::array<std::pair<ScheduleKind, std::string_view>, 6> kNames{{
    {ScheduleKind::kLrConstant, "constant"},
    {ScheduleKind::kLrPower34, "power34"},
    {ScheduleKind::kB1Constant, "b1:constant"},
    {ScheduleKind::kB1Sqrt, "b1:sqrt"},
    {ScheduleKind::kB1Log, "b1:log"},
    {ScheduleKind::kB1Harmonic, "b1:harmonic"},
}};

// Largest double strictly below 1.
constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;

void check_step(std::int64_t k) {
  if (k < 1) {
    throw DomainError("schedule step counter must be >= 1, got " + std::to_string(k));
  }
}

}  // namespace

bool is_lr_kind(ScheduleKind kind) noexcept {
  return kind == ScheduleKind::kLrConstant || kind == ScheduleKind::kLrPower34;
}

bool is_beta1_kind(ScheduleKind kind) noexcept { return !is_lr_kind(kind); }

std::string_view to_string(ScheduleKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown schedule '" + std::string(name) + "'");
}

void Schedule::validate() const {
  if (is_lr_kind(kind)) {
    if (!(base > 0.0) || !std::isfinite(base)) {
      throw ConfigError("learning rate must be finite and > 0");
    }
  } else if (kind == ScheduleKind::kB1Constant) {
    if (!(base >= 0.0 && base < 1.0)) {
      throw ConfigError("beta1 must lie in [0, 1)");
    }
  }
}

double lr_at(const Schedule& schedule, std::int64_t k) {
  check_step(k);
  switch (schedule.kind) {
    case ScheduleKind::kLrConstant:
      return schedule.base;
    case ScheduleKind::kLrPower34:
      // The k-from-0 form eta / (k + 2)^(3/4) shifted to a 1-based counter.
      return schedule.base * std::pow(static_cast<double>(k) + 1.0, -0.75);
    default:
      throw ConfigError("'" + std::string(to_string(schedule.kind)) +
                        "' is not a learning-rate schedule");
  }
}

double beta1_at(const Schedule& schedule, std::int64_t k) {
  check_step(k);
  const double kk = static_cast<double>(k);
  double beta = 0.0;
  switch (schedule.kind) {
    case ScheduleKind::kB1Constant:
      beta = schedule.base;
      break;
    case ScheduleKind::kB1Sqrt:
      beta = 1.0 - 1.0 / std::sqrt(kk + 1.0);
      break;
    case ScheduleKind::kB1Log:
      beta = 1.0 - 1.0 / std::log(kk + 2.0);
      break;
    case ScheduleKind::kB1Harmonic:
      beta = 1.0 - 1.0 / kk;
      break;
    default:
      throw ConfigError("'" + std::string(to_string(schedule.kind)) +
                        "' is not a beta1 schedule");
  }
  return std::clamp(beta, 0.0, kBelowOne);
}

}  // namespace anolab
