#pragma once

#include <cstdint>
#include <string_view>

namespace anolab {

/// Closed-form schedules evaluated from the 1-based step counter.
enum class ScheduleKind {
  kLrConstant,  // eta
  kLrPower34,   // eta * (k + 1)^(-3/4)
  kB1Constant,  // beta1
  kB1Sqrt,      // 1 - (k + 1)^(-1/2)
  kB1Log,       // 1 - 1 / ln(k + 2)
  kB1Harmonic,  // 1 - 1 / k
};

bool is_lr_kind(ScheduleKind kind) noexcept;
bool is_beta1_kind(ScheduleKind kind) noexcept;

/// Config-file spelling: "constant", "power34", "b1:constant", "b1:sqrt",
/// "b1:log", "b1:harmonic".
std::string_view to_string(ScheduleKind kind) noexcept;

/// Inverse of to_string. Throws ConfigError on unknown names.
ScheduleKind parse_schedule_kind(std::string_view name);

struct Schedule {
  ScheduleKind kind = ScheduleKind::kLrConstant;
  /// eta for the lr kinds, beta1 for kB1Constant, ignored otherwise.
  double base = 0.0;

  /// Throws ConfigError if base is out of range for the kind.
  void validate() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Learning rate at step k (k >= 1). Throws DomainError for k < 1 and
/// ConfigError if `schedule` is not an lr kind.
double lr_at(const Schedule& schedule, std::int64_t k);

/// beta1 at step k (k >= 1), clamped to [0, 1). Throws DomainError for k < 1
/// and ConfigError if `schedule` is not a beta1 kind.
double beta1_at(const Schedule& schedule, std::int64_t k);

}  // namespace anolab
