#include <cmath>
#include <random>

#include "anolab/errors.hpp"
#include "anolab/schedules.hpp"
#include "doctest.h"

using namespace anolab;

TEST_CASE("lr schedules") {
  // Reference values from mpmath at 30 digits.
  CHECK(lr_at({ScheduleKind::kLrPower34, 0.1}, 1) ==
        doctest::Approx(0.0594603557501360566).epsilon(1e-14));
  CHECK(lr_at({ScheduleKind::kLrPower34, 1.0}, 14) ==
        doctest::Approx(0.131199311417695361).epsilon(1e-14));
  for (std::int64_t k : {1, 2, 17, 100000}) {
    CHECK(lr_at({ScheduleKind::kLrConstant, 3e-4}, k) == 3e-4);
  }
}

TEST_CASE("beta1 schedules") {
  CHECK(beta1_at({ScheduleKind::kB1Log, 0.0}, 1) ==
        doctest::Approx(0.0897607733731626064).epsilon(1e-14));
  CHECK(beta1_at({ScheduleKind::kB1Harmonic, 0.0}, 1) == 0.0);
  CHECK(beta1_at({ScheduleKind::kB1Sqrt, 0.0}, 3) == 0.5);
  CHECK(beta1_at({ScheduleKind::kB1Constant, 0.92}, 12345) == 0.92);
}

TEST_CASE("schedule domain and kind errors") {
  CHECK_THROWS_AS(lr_at({ScheduleKind::kLrConstant, 0.1}, 0), DomainError);
  CHECK_THROWS_AS(beta1_at({ScheduleKind::kB1Log, 0.0}, -3), DomainError);
  CHECK_THROWS_AS(lr_at({ScheduleKind::kB1Log, 0.0}, 1), ConfigError);
  CHECK_THROWS_AS(beta1_at({ScheduleKind::kLrPower34, 1.0}, 1), ConfigError);
  CHECK_THROWS_AS((Schedule{ScheduleKind::kB1Constant, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((Schedule{ScheduleKind::kLrConstant, 0.0}.validate()), ConfigError);
}

TEST_CASE("schedule names round-trip") {
  for (auto kind : {ScheduleKind::kLrConstant, ScheduleKind::kLrPower34, ScheduleKind::kB1Constant,
                    ScheduleKind::kB1Sqrt, ScheduleKind::kB1Log, ScheduleKind::kB1Harmonic}) {
    CHECK(parse_schedule_kind(to_string(kind)) == kind);
  }
  CHECK(parse_schedule_kind("b1:log") == ScheduleKind::kB1Log);
  CHECK_THROWS_AS(parse_schedule_kind("cosine"), ConfigError);
}

TEST_CASE("monotone and range") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> pick(1, 1'000'000'000);
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 1; k < 3000; ++k) ks.push_back(k);
  for (int i = 0; i < 2000; ++i) ks.push_back(pick(rng));

  for (const auto k : ks) {
    const double a = lr_at({ScheduleKind::kLrPower34, 0.3}, k);
    const double b = lr_at({ScheduleKind::kLrPower34, 0.3}, k + 1);
    REQUIRE(a > 0.0);
    REQUIRE(b < a);
    for (auto kind : {ScheduleKind::kB1Sqrt, ScheduleKind::kB1Log, ScheduleKind::kB1Harmonic}) {
      const double x = beta1_at({kind, 0.0}, k);
      const double y = beta1_at({kind, 0.0}, k + 1);
      REQUIRE(x >= 0.0);
      REQUIRE(x < 1.0);
      REQUIRE(y >= x);
    }
  }
}

TEST_CASE("log schedule limit and no clamping from below") {
  const auto threshold = static_cast<std::int64_t>(std::ceil(std::exp(10.0))) - 2;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> pick(threshold, std::int64_t{1} << 50);
  CHECK(beta1_at({ScheduleKind::kB1Log, 0.0}, threshold) >= 0.9);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(beta1_at({ScheduleKind::kB1Log, 0.0}, pick(rng)) >= 0.9);
  }
  // ln 3 > 1, so the unclamped value is already positive at k = 1.
  CHECK(1.0 - 1.0 / std::log(3.0) > 0.0);
}
