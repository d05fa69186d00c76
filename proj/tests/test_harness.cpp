#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "anolab/errors.hpp"
#include "anolab/harness.hpp"
#include "doctest.h"

using namespace anolab;

namespace {

RunConfig quad_config(std::size_t dim, double cond, const char* opt, double lr, std::int64_t steps) {
  RunConfig c;
  c.problem.kind = ProblemKind::kQuadratic;
  c.problem.dim = dim;
  c.problem.condition = cond;
  c.optimizer = preset(opt);
  c.optimizer.base_lr = lr;
  c.steps = steps;
  c.record_every = 1;
  return c;
}

}  // namespace

TEST_CASE("single step on a 1-d quadratic") {
  auto c = quad_config(1, 1.0, "ano", 0.1, 1);
  const auto t = run(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].k == 1);
  CHECK(t.rows[0].loss == 0.5);
  CHECK(t.rows[0].grad_norm_sq == 1.0);
  CHECK(t.rows[0].lr == 0.1);
  CHECK(t.rows[0].beta1 == 0.92);
  CHECK(t.rows[0].param_norm == 1.0);
  CHECK(std::abs(t.final_x[0]) <= 1e-7);
  CHECK_FALSE(t.diverged());
}

TEST_CASE("recorded steps") {
  auto c = quad_config(3, 10.0, "ano", 0.01, 250);
  c.record_every = 100;
  c.checkpoints = {7, 150};
  const auto t = run(c);
  std::vector<std::int64_t> ks;
  for (const auto& r : t.rows) ks.push_back(r.k);
  CHECK(ks == std::vector<std::int64_t>{1, 7, 100, 150, 200, 250});
}

TEST_CASE("without noise the seed does not matter on deterministic problems") {
  auto c = quad_config(5, 30.0, "anolog", 0.05, 200);
  c.seed = 1;
  const auto a = run(c);
  c.seed = 999;
  CHECK(run(c) == a);
}

TEST_CASE("seeded runs are reproducible") {
  auto c = quad_config(5, 30.0, "ano", 0.05, 300);
  c.sigma = 0.3;
  c.seed = 4;
  const auto a = run(c);
  CHECK(run(c) == a);
  c.seed = 5;
  CHECK_FALSE(run(c) == a);

  RunConfig l;
  l.problem.kind = ProblemKind::kLogreg;
  l.problem.dim = 4;
  l.problem.samples = 200;
  l.optimizer = preset("adamw");
  l.steps = 100;
  l.record_every = 10;
  l.sigma = 0.1;
  l.seed = 3;
  CHECK(run(l) == run(l));
}

TEST_CASE("flat objective leaves x in place") {
  RunConfig c;
  c.problem.kind = ProblemKind::kFlat;
  c.problem.dim = 4;
  c.optimizer = preset("ano");
  c.steps = 50;
  c.record_every = 10;
  c.x0.kind = StartPoint::Kind::kExplicit;
  c.x0.values = {1.0, -2.0, 3.0, 0.5};
  const auto t = run(c);
  CHECK(t.final_x == c.x0.values);
  for (const auto& r : t.rows) CHECK(r.mismatch_rate == 0.0);
}

TEST_CASE("trace metrics use the exact gradient") {
  auto c = quad_config(4, 10.0, "ano", 0.01, 1);
  const auto clean = run(c);
  c.sigma = 10.0;
  c.seed = 2;
  const auto noisy = run(c);
  CHECK(noisy.rows[0].loss == clean.rows[0].loss);
  CHECK(noisy.rows[0].grad_norm_sq == clean.rows[0].grad_norm_sq);
  CHECK_FALSE(noisy.final_x == clean.final_x);
}

TEST_CASE("divergence is flagged instead of propagated") {
  RunConfig c;
  c.problem.kind = ProblemKind::kRosenbrock;
  c.problem.dim = 4;
  c.optimizer = preset("signum_wd_gradnorm");
  c.optimizer.base_lr = 0.1;
  c.steps = 2000;
  c.record_every = 1;
  const auto t = run(c);
  REQUIRE(t.diverged());
  CHECK(*t.diverged_at <= 2000);
  for (const auto& r : t.rows) {
    CHECK(std::isfinite(r.loss));
    CHECK(r.k < *t.diverged_at);
  }
}

TEST_CASE("start points") {
  const Rosenbrock r(4);
  CHECK(StartPoint{}.resolve(r, 0) == r.default_start());
  CHECK(StartPoint{StartPoint::Kind::kZeros, {}}.resolve(r, 0) == std::vector<double>(4, 0.0));
  CHECK(StartPoint{StartPoint::Kind::kOnes, {}}.resolve(r, 0) == std::vector<double>(4, 1.0));
  const StartPoint normal{StartPoint::Kind::kNormal, {}};
  CHECK(normal.resolve(r, 3) == normal.resolve(r, 3));
  CHECK_FALSE(normal.resolve(r, 3) == normal.resolve(r, 4));
  CHECK_THROWS_AS((StartPoint{StartPoint::Kind::kExplicit, {1.0}}.resolve(r, 0)), ConfigError);
}

TEST_CASE("run config validation") {
  auto c = quad_config(2, 1.0, "ano", 0.1, 10);
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = quad_config(2, 1.0, "ano", 0.1, 10);
  c.sigma = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = quad_config(2, 1.0, "ano", 0.1, 10);
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("mismatch_rate") {
  CHECK(mismatch_rate(std::vector{1.0, -1.0, 1.0, 0.0}, std::vector{1.0, 1.0, -1.0, 2.0}) ==
        0.75);
  CHECK(mismatch_rate(std::vector{1.0, 5.0}, std::vector{0.0, 0.0}) == 0.0);
  CHECK(mismatch_rate(std::vector{1.0, 5.0}, std::vector{0.0, 3.0}) == 0.0);
  CHECK_THROWS_AS(mismatch_rate(std::vector{1.0}, std::vector{1.0, 2.0}), DimensionError);
}

TEST_CASE("running_min_envelope") {
  Trace t;
  for (auto [k, g] : {std::pair{1, 5.0}, {2, 3.0}, {3, 4.0}, {4, 1.0}, {5, 2.0}}) {
    TraceRow row;
    row.k = k;
    row.grad_norm_sq = g;
    t.rows.push_back(row);
  }
  const auto env = running_min_envelope(t);
  std::vector<double> mins;
  for (const auto& e : env) mins.push_back(e.second);
  CHECK(mins == std::vector{5.0, 3.0, 3.0, 1.0, 1.0});
  CHECK(env.back().first == 5);
  CHECK_THROWS_AS(running_min_envelope(Trace{}), DomainError);
}

TEST_CASE("fit_loglog_slope") {
  std::vector<std::pair<double, double>> pts;
  for (double k : {1.0, 10.0, 100.0, 1000.0}) pts.emplace_back(k, 3.0 * std::pow(k, -0.5));
  CHECK(fit_loglog_slope(pts) == doctest::Approx(-0.5).epsilon(1e-12));
  pts.resize(2);
  CHECK_THROWS_AS(fit_loglog_slope(pts), DomainError);
  std::vector<std::pair<double, double>> bad{{1.0, 1.0}, {2.0, 0.0}, {3.0, 1.0}};
  CHECK_THROWS_AS(fit_loglog_slope(bad), DomainError);
}

TEST_CASE("summarize") {
  const auto row = summarize("g", "ano", 0.1, "final_loss", std::vector{1.0, 2.0, 3.0});
  CHECK(row.mean == doctest::Approx(2.0));
  CHECK(row.ci95 == doctest::Approx(1.96 / std::sqrt(3.0)));
  CHECK(row.seeds == 3);
  CHECK(row.diverged == 0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto div = summarize("g", "ano", 0.1, "final_loss", std::vector{1.0, nan, 3.0});
  CHECK(div.mean == doctest::Approx(2.0));
  CHECK(div.seeds == 2);
  CHECK(div.diverged == 1);

  const auto lone = summarize("g", "ano", 0.1, "final_loss", std::vector{1.0, nan});
  CHECK(std::isnan(lone.ci95));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(20);
  for (auto& x : v) x = n(rng);
  const auto ref = summarize("g", "o", 0, "m", v);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto p = summarize("g", "o", 0, "m", v);
    CHECK(p.mean == doctest::Approx(ref.mean).epsilon(1e-12));
    CHECK(p.ci95 == doctest::Approx(ref.ci95).epsilon(1e-12));
  }
}

TEST_CASE("noise sweep shape") {
  auto base = quad_config(4, 10.0, "ano", 0.01, 50);
  base.record_every = 50;
  const NamedOptimizer opts[] = {{"ano", base.optimizer}, {"adamw", preset("adamw")}};
  const auto rows = noise_sweep(kDefaultSigmas, opts, base, {3, 1});
  CHECK(rows.size() == 5 * 2 * 2);
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& r : rows) {
    cells.insert({r.group, r.optimizer});
    CHECK(r.per_seed.size() == 3);
    if (r.sigma == 0.0) CHECK(r.ci95 == 0.0);
  }
  CHECK(cells.size() == 10);
  CHECK(rows.front().group == "sigma=0");
  CHECK(rows.back().group == "sigma=0.2");
  CHECK_THROWS_AS(noise_sweep(kDefaultSigmas, opts, base, {1, 1}), ConfigError);
}

TEST_CASE("logreg sweep reports accuracy") {
  RunConfig base;
  base.problem.kind = ProblemKind::kLogreg;
  base.problem.dim = 3;
  base.problem.samples = 100;
  base.optimizer = preset("ano");
  base.steps = 20;
  base.record_every = 20;
  const double sigmas[] = {0.0};
  const NamedOptimizer opts[] = {{"ano", base.optimizer}};
  const auto rows = noise_sweep(sigmas, opts, base, {2, 1});
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].metric == "final_accuracy");
  CHECK(rows[2].mean >= 0.0);
  CHECK(rows[2].mean <= 1.0);
}

TEST_CASE("ablation grid") {
  auto base = quad_config(6, 10.0, "ano", 0.01, 100);
  base.record_every = 100;
  base.sigma = 0.05;
  const auto rows = ablation_grid(base, {2, 1});
  std::vector<std::string> groups;
  for (const auto& r : rows) {
    if (groups.empty() || groups.back() != r.group) groups.push_back(r.group);
  }
  std::vector<std::string> expected;
  for (const auto& a : kAblationRows) expected.emplace_back(a.label);
  CHECK(groups == expected);
  CHECK(groups.size() == 11);

  // The Ano row equals a direct run with the same settings.
  const auto it = std::find_if(rows.begin(), rows.end(), [](const SummaryRow& r) {
    return r.group == "Ano" && r.metric == "final_loss";
  });
  REQUIRE(it != rows.end());
  for (int s = 0; s < 2; ++s) {
    RunConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(s);
    const auto problem = c.problem.build(c.seed);
    const auto m = final_metrics(*problem, run(c, *problem));
    CHECK(it->per_seed[static_cast<std::size_t>(s)] == m.loss);
  }
}

TEST_CASE("run_many is independent of the thread count") {
  std::vector<RunConfig> configs;
  for (int i = 0; i < 6; ++i) {
    auto c = quad_config(5, 20.0, i % 2 ? "adamw" : "ano", 0.02, 200);
    c.sigma = 0.2;
    c.seed = static_cast<std::uint64_t>(i);
    c.record_every = 20;
    configs.push_back(c);
  }
  CHECK(run_many(configs, 4) == run_many(configs, 1));
}
