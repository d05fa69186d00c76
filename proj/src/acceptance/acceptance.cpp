#include "anolab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "anolab/errors.hpp"
#include "anolab/harness.hpp"
#include "anolab/optim.hpp"
#include "anolab/parallel.hpp"
#include "anolab/problems.hpp"
#include "anolab/schedules.hpp"
#include "reference.hpp"

namespace anolab::acceptance {
namespace {

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

CriterionResult make(std::string id, std::string name, Suite suite) {
  CriterionResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.suite = suite;
  return r;
}

// Quadratic whose gradient turns NaN once x[0] drops below 0.5.
class NanTrap final : public Problem {
 public:
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "nan-trap"; }
  double loss(std::span<const double> x) const override {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]);
  }
  void grad(std::span<const double> x, std::span<double> out) const override {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out[0] = x[0] < 0.5 ? nan : x[0];
    out[1] = x[1];
  }
  using Problem::grad;
};

// Log-uniform magnitudes over six decades, random signs, 5% exact zeros.
std::vector<double> random_gradient(std::size_t d, Rng& rng) {
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> g(d);
  for (double& gi : g) {
    const double u = unit(rng);
    if (u < 0.05) {
      gi = 0.0;
    } else {
      gi = (u < 0.525 ? -1.0 : 1.0) * std::pow(10.0, exponent(rng));
    }
  }
  return g;
}

}  // namespace

std::string_view to_string(Suite suite) noexcept {
  switch (suite) {
    case Suite::kExactness:
      return "exactness";
    case Suite::kInvariants:
      return "invariants";
    case Suite::kLemmaDecay:
      return "lemma_decay";
    case Suite::kRateEnvelope:
      return "rate_envelope";
    case Suite::kNoiseOrdering:
      return "noise_ordering";
    case Suite::kAll:
      return "all";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (auto s : {Suite::kExactness, Suite::kInvariants, Suite::kLemmaDecay, Suite::kRateEnvelope,
                 Suite::kNoiseOrdering, Suite::kAll}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown acceptance suite '" + std::string(name) + "'", "suite");
}

// C1: first Ano step by hand, then ten steps against the frozen trace.
CriterionResult hand_trace_exactness() {
  auto r = make("C1", "hand-trace exactness", Suite::kExactness);

  OptimizerSpec spec = preset(Preset::kAno);
  spec.base_lr = 0.1;
  OptState state(1);
  std::vector<double> x{1.0};
  const std::vector<double> g{2.0};
  step(spec, state, x, g);
  const double m_err = std::abs(state.m[0] - 0.16);
  const double v_err = std::abs(state.v[0] - 0.04);
  const bool first_ok = m_err <= 1e-15 && v_err <= 1e-15 && std::abs(x[0]) <= 1e-7;

  OptimizerSpec spec2 = spec;
  spec2.weight_decay = 0.01;
  const Quadratic problem(2, 4.0);
  OptState s2(2);
  std::vector<double> x2{1.0, -0.5};
  double worst = 0.0;
  for (const auto& row : reference::kAnoQuadraticTrace) {
    step(spec2, s2, x2, problem.grad(x2));
    for (std::size_t i = 0; i < 2; ++i) {
      worst = std::max({worst, std::abs(x2[i] - row.x[i]), std::abs(s2.m[i] - row.m[i]),
                        std::abs(s2.v[i] - row.v[i])});
    }
  }
  r.passed = first_ok && worst <= 1e-12;
  r.detail = "m1=" + sci(state.m[0]) + " v1=" + sci(state.v[0]) + " |x1|=" + sci(std::abs(x[0])) +
             " fixture max err=" + sci(worst) + " (tol 1e-12)";
  return r;
}

// C2: preset(adamw) against the textbook AdamW step.
CriterionResult adamw_oracle_equivalence() {
  auto r = make("C2", "AdamW oracle equivalence", Suite::kExactness);
  constexpr std::size_t d = 6;
  OptimizerSpec spec = preset(Preset::kAdamW);
  spec.base_lr = 1e-2;
  spec.weight_decay = 0.05;
  reference::AdamW oracle(d, {1e-2, spec.beta1, spec.beta2, spec.epsilon, 0.05});

  Rng rng = make_stream(2024, StreamRole::kFuzz);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(d);
  for (double& xi : x) xi = normal(rng);
  std::vector<double> y = x;
  OptState state(d);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> g(d);
    for (double& gi : g) gi = normal(rng) * 3.0;
    step(spec, state, x, g);
    oracle.step(y, g);
    for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  r.passed = worst <= 1e-12;
  r.detail = "max |x - x_ref| over 100 steps=" + sci(worst) + " (tol 1e-12)";
  return r;
}

// C3: v >= 0, |m| bounded by the running max |g|, no move against the
// chosen direction; NaN gradients end a run as diverged.
CriterionResult invariant_fuzzing() {
  auto r = make("C3", "invariant fuzzing", Suite::kInvariants);
  constexpr std::size_t d = 4;
  constexpr int kSteps = 100000;
  std::size_t v_neg = 0, m_out = 0, dir_bad = 0;

  for (const Preset p : kAllPresets) {
    OptimizerSpec spec = preset(p);
    spec.weight_decay = 0.0;
    Rng rng = make_stream(static_cast<std::uint64_t>(p) + 77, StreamRole::kFuzz);
    std::vector<double> x(d, 0.5);
    std::vector<double> gmax(d, 0.0);
    OptState state(d);
    for (int t = 0; t < kSteps; ++t) {
      const auto g = random_gradient(d, rng);
      const std::vector<double> m_prev = state.m;
      const std::vector<double> x_prev = x;
      step(spec, state, x, g);
      for (std::size_t i = 0; i < d; ++i) {
        gmax[i] = std::max(gmax[i], std::abs(g[i]));
        if (state.v[i] < 0.0) ++v_neg;
        if (std::abs(state.m[i]) > gmax[i] * (1.0 + 1e-12)) ++m_out;
        int dir = 0;
        if (spec.rule == StepRule::kLion) {
          dir = tri_sign(spec.beta1 * m_prev[i] + (1.0 - spec.beta1) * g[i]);
        } else if (spec.direction == Direction::kMomSign) {
          dir = tri_sign(state.m[i]);
        } else {
          dir = tri_sign(g[i]);
        }
        const int moved = tri_sign(x[i] - x_prev[i]);
        if (moved != 0 && moved != -dir) ++dir_bad;
      }
    }
  }

  RunConfig cfg;
  cfg.optimizer = preset(Preset::kAno);
  cfg.optimizer.base_lr = 0.05;
  cfg.steps = 1000;
  cfg.record_every = 1;
  cfg.x0 = {StartPoint::Kind::kExplicit, {1.0, 1.0}};
  const Trace nan_trace = run(cfg, NanTrap{});
  const bool nan_ok = nan_trace.diverged() && *nan_trace.diverged_at < cfg.steps;

  r.passed = v_neg == 0 && m_out == 0 && dir_bad == 0 && nan_ok;
  r.detail = std::to_string(kSteps) + " steps x " + std::to_string(std::size(kAllPresets)) +
             " presets: v<0=" + std::to_string(v_neg) + " |m|>max|g|=" + std::to_string(m_out) +
             " against-direction=" + std::to_string(dir_bad) + "; NaN run " +
             (nan_trace.diverged() ? "diverged at k=" + std::to_string(*nan_trace.diverged_at)
                                   : std::string("did not diverge"));
  return r;
}

// C4: weight-decay shrinkage, scale invariance at eps = 0, schedule values.
CriterionResult closed_form_checks() {
  auto r = make("C4", "closed-form checks", Suite::kInvariants);

  OptimizerSpec wd = preset(Preset::kAno);
  wd.weight_decay = 0.1;
  wd.base_lr = 0.5;
  wd.lr_schedule = ScheduleKind::kLrPower34;
  const std::vector<double> x0{1.5, -2.0, 0.25};
  std::vector<double> x = x0;
  OptState state(x.size());
  const std::vector<double> zero(x.size(), 0.0);
  double product = 1.0;
  for (std::int64_t k = 1; k <= 1000; ++k) {
    product *= 1.0 - 0.5 * std::pow(static_cast<double>(k) + 1.0, -0.75) * 0.1;
    step(wd, state, x, zero);
  }
  double wd_err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    wd_err = std::max(wd_err, std::abs(x[i] - x0[i] * product) / std::abs(x0[i] * product));
  }

  OptimizerSpec scale = preset(Preset::kAno);
  scale.epsilon = 0.0;
  scale.base_lr = 0.01;
  const Quadratic q(5, 10.0);
  auto replay = [&](double c) {
    Rng rng = make_stream(99, StreamRole::kNoise);
    std::normal_distribution<double> normal(0.0, 0.3);
    std::vector<double> xs{1.0, -1.0, 0.5, 2.0, -0.3};
    OptState st(xs.size());
    std::vector<std::vector<double>> iterates;
    for (int t = 0; t < 1000; ++t) {
      auto g = q.grad(xs);
      for (double& gi : g) gi = c * (gi + normal(rng));
      step(scale, st, xs, g);
      iterates.push_back(xs);
    }
    return iterates;
  };
  const auto base = replay(1.0);
  const auto scaled = replay(7.0);
  double scale_err = 0.0;
  for (std::size_t t = 0; t < base.size(); ++t) {
    for (std::size_t i = 0; i < base[t].size(); ++i) {
      scale_err = std::max(scale_err, std::abs(base[t][i] - scaled[t][i]));
    }
  }

  // mpmath: 1 - 1/ln 3 and 0.1 * 2^-0.75.
  const double b1_err = std::abs(beta1_at({ScheduleKind::kB1Log, 0.0}, 1) - 0.0897607733731626064);
  const double lr_err =
      std::abs(lr_at({ScheduleKind::kLrPower34, 0.1}, 1) - 0.0594603557501360566);

  r.passed = wd_err <= 1e-12 && scale_err <= 1e-9 && b1_err <= 1e-9 && lr_err <= 1e-9;
  r.detail = "wd rel err=" + sci(wd_err) + " (tol 1e-12), scale c=7 max diff=" + sci(scale_err) +
             " (tol 1e-9), beta1(log,1) err=" + sci(b1_err) + ", lr(power34,1) err=" +
             sci(lr_err) + " (tol 1e-9)";
  return r;
}

// C5: average sign-mismatch rate against k under the theory schedules.
CriterionResult lemma_decay_order(const Options& options) {
  auto r = make("C5", "mismatch-rate decay order", Suite::kLemmaDecay);
  constexpr int kSeeds = 50;
  RunConfig cfg;
  cfg.problem = {ProblemKind::kQuadratic, 20, 10.0};
  cfg.optimizer = preset(Preset::kAno);
  cfg.optimizer.base_lr = 1.0;
  cfg.optimizer.lr_schedule = ScheduleKind::kLrPower34;
  cfg.optimizer.beta1_schedule = ScheduleKind::kB1Sqrt;
  cfg.sigma = 0.5;
  cfg.steps = 100000;
  cfg.record_every = cfg.steps;
  cfg.x0.kind = StartPoint::Kind::kOnes;
  std::vector<std::int64_t> ks;
  for (int i = 0; i <= 12; ++i) {
    ks.push_back(static_cast<std::int64_t>(std::llround(std::pow(10.0, 2.0 + 0.25 * i))));
  }
  cfg.checkpoints = ks;

  std::vector<RunConfig> configs(kSeeds, cfg);
  for (int s = 0; s < kSeeds; ++s) configs[s].seed = static_cast<std::uint64_t>(s);
  const auto traces = run_many(configs, options.jobs);

  std::map<std::int64_t, double> mean_rate;
  for (const auto& t : traces) {
    for (const auto& row : t.rows) {
      if (std::binary_search(ks.begin(), ks.end(), row.k)) mean_rate[row.k] += row.mismatch_rate;
    }
  }
  std::vector<std::pair<double, double>> points;
  std::ostringstream rates;
  bool positive = true;
  for (const auto k : ks) {
    const double m = mean_rate[k] / kSeeds;
    rates << (points.empty() ? "" : " ") << k << ":" << std::setprecision(3) << m;
    positive = positive && m > 0.0;
    points.emplace_back(static_cast<double>(k), m);
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (positive) slope = fit_loglog_slope(points);
  const bool decreasing = points.back().second < points.front().second;
  r.passed = positive && slope >= -0.9 && slope <= -0.2 && decreasing;
  r.detail = "slope=" + sci(slope) + " (want [-0.9, -0.2]), rate(1e2)=" +
             sci(points.front().second) + " rate(1e5)=" + sci(points.back().second) +
             "; rates " + rates.str();
  return r;
}

// C6: running-min of |grad f|^2 on Rosenbrock under the theory schedules.
CriterionResult rate_envelope(const Options& options) {
  auto r = make("C6", "gradient-norm envelope rate", Suite::kRateEnvelope);
  constexpr int kSeeds = 20;
  const std::int64_t sample_at[] = {100, 1000, 10000, 100000};
  RunConfig cfg;
  cfg.problem = {ProblemKind::kRosenbrock, 10};
  cfg.optimizer = preset(Preset::kAno);
  cfg.optimizer.base_lr = 1.0;
  cfg.optimizer.lr_schedule = ScheduleKind::kLrPower34;
  cfg.optimizer.beta1_schedule = ScheduleKind::kB1Sqrt;
  cfg.sigma = 0.1;
  cfg.steps = 100000;
  cfg.record_every = 1;
  cfg.x0.kind = StartPoint::Kind::kDefault;

  std::vector<std::array<double, 4>> per_seed(kSeeds);
  std::vector<int> diverged(kSeeds, 0);
  parallel_for(kSeeds, options.jobs, [&](std::size_t s) {
    RunConfig c = cfg;
    c.seed = s;
    const Trace t = run(c);
    diverged[s] = t.diverged();
    const auto env = running_min_envelope(t);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto idx = static_cast<std::size_t>(sample_at[j] - 1);
      per_seed[s][j] = idx < env.size() ? env[idx].second : env.back().second;
    }
  });

  std::vector<std::pair<double, double>> points;
  std::string values;
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0;
    for (const auto& row : per_seed) m += row[j];
    m /= kSeeds;
    points.emplace_back(static_cast<double>(sample_at[j]), m);
    values += (j ? " " : "") + std::to_string(sample_at[j]) + ":" + sci(m);
  }
  const int n_div = static_cast<int>(std::count(diverged.begin(), diverged.end(), 1));
  bool positive = std::all_of(points.begin(), points.end(),
                              [](const auto& p) { return p.second > 0.0; });
  const double slope =
      positive ? fit_loglog_slope(points) : std::numeric_limits<double>::quiet_NaN();
  r.passed = positive && n_div == 0 && slope <= -0.15;
  r.detail = "slope=" + sci(slope) + " (want <= -0.15), envelope " + values +
             ", diverged=" + std::to_string(n_div);
  return r;
}

// C7: ano vs adamw final loss on logreg with and without gradient noise.
CriterionResult noise_robustness_ordering(const Options& options) {
  auto r = make("C7", "noise-robustness ordering", Suite::kNoiseOrdering);
  RunConfig base;
  base.problem.kind = ProblemKind::kLogreg;
  base.problem.samples = 2000;
  base.problem.dim = 20;
  base.problem.separation = 2.0;
  base.problem.batch_size = 32;
  base.steps = 5000;
  base.record_every = base.steps;
  base.x0.kind = StartPoint::Kind::kZeros;

  OptimizerSpec ano = preset(Preset::kAno);
  OptimizerSpec adamw = preset(Preset::kAdamW);
  ano.base_lr = adamw.base_lr = 1e-3;
  const std::vector<NamedOptimizer> opts{{"ano", ano}, {"adamw", adamw}};
  const double sigmas[] = {0.0, 0.2};
  const auto rows = noise_sweep(sigmas, opts, base, {10, options.jobs});

  auto mean_loss = [&](const std::string& opt, double sigma) {
    for (const auto& row : rows) {
      if (row.optimizer == opt && row.sigma == sigma && row.metric == "final_loss") {
        return row.mean;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double ano0 = mean_loss("ano", 0.0), adw0 = mean_loss("adamw", 0.0);
  const double ano2 = mean_loss("ano", 0.2), adw2 = mean_loss("adamw", 0.2);
  const double adv0 = adw0 - ano0;
  const double adv2 = adw2 - ano2;
  r.passed = ano2 <= adw2 && adv2 > adv0;
  std::ostringstream os;
  os << std::setprecision(8) << "sigma=0: ano " << ano0 << " adamw " << adw0
     << "; sigma=0.2: ano " << ano2 << " adamw " << adw2 << "; adamw-ano advantage "
     << adv0 << " -> " << adv2;
  r.detail = os.str();
  return r;
}

// C8: the ablation grid covers every ablation row, and preset(ano) matches a
// hand-assembled spec bit for bit.
CriterionResult ablation_grid_integrity(const Options& options) {
  auto r = make("C8", "ablation grid integrity", Suite::kExactness);
  RunConfig base;
  base.problem = {ProblemKind::kQuadratic, 8, 10.0};
  base.sigma = 0.1;
  base.steps = 300;
  base.record_every = 10;
  base.optimizer.base_lr = 0.01;
  const auto rows = ablation_grid(base, {2, options.jobs});

  std::vector<std::string> groups;
  std::set<std::string> presets;
  for (const auto& row : rows) {
    if (groups.empty() || groups.back() != row.group) groups.push_back(row.group);
    presets.insert(row.optimizer);
  }
  const std::set<std::string> expected{"adam",       "yogi",          "grams",    "yogi_signum",
                                       "signum_wd",  "signum_wd_gradnorm", "adam_gradnorm",
                                       "ano",        "ano_all",       "ano_sqrt", "anolog"};

  OptimizerSpec manual;
  manual.second_moment = SecondMoment::kYogi;
  manual.magnitude = Magnitude::kGradAbs;
  manual.direction = Direction::kMomSign;
  manual.bias_correct = false;
  manual.beta1_schedule = ScheduleKind::kB1Constant;
  manual.beta1 = 0.92;
  manual.beta2 = 0.99;
  manual.epsilon = 1e-8;
  manual.weight_decay = 0.0;
  manual.lr_schedule = ScheduleKind::kLrConstant;
  manual.base_lr = 0.01;
  RunConfig a = base;
  a.optimizer = preset(Preset::kAno);
  a.optimizer.base_lr = 0.01;
  a.seed = 3;
  RunConfig b = a;
  b.optimizer = manual;
  const bool identical = run(a) == run(b);

  r.passed = groups.size() == 11 && presets == expected && identical;
  r.detail = std::to_string(groups.size()) + " groups, presets " +
             (presets == expected ? "match" : "differ") + "; ano preset vs manual axes " +
             (identical ? "bit-identical" : "DIFFER");
  return r;
}

std::vector<CriterionResult> run_suite(Suite suite, const Options& options, std::ostream& out) {
  using Runner = CriterionResult (*)(const Options&);
  struct Entry {
    Suite suite;
    Runner fn;
  };
  static const Entry entries[] = {
      {Suite::kExactness, [](const Options&) { return hand_trace_exactness(); }},
      {Suite::kExactness, [](const Options&) { return adamw_oracle_equivalence(); }},
      {Suite::kInvariants, [](const Options&) { return invariant_fuzzing(); }},
      {Suite::kInvariants, [](const Options&) { return closed_form_checks(); }},
      {Suite::kLemmaDecay, &lemma_decay_order},
      {Suite::kRateEnvelope, &rate_envelope},
      {Suite::kNoiseOrdering, &noise_robustness_ordering},
      {Suite::kExactness, &ablation_grid_integrity},
  };
  std::vector<CriterionResult> results;
  for (const auto& e : entries) {
    if (suite != Suite::kAll && suite != e.suite) continue;
    const auto start = std::chrono::steady_clock::now();
    auto res = e.fn(options);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    out << (res.passed ? "PASS " : "FAIL ") << res.id << " [" << to_string(res.suite) << "] "
        << res.name << ": " << res.detail << " (" << std::fixed << std::setprecision(1)
        << took.count() << "s)" << std::defaultfloat << std::endl;
    results.push_back(std::move(res));
  }
  return results;
}

int check(std::string_view suite_name, const Options& options, std::ostream& out) {
  Suite suite{};
  try {
    suite = parse_suite(suite_name);
  } catch (const ConfigError& e) {
    out << e.what() << "\n";
    return 2;
  }
  const auto results = run_suite(suite, options, out);
  const bool ok = std::all_of(results.begin(), results.end(),
                              [](const CriterionResult& r) { return r.passed; });
  out << (ok ? "all criteria passed" : "acceptance FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace anolab::acceptance
