#include "anolab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "anolab/errors.hpp"
#include "anolab/io.hpp"
#include "anolab/parallel.hpp"

namespace anolab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct RunOutcome {
  Trace trace;
  FinalMetrics metrics;
};

RunOutcome run_with_metrics(const RunConfig& config) {
  const ProblemPtr problem = config.problem.build(config.seed);
  RunOutcome out;
  out.trace = run(config, *problem);
  out.metrics = final_metrics(*problem, out.trace);
  return out;
}

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::kQuadratic:
      return "quadratic";
    case ProblemKind::kRosenbrock:
      return "rosenbrock";
    case ProblemKind::kLogreg:
      return "logreg";
    case ProblemKind::kFlat:
      return "flat";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view name) {
  for (auto kind : {ProblemKind::kQuadratic, ProblemKind::kRosenbrock, ProblemKind::kLogreg,
                    ProblemKind::kFlat}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown problem '" + std::string(name) + "'", "problem");
}

ProblemPtr ProblemSpec::build(std::uint64_t seed) const {
  switch (kind) {
    case ProblemKind::kQuadratic:
      return quadratic(dim, condition);
    case ProblemKind::kRosenbrock:
      return rosenbrock(dim);
    case ProblemKind::kLogreg:
      return logreg_synthetic(samples, dim, separation, seed, batch_size);
    case ProblemKind::kFlat:
      return std::make_shared<const Flat>(dim);
  }
  throw ConfigError("unhandled problem kind");
}

std::vector<double> StartPoint::resolve(const Problem& problem, std::uint64_t seed) const {
  const std::size_t d = problem.dim();
  switch (kind) {
    case Kind::kDefault:
      return problem.default_start();
    case Kind::kZeros:
      return std::vector<double>(d, 0.0);
    case Kind::kOnes:
      return std::vector<double>(d, 1.0);
    case Kind::kNormal: {
      Rng rng = make_stream(seed, StreamRole::kInit);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> x(d);
      for (double& xi : x) xi = normal(rng);
      return x;
    }
    case Kind::kExplicit:
      if (values.size() != d) {
        throw ConfigError("x0 has " + std::to_string(values.size()) +
                              " coordinates but the problem has " + std::to_string(d),
                          "x0");
      }
      return values;
  }
  throw ConfigError("unhandled start point");
}

void RunConfig::validate() const {
  optimizer.validate();
  if (steps < 1) throw ConfigError("steps must be >= 1", "steps");
  if (record_every < 1 || record_every > steps) {
    throw ConfigError("record_every must lie in [1, steps]", "record_every");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be finite and >= 0", "sigma");
  }
  if (problem.dim < 1) throw ConfigError("dim must be >= 1", "dim");
  if (problem.kind == ProblemKind::kRosenbrock && problem.dim < 2) {
    throw ConfigError("rosenbrock needs dim >= 2", "dim");
  }
  if (problem.kind == ProblemKind::kQuadratic && !(problem.condition >= 1.0)) {
    throw ConfigError("condition must be >= 1", "condition");
  }
  if (problem.kind == ProblemKind::kLogreg) {
    if (problem.samples < 2) throw ConfigError("samples must be >= 2", "samples");
    if (problem.batch_size < 1) throw ConfigError("batch_size must be >= 1", "batch_size");
  }
}

Trace run(const RunConfig& config) {
  config.validate();
  const ProblemPtr problem = config.problem.build(config.seed);
  return run(config, *problem);
}

Trace run(const RunConfig& config, const Problem& problem) {
  config.validate();
  const std::size_t d = problem.dim();
  std::vector<double> x = config.x0.resolve(problem, config.seed);
  OptState state(d);
  Rng batch_rng = make_stream(config.seed, StreamRole::kMinibatch);
  Rng noise_rng = make_stream(config.seed, StreamRole::kNoise);
  const NoiseModel noise{config.sigma};

  std::vector<std::int64_t> checkpoints = config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  auto next_checkpoint = checkpoints.begin();

  std::vector<double> g(d);
  std::vector<double> true_grad(d);
  Trace trace;

  for (std::int64_t k = 1; k <= config.steps; ++k) {
    while (next_checkpoint != checkpoints.end() && *next_checkpoint < k) ++next_checkpoint;
    const bool at_checkpoint = next_checkpoint != checkpoints.end() && *next_checkpoint == k;
    const bool record =
        k == 1 || k % config.record_every == 0 || k == config.steps || at_checkpoint;

    TraceRow row;
    if (record) {
      row.k = k;
      row.loss = problem.loss(x);
      problem.grad(x, true_grad);
      row.grad_norm_sq = norm_sq(true_grad);
      row.param_norm = std::sqrt(norm_sq(x));
      if (!std::isfinite(row.loss) || !std::isfinite(row.grad_norm_sq)) {
        trace.diverged_at = k;
        break;
      }
    }

    problem.stochastic_grad(x, batch_rng, g);
    inject_noise_inplace(g, noise, noise_rng);

    StepInfo info;
    try {
      info = step(config.optimizer, state, x, g);
    } catch (const NumericError&) {
      trace.diverged_at = k;
      break;
    }
    if (!all_finite(x)) {
      trace.diverged_at = k;
      break;
    }

    if (record) {
      row.lr = info.lr;
      row.beta1 = info.beta1;
      row.mismatch_rate = mismatch_rate(state.m, true_grad);
      trace.rows.push_back(row);
    }
  }
  trace.final_x = std::move(x);
  return trace;
}

double mismatch_rate(std::span<const double> m, std::span<const double> true_grad) {
  if (m.size() != true_grad.size()) {
    throw DimensionError("mismatch_rate: length mismatch (" + std::to_string(m.size()) + " vs " +
                         std::to_string(true_grad.size()) + ")");
  }
  std::size_t active = 0;
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int s = tri_sign(true_grad[i]);
    if (s == 0) continue;
    ++active;
    mismatched += tri_sign(m[i]) != s;
  }
  return active == 0 ? 0.0 : static_cast<double>(mismatched) / static_cast<double>(active);
}

std::vector<std::pair<std::int64_t, double>> running_min_envelope(const Trace& trace) {
  if (trace.rows.empty()) throw DomainError("running_min_envelope: empty trace");
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(trace.rows.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : trace.rows) {
    best = std::min(best, row.grad_norm_sq);
    out.emplace_back(row.k, best);
  }
  return out;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("fit_loglog_slope: need at least 3 points");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [k, y] : points) {
    if (!(k > 0.0) || !(y > 0.0) || !std::isfinite(k) || !std::isfinite(y)) {
      throw DomainError("fit_loglog_slope: points must be finite and positive");
    }
    mean_x += std::log(k);
    mean_y += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [k, y] : points) {
    const double dx = std::log(k) - mean_x;
    sxy += dx * (std::log(y) - mean_y);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("fit_loglog_slope: all k are equal");
  return sxy / sxx;
}

SummaryRow summarize(std::string group, std::string optimizer, double sigma, std::string metric,
                     std::span<const double> values) {
  SummaryRow row;
  row.group = std::move(group);
  row.optimizer = std::move(optimizer);
  row.sigma = sigma;
  row.metric = std::move(metric);
  row.per_seed.assign(values.begin(), values.end());
  std::vector<double> kept;
  for (const double v : values) {
    if (std::isfinite(v)) {
      kept.push_back(v);
    } else {
      ++row.diverged;
    }
  }
  row.seeds = static_cast<int>(kept.size());
  if (kept.empty()) {
    row.mean = kNaN;
    row.ci95 = kNaN;
    return row;
  }
  const double n = static_cast<double>(kept.size());
  row.mean = std::accumulate(kept.begin(), kept.end(), 0.0) / n;
  if (kept.size() < 2) {
    row.ci95 = kNaN;
    return row;
  }
  double ss = 0.0;
  for (const double v : kept) ss += (v - row.mean) * (v - row.mean);
  row.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return row;
}

FinalMetrics final_metrics(const Problem& problem, const Trace& trace) {
  FinalMetrics m{kNaN, kNaN, kNaN};
  if (trace.diverged() || trace.final_x.size() != problem.dim()) return m;
  m.loss = problem.loss(trace.final_x);
  m.grad_norm_sq = norm_sq(problem.grad(trace.final_x));
  if (const auto* lr = dynamic_cast<const LogisticRegression*>(&problem)) {
    m.accuracy = lr->accuracy(trace.final_x);
  }
  return m;
}

std::vector<Trace> run_many(std::span<const RunConfig> configs, unsigned jobs) {
  for (const auto& c : configs) c.validate();
  std::vector<Trace> traces(configs.size());
  parallel_for(configs.size(), jobs, [&](std::size_t i) { traces[i] = run(configs[i]); });
  return traces;
}

namespace {

struct Cell {
  std::string group;
  double sigma;
  NamedOptimizer optimizer;
};

std::vector<SummaryRow> sweep_cells(const std::vector<Cell>& cells, const RunConfig& base,
                                    const SweepOptions& options) {
  if (options.seeds < 2) throw ConfigError("a sweep needs at least 2 seeds", "seeds");
  const std::size_t seeds = static_cast<std::size_t>(options.seeds);

  std::vector<RunConfig> configs;
  configs.reserve(cells.size() * seeds);
  for (const auto& cell : cells) {
    for (std::size_t s = 0; s < seeds; ++s) {
      RunConfig c = base;
      c.optimizer = cell.optimizer.spec;
      c.sigma = cell.sigma;
      c.seed = base.seed + s;
      c.validate();
      configs.push_back(std::move(c));
    }
  }

  std::vector<RunOutcome> outcomes(configs.size());
  parallel_for(configs.size(), options.jobs,
               [&](std::size_t i) { outcomes[i] = run_with_metrics(configs[i]); });

  const bool with_accuracy = base.problem.kind == ProblemKind::kLogreg;
  std::vector<SummaryRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    std::vector<double> loss, gns, acc;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto& r = outcomes[c * seeds + s];
      loss.push_back(r.metrics.loss);
      gns.push_back(r.metrics.grad_norm_sq);
      acc.push_back(r.metrics.accuracy);
    }
    const auto& name = cell.optimizer.name;
    rows.push_back(summarize(cell.group, name, cell.sigma, "final_loss", loss));
    rows.push_back(summarize(cell.group, name, cell.sigma, "final_grad_norm_sq", gns));
    if (with_accuracy) {
      rows.push_back(summarize(cell.group, name, cell.sigma, "final_accuracy", acc));
    }
  }
  return rows;
}

}  // namespace

std::vector<SummaryRow> noise_sweep(std::span<const double> sigmas,
                                    std::span<const NamedOptimizer> optimizers,
                                    const RunConfig& base, const SweepOptions& options) {
  if (sigmas.empty()) throw ConfigError("a sweep needs at least one sigma", "sigmas");
  if (optimizers.empty()) throw ConfigError("a sweep needs at least one optimizer", "optimizer");
  std::vector<Cell> cells;
  for (const double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sigmas must be >= 0", "sigmas");
    for (const auto& opt : optimizers) cells.push_back({"sigma=" + format_shortest(s), s, opt});
  }
  return sweep_cells(cells, base, options);
}

const std::vector<AblationRow> kAblationRows = {
    {"Adam", Preset::kAdam},
    {"Yogi", Preset::kYogi},
    {"Grams", Preset::kGrams},
    {"Yogi+Signum", Preset::kYogiSignum},
    {"Signum+WeightDecay", Preset::kSignumWd},
    {"Signum+WeightDecay+GradNorm", Preset::kSignumWdGradNorm},
    {"Adam+GradNorm", Preset::kAdamGradNorm},
    {"Ano", Preset::kAno},
    {"Anoall", Preset::kAnoAll},
    {"Anosqrt", Preset::kAnoSqrt},
    {"Anolog", Preset::kAnolog},
};

std::vector<NamedOptimizer> ablation_optimizers(const OptimizerSpec& base) {
  std::vector<NamedOptimizer> out;
  for (const auto& row : kAblationRows) {
    OptimizerSpec s = preset(row.preset);
    s.lr_schedule = base.lr_schedule;
    s.base_lr = base.base_lr;
    s.epsilon = base.epsilon;
    s.weight_decay = base.weight_decay;
    out.push_back({std::string(preset_name(row.preset)), s});
  }
  return out;
}

std::vector<SummaryRow> ablation_grid(const RunConfig& base, const SweepOptions& options) {
  const auto optimizers = ablation_optimizers(base.optimizer);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < optimizers.size(); ++i) {
    cells.push_back({std::string(kAblationRows[i].label), base.sigma, optimizers[i]});
  }
  return sweep_cells(cells, base, options);
}

}  // namespace anolab
