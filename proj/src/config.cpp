#include "anolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "anolab/errors.hpp"
#include "anolab/io.hpp"

namespace anolab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::string key, int line) : key_(std::move(key)), line_(line) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + key_ + ": " + why, key_, line_);
  }

  double real(std::string_view v) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() ||
        !std::isfinite(out)) {
      fail("expected a finite number, got '" + std::string(v) + "'");
    }
    return out;
  }

  std::int64_t integer(std::string_view v) const {
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      fail("expected an integer, got '" + std::string(v) + "'");
    }
    return out;
  }

  std::vector<double> reals(std::string_view v) const {
    std::vector<double> out;
    for (auto item : split_list(v)) out.push_back(real(item));
    return out;
  }

  void require(bool ok, const std::string& why) const {
    if (!ok) fail(why);
  }

 private:
  std::string key_;
  int line_;
};

using Setter = std::function<void(ExperimentConfig&, std::string_view, const LineParser&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"problem",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         try {
           c.problem.kind = parse_problem_kind(v);
         } catch (const ConfigError&) {
           p.fail("unknown problem '" + std::string(v) + "'");
         }
       }},
      {"dim",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const auto d = p.integer(v);
         p.require(d >= 1, "must be >= 1");
         c.problem.dim = static_cast<std::size_t>(d);
       }},
      {"condition",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.problem.condition = p.real(v);
         p.require(c.problem.condition >= 1.0, "must be >= 1");
       }},
      {"samples",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const auto n = p.integer(v);
         p.require(n >= 2, "must be >= 2");
         c.problem.samples = static_cast<std::size_t>(n);
       }},
      {"separation",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.problem.separation = p.real(v);
         p.require(c.problem.separation >= 0.0, "must be >= 0");
       }},
      {"batch_size",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const auto b = p.integer(v);
         p.require(b >= 1, "must be >= 1");
         c.problem.batch_size = static_cast<std::size_t>(b);
       }},
      {"optimizer",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.optimizers.clear();
         for (auto name : split_list(v)) {
           try {
             parse_preset(name);
           } catch (const ConfigError&) {
             p.fail("unknown optimizer '" + std::string(name) + "'");
           }
           c.optimizers.emplace_back(name);
         }
       }},
      {"lr",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.lr = p.real(v);
         p.require(c.lr > 0.0, "must be > 0");
       }},
      {"lr_schedule",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         ScheduleKind kind{};
         try {
           kind = parse_schedule_kind(v);
         } catch (const ConfigError&) {
           p.fail("unknown schedule '" + std::string(v) + "'");
         }
         p.require(is_lr_kind(kind), "'" + std::string(v) + "' is not a learning-rate schedule");
         c.lr_schedule = kind;
       }},
      {"beta1",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const double b = p.real(v);
         p.require(b >= 0.0 && b < 1.0, "must lie in [0, 1)");
         c.beta1 = b;
       }},
      {"beta1_schedule",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         ScheduleKind kind{};
         try {
           kind = parse_schedule_kind(v);
         } catch (const ConfigError&) {
           p.fail("unknown schedule '" + std::string(v) + "'");
         }
         p.require(is_beta1_kind(kind), "'" + std::string(v) + "' is not a beta1 schedule");
         c.beta1_schedule = kind;
       }},
      {"beta2",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const double b = p.real(v);
         p.require(b >= 0.0 && b < 1.0, "must lie in [0, 1)");
         c.beta2 = b;
       }},
      {"epsilon",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.epsilon = p.real(v);
         p.require(c.epsilon > 0.0, "must be > 0");
       }},
      {"weight_decay",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.weight_decay = p.real(v);
         p.require(c.weight_decay >= 0.0, "must be >= 0");
       }},
      {"steps",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.steps = p.integer(v);
         p.require(c.steps >= 1, "must be >= 1");
       }},
      {"seeds",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         const auto n = p.integer(v);
         p.require(n >= 1 && n <= 1'000'000, "must lie in [1, 1000000]");
         c.seeds = static_cast<int>(n);
       }},
      {"sigma",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.sigma = p.real(v);
         p.require(c.sigma >= 0.0, "must be >= 0");
       }},
      {"sigmas",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.sigmas = p.reals(v);
         for (const double s : c.sigmas) p.require(s >= 0.0, "every sigma must be >= 0");
       }},
      {"record_every",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         c.record_every = p.integer(v);
         p.require(c.record_every >= 1, "must be >= 1");
       }},
      {"x0",
       [](ExperimentConfig& c, std::string_view v, const LineParser& p) {
         using K = StartPoint::Kind;
         c.x0 = {};
         if (v == "default") {
           c.x0.kind = K::kDefault;
         } else if (v == "zeros") {
           c.x0.kind = K::kZeros;
         } else if (v == "ones") {
           c.x0.kind = K::kOnes;
         } else if (v == "normal") {
           c.x0.kind = K::kNormal;
         } else {
           c.x0.kind = K::kExplicit;
           c.x0.values = p.reals(v);
         }
       }},
  };
  return table;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join(const std::vector<double>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + format_shortest(items[i]);
  return out;
}

}  // namespace

OptimizerSpec ExperimentConfig::optimizer_spec(std::string_view name) const {
  OptimizerSpec s = preset(name);
  s.base_lr = lr;
  s.lr_schedule = lr_schedule;
  s.epsilon = epsilon;
  s.weight_decay = weight_decay;
  if (beta1) s.beta1 = *beta1;
  if (beta2) s.beta2 = *beta2;
  if (beta1_schedule) s.beta1_schedule = *beta1_schedule;
  s.validate();
  return s;
}

RunConfig ExperimentConfig::run_config(std::uint64_t seed) const {
  if (optimizers.empty()) throw ConfigError("no optimizer configured", "optimizer");
  RunConfig r;
  r.problem = problem;
  r.optimizer = optimizer_spec(optimizers.front());
  r.steps = steps;
  r.seed = seed;
  r.sigma = sigma;
  r.record_every = record_every;
  r.x0 = x0;
  r.validate();
  return r;
}

std::vector<NamedOptimizer> ExperimentConfig::named_optimizers() const {
  std::vector<NamedOptimizer> out;
  for (const auto& name : optimizers) out.push_back({name, optimizer_spec(name)});
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", "",
                        line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const LineParser parser(key, line_no);

    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) parser.fail("unknown key");
    if (!seen.insert(key).second) parser.fail("duplicate key");
    it->second(config, value, parser);
  }

  if (config.record_every > config.steps) {
    throw ConfigError("record_every must not exceed steps", "record_every");
  }
  if (config.problem.kind == ProblemKind::kRosenbrock && config.problem.dim < 2) {
    throw ConfigError("rosenbrock needs dim >= 2", "dim");
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "problem = " << to_string(c.problem.kind) << "\n";
  os << "dim = " << c.problem.dim << "\n";
  os << "condition = " << format_shortest(c.problem.condition) << "\n";
  os << "samples = " << c.problem.samples << "\n";
  os << "separation = " << format_shortest(c.problem.separation) << "\n";
  os << "batch_size = " << c.problem.batch_size << "\n";
  os << "optimizer = " << join(c.optimizers) << "\n";
  os << "lr = " << format_shortest(c.lr) << "\n";
  os << "lr_schedule = " << to_string(c.lr_schedule) << "\n";
  if (c.beta1) os << "beta1 = " << format_shortest(*c.beta1) << "\n";
  if (c.beta1_schedule) os << "beta1_schedule = " << to_string(*c.beta1_schedule) << "\n";
  if (c.beta2) os << "beta2 = " << format_shortest(*c.beta2) << "\n";
  os << "epsilon = " << format_shortest(c.epsilon) << "\n";
  os << "weight_decay = " << format_shortest(c.weight_decay) << "\n";
  os << "steps = " << c.steps << "\n";
  os << "seeds = " << c.seeds << "\n";
  os << "sigma = " << format_shortest(c.sigma) << "\n";
  os << "sigmas = " << join(c.sigmas) << "\n";
  os << "record_every = " << c.record_every << "\n";
  switch (c.x0.kind) {
    case StartPoint::Kind::kDefault:
      os << "x0 = default\n";
      break;
    case StartPoint::Kind::kZeros:
      os << "x0 = zeros\n";
      break;
    case StartPoint::Kind::kOnes:
      os << "x0 = ones\n";
      break;
    case StartPoint::Kind::kNormal:
      os << "x0 = normal\n";
      break;
    case StartPoint::Kind::kExplicit:
      os << "x0 = " << join(c.x0.values) << "\n";
      break;
  }
  return os.str();
}

}  // namespace anolab
