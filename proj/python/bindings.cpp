#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "anolab/acceptance.hpp"
#include "anolab/config.hpp"
#include "anolab/errors.hpp"
#include "anolab/harness.hpp"
#include "anolab/optim.hpp"
#include "anolab/problems.hpp"
#include "anolab/schedules.hpp"

namespace py = pybind11;
using namespace anolab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

std::span<double> mutable_view(py::array_t<double>& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array");
  if (!(a.flags() & py::array::c_style)) throw DimensionError("x must be C-contiguous");
  return {a.mutable_data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::string name_of(ScheduleKind k) { return std::string(to_string(k)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "anolab core: composable sign-based optimizers and experiment harness";

  static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base_error.ptr());
  py::register_exception<DomainError>(m, "DomainError", base_error.ptr());
  py::register_exception<IoError>(m, "IoError", base_error.ptr());
  py::register_exception<NumericError>(m, "NumericError", base_error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());

  py::enum_<SecondMoment>(m, "SecondMoment")
      .value("NONE", SecondMoment::kNone)
      .value("ADAM", SecondMoment::kAdam)
      .value("YOGI", SecondMoment::kYogi);
  py::enum_<Magnitude>(m, "Magnitude")
      .value("GRAD_ABS", Magnitude::kGradAbs)
      .value("MOM_ABS", Magnitude::kMomAbs)
      .value("UNIT", Magnitude::kUnit);
  py::enum_<Direction>(m, "Direction")
      .value("MOM_SIGN", Direction::kMomSign)
      .value("GRAD_SIGN", Direction::kGradSign);
  py::enum_<StepRule>(m, "StepRule")
      .value("COMPOSABLE", StepRule::kComposable)
      .value("LION", StepRule::kLion);

  py::class_<OptimizerSpec>(m, "OptimizerSpec")
      .def(py::init<>())
      .def_readwrite("second_moment", &OptimizerSpec::second_moment)
      .def_readwrite("magnitude", &OptimizerSpec::magnitude)
      .def_readwrite("direction", &OptimizerSpec::direction)
      .def_readwrite("bias_correct", &OptimizerSpec::bias_correct)
      .def_property(
          "beta1_schedule", [](const OptimizerSpec& s) { return name_of(s.beta1_schedule); },
          [](OptimizerSpec& s, const std::string& v) { s.beta1_schedule = parse_schedule_kind(v); })
      .def_readwrite("beta1", &OptimizerSpec::beta1)
      .def_readwrite("beta2", &OptimizerSpec::beta2)
      .def_readwrite("epsilon", &OptimizerSpec::epsilon)
      .def_readwrite("weight_decay", &OptimizerSpec::weight_decay)
      .def_property(
          "lr_schedule", [](const OptimizerSpec& s) { return name_of(s.lr_schedule); },
          [](OptimizerSpec& s, const std::string& v) { s.lr_schedule = parse_schedule_kind(v); })
      .def_readwrite("base_lr", &OptimizerSpec::base_lr)
      .def_readwrite("rule", &OptimizerSpec::rule)
      .def("validate", &OptimizerSpec::validate)
      .def(py::self == py::self);

  m.def("preset_names", [] {
    std::vector<std::string> out;
    for (auto p : kAllPresets) out.emplace_back(preset_name(p));
    return out;
  });
  m.def("preset", [](const std::string& name) { return preset(std::string_view(name)); },
        py::arg("name"));

  py::class_<OptState>(m, "OptState")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_readwrite("m", &OptState::m)
      .def_readwrite("v", &OptState::v)
      .def_readwrite("k", &OptState::k)
      .def_property_readonly("dim", &OptState::dim);

  py::class_<StepInfo>(m, "StepInfo")
      .def_readonly("lr", &StepInfo::lr)
      .def_readonly("beta1", &StepInfo::beta1);

  m.def("tri_sign", &tri_sign, py::arg("x"));
  m.def("ema_update_m",
        [](const Array& mm, const Array& g, double b) { return to_array(ema_update_m(view(mm), view(g), b)); },
        py::arg("m"), py::arg("g"), py::arg("beta1"));
  m.def("yogi_update_v",
        [](const Array& v, const Array& g, double b) { return to_array(yogi_update_v(view(v), view(g), b)); },
        py::arg("v"), py::arg("g"), py::arg("beta2"));
  m.def("adam_update_v",
        [](const Array& v, const Array& g, double b) { return to_array(adam_update_v(view(v), view(g), b)); },
        py::arg("v"), py::arg("g"), py::arg("beta2"));
  m.def(
      "step",
      [](const OptimizerSpec& spec, OptState& state, py::array_t<double> x, const Array& g) {
        return step(spec, state, mutable_view(x), view(g));
      },
      py::arg("spec"), py::arg("state"), py::arg("x"), py::arg("g"),
      "Updates the float64 array x and the state in place.");

  py::class_<LionParams>(m, "LionParams")
      .def(py::init<>())
      .def_readwrite("beta1", &LionParams::beta1)
      .def_readwrite("beta2", &LionParams::beta2)
      .def_readwrite("lr", &LionParams::lr)
      .def_readwrite("weight_decay", &LionParams::weight_decay);
  m.def(
      "lion_step",
      [](OptState& state, py::array_t<double> x, const Array& g, const LionParams& p) {
        lion_step(state, mutable_view(x), view(g), p);
      },
      py::arg("state"), py::arg("x"), py::arg("g"), py::arg("params"));

  m.def(
      "lr_at",
      [](const std::string& kind, double base, std::int64_t k) {
        return lr_at({parse_schedule_kind(kind), base}, k);
      },
      py::arg("schedule"), py::arg("base"), py::arg("k"));
  m.def(
      "beta1_at",
      [](const std::string& kind, double base, std::int64_t k) {
        return beta1_at({parse_schedule_kind(kind), base}, k);
      },
      py::arg("schedule"), py::arg("base"), py::arg("k"));

  py::class_<Problem, std::shared_ptr<Problem>>(m, "Problem")
      .def_property_readonly("dim", &Problem::dim)
      .def_property_readonly("name", &Problem::name)
      .def("loss", [](const Problem& p, const Array& x) { return p.loss(view(x)); })
      .def("grad", [](const Problem& p, const Array& x) { return to_array(p.grad(view(x))); })
      .def("default_start", [](const Problem& p) { return to_array(p.default_start()); });
  py::class_<Quadratic, Problem, std::shared_ptr<Quadratic>>(m, "Quadratic")
      .def(py::init<std::size_t, double>(), py::arg("dim"), py::arg("condition"))
      .def_property_readonly("curvature", &Quadratic::curvature);
  py::class_<Rosenbrock, Problem, std::shared_ptr<Rosenbrock>>(m, "Rosenbrock")
      .def(py::init<std::size_t>(), py::arg("dim"));
  py::class_<LogisticRegression, Problem, std::shared_ptr<LogisticRegression>>(m, "LogisticRegression")
      .def("accuracy", [](const LogisticRegression& p, const Array& w) { return p.accuracy(view(w)); })
      .def_property_readonly("labels", [](const LogisticRegression& p) { return p.data().labels; })
      .def_property_readonly("batch_size", &LogisticRegression::batch_size);
  m.def(
      "logreg_synthetic",
      [](std::size_t n, std::size_t dim, double sep, std::uint64_t seed, std::size_t batch) {
        return std::const_pointer_cast<LogisticRegression>(logreg_synthetic(n, dim, sep, seed, batch));
      },
      py::arg("n"), py::arg("dim"), py::arg("separation"), py::arg("seed"), py::arg("batch_size") = 32);

  m.def(
      "inject_noise",
      [](const Array& g, double sigma, std::uint64_t seed) {
        Rng rng = make_stream(seed, StreamRole::kNoise);
        return to_array(inject_noise(view(g), {sigma}, rng));
      },
      py::arg("g"), py::arg("sigma"), py::arg("seed"));

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init<>())
      .def_property(
          "kind", [](const ProblemSpec& s) { return std::string(to_string(s.kind)); },
          [](ProblemSpec& s, const std::string& v) { s.kind = parse_problem_kind(v); })
      .def_readwrite("dim", &ProblemSpec::dim)
      .def_readwrite("condition", &ProblemSpec::condition)
      .def_readwrite("samples", &ProblemSpec::samples)
      .def_readwrite("separation", &ProblemSpec::separation)
      .def_readwrite("batch_size", &ProblemSpec::batch_size);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("problem", &RunConfig::problem)
      .def_readwrite("optimizer", &RunConfig::optimizer)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("sigma", &RunConfig::sigma)
      .def_readwrite("record_every", &RunConfig::record_every)
      .def_readwrite("checkpoints", &RunConfig::checkpoints)
      .def_property(
          "x0",
          [](const RunConfig& c) -> py::object {
            using K = StartPoint::Kind;
            switch (c.x0.kind) {
              case K::kDefault: return py::str("default");
              case K::kZeros: return py::str("zeros");
              case K::kOnes: return py::str("ones");
              case K::kNormal: return py::str("normal");
              case K::kExplicit: return py::cast(c.x0.values);
            }
            return py::none();
          },
          [](RunConfig& c, py::object v) {
            using K = StartPoint::Kind;
            if (py::isinstance<py::str>(v)) {
              const auto s = v.cast<std::string>();
              if (s == "default") c.x0 = {K::kDefault, {}};
              else if (s == "zeros") c.x0 = {K::kZeros, {}};
              else if (s == "ones") c.x0 = {K::kOnes, {}};
              else if (s == "normal") c.x0 = {K::kNormal, {}};
              else throw ConfigError("unknown x0 '" + s + "'", "x0");
            } else {
              c.x0 = {K::kExplicit, v.cast<std::vector<double>>()};
            }
          })
      .def("validate", &RunConfig::validate);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("k", &TraceRow::k)
      .def_readonly("loss", &TraceRow::loss)
      .def_readonly("grad_norm_sq", &TraceRow::grad_norm_sq)
      .def_readonly("lr", &TraceRow::lr)
      .def_readonly("beta1", &TraceRow::beta1)
      .def_readonly("mismatch_rate", &TraceRow::mismatch_rate)
      .def_readonly("param_norm", &TraceRow::param_norm);
  py::class_<Trace>(m, "Trace")
      .def_readonly("rows", &Trace::rows)
      .def_readonly("diverged_at", &Trace::diverged_at)
      .def_property_readonly("final_x", [](const Trace& t) { return to_array(t.final_x); })
      .def_property_readonly("diverged", &Trace::diverged);

  m.def("run", py::overload_cast<const RunConfig&>(&run), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("mismatch_rate",
        [](const Array& mm, const Array& g) { return mismatch_rate(view(mm), view(g)); },
        py::arg("m"), py::arg("true_grad"));
  m.def("running_min_envelope", &running_min_envelope, py::arg("trace"));
  m.def("fit_loglog_slope",
        [](const std::vector<std::pair<double, double>>& pts) { return fit_loglog_slope(pts); },
        py::arg("points"));

  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("group", &SummaryRow::group)
      .def_readonly("optimizer", &SummaryRow::optimizer)
      .def_readonly("sigma", &SummaryRow::sigma)
      .def_readonly("metric", &SummaryRow::metric)
      .def_readonly("per_seed", &SummaryRow::per_seed)
      .def_readonly("mean", &SummaryRow::mean)
      .def_readonly("ci95", &SummaryRow::ci95)
      .def_readonly("seeds", &SummaryRow::seeds)
      .def_readonly("diverged", &SummaryRow::diverged);

  m.def(
      "noise_sweep",
      [](const std::vector<double>& sigmas,
         const std::vector<std::pair<std::string, OptimizerSpec>>& optimizers,
         const RunConfig& base, int seeds, unsigned jobs) {
        std::vector<NamedOptimizer> named;
        for (const auto& [name, spec] : optimizers) named.push_back({name, spec});
        py::gil_scoped_release release;
        return noise_sweep(sigmas, named, base, {seeds, jobs});
      },
      py::arg("sigmas"), py::arg("optimizers"), py::arg("base"), py::arg("seeds") = 5,
      py::arg("jobs") = 0);
  m.def(
      "ablation_grid",
      [](const RunConfig& base, int seeds, unsigned jobs) {
        py::gil_scoped_release release;
        return ablation_grid(base, {seeds, jobs});
      },
      py::arg("base"), py::arg("seeds") = 5, py::arg("jobs") = 0);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("problem", &ExperimentConfig::problem)
      .def_readonly("optimizers", &ExperimentConfig::optimizers)
      .def_readonly("lr", &ExperimentConfig::lr)
      .def_readonly("steps", &ExperimentConfig::steps)
      .def_readonly("seeds", &ExperimentConfig::seeds)
      .def_readonly("sigma", &ExperimentConfig::sigma)
      .def_readonly("sigmas", &ExperimentConfig::sigmas)
      .def_readonly("record_every", &ExperimentConfig::record_every)
      .def("optimizer_spec", [](const ExperimentConfig& c, const std::string& n) { return c.optimizer_spec(n); })
      .def("run_config", &ExperimentConfig::run_config, py::arg("seed") = 0)
      .def(py::self == py::self);
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("render_config", &render_config, py::arg("config"));

  m.def(
      "check",
      [](const std::string& suite, unsigned jobs) {
        std::ostringstream out;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = acceptance::check(suite, {jobs}, out);
        }
        return py::make_tuple(code, out.str());
      },
      py::arg("suite") = "all", py::arg("jobs") = 0,
      "Runs an acceptance suite; returns (exit_code, report).");
}
