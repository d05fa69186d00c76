// anolab: run, sweep, ablate and check from the command line.
//
//   anolab run|sweep|ablate --config <path> --out <dir> [--jobs N] [--seeds N] [-v]
//   anolab check [suite] [--jobs N]
//
// Exit codes: 0 success, 1 acceptance failure, 2 configuration error,
// 3 I/O error.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "anolab/acceptance.hpp"
#include "anolab/config.hpp"
#include "anolab/csv.hpp"
#include "anolab/errors.hpp"
#include "anolab/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Args {
  std::string config_path;
  std::string out_dir;
  unsigned jobs = 0;
  std::optional<int> seeds;
  bool verbose = false;
  bool dump_dataset = false;
  std::string suite = "all";
};

std::uint64_t seed_offset() {
  const char* raw = std::getenv("ANOLAB_SEED_OFFSET");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string_view s(raw);
  std::int64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || value < 0) {
    throw anolab::ConfigError("ANOLAB_SEED_OFFSET must be a non-negative integer", "ANOLAB_SEED_OFFSET");
  }
  return static_cast<std::uint64_t>(value);
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw anolab::IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

anolab::ExperimentConfig load(const Args& args) {
  auto config = anolab::load_config(args.config_path);
  if (args.seeds) config.seeds = *args.seeds;
  return config;
}

int cmd_run(const Args& args) {
  const auto config = load(args);
  if (config.optimizers.size() != 1) {
    throw anolab::ConfigError("run takes exactly one optimizer", "optimizer");
  }
  const auto run_config = config.run_config(seed_offset());
  const auto out = prepare_out(args.out_dir);
  const auto trace = anolab::run(run_config);
  anolab::emit_trace_csv(trace, out / "trace.csv");
  if (args.dump_dataset && config.problem.kind == anolab::ProblemKind::kLogreg) {
    const auto problem = config.problem.build(run_config.seed);
    const auto& lr = dynamic_cast<const anolab::LogisticRegression&>(*problem);
    anolab::write_dataset_csv(lr.data(), out / "dataset.csv");
  }
  if (args.verbose) {
    std::cerr << "run: " << trace.rows.size() << " rows";
    if (trace.diverged()) std::cerr << ", diverged at k=" << *trace.diverged_at;
    std::cerr << " -> " << (out / "trace.csv").string() << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Args& args) {
  const auto config = load(args);
  const auto base = config.run_config(seed_offset());
  const auto out = prepare_out(args.out_dir);
  const auto rows = anolab::noise_sweep(config.sigmas, config.named_optimizers(), base,
                                        {config.seeds, args.jobs});
  anolab::emit_summary_csv(rows, out / "sweep.csv");
  if (args.verbose) std::cerr << "sweep: " << rows.size() << " rows\n";
  return kExitOk;
}

int cmd_ablate(const Args& args) {
  const auto config = load(args);
  const auto base = config.run_config(seed_offset());
  const auto out = prepare_out(args.out_dir);
  const auto rows = anolab::ablation_grid(base, {config.seeds, args.jobs});
  anolab::emit_summary_csv(rows, out / "ablation.csv");
  if (args.verbose) std::cerr << "ablate: " << rows.size() << " rows\n";
  return kExitOk;
}

int cmd_check(const Args& args) {
  return anolab::acceptance::check(args.suite, {args.jobs}, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composable first-order optimizer lab (Ano, Anolog and ablations)"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", args.config_path, "key = value experiment file");
    auto* out = sub->add_option("--out", args.out_dir, "output directory");
    if (needs_config) {
      cfg->required()->check(CLI::ExistingFile);
      out->required();
    }
    sub->add_option("--jobs", args.jobs, "worker threads (default: logical processors)")
        ->check(CLI::Range(1u, 4096u));
    sub->add_option("--seeds", args.seeds, "override the seed count")->check(CLI::Range(1, 1000000));
    sub->add_flag("-v,--verbose", args.verbose, "progress on stderr");
  };

  auto* run = app.add_subcommand("run", "single run, writes trace.csv");
  add_common(run, true);
  run->add_flag("--dump-dataset", args.dump_dataset, "also write dataset.csv for logreg");
  auto* sweep = app.add_subcommand("sweep", "noise sweep, writes sweep.csv");
  add_common(sweep, true);
  auto* ablate = app.add_subcommand("ablate", "ablation grid, writes ablation.csv");
  add_common(ablate, true);
  auto* check = app.add_subcommand("check", "run the embedded acceptance suite");
  add_common(check, false);
  check->add_option("suite", args.suite,
                    "exactness, invariants, lemma_decay, rate_envelope, noise_ordering or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (ablate->parsed()) return cmd_ablate(args);
    return cmd_check(args);
  } catch (const anolab::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const anolab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
