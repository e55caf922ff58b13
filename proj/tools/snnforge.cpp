// snnforge command line: run, train, bench, inspect, validate.
// Exit status: 0 success, 1 config diagnostics, 2 runtime or usage error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "snnforge/snnforge.hpp"

namespace fs = std::filesystem;
using namespace snnforge;

namespace {

constexpr int kOk = 0, kDiagnostics = 1, kRuntime = 2;

bool is_config_problem(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse_error:
    case ErrorCode::schema_error:
    case ErrorCode::validation_failed:
    case ErrorCode::unknown_model:
    case ErrorCode::shape_mismatch:
    case ErrorCode::duplicate_name:
    case ErrorCode::non_differentiable_op:
      return true;
    default:
      return false;
  }
}

Strategy parse_strategy(const std::string& s) { return s == "serial" ? Strategy::serial : Strategy::parallel; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NetworkSpec load_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  auto spec = load_config(path);
  apply_seed_env(spec);
  if (seed) spec.seed = *seed;
  return spec;
}

// Print validation diagnostics; true when the config is usable.
bool report_diagnostics(const NetworkSpec& spec) {
  const auto diags = validate(spec);
  for (const auto& d : diags) std::cout << d.to_string() << "\n";
  return diags.empty();
}

int cmd_validate(const std::string& cfg) {
  const auto spec = load_config(cfg);
  if (!report_diagnostics(spec)) return kDiagnostics;
  const auto g = compile(spec);
  int status = kOk;
  for (const auto& d : g.diagnostics) {
    if (d.kind == DiagKind::empty_expansion) {
      std::cerr << "warning: " << d.to_string() << "\n";
      continue;
    }
    std::cout << d.to_string() << "\n";
    status = kDiagnostics;
  }
  return status;
}

int cmd_inspect(const std::string& cfg, const std::string& strategy) {
  const auto spec = load_config(cfg);
  if (!report_diagnostics(spec)) return kDiagnostics;
  const auto g = compile(spec, parse_strategy(strategy));
  std::cout << format_schedule(g);
  return kOk;
}

int cmd_run(const std::string& cfg, double time_ms, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& strategy) {
  const auto spec = load_with_seed(cfg, seed);
  if (!report_diagnostics(spec)) return kDiagnostics;
  auto t0 = std::chrono::steady_clock::now();
  const auto g = compile(spec, parse_strategy(strategy));
  const double compile_s = seconds_since(t0);
  auto s = SimState::create(g);
  Recorder rec(g);
  t0 = std::chrono::steady_clock::now();
  run(g, s, time_ms, &rec);
  const double run_s = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  export_monitors(rec, out);
  const double export_s = seconds_since(t0);
  json extra{{"time_ms", time_ms}, {"steps", s.step}};
  write_manifest(out, make_manifest(spec, "run", g.strategy,
                                    {{"compile", compile_s}, {"run", run_s}, {"export", export_s}}, extra));
  return kOk;
}

int cmd_train(const std::string& cfg, const std::string& dataset, int epochs, const std::string& out,
              std::optional<std::uint64_t> seed, std::size_t per_class, double sigma) {
  if (dataset != "synth") throw Error(ErrorCode::invalid_argument, dataset, "only the synth dataset is available");
  const auto spec = load_with_seed(cfg, seed);
  if (!report_diagnostics(spec)) return kDiagnostics;
  if (!spec.learner) throw Error(ErrorCode::invalid_argument, cfg, "config has no learner");
  auto t0 = std::chrono::steady_clock::now();
  const auto g = compile(spec);
  for (const auto& d : g.diagnostics)
    if (d.kind != DiagKind::empty_expansion) {
      std::cout << d.to_string() << "\n";
      return kDiagnostics;
    }
  const double compile_s = seconds_since(t0);

  std::size_t n = 0;
  for (const auto& e : encoder_inputs(g)) n += e.second;
  const auto* output = g.group(learner_output(g));
  if (!output) throw Error(ErrorCode::invalid_argument, "learner.output", "no output group");
  const auto classes = static_cast<std::size_t>(
      kernels::param_or(spec.learner->hyperparams, "classes", static_cast<double>(output->num)));
  const auto data = make_dataset(classes, n, per_class, sigma, spec.seed);

  fs::create_directories(out);
  std::string log = "epoch,loss,accuracy\n";
  auto weights = SimState::create(g);
  TrainOptions opt;
  opt.epochs = epochs;
  opt.on_epoch = [&](const EpochLog& e) {
    log += std::to_string(e.epoch) + "," + format_double(e.loss) + "," + format_double(e.accuracy) + "\n";
    std::cout << "epoch " << e.epoch << " loss " << e.loss << " accuracy " << e.accuracy << "\n";
  };
  t0 = std::chrono::steady_clock::now();
  const auto report = train(g, weights, data, opt);
  const double train_s = seconds_since(t0);
  write_text_file(fs::path(out) / "training_log.csv", log);
  weights.reset(g);
  save_model(spec, g, weights, (fs::path(out) / "model.snnf").string());
  json extra{{"dataset", {{"name", dataset}, {"classes", classes}, {"n", n}, {"samples_per_class", per_class},
                          {"sigma", sigma}}},
             {"epochs", epochs},
             {"final_accuracy", report.final_accuracy},
             {"best_accuracy", report.best_accuracy}};
  write_manifest(out, make_manifest(spec, "train", g.strategy, {{"compile", compile_s}, {"train", train_s}}, extra));
  return kOk;
}

int cmd_bench(const BenchOptions& o, const std::string& out) {
  const auto r = bench(o);
  std::cout << r.text();
  if (!out.empty()) {
    auto spec = bench_network(o);
    write_manifest(out, make_manifest(spec, "bench", Strategy::parallel, {{"total", r.total_s}, {"build", r.build_s}},
                                      json{{"bench", r.to_json()}}));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snnforge: compile, simulate and train spiking neural networks"};
  app.require_subcommand(1);

  std::string cfg, out = "out", strategy = "parallel", dataset = "synth";
  double time_ms = 100.0, sigma = 0.1;
  int epochs = 50;
  std::size_t per_class = 20;
  std::optional<std::uint64_t> seed;
  BenchOptions bo;
  std::string bench_out;

  auto* run = app.add_subcommand("run", "simulate a config and export monitors");
  run->add_option("config", cfg, "network config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--time", time_ms, "simulated time in ms");
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--strategy", strategy, "parallel or serial")->check(CLI::IsMember({"parallel", "serial"}));

  auto* trn = app.add_subcommand("train", "train the config's learner on a synthetic dataset");
  trn->add_option("config", cfg, "network config (JSON)")->required()->check(CLI::ExistingFile);
  trn->add_option("--dataset", dataset, "dataset name")->check(CLI::IsMember({"synth"}));
  trn->add_option("--epochs", epochs, "training epochs")->check(CLI::PositiveNumber);
  trn->add_option("--out", out, "output directory");
  trn->add_option("--seed", seed, "override the config seed");
  trn->add_option("--samples-per-class", per_class, "synthetic samples per class")->check(CLI::PositiveNumber);
  trn->add_option("--sigma", sigma, "synthetic noise level")->check(CLI::NonNegativeNumber);

  auto* bch = app.add_subcommand("bench", "time the Poisson -> LIF benchmark network");
  bch->add_option("--neurons", bo.neurons, "LIF neurons in the test layer")->check(CLI::PositiveNumber);
  bch->add_option("--cycles", bo.cycles, "timed cycles")->check(CLI::PositiveNumber);
  bch->add_option("--duration", bo.duration_ms, "ms per cycle");
  bch->add_option("--dt", bo.dt, "step in ms")->check(CLI::PositiveNumber);
  bch->add_option("--rate", bo.input_rate, "input Poisson rate in Hz")->check(CLI::NonNegativeNumber);
  bch->add_option("--seed", bo.seed, "random seed");
  bch->add_option("--out", bench_out, "write a manifest here");

  auto* ins = app.add_subcommand("inspect", "print the compiled schedule");
  ins->add_option("config", cfg, "network config (JSON)")->required()->check(CLI::ExistingFile);
  ins->add_option("--strategy", strategy, "parallel or serial")->check(CLI::IsMember({"parallel", "serial"}));

  auto* val = app.add_subcommand("validate", "check a config and print diagnostics");
  val->add_option("config", cfg, "network config (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kRuntime;
  }

  try {
    if (*run) return cmd_run(cfg, time_ms, seed, out, strategy);
    if (*trn) return cmd_train(cfg, dataset, epochs, out, seed, per_class, sigma);
    if (*bch) return cmd_bench(bo, bench_out);
    if (*ins) return cmd_inspect(cfg, strategy);
    if (*val) return cmd_validate(cfg);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_config_problem(e.code()) ? kDiagnostics : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
