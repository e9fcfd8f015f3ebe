// Command-line front end: sample, validate, sweep, bound, log.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdswap/bdswap.hpp"

namespace {

using nlohmann::json;
using namespace bdswap;

struct WindowFlags {
  std::size_t dim = 2;
  std::vector<double> sides{1.0};
  bool torus = false;

  void add_to(CLI::App& app) {
    app.add_option("--dim", dim, "Window dimension (1-3)")->check(CLI::Range(1, 3));
    app.add_option("--side", sides, "Side length, once or per axis")->expected(1, 3);
    app.add_flag("--torus", torus, "Periodic boundary");
  }

  Window window() const { return Window(dim, std::span<const double>(sides), torus); }
};

json window_json(const Window& w) {
  json sides = json::array();
  for (std::size_t k = 0; k < w.dim(); ++k) sides.push_back(w.side(k));
  return {{"dim", w.dim()}, {"sides", sides}, {"torus", w.torus()}};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  return model_from_json(json::parse(in));
}

int run_sample(const std::string& model_path, double p_swap, std::uint64_t seed, const WindowFlags& wf,
               std::size_t n_initial, std::size_t cap, const std::string& out_path) {
  const AnyModel model = load_model(model_path);
  const Window window = wf.window();
  CftpOptions opt;
  opt.initial_events = n_initial;
  opt.doubling_cap = cap;
  const CftpResult res = std::visit([&](const auto& m) { return dominated_cftp(m, window, p_swap, seed, opt); }, model);
  json doc = {{"model", model_to_json(model)},
              {"window", window_json(window)},
              {"pswap", p_swap},
              {"seed", seed},
              {"N", res.events},
              {"doublings", res.doublings},
              {"events_replayed", res.events_replayed},
              {"count", res.sample.size()},
              {"points", configuration_to_json(res.sample, window)}};
  write_output(out_path, doc.dump(2) + "\n");
  return 0;
}

int run_log(const std::string& model_path, std::uint64_t seed, const WindowFlags& wf, std::size_t events,
            const std::string& out_path) {
  const AnyModel model = load_model(model_path);
  const Window window = wf.window();
  const double k = std::visit([](const auto& m) { return stability_constant(m); }, model);
  BackwardDominating process(window, k, seed);
  process.extend_to(events);
  write_output(out_path, serialize_log(process.log(), window.dim()));
  return 0;
}

int run_bound(double n, double beta1, double beta2, double radius, const WindowFlags& wf, const std::string& variant_name) {
  const Window window = wf.window();
  BoundVariant variant;
  if (variant_name == "no_swap") {
    variant = BoundVariant::no_swap;
  } else if (variant_name == "quarter_swap") {
    variant = BoundVariant::quarter_swap;
  } else {
    throw std::invalid_argument("variant must be no_swap or quarter_swap");
  }
  const BoundParameters p{beta1, beta2, ball_area(radius, window), window.volume()};
  json doc = {{"variant", to_string(variant)}, {"N", n}, {"regime_ok", in_regime(p, variant)}};
  if (in_regime(p, variant)) {
    doc["bound"] = theorem_bound(n, p, variant);
    doc["expected_events_bound"] = expected_events_bound(p, variant);
  } else {
    doc["bound"] = nullptr;
  }
  std::cout << doc.dump() << "\n";
  return 0;
}

int run_sweep(const std::vector<double>& beta1s, double beta2, double radius, const std::vector<double>& pswaps,
              std::size_t reps, std::uint64_t seed, const WindowFlags& wf, std::size_t threads,
              const std::string& out_path) {
  std::vector<GridCell> grid;
  for (double b1 : beta1s) {
    for (double ps : pswaps) grid.push_back({b1, beta2, radius, ps, wf.window()});
  }
  const auto rows = sweep(grid, reps, seed, threads);
  write_output(out_path, sweep_csv(rows));
  for (const auto& s : summarize_sweep(rows)) {
    std::cerr << "beta1=" << s.cell.beta1 << " pswap=" << s.cell.p_swap << " mean_events=" << s.mean_events
              << " se=" << s.se_events << " failures=" << s.failures << "\n";
  }
  return 0;
}

template <typename Model>
json oracle_comparison(const Model& model, const Window& window, double p_swap, std::size_t samples,
                       std::uint64_t seed) {
  std::vector<SampleSummary> chain, oracle;
  RandomStream stream(seed, StreamPurpose::oracle);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto res = dominated_cftp(model, window, p_swap, derive_seed(seed, i));
    chain.push_back(summarize(res.sample, model.range(), window));
    oracle.push_back(summarize(rejection_oracle(model, window, stream).sample, model.range(), window));
  }
  const auto r = two_sample_count_test(chain, oracle);
  return {{"pswap", p_swap},
          {"samples", samples},
          {"count_chi_square_p", r.count_chi_square.p_value},
          {"pairs_mean_p", r.pairs_mean.p_value},
          {"pairs_spread_p", r.pairs_spread.p_value},
          {"p_value", r.p_value},
          {"pass", r.passes(1e-3)}};
}

int run_validate(std::size_t samples, std::uint64_t seed, const std::string& out_path) {
  const Window unit;
  json report = {{"seed", seed}, {"samples", samples}};
  bool all = true;

  json oracle = json::array();
  for (const auto& params : {std::array<double, 3>{20, 0.5, 0.1}, std::array<double, 3>{10, 0.0, 0.05}}) {
    const StraussModel m(params[0], params[1], params[2]);
    for (double ps : {0.0, 1.0}) {
      auto entry = oracle_comparison(m, unit, ps, samples, seed);
      entry["model"] = model_to_json(m);
      all = all && entry["pass"].get<bool>();
      oracle.push_back(entry);
    }
  }
  report["oracle_agreement"] = oracle;

  {
    const Window tiny(2, {0.05, 0.05});
    const StraussModel hard(400.0, 0.0, 0.1);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < samples; ++i) ones += dominated_cftp(hard, tiny, 1.0, derive_seed(seed + 1, i)).sample.size() == 1;
    const double p = static_cast<double>(ones) / static_cast<double>(samples);
    const double se = std::sqrt(0.25 / static_cast<double>(samples));
    const bool pass = std::abs(p - 0.5) <= 3.0 * se;
    all = all && pass;
    report["hard_core_cell"] = {{"p_one", p}, {"expected", 0.5}, {"se", se}, {"pass", pass}};
  }

  {
    const StraussModel m(100.0, 0.5, 0.1);
    std::size_t violations = 0;
    const std::size_t runs = std::min<std::size_t>(samples, 100);
    for (double ps : {0.0, 1.0}) {
      for (std::size_t i = 0; i < runs; ++i) {
        BackwardDominating proc(unit, m.activity(), derive_seed(seed + 2, i));
        const std::size_t n = 200;
        proc.extend_to(2 * n);
        violations += !sandwich_audit(trace_replay(m, unit, proc.log(), n, ps)).pass;
        violations += !funnel_audit(m, unit, proc.log(), proc.log(), n, 2 * n, ps).pass;
      }
    }
    all = all && violations == 0;
    report["sandwich_funnel"] = {{"runs", runs}, {"violations", violations}, {"pass", violations == 0}};
  }

  report["pass"] = all;
  write_output(out_path, report.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect sampling of repulsive pairwise-interaction point processes with birth-death-swap chains"};
  app.require_subcommand(1);

  WindowFlags wf;
  std::uint64_t seed = 1;
  std::string out;

  auto* sample = app.add_subcommand("sample", "Draw one perfect sample by dominated CFTP");
  std::string model_path;
  double p_swap = 1.0;
  std::size_t n_initial = 0, cap = 40;
  sample->add_option("--model", model_path, "Model JSON file")->required();
  sample->add_option("--pswap", p_swap, "Swap probability")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--n-initial", n_initial, "Initial backward events (0: expected count)");
  sample->add_option("--cap", cap, "Maximum number of doublings");
  sample->add_option("--out", out, "Output JSON file ('-' for stdout)");
  wf.add_to(*sample);

  auto* log = app.add_subcommand("log", "Write a backward dominating event log as CSV");
  std::size_t log_events = 10;
  log->add_option("--model", model_path, "Model JSON file")->required();
  log->add_option("--events", log_events, "Number of backward events");
  log->add_option("--seed", seed, "Seed");
  log->add_option("--out", out, "Output CSV file ('-' for stdout)");
  wf.add_to(*log);

  auto* bound = app.add_subcommand("bound", "Evaluate the coalescence probability bound");
  double n_bound = 100, beta1 = 1.0, beta2 = 0.5, radius = 0.1;
  std::string variant = "no_swap";
  bound->add_option("--N", n_bound, "Backward events")->required();
  bound->add_option("--beta1", beta1, "Activity");
  bound->add_option("--beta2", beta2, "Interaction parameter");
  bound->add_option("--R", radius, "Interaction range");
  bound->add_option("--variant", variant, "no_swap or quarter_swap");
  wf.add_to(*bound);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the swap vs no-swap running-time sweep (CSV)");
  std::vector<double> beta1s{40, 80, 160}, pswaps{0, 1};
  std::size_t reps = 20, threads = default_threads();
  sweep_cmd->add_option("--beta1", beta1s, "Activities");
  sweep_cmd->add_option("--beta2", beta2, "Interaction parameter");
  sweep_cmd->add_option("--R", radius, "Interaction range");
  sweep_cmd->add_option("--pswap", pswaps, "Swap probabilities");
  sweep_cmd->add_option("--reps", reps, "Replications per cell");
  sweep_cmd->add_option("--seed", seed, "Base seed");
  sweep_cmd->add_option("--threads", threads, "Worker threads");
  sweep_cmd->add_option("--out", out, "Output CSV file ('-' for stdout)");
  wf.add_to(*sweep_cmd);

  auto* validate = app.add_subcommand("validate", "Run the statistical validation suite (JSON report)");
  std::size_t samples = 500;
  validate->add_option("--samples", samples, "Samples per comparison")->check(CLI::Range(2, 1000000));
  validate->add_option("--seed", seed, "Seed");
  validate->add_option("--out", out, "Output JSON file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return run_sample(model_path, p_swap, seed, wf, n_initial, cap, out);
    if (*log) return run_log(model_path, seed, wf, log_events, out);
    if (*bound) return run_bound(n_bound, beta1, beta2, radius, wf, variant);
    if (*sweep_cmd) return run_sweep(beta1s, beta2, radius, pswaps, reps, seed, wf, threads, out);
    if (*validate) return run_validate(samples, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
