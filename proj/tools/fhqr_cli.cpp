#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "fhqr/error.hpp"
#include "fhqr/harness.hpp"

namespace {

using namespace fhqr;

int run_simulate(SimConfig cfg, const std::string& out_path, std::size_t parallel) {
  const SweepResult result = run_sweep(cfg, parallel);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (out_path.empty()) {
    write_csv(result, std::cout);
    return 0;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot open output file '" + out_path + "'");
  write_csv(result, out);
  out.flush();
  if (!out) throw Error("failed writing '" + out_path + "'");
  std::cerr << "channel rank " << result.channel_rank << ", " << result.rows.size() << " rows written to "
            << out_path << '\n';
  return 0;
}

int run_analyze_cr(const SimConfig& cfg, const std::vector<std::size_t>& l_values) {
  const Scenario s = Scenario::build(cfg);
  std::cout << "users,l_u,b_org,b_cmp,b_ovh,cr\n";
  auto print = [&](std::size_t l_label, const CrReport& r) {
    std::printf("%zu,%zu,%llu,%llu,%llu,%.4f\n", s.allocations.size(), l_label,
                static_cast<unsigned long long>(r.b_org), static_cast<unsigned long long>(r.b_cmp),
                static_cast<unsigned long long>(r.b_ovh), r.cr);
  };
  if (l_values.empty()) {
    print(s.l_u.front(), s.qr_report);
    return 0;
  }
  for (std::size_t l : l_values) {
    std::vector<UserShape> shapes;
    for (const auto& a : s.allocations) shapes.push_back(UserShape{a.n_subcarriers(), l});
    print(l, compression_ratio(cfg.grid.symbol_length(), cfg.n_r, 2 * cfg.quant_bits, shapes));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QR-based fronthaul compression: simulation, compression-ratio analysis, benchmarks"};
  app.require_subcommand(1);
  bool full_scale = false;
  app.add_flag("--full-scale", full_scale, "Use the 256-antenna, 4096-point, 273-RB profile as the base")
      ->configurable(false);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  std::size_t parallel = 1;
  std::vector<std::size_t> l_values;
  std::size_t repeats = 10;
  bool no_svd = false;

  auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo BER sweep and write CSV");
  sim->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "CSV output path (stdout if omitted)");
  auto* seed_opt = sim->add_option("--seed", seed, "Master seed, overrides the config");
  sim->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_flag("--full-scale", full_scale);

  auto* cr = app.add_subcommand("analyze-cr", "Print payload sizes and compression ratios");
  cr->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  cr->add_option("--lu", l_values, "Fixed L_u values to tabulate (default: the config's policy)");
  cr->add_flag("--full-scale", full_scale);

  auto* bench = app.add_subcommand("bench", "Time QR and SVD-baseline compression");
  bench->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  bench->add_option("--repeats", repeats, "Runs per measurement")->check(CLI::PositiveNumber);
  bench->add_flag("--no-svd", no_svd, "Skip the SVD baseline");
  bench->add_flag("--full-scale", full_scale);

  CLI11_PARSE(app, argc, argv);

  try {
    SimConfig cfg = load_config(config_path, full_scale);
    if (*sim) {
      if (*seed_opt) cfg.seed = seed;
      return run_simulate(cfg, out_path, parallel);
    }
    if (*cr) return run_analyze_cr(cfg, l_values);
    BenchRequest req;
    req.repeats = repeats;
    req.include_svd = !no_svd;
    write_bench_table(benchmark_compressors(cfg, req), std::cout);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
