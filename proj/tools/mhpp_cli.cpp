// mhpp: instance generation, solving, benchmark sweeps and exploration episodes.
//
// Exit codes: 0 ok, 1 usage, 2 input or generation error, 3 infeasible,
// 4 time/expansion budget spent without any solution.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mhpp/baselines.hpp"
#include "mhpp/exploresim.hpp"
#include "mhpp/instance.hpp"
#include "mhpp/peaf.hpp"

namespace {

using namespace mhpp;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoSolution = 4;

struct Setting {
  std::size_t nodes, gv, av;
};

const std::map<std::string, Setting> kPresets = {
    {"setting-a", {60, 3, 3}},
    {"setting-b", {150, 10, 10}},
    {"desk", {20, 2, 2}},
};

struct RunResult {
  std::string status;
  Cost makespan = kInfiniteCost;
  Cost total = kInfiniteCost;
  double time_to_best_ms = 0;
  SolverReport report;
};

struct SolveConfig {
  std::string algo = "peaf";
  std::optional<long> time_limit_ms;
  std::optional<std::size_t> expansion_limit;
  double eps0 = 0.5;
  double eps_decay = 0.5;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one algorithm; exceptions from baselines become statuses.
RunResult run_algorithm(const MhppInstance& inst, const SolveConfig& cfg) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.algo == "peaf") {
    PeafOptions opts;
    opts.eps0 = cfg.eps0;
    opts.eps_decay = cfg.eps_decay;
    if (cfg.time_limit_ms) opts.time_limit = std::chrono::milliseconds(*cfg.time_limit_ms);
    opts.expansion_limit = cfg.expansion_limit;
    r.report = solve_peaf(inst, opts);
  } else {
    try {
      Solution sol;
      if (cfg.algo == "b1") sol = greedy_b1(inst);
      else if (cfg.algo == "b2") sol = greedy_b2(inst);
      else sol = brute_force_oracle(inst);
      r.report = single_solution_report(cfg.algo, sol, ms_since(t0));
      if (cfg.algo == "oracle") r.report.status = SolveStatus::Optimal;
    } catch (const InfeasibleInstance&) {
      r.report.algorithm = cfg.algo;
      r.report.status = SolveStatus::Infeasible;
      r.report.elapsed_ms = ms_since(t0);
    }
  }
  r.status = std::string(status_name(r.report.status));
  if (r.report.best) {
    r.makespan = r.report.best->makespan;
    r.total = r.report.best->total;
  }
  r.time_to_best_ms = r.report.time_to_best_ms();
  return r;
}

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::NoSolution: return kExitNoSolution;
    default: return 0;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string cost_str(Cost c) { return c == kInfiniteCost ? "" : std::to_string(c); }

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string map, out, preset;
  std::size_t nodes = 0, gv = 0, av = 0;
  std::uint64_t seed = 1;
};

int cmd_gen(const GenArgs& a, bool nodes_set, bool gv_set, bool av_set) {
  Setting s{a.nodes, a.gv, a.av};
  if (!a.preset.empty()) {
    const Setting p = kPresets.at(a.preset);
    if (!nodes_set) s.nodes = p.nodes;
    if (!gv_set) s.gv = p.gv;
    if (!av_set) s.av = p.av;
  }
  if (s.nodes == 0 || s.gv + s.av == 0) {
    std::cerr << "gen: need --nodes > 0 and at least one agent (or --preset)\n";
    return kExitUsage;
  }
  try {
    const TerrainGrid grid = load_map_file(a.map);
    const MhppInstance inst = generate_random_instance(grid, s.nodes, gv_av_fleet(s.gv, s.av), a.seed, {}, a.map);
    save_instance(inst, a.out);
  } catch (const std::exception& e) {
    std::cerr << "gen: " << e.what() << "\n";
    return kExitInput;
  }
  std::cout << "wrote " << a.out << " (" << s.nodes << " nodes, " << s.gv << " GV, " << s.av << " AV)\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const SolveConfig& cfg, const std::string& report_path) {
  std::optional<MhppInstance> inst;
  try {
    inst.emplace(load_instance(instance_path));
  } catch (const std::exception& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return kExitInput;
  }
  RunResult r;
  try {
    r = run_algorithm(*inst, cfg);
  } catch (const OracleRefused& e) {
    std::cerr << "solve: " << e.what() << "\n";
    return kExitInput;
  }
  if (!report_path.empty()) write_file(report_path, report_to_json(r.report));
  std::cout << "algo " << cfg.algo << "  status " << r.status;
  if (r.report.best) {
    const ValidationResult v = validate_solution(*inst, *r.report.best);
    std::cout << "  makespan " << r.makespan << "  total " << r.total << "  time_to_best_ms " << std::fixed
              << std::setprecision(1) << r.time_to_best_ms << (v.ok() ? "" : "  INVALID: " + v.message);
  }
  std::cout << "\n";
  return exit_code_for(r.report.status);
}

struct BenchArgs {
  std::vector<std::string> maps;
  std::string setting = "desk";
  std::optional<std::size_t> nodes, gv, av;
  std::size_t seeds = 30;
  std::uint64_t seed_start = 1;
  std::string algos = "b1,b2,peaf";
  SolveConfig solve;
  unsigned jobs = 1;
  bool no_timing = false;
  std::string out;
};

int cmd_bench(BenchArgs a) {
  const auto algos = split_list(a.algos);
  if (algos.empty()) {
    std::cerr << "bench: empty algorithm list\n";
    return kExitUsage;
  }
  for (const auto& al : algos)
    if (al != "peaf" && al != "b1" && al != "b2" && al != "oracle") {
      std::cerr << "bench: unknown algorithm '" << al << "'\n";
      return kExitUsage;
    }
  Setting s{20, 2, 2};
  if (auto it = kPresets.find(a.setting); it != kPresets.end()) s = it->second;
  if (a.nodes) s.nodes = *a.nodes;
  if (a.gv) s.gv = *a.gv;
  if (a.av) s.av = *a.av;

  struct Cell {
    std::size_t map;
    std::uint64_t seed;
    std::string algo;
    RunResult result;
  };
  std::vector<Cell> cells;
  std::vector<std::optional<TerrainGrid>> grids;
  for (std::size_t m = 0; m < a.maps.size(); ++m) {
    try {
      grids.emplace_back(load_map_file(a.maps[m]));
    } catch (const std::exception& e) {
      std::cerr << "bench: " << e.what() << "\n";
      return kExitInput;
    }
    for (std::size_t i = 0; i < a.seeds; ++i)
      for (const auto& al : algos) cells.push_back({m, a.seed_start + i, al, {}});
  }

  // Independent cells run in a worker pool; rows are written in cell order.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      SolveConfig cfg = a.solve;
      cfg.algo = c.algo;
      try {
        const MhppInstance inst =
            generate_random_instance(*grids[c.map], s.nodes, gv_av_fleet(s.gv, s.av), c.seed, {}, a.maps[c.map]);
        c.result = run_algorithm(inst, cfg);
      } catch (const std::exception& e) {
        c.result.status = std::string("error: ") + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::max(1u, a.jobs); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "map,setting,seed,algo,makespan,total,time_to_best_ms,status\n";
  for (const auto& c : cells) {
    std::string status = c.result.status;
    std::replace(status.begin(), status.end(), ',', ';');
    csv << std::filesystem::path(a.maps[c.map]).stem().string() << ',' << a.setting << ',' << c.seed << ','
        << c.algo << ',' << cost_str(c.result.makespan) << ',' << cost_str(c.result.total) << ',';
    if (!a.no_timing) csv << std::fixed << std::setprecision(3) << c.result.time_to_best_ms;
    csv << ',' << status << '\n';
  }
  if (a.out.empty()) std::cout << csv.str();
  else write_file(a.out, csv.str());

  // Per-map averages over runs that produced a solution.
  std::cout << std::left << std::setw(16) << "map" << std::setw(8) << "algo" << std::right << std::setw(14)
            << "avg max" << std::setw(14) << "avg sum" << std::setw(12) << "avg ms" << std::setw(8) << "runs"
            << "\n";
  for (std::size_t m = 0; m < a.maps.size(); ++m)
    for (const auto& al : algos) {
      double mk = 0, tot = 0, ms = 0;
      std::size_t n = 0;
      for (const auto& c : cells)
        if (c.map == m && c.algo == al && c.result.makespan != kInfiniteCost) {
          mk += static_cast<double>(c.result.makespan);
          tot += static_cast<double>(c.result.total);
          ms += c.result.time_to_best_ms;
          ++n;
        }
      const double d = n ? static_cast<double>(n) : 1.0;
      std::cout << std::left << std::setw(16) << std::filesystem::path(a.maps[m]).stem().string() << std::setw(8)
                << al << std::right << std::fixed << std::setprecision(1) << std::setw(14) << mk / d
                << std::setw(14) << tot / d << std::setw(12) << ms / d << std::setw(8) << n << "\n";
    }
  return 0;
}

struct ExploreArgs {
  std::string scenario, ablate = "full", out_dir = "explore_out";
  std::optional<double> alpha;
  std::optional<std::size_t> tick_cap;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 5;
};

int cmd_explore(const ExploreArgs& a) {
  std::optional<explore::ExploreScenario> sc;
  try {
    sc.emplace(explore::load_scenario(a.scenario));
  } catch (const std::exception& e) {
    std::cerr << "explore: " << e.what() << "\n";
    return kExitInput;
  }
  auto& p = sc->params;
  if (a.ablate == "nopr" || a.ablate == "nolo") p.priority_assignment = false;
  if (a.ablate == "nohe" || a.ablate == "nolo") p.hetero_cost = false;
  if (a.alpha) p.alpha = *a.alpha;
  if (a.tick_cap) p.tick_cap = *a.tick_cap;
  const std::uint64_t base_seed = a.seed ? *a.seed : p.seed;

  std::filesystem::create_directories(a.out_dir);
  std::ostringstream summary;
  summary << "trial,seed,ticks,complete,total_distance\n";
  double sum_ticks = 0, sum_len = 0;
  std::size_t incomplete = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    p.seed = base_seed + t;
    explore::EpisodeMetrics m;
    try {
      m = explore::run_episode(*sc);
    } catch (const std::exception& e) {
      std::cerr << "explore: " << e.what() << "\n";
      return kExitInput;
    }
    const std::string stem = (std::filesystem::path(a.out_dir) / ("trial_" + std::to_string(t))).string();
    write_file(stem + ".json", explore::metrics_to_json(m));
    write_file(stem + ".csv", explore::trace_to_csv(m));
    summary << t << ',' << p.seed << ',' << m.ticks << ',' << (m.complete ? 1 : 0) << ',' << m.total_distance << '\n';
    sum_ticks += static_cast<double>(m.ticks);
    sum_len += static_cast<double>(m.total_distance) / 1000.0;
    incomplete += !m.complete;
  }
  write_file((std::filesystem::path(a.out_dir) / "summary.csv").string(), summary.str());
  const double n = static_cast<double>(std::max<std::size_t>(a.trials, 1));
  std::cout << "ablation " << a.ablate << "  alpha " << p.alpha << "  trials " << a.trials << "\n"
            << std::fixed << std::setprecision(1) << "mean time (ticks) " << sum_ticks / n
            << "  mean total length (cells) " << sum_len / n;
  if (incomplete) std::cout << "  INCOMPLETE: " << incomplete << " trial(s) hit the tick cap";
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-max mHPP solvers, benchmarks and exploration simulator"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a random instance on a map");
  g->add_option("--map", gen.map, "MovingAI map file")->required()->check(CLI::ExistingFile);
  auto* g_nodes = g->add_option("--nodes", gen.nodes, "number of target nodes");
  auto* g_gv = g->add_option("--gv", gen.gv, "ground vehicles");
  auto* g_av = g->add_option("--av", gen.av, "aerial vehicles");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--out", gen.out, "instance JSON to write")->required();
  g->add_option("--preset", gen.preset, "setting-a (60 nodes, 3+3) or setting-b (150 nodes, 10+10)")
      ->check(CLI::IsMember({"setting-a", "setting-b", "desk"}));

  std::string instance_path, report_path;
  SolveConfig solve;
  long time_limit = 1000;
  auto* s = app.add_subcommand("solve", "solve an instance file");
  s->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
  s->add_option("--algo", solve.algo)->check(CLI::IsMember({"peaf", "b1", "b2", "oracle"}));
  auto* s_tl = s->add_option("--time-limit-ms", time_limit, "PEAF wall-clock budget (default 1000)");
  auto* s_exp = s->add_option("--expansion-limit", solve.expansion_limit, "deterministic PEAF budget");
  s->add_option("--eps0", solve.eps0);
  s->add_option("--eps-decay", solve.eps_decay);
  s->add_option("--report", report_path, "SolverReport JSON to write");

  BenchArgs bench;
  long bench_tl = 1000;
  auto* b = app.add_subcommand("bench", "seed sweep x algorithm matrix to CSV");
  b->add_option("--map", bench.maps, "map file(s)")->required()->check(CLI::ExistingFile);
  b->add_option("--setting", bench.setting, "preset name: setting-a, setting-b, desk");
  b->add_option("--nodes", bench.nodes);
  b->add_option("--gv", bench.gv);
  b->add_option("--av", bench.av);
  b->add_option("--seeds", bench.seeds, "number of seeds");
  b->add_option("--seed-start", bench.seed_start);
  b->add_option("--algos", bench.algos, "comma-separated: peaf,b1,b2,oracle");
  auto* b_tl = b->add_option("--time-limit-ms", bench_tl);
  auto* b_exp = b->add_option("--expansion-limit", bench.solve.expansion_limit);
  b->add_option("--eps0", bench.solve.eps0);
  b->add_option("--eps-decay", bench.solve.eps_decay);
  b->add_option("--jobs", bench.jobs, "parallel workers");
  b->add_flag("--no-timing", bench.no_timing, "leave time_to_best_ms empty (byte-stable CSV)");
  b->add_option("--out", bench.out, "CSV file (default stdout)");

  ExploreArgs ex;
  auto* e = app.add_subcommand("explore", "run exploration episodes");
  e->add_option("--scenario", ex.scenario)->required()->check(CLI::ExistingFile);
  e->add_option("--trials", ex.trials);
  e->add_option("--ablate", ex.ablate)->check(CLI::IsMember({"full", "nopr", "nohe", "nolo"}));
  e->add_option("--alpha", ex.alpha);
  e->add_option("--seed", ex.seed, "seed of the first trial");
  e->add_option("--tick-cap", ex.tick_cap);
  e->add_option("--out-dir", ex.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen, g_nodes->count() > 0, g_gv->count() > 0, g_av->count() > 0);
    if (*s) {
      // An explicit expansion budget alone means no wall clock.
      if (s_tl->count() > 0 || s_exp->count() == 0) solve.time_limit_ms = time_limit;
      return cmd_solve(instance_path, solve, report_path);
    }
    if (*b) {
      if (b_tl->count() > 0 || b_exp->count() == 0) bench.solve.time_limit_ms = bench_tl;
      return cmd_bench(bench);
    }
    if (*e) return cmd_explore(ex);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
