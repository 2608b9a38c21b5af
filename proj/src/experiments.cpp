#include "lgra/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "lgra/cell.hpp"
#include "lgra/csv.hpp"
#include "lgra/error.hpp"
#include "lgra/fading_pdf.hpp"
#include "lgra/search.hpp"
#include "lgra/sim.hpp"
#include "lgra/state_evolution.hpp"

namespace lgra {

namespace {

constexpr const char* kBuildId = "lgra-1.0.0";

using Preset = std::vector<std::pair<std::string, std::string>>;

struct Context {
  std::string name;
  ScenarioConfig base;
  ExperimentOptions options;
  std::filesystem::path dir;
  ExperimentResult result;

  void write(const CsvTable& table, const std::string& file) {
    const std::filesystem::path p = dir / file;
    table.write(p.string());
    result.files.push_back(p.string());
  }
};

std::vector<double> lambda_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(i / 100.0);
  return g;
}

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(long long v) { return std::to_string(v); }

std::string opt_int(int v) { return v > 0 ? std::to_string(v) : std::string(); }

double success_level(const ScenarioConfig& c) { return std::max(c.target_pF, c.target_pM) + 0.01; }

MplSearchOptions search_options(const Context& ctx) {
  MplSearchOptions o;
  o.trials = ctx.options.trials;
  o.success_level = success_level(ctx.base);
  o.parallelism = ctx.options.parallelism;
  o.seed = ctx.base.rng_seed;
  return o;
}

SeSolution nogroup_bound(const ScenarioConfig& c, double lambda) {
  const Ring whole{0.0, c.cell_radius_m};
  ClusterModel m{c.n_users, c.tx_power_w(), c.noise_power_w(), ring_gain_distribution(c, whole)};
  return mpl_bound(m, lambda, c.target_pF, c.target_pM, true);
}

int reduced_trials(int trials, int divisor) { return std::max(2, trials / divisor); }

void write_trials(Context& ctx, const BatchReport& rep, const Simulator& sim, const std::string& series) {
  const std::filesystem::path p = ctx.dir / "trials" / (ctx.name + "_" + series + ".csv");
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  out << trial_csv_header() << "\n";
  for (const TrialResult& tr : rep.trials) out << trial_csv_row(tr, sim) << "\n";
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  ctx.result.files.push_back(p.string());
}

// Configuration with K clusters over default rings and the group count
// implied by a fixed user population.
ScenarioConfig with_clusters(ScenarioConfig c, int k, int group_size) {
  c.n_clusters = k;
  c.cluster_rings.clear();
  c.group_size = group_size;
  c.groups_per_cluster = std::max(1, c.n_users / (k * group_size));
  return c;
}

ScenarioConfig nogroup_config(ScenarioConfig c) {
  c.grouping = false;
  c.n_clusters = 1;
  c.cluster_rings.clear();
  c.groups_per_cluster = c.n_users;
  return c;
}

// --- Experiments -----------------------------------------------------------

void mpl_vs_sparsity(Context& ctx) {
  const ScenarioConfig& c = ctx.base;
  const double snr = c.tx_power_w() / c.noise_power_w();
  const int M = c.groups_per_cluster;
  CsvTable t({"lambda", "groups", "snr_db", "mnac_L", "bound_L", "dynamic_L", "simulated_L"});
  for (double lam : lambda_grid()) {
    RingProblem p{c, Ring{0.0, c.cell_radius_m}, M, lam};
    const MplSearchResult r = simulated_mpl(p, search_options(ctx));
    ClusterModel model{M, c.tx_power_w(), c.noise_power_w(), ring_gain_distribution(c, p.ring)};
    const SeSolution b = mpl_bound(model, lam, c.target_pF, c.target_pM, true);
    t.add_row({num(lam), num(M), num(10.0 * std::log10(snr)), num(mnac_baseline(M, lam * M, snr)), num(b.relaxed),
               num(b.dynamic), opt_int(r.simulated)});
  }
  ctx.write(t, "mpl_vs_sparsity.csv");
}

void bound_vs_power(Context& ctx) {
  CsvTable t({"series", "R1", "R2", "groups", "lambda", "tx_power_dbm", "bound_L", "dynamic_L", "simulated_L"});
  const double lam = ctx.base.sparsity;
  for (double p_dbm : {13.0, 18.0, 23.0}) {
    ScenarioConfig c = ctx.base;
    c.tx_power_dbm = p_dbm;
    const auto rings = c.rings();
    for (std::size_t k = 0; k < rings.size(); ++k) {
      RingProblem p{c, rings[k], c.groups_per_cluster, lam};
      const MplSearchResult r = simulated_mpl(p, search_options(ctx));
      ClusterModel model{p.groups, c.tx_power_w(), c.noise_power_w(), ring_gain_distribution(c, rings[k])};
      const SeSolution b = mpl_bound(model, lam, c.target_pF, c.target_pM, true);
      t.add_row({"cluster" + std::to_string(k + 1), num(rings[k].inner), num(rings[k].outer), num(p.groups), num(lam),
                 num(p_dbm), num(b.relaxed), num(b.dynamic), opt_int(r.simulated)});
    }
    const SeSolution ng = nogroup_bound(c, lam);
    t.add_row({"nogroup", num(0.0), num(c.cell_radius_m), num(c.n_users), num(lam), num(p_dbm), num(ng.relaxed),
               num(ng.dynamic), ""});
  }
  ctx.write(t, "bound_vs_power.csv");
}

void bound_vs_coverage(Context& ctx) {
  const ScenarioConfig& c = ctx.base;
  CsvTable t({"series", "R1", "R2", "groups", "lambda", "bound_L", "dynamic_L", "simulated_L", "ratio"});
  const auto rings = c.rings();
  for (double lam : {0.01, 0.03, 0.05}) {
    for (const Ring& ring : rings) {
      RingProblem p{c, ring, c.groups_per_cluster, lam};
      const MplSearchResult r = simulated_mpl(p, search_options(ctx));
      ClusterModel model{p.groups, c.tx_power_w(), c.noise_power_w(), ring_gain_distribution(c, ring)};
      const SeSolution b = mpl_bound(model, lam, c.target_pF, c.target_pM, true);
      t.add_row({"grouped", num(ring.inner), num(ring.outer), num(p.groups), num(lam), num(b.relaxed), num(b.dynamic),
                 opt_int(r.simulated), r.simulated > 0 ? num(r.simulated / static_cast<double>(b.L_bound)) : ""});
    }
    const SeSolution ng = nogroup_bound(c, lam);
    t.add_row({"nogroup", num(0.0), num(c.cell_radius_m), num(c.n_users), num(lam), num(ng.relaxed), num(ng.dynamic),
               "", ""});
  }
  ctx.write(t, "bound_vs_coverage.csv");
}

void pfpm_vs_power(Context& ctx) {
  struct Series {
    std::string name;
    bool grouped;
    int k;
    int length;
  };
  const std::vector<Series> series = {{"grouped_K4_L100", true, 4, 100},
                                      {"grouped_K4_L200", true, 4, 200},
                                      {"grouped_K2_L400", true, 2, 400},
                                      {"nogroup_L400", false, 1, 400},
                                      {"nogroup_L2600", false, 1, 2600}};
  CsvTable t({"series", "K", "M", "L", "tx_power_dbm", "pF", "pM", "pF_stderr", "pM_stderr", "trials"});
  for (const Series& s : series) {
    ScenarioConfig c = s.grouped ? with_clusters(ctx.base, s.k, ctx.base.group_size) : nogroup_config(ctx.base);
    c.strategy = Strategy::kFixed;
    c.fixed_preamble_len = s.length;
    const CellState cell = build_cell(c, c.rng_seed);
    const int trials = s.grouped ? ctx.options.trials : reduced_trials(ctx.options.trials, 20);
    for (double p_dbm : {10.0, 15.0, 20.0, 25.0, 30.0}) {
      ScenarioConfig cp = c;
      cp.tx_power_dbm = p_dbm;
      const Simulator sim(cp, cell);
      const BatchReport rep = run_batch(sim, trials, ctx.options.parallelism);
      const int m = static_cast<int>(std::lround(static_cast<double>(cell.groups.size()) / cell.clusters.size()));
      t.add_row({s.name, num(s.k), num(m), num(s.length), num(p_dbm), num(rep.pF.mean), num(rep.pM.mean),
                 num(rep.pF.stderr_), num(rep.pM.stderr_), num(trials)});
      write_trials(ctx, rep, sim, s.name + "_P" + num(p_dbm));
    }
  }
  ctx.write(t, "pfpm_vs_power.csv");
}

void ps_vs_sparsity(Context& ctx) {
  const ScenarioConfig& c = ctx.base;
  const CellState cell = build_cell(c, c.rng_seed);
  CsvTable t({"lambda", "strategy", "pS", "mean_L", "stderr"});
  const std::vector<std::pair<std::string, int>> strategies = {{"fixed64", 64}, {"fixed128", 128}, {"fixed256", 256},
                                                               {"DPS", 0}};
  for (double lam : lambda_grid()) {
    for (const auto& [name, length] : strategies) {
      ScenarioConfig cs = c;
      cs.sparsity = lam;
      if (length > 0) {
        cs.strategy = Strategy::kFixed;
        cs.fixed_preamble_len = length;
      } else {
        cs.strategy = Strategy::kDps;
      }
      const Simulator sim(cs, cell);
      const BatchReport rep = run_batch(sim, ctx.options.trials, ctx.options.parallelism);
      t.add_row({num(lam), name, num(rep.pS.mean), num(rep.mean_L.mean), num(rep.pS.stderr_)});
      write_trials(ctx, rep, sim, name + "_lambda" + num(lam));
    }
  }
  ctx.write(t, "ps_vs_sparsity.csv");
}

std::vector<std::string> energy_columns(const std::string& axis) {
  return {axis,        "scheme",    "group_size", "groups_per_cluster", "trials",         "pS",
          "pS_stderr", "mean_L",    "eps_pmb1",   "eps_wait1",          "eps_pcs1",       "eps_pmb2",
          "eps_wait2", "eps_pcs2",  "eps_total",  "eps_total_stderr",   "eps_theoretical", "eps_per_group"};
}

std::vector<std::string> energy_row(const std::string& axis_value, const std::string& scheme, int group_size,
                                    int groups, int trials, const BatchReport& r) {
  return {axis_value,
          scheme,
          num(group_size),
          num(groups),
          num(trials),
          num(r.pS.mean),
          num(r.pS.stderr_),
          num(r.mean_L.mean),
          num(r.pmb1.mean),
          num(r.wait1.mean),
          num(r.pcs1.mean),
          num(r.pmb2.mean),
          num(r.wait2.mean),
          num(r.pcs2.mean),
          num(r.energy_total.mean),
          num(r.energy_total.stderr_),
          num(r.energy_theoretical.mean),
          num(r.energy_per_group.mean)};
}

std::vector<std::string> paging_row(const std::string& axis_value, const ScenarioConfig& c) {
  std::vector<std::string> row(energy_columns("").size());
  row[0] = axis_value;
  row[1] = "group_paging";
  row[2] = num(c.group_size);
  row[14] = num(group_paging_energy(c));
  row[15] = num(0.0);
  return row;
}

struct NogroupRun {
  BatchReport report;
  int trials = 0;
};

NogroupRun run_nogroup(Context& ctx) {
  const ScenarioConfig c = nogroup_config(ctx.base);
  const Simulator sim(c);
  NogroupRun r;
  r.trials = reduced_trials(ctx.options.trials, 10);
  r.report = run_batch(sim, r.trials, ctx.options.parallelism);
  write_trials(ctx, r.report, sim, "nogroup");
  return r;
}

void energy_vs_K(Context& ctx) {
  CsvTable t(energy_columns("K"));
  const NogroupRun ng = run_nogroup(ctx);
  for (int k : {2, 4, 8}) {
    const ScenarioConfig c = with_clusters(ctx.base, k, ctx.base.group_size);
    const Simulator sim(c);
    const BatchReport rep = run_batch(sim, ctx.options.trials, ctx.options.parallelism);
    t.add_row(energy_row(num(k), "grouped", c.group_size, sim.cell().group_count(0), ctx.options.trials, rep));
    t.add_row(energy_row(num(k), "nogroup", 1, ctx.base.n_users, ng.trials, ng.report));
    t.add_row(paging_row(num(k), c));
    write_trials(ctx, rep, sim, "grouped_K" + num(k));
  }
  ctx.write(t, "energy_vs_K.csv");
}

void energy_vs_groupsize(Context& ctx) {
  CsvTable t(energy_columns("group_size"));
  const NogroupRun ng = run_nogroup(ctx);
  for (int gs : {5, 10, 20}) {
    const ScenarioConfig c = with_clusters(ctx.base, ctx.base.n_clusters, gs);
    const Simulator sim(c);
    const BatchReport rep = run_batch(sim, ctx.options.trials, ctx.options.parallelism);
    t.add_row(energy_row(num(gs), "grouped", gs, sim.cell().group_count(0), ctx.options.trials, rep));
    t.add_row(energy_row(num(gs), "nogroup", 1, ctx.base.n_users, ng.trials, ng.report));
    t.add_row(paging_row(num(gs), c));
    write_trials(ctx, rep, sim, "grouped_gs" + num(gs));
  }
  ctx.write(t, "energy_vs_groupsize.csv");
}

void capacity(Context& ctx) {
  const ScenarioConfig& c = ctx.base;
  CsvTable t({"lambda", "scheme", "L", "K", "group_size", "groups_per_cluster", "n_users"});
  for (double lam : lambda_grid()) {
    for (bool grouped : {true, false}) {
      CapacityQuery q;
      q.length = c.fixed_preamble_len;
      q.lambda = lam;
      q.grouped = grouped;
      q.n_clusters = c.n_clusters;
      q.group_size = c.group_size;
      const CapacityResult r = capacity_search(c, q);
      t.add_row({num(lam), grouped ? "grouped" : "nogroup", num(q.length), num(r.n_clusters), num(r.group_size),
                 num(r.groups_per_cluster), num(r.n_users)});
    }
  }
  ctx.write(t, "capacity.csv");
}

void delay_vs_K(Context& ctx) {
  CsvTable t({"K", "groups_per_cluster", "trials", "t1", "twait1", "tpcs1", "t2", "twait2", "tpcs2", "delay_total",
              "delay_total_stderr"});
  for (int k : {2, 4, 8}) {
    const ScenarioConfig c = with_clusters(ctx.base, k, ctx.base.group_size);
    const Simulator sim(c);
    const BatchReport r = run_batch(sim, ctx.options.trials, ctx.options.parallelism);
    t.add_row({num(k), num(sim.cell().group_count(0)), num(ctx.options.trials), num(r.t1.mean), num(r.twait1.mean),
               num(r.tpcs1.mean), num(r.t2.mean), num(r.twait2.mean), num(r.tpcs2.mean), num(r.delay_total.mean),
               num(r.delay_total.stderr_)});
    write_trials(ctx, r, sim, "K" + num(k));
  }
  ctx.write(t, "delay_vs_K.csv");
}

struct Entry {
  Preset preset;
  std::function<void(Context&)> run;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r = {
      {"mpl_vs_sparsity",
       {{{"unit_gain", "true"},
         {"small_scale_fading", "false"},
         {"shadowing_var", "0"},
         {"noise_power_dbm", "13"},
         {"prior_lambda", "true"}},
        mpl_vs_sparsity}},
      {"bound_vs_power", {{{"prior_lambda", "true"}}, bound_vs_power}},
      {"bound_vs_coverage", {{{"prior_lambda", "true"}}, bound_vs_coverage}},
      {"pfpm_vs_power", {{{"threshold_mode", "oracle_balanced"}}, pfpm_vs_power}},
      {"ps_vs_sparsity", {{}, ps_vs_sparsity}},
      {"energy_vs_K", {{}, energy_vs_K}},
      {"energy_vs_groupsize", {{}, energy_vs_groupsize}},
      {"capacity", {{{"fixed_preamble_len", "300"}, {"n_clusters", "8"}, {"group_size", "20"}}, capacity}},
      {"delay_vs_K", {{}, delay_vs_K}},
  };
  return r;
}

const Entry& lookup(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) {
    std::string known;
    for (const std::string& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "mpl_vs_sparsity", "bound_vs_power", "bound_vs_coverage", "pfpm_vs_power", "ps_vs_sparsity",
      "energy_vs_K",     "energy_vs_groupsize", "capacity",      "delay_vs_K"};
  return names;
}

ScenarioConfig experiment_config(const std::string& name, const ExperimentOptions& options) {
  const Entry& e = lookup(name);
  ScenarioConfig c;
  for (const auto& [k, v] : e.preset) set_config_value(c, k, v);
  if (!options.config_file.empty()) c = load_config_file(options.config_file, c);
  for (const auto& [k, v] : options.overrides) set_config_value(c, k, v);
  if (options.seed) c.rng_seed = *options.seed;
  c.validate();
  return c;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& options) {
  const Entry& entry = lookup(name);
  if (options.trials < 1) throw ConfigError("trials must be at least 1");
  if (options.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  Context ctx;
  ctx.name = name;
  ctx.options = options;
  ctx.base = experiment_config(name, options);
  ctx.dir = options.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  if (ec || !std::filesystem::is_directory(ctx.dir)) {
    throw std::runtime_error("cannot create output directory '" + options.out_dir + "'");
  }

  const auto start = std::chrono::steady_clock::now();
  entry.run(ctx);
  ctx.result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path manifest = ctx.dir / "manifest.txt";
  std::ofstream out(manifest);
  if (!out) throw std::runtime_error("cannot write '" + manifest.string() + "'");
  out << "experiment = " << name << "\n";
  out << "build_id = " << kBuildId << "\n";
  out << "trials = " << options.trials << "\n";
  out << "parallelism = " << options.parallelism << "\n";
  out << "seed = " << ctx.base.rng_seed << "\n";
  out << "wall_time_s = " << format_number(ctx.result.wall_seconds) << "\n";
  out << "non_measured_keys = wait_power_mw, pcs_power_mw, pcs_symbols, phase1_wait_symbols, gp_preamble_symbols, "
         "gp_attempts, gp_wait_symbols\n";
  for (const std::string& f : ctx.result.files) {
    out << "output = " << std::filesystem::relative(f, ctx.dir).string() << "\n";
  }
  out << "# resolved configuration\n";
  for (const auto& [k, v] : config_entries(ctx.base)) out << k << " = " << v << "\n";
  if (!out) throw std::runtime_error("cannot write '" + manifest.string() + "'");
  ctx.result.files.push_back(manifest.string());
  return ctx.result;
}

}  // namespace lgra
