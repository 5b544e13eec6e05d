// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: analytic tables, Monte Carlo sweeps, miss
// probability tables, station-file ingestion and increment histograms,
// emitting plot-ready CSV or JSON.
//
// Exit codes: 0 success, 2 usage error, 3 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spcache/spcache.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Table output
// ---------------------------------------------------------------------------

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_to_string(const Cell& c) {
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  char buf[64];
  if (std::holds_alternative<double>(c))
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
  else if (std::holds_alternative<std::int64_t>(c))
    std::snprintf(buf, sizeof buf, "%lld",
                  static_cast<long long>(std::get<std::int64_t>(c)));
  else
    std::snprintf(buf, sizeof buf, "%llu",
                  static_cast<unsigned long long>(std::get<std::uint64_t>(c)));
  return buf;
}

ordered_json cell_to_json(const Cell& c) {
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  return std::get<std::uint64_t>(c);
}

void write_stream(std::ostream& out, const Table& t, const std::string& format,
                  bool gnuplot_ready) {
  if (format == "json") {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json obj = ordered_json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i)
        obj[t.columns[i]] = cell_to_json(row[i]);
      rows.push_back(std::move(obj));
    }
    out << rows.dump(2) << '\n';
    return;
  }
  const char sep = gnuplot_ready ? ' ' : ',';
  if (gnuplot_ready) out << "# ";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? std::string(1, sep) : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? std::string(1, sep) : "") << cell_to_string(row[i]);
    out << '\n';
  }
}

void write_table(const std::string& path, const Table& t,
                 const std::string& format, bool gnuplot_ready) {
  if (path.empty()) {
    write_stream(std::cout, t, format, gnuplot_ready);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_stream(out, t, format, gnuplot_ready);
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Option plumbing
// ---------------------------------------------------------------------------

struct KRange {
  std::int64_t start = 1;
  std::int64_t end = 1;
  std::int64_t step = 1;
};

KRange parse_k_range(const std::string& s) {
  long long start = 1, end = 1, step = 1;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%lld:%lld:%lld%c", &start, &end, &step, &extra) == 3) {
  } else if (std::sscanf(s.c_str(), "%lld:%lld%c", &start, &end, &extra) == 2) {
    step = 1;
  } else if (std::sscanf(s.c_str(), "%lld%c", &start, &extra) == 1) {
    end = start;
    step = 1;
  } else {
    throw UsageError("bad k range '" + s + "' (expected start:end[:step])");
  }
  if (start < 1 || end < start || step < 1)
    throw UsageError("bad k range '" + s + "': need 1 <= start <= end, step >= 1");
  return KRange{start, end, step};
}

std::vector<spcache::Strategy> parse_strategies(const std::string& s,
                                                bool simulation) {
  std::vector<spcache::Strategy> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "uncoded") out.push_back(spcache::Strategy::uncoded);
    else if (item == "coded") out.push_back(spcache::Strategy::coded);
    else if (item == "coded-fast" && simulation)
      out.push_back(spcache::Strategy::coded_fast);
    else if (item == "nearest-k" && simulation)
      out.push_back(spcache::Strategy::nearest_k);
    else
      throw UsageError("unknown strategy '" + item + "'");
  }
  if (out.empty()) throw UsageError("nothing to compute: empty strategy list");
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
  return cfg;
}

// Flags override config values, config overrides defaults. Returns whether
// the option ended up explicitly provided by either source.
template <typename T>
bool merge_opt(const CLI::App& cmd, const json& cfg, const std::string& name,
               T& var) {
  const CLI::Option* opt = cmd.get_option("--" + name);
  if (opt->count() > 0) return true;
  const auto it = cfg.find(name);
  if (it == cfg.end()) return false;
  try {
    it->get_to(var);
  } catch (const json::exception&) {
    throw UsageError("config key '" + name + "' has the wrong type");
  }
  return true;
}

struct CommonOpts {
  double lambda = 1.8324e-5;
  double a = 2.0;
  double delta_max = 700.0;
  double r = 700.0;
  std::string k_range = "1:20";
  std::string out;
  std::string format = "csv";
  bool gnuplot_ready = false;
  std::string config;
};

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
  cmd->add_option("--format", o.format, "Output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--gnuplot-ready", o.gnuplot_ready,
                "Whitespace-separated table with '#' header (csv only)");
  cmd->add_option("--config", o.config,
                  "JSON config file; flags override config values");
}

void merge_output_opts(const CLI::App& cmd, const json& cfg, CommonOpts& o) {
  merge_opt(cmd, cfg, "out", o.out);
  merge_opt(cmd, cfg, "format", o.format);
  merge_opt(cmd, cfg, "gnuplot-ready", o.gnuplot_ready);
  if (o.format != "csv" && o.format != "json")
    throw UsageError("bad format '" + o.format + "'");
}

std::string source_tag(const spcache::SimPlan& plan) {
  return plan.stations ? "imported" : "hpp";
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct AnalyticOpts : CommonOpts {
  double q = 256.0;
  std::string strategies = "uncoded,coded";
};

int run_analytic(const CLI::App& cmd, AnalyticOpts& o) {
  const json cfg = load_config(o.config);
  merge_output_opts(cmd, cfg, o);
  merge_opt(cmd, cfg, "lambda", o.lambda);
  merge_opt(cmd, cfg, "a", o.a);
  merge_opt(cmd, cfg, "delta-max", o.delta_max);
  merge_opt(cmd, cfg, "q", o.q);
  merge_opt(cmd, cfg, "k-range", o.k_range);
  merge_opt(cmd, cfg, "strategies", o.strategies);

  const KRange kr = parse_k_range(o.k_range);
  const auto strategies = parse_strategies(o.strategies, /*simulation=*/false);
  bool want_uncoded = false, want_coded = false;
  for (auto s : strategies) {
    want_uncoded |= s == spcache::Strategy::uncoded;
    want_coded |= s == spcache::Strategy::coded;
  }

  Table t;
  t.columns = {"k"};
  if (want_uncoded) t.columns.push_back("W_p");
  if (want_coded) {
    t.columns.push_back("W_cmin");
    t.columns.push_back("W_cmin_plus_G0");
  }
  for (std::int64_t k = kr.start; k <= kr.end; k += kr.step) {
    spcache::ModelParams p;
    p.intensity = o.lambda;
    p.parts = k;
    p.exponent = o.a;
    p.cap_distance = o.delta_max;
    p.field_size = o.q;
    std::vector<Cell> row{Cell{k}};
    if (want_uncoded) row.emplace_back(spcache::expected_cost_uncoded(p));
    if (want_coded) {
      row.emplace_back(spcache::expected_cost_coded_min(p));
      row.emplace_back(spcache::coded_cost_upper(p));
    }
    t.rows.push_back(std::move(row));
  }
  write_table(o.out, t, o.format, o.gnuplot_ready);
  return 0;
}

struct MissOpts : CommonOpts {
  std::string strategies = "uncoded,coded";
  double epsilon = -1.0;  // < 0: no threshold report
  bool asymptotics = false;
};

int run_miss(const CLI::App& cmd, MissOpts& o) {
  const json cfg = load_config(o.config);
  merge_output_opts(cmd, cfg, o);
  merge_opt(cmd, cfg, "lambda", o.lambda);
  merge_opt(cmd, cfg, "r", o.r);
  merge_opt(cmd, cfg, "k-range", o.k_range);
  merge_opt(cmd, cfg, "strategies", o.strategies);
  merge_opt(cmd, cfg, "epsilon", o.epsilon);
  merge_opt(cmd, cfg, "asymptotics", o.asymptotics);

  const KRange kr = parse_k_range(o.k_range);
  const auto strategies = parse_strategies(o.strategies, /*simulation=*/false);
  bool want_uncoded = false, want_coded = false;
  for (auto s : strategies) {
    want_uncoded |= s == spcache::Strategy::uncoded;
    want_coded |= s == spcache::Strategy::coded;
  }

  Table t;
  t.columns = {"k"};
  if (want_uncoded) t.columns.push_back("F_p");
  if (want_coded) t.columns.push_back("F_cmin");
  if (o.asymptotics) {
    if (want_uncoded) t.columns.push_back("F_p_asymptotic");
    if (want_coded) t.columns.push_back("F_cmin_asymptotic");
  }
  for (std::int64_t k = kr.start; k <= kr.end; k += kr.step) {
    spcache::ModelParams p;
    p.intensity = o.lambda;
    p.parts = k;
    p.range = o.r;
    std::vector<Cell> row{Cell{k}};
    if (want_uncoded) row.emplace_back(spcache::miss_uncoded(p));
    if (want_coded) row.emplace_back(spcache::miss_coded_min(p));
    if (o.asymptotics) {
      if (want_uncoded) row.emplace_back(spcache::miss_asymptotic_uncoded(p));
      if (want_coded) row.emplace_back(spcache::miss_asymptotic_coded(p));
    }
    t.rows.push_back(std::move(row));
  }
  write_table(o.out, t, o.format, o.gnuplot_ready);

  if (o.epsilon > 0.0) {
    spcache::ModelParams p;
    p.intensity = o.lambda;
    p.range = o.r;
    const auto up = spcache::max_parts_for_miss(p, o.epsilon,
                                                spcache::MissLaw::uncoded);
    const auto cp = spcache::max_parts_for_miss(p, o.epsilon,
                                                spcache::MissLaw::coded);
    std::cout << "max parts with miss <= " << o.epsilon << ": uncoded=" << up
              << " coded=" << cp << '\n';
  }
  return 0;
}

struct SimulateOpts : CommonOpts {
  std::uint64_t q = 256;
  std::string strategies = "uncoded,coded";
  std::string measure = "cost";
  std::string stations;
  std::uint64_t n_process = 500;
  std::uint64_t n_alloc = 100;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

int run_simulate(const CLI::App& cmd, SimulateOpts& o) {
  const json cfg = load_config(o.config);
  merge_output_opts(cmd, cfg, o);
  const bool lambda_given = merge_opt(cmd, cfg, "lambda", o.lambda);
  merge_opt(cmd, cfg, "a", o.a);
  merge_opt(cmd, cfg, "delta-max", o.delta_max);
  merge_opt(cmd, cfg, "r", o.r);
  merge_opt(cmd, cfg, "q", o.q);
  merge_opt(cmd, cfg, "k-range", o.k_range);
  merge_opt(cmd, cfg, "strategies", o.strategies);
  merge_opt(cmd, cfg, "measure", o.measure);
  merge_opt(cmd, cfg, "stations", o.stations);
  merge_opt(cmd, cfg, "n-process", o.n_process);
  merge_opt(cmd, cfg, "n-alloc", o.n_alloc);
  merge_opt(cmd, cfg, "workers", o.workers);
  const bool seed_given = merge_opt(cmd, cfg, "seed", o.seed);

  if (!seed_given)
    throw UsageError("simulate requires an explicit --seed (reproducibility)");
  if (o.measure != "cost" && o.measure != "miss")
    throw UsageError("bad measure '" + o.measure + "' (cost|miss)");
  if (!o.stations.empty() && lambda_given)
    throw UsageError("choose one field source: --lambda or --stations");

  const KRange kr = parse_k_range(o.k_range);
  const auto strategies = parse_strategies(o.strategies, /*simulation=*/true);
  bool needs_field = false;
  for (auto s : strategies)
    needs_field |= s == spcache::Strategy::coded;
  if (needs_field) {
    if (o.q < 2 || o.q > spcache::Field::kMaxSize)
      throw UsageError("q must be in [2, 65536] for the coded strategy");
    try {
      (void)spcache::Field::of_size(static_cast<std::uint32_t>(o.q));
    } catch (const std::exception& e) {
      throw UsageError(std::string("bad field size: ") + e.what());
    }
  }

  std::optional<spcache::CacheField> stations;
  if (!o.stations.empty()) stations = spcache::load_stations(o.stations);

  Table t;
  t.columns = {"k", "strategy", "mean", "std_error", "count", "seed", "source"};
  for (std::int64_t k = kr.start; k <= kr.end; k += kr.step) {
    for (auto strategy : strategies) {
      spcache::SimPlan plan;
      if (stations) plan.stations = stations;
      else plan.intensity = o.lambda;
      plan.parts = static_cast<std::size_t>(k);
      plan.strategy = strategy;
      plan.measure = o.measure == "cost" ? spcache::Measure::cost
                                         : spcache::Measure::miss;
      plan.cost = {o.a, o.delta_max};
      plan.miss = {o.r};
      plan.field_size = static_cast<std::uint32_t>(o.q);
      plan.n_process = o.n_process;
      plan.n_alloc = o.n_alloc;
      plan.seed = o.seed;
      plan.workers = o.workers;
      const spcache::Estimate est = spcache::run_estimate(plan);
      t.rows.push_back({Cell{k}, Cell{std::string(spcache::strategy_name(strategy))},
                        Cell{est.mean}, Cell{est.std_error}, Cell{est.count},
                        Cell{o.seed}, Cell{source_tag(plan)}});
    }
  }
  write_table(o.out, t, o.format, o.gnuplot_ready);
  return 0;
}

struct ImportOpts : CommonOpts {
  std::string input;
  double ref_lat = std::numeric_limits<double>::quiet_NaN();
};

int run_import(const CLI::App& cmd, ImportOpts& o) {
  const json cfg = load_config(o.config);
  merge_output_opts(cmd, cfg, o);
  const bool ref_given = merge_opt(cmd, cfg, "ref-lat", o.ref_lat);
  if (o.out.empty()) throw UsageError("import-stations requires --out");

  std::optional<double> ref;
  if (ref_given) ref = o.ref_lat;
  const spcache::CacheField field = spcache::load_stations(o.input, ref);
  spcache::write_stations(o.out, field);

  const spcache::Region& bb = field.region;
  std::cout << "count=" << field.size() << " bbox=(" << bb.origin.x << ','
            << bb.origin.y << ")+(" << bb.width << 'x' << bb.height << ")";
  if (bb.area() > 0.0)
    std::cout << " density=" << field.size() / bb.area() << " per m^2";
  std::cout << '\n';
  if (field.empty()) std::cerr << "warning: station file has no points\n";
  return 0;
}

struct IncrementOpts : CommonOpts {
  std::string strategy = "coded";
  std::uint64_t k = 2;
  std::uint64_t q = 256;
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
};

int run_increments(const CLI::App& cmd, IncrementOpts& o) {
  const json cfg = load_config(o.config);
  merge_output_opts(cmd, cfg, o);
  merge_opt(cmd, cfg, "strategy", o.strategy);
  merge_opt(cmd, cfg, "k", o.k);
  merge_opt(cmd, cfg, "q", o.q);
  merge_opt(cmd, cfg, "n", o.n);
  merge_opt(cmd, cfg, "seed", o.seed);

  spcache::Strategy strategy;
  if (o.strategy == "uncoded") strategy = spcache::Strategy::uncoded;
  else if (o.strategy == "coded") strategy = spcache::Strategy::coded;
  else throw UsageError("bad strategy '" + o.strategy + "' (uncoded|coded)");
  if (o.k < 2) throw UsageError("increments requires k >= 2");

  const auto hists = spcache::run_increment_histogram(
      strategy, static_cast<std::size_t>(o.k), static_cast<std::uint32_t>(o.q),
      static_cast<std::size_t>(o.n), o.seed);

  if (o.format == "json") {
    ordered_json out = ordered_json::array();
    for (const auto& h : hists) {
      ordered_json obj;
      obj["step"] = h.step;
      obj["failure_param"] = h.failure_param;
      obj["samples"] = h.samples;
      obj["counts"] = h.counts;
      obj["chi_square"] = h.gof.statistic;
      obj["dof"] = h.gof.dof;
      obj["p_value"] = h.gof.p_value;
      out.push_back(std::move(obj));
    }
    if (o.out.empty()) std::cout << out.dump(2) << '\n';
    else {
      std::ofstream f(o.out);
      if (!f) throw std::runtime_error("cannot open output file: " + o.out);
      f << out.dump(2) << '\n';
    }
  } else {
    Table t;
    t.columns = {"step", "increment", "observed", "expected"};
    for (const auto& h : hists) {
      const double nd = static_cast<double>(h.samples);
      for (std::size_t j = 0; j < h.counts.size(); ++j) {
        const double expect = nd * (1.0 - h.failure_param) *
                              std::pow(h.failure_param, static_cast<double>(j));
        t.rows.push_back({Cell{static_cast<std::uint64_t>(h.step)},
                          Cell{static_cast<std::uint64_t>(j + 1)},
                          Cell{h.counts[j]}, Cell{expect}});
      }
    }
    write_table(o.out, t, o.format, o.gnuplot_ready);
  }
  for (const auto& h : hists)
    std::cerr << "step " << h.step << ": g=" << h.failure_param
              << " chi2=" << h.gof.statistic << " dof=" << h.gof.dof
              << " p=" << h.gof.p_value << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial cache allocation toolkit: closed-form costs and miss "
               "probabilities for uncoded vs coded caching in the plane, with "
               "Monte Carlo validation"};
  app.require_subcommand(1);

  AnalyticOpts ao;
  CLI::App* analytic = app.add_subcommand(
      "analytic", "Closed-form expected cost table over a k range");
  analytic->add_option("--lambda", ao.lambda, "Cache intensity per m^2");
  analytic->add_option("--a", ao.a, "Cost exponent");
  analytic->add_option("--delta-max", ao.delta_max, "Cost cap distance (m)");
  analytic->add_option("--q", ao.q, "Field size (real-valued allowed)");
  analytic->add_option("--k-range", ao.k_range, "Part counts start:end[:step]");
  analytic->add_option("--strategies", ao.strategies, "uncoded,coded subset");
  add_output_opts(analytic, ao);

  MissOpts mo;
  CLI::App* miss = app.add_subcommand(
      "miss", "Closed-form cache miss probability table over a k range");
  miss->add_option("--lambda", mo.lambda, "Cache intensity per m^2");
  miss->add_option("--r", mo.r, "Connection range (m)");
  miss->add_option("--k-range", mo.k_range, "Part counts start:end[:step]");
  miss->add_option("--strategies", mo.strategies, "uncoded,coded subset");
  miss->add_option("--epsilon", mo.epsilon,
                   "Also report the largest k with miss <= epsilon");
  miss->add_flag("--asymptotics", mo.asymptotics,
                 "Include the large-k approximation columns");
  add_output_opts(miss, mo);

  SimulateOpts so;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo estimates over a k range (requires --seed)");
  simulate->add_option("--lambda", so.lambda, "HPP intensity per m^2");
  simulate->add_option("--stations", so.stations,
                       "Station CSV (fixed field source instead of HPP)");
  simulate->add_option("--a", so.a, "Cost exponent");
  simulate->add_option("--delta-max", so.delta_max, "Cost cap distance (m)");
  simulate->add_option("--r", so.r, "Connection range (m), miss measure");
  simulate->add_option("--q", so.q, "Field size for coded strategies");
  simulate->add_option("--k-range", so.k_range, "Part counts start:end[:step]");
  simulate->add_option("--strategies", so.strategies,
                       "uncoded,coded,coded-fast,nearest-k subset");
  simulate->add_option("--measure", so.measure, "cost|miss");
  simulate->add_option("--n-process", so.n_process,
                       "Process/client replications");
  simulate->add_option("--n-alloc", so.n_alloc,
                       "Allocation replications per process draw");
  simulate->add_option("--seed", so.seed, "Master seed (required)");
  simulate->add_option("--workers", so.workers,
                       "Thread count (0 = auto; never changes results)");
  add_output_opts(simulate, so);

  ImportOpts io;
  CLI::App* import = app.add_subcommand(
      "import-stations", "Normalize a station CSV to x_m,y_m and summarize");
  import->add_option("input", io.input, "Input CSV (x_m,y_m or lat,lon)")
      ->required();
  import->add_option("--ref-lat", io.ref_lat,
                     "Equirectangular reference latitude (deg); default: mean");
  add_output_opts(import, io);

  IncrementOpts no;
  CLI::App* increments = app.add_subcommand(
      "increments", "Contact-rank increment histograms vs the geometric law");
  increments->add_option("--strategy", no.strategy, "uncoded|coded");
  increments->add_option("--k", no.k, "Part count (>= 2)");
  increments->add_option("--q", no.q, "Field size (coded)");
  increments->add_option("--n", no.n, "Sample count");
  increments->add_option("--seed", no.seed, "Seed");
  add_output_opts(increments, no);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analytic->parsed()) return run_analytic(*analytic, ao);
    if (miss->parsed()) return run_miss(*miss, mo);
    if (simulate->parsed()) return run_simulate(*simulate, so);
    if (import->parsed()) return run_import(*import, io);
    if (increments->parsed()) return run_increments(*increments, no);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
