#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rvwalk/config.hpp"
#include "rvwalk/estimate.hpp"
#include "rvwalk/measure.hpp"
#include "rvwalk/segments.hpp"

namespace rvwalk {

struct Row {
  std::string experiment;
  std::string x_label;     // grid coordinate as printed (n, u, t or x)
  double x = 0.0;          // numeric coordinate for plot series
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> theory;
  std::int64_t events = 0;
  std::int64_t reps = 0;
  double trunc_bound = 0.0;
  std::uint64_t seed = 0;
  bool pass = true;
  std::string note;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;
  std::string out_dir;  // empty: no files written
};

struct RunResult {
  std::vector<Row> rows;
  Json summary;
  int exit_code = 0;
};

namespace detail {

inline Row row_from_estimate(const std::string& experiment, const std::string& label, double x,
                             const EstimateResult& r, std::uint64_t seed) {
  Row row;
  row.experiment = experiment;
  row.x_label = label;
  row.x = x;
  row.estimate = r.estimate;
  row.ci_lo = r.ci95.lo;
  row.ci_hi = r.ci95.hi;
  row.theory = r.theory_value;
  row.events = r.event_count;
  row.reps = r.replications;
  row.trunc_bound = r.truncation_bound;
  row.seed = seed;
  return row;
}

inline bool row_within_tolerance(const Row& row, double tol) {
  if (!row.theory) return true;
  if (*row.theory != 0.0) return std::abs(row.estimate - *row.theory) <= tol * std::abs(*row.theory);
  return std::abs(row.estimate) <= tol;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const std::string& path, const std::vector<Row>& rows) {
  std::ofstream out(path);
  require(out.good(), Errc::config_error, "cannot open output file " + path);
  out << "experiment,n_or_u,estimate,ci_lo,ci_hi,theory,events,reps,trunc_bound,seed\n";
  for (const Row& r : rows) {
    out << r.experiment << ',' << r.x_label << ',' << format_double(r.estimate) << ','
        << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ','
        << (r.theory ? format_double(*r.theory) : std::string("nan")) << ',' << r.events << ','
        << r.reps << ',' << format_double(r.trunc_bound) << ',' << r.seed << '\n';
  }
}

// Plot-ready two-column series: the estimate plus its interval and the theory
// value, one file each, consumable by any plotting tool.
inline void emit_plot_data(const std::vector<Row>& rows, const std::string& dir,
                           const std::string& command) {
  require(!rows.empty(), Errc::invalid_argument, "no rows to plot");
  const std::string base = dir + "/" + command;
  const std::vector<std::pair<std::string, double Row::*>> series = {
      {".ratio.dat", &Row::estimate},
      {".ci_lo.dat", &Row::ci_lo},
      {".ci_hi.dat", &Row::ci_hi},
  };
  for (const auto& [suffix, member] : series) {
    std::ofstream out(base + suffix);
    for (const Row& r : rows) out << format_double(r.x) << ' ' << format_double(r.*member) << '\n';
  }
  std::ofstream theory(base + ".theory.dat");
  for (const Row& r : rows)
    if (r.theory) theory << format_double(r.x) << ' ' << format_double(*r.theory) << '\n';
}

inline Json row_to_json(const Row& r) {
  Json j{{"experiment", r.experiment}, {"n_or_u", r.x_label},  {"estimate", r.estimate},
         {"ci_lo", r.ci_lo},           {"ci_hi", r.ci_hi},     {"events", r.events},
         {"reps", r.reps},             {"trunc_bound", r.trunc_bound},
         {"seed", r.seed},             {"pass", r.pass}};
  if (r.theory) j["theory"] = *r.theory;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline std::vector<Vec> parse_x_grid(const Json& grid, std::size_t dim) {
  std::vector<Vec> out;
  for (const auto& e : grid) {
    if (e.is_number()) {
      out.push_back(Vec(dim, e.get<double>()));
    } else {
      out.push_back(cfg::vector(e, "grid.x entry"));
    }
  }
  return out;
}

inline std::string x_label_of(const Vec& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x[i]);
    s += buf;
  }
  return s;
}

}  // namespace detail

// Runs a named experiment from a config object, writes the CSV / JSON / plot
// artifacts when an output directory is set, and reports rows plus exit code
// (0 ok, 2 when a declared tolerance is violated; config errors throw).
inline RunResult run_command(const std::string& command, Json config, const RunOptions& opts) {
  require(config.is_object(), Errc::config_error, "config must be a JSON object");

  // resolve knobs into the embedded config so the summary reproduces the run
  if (opts.seed) config["seed"] = *opts.seed;
  if (!config.contains("seed")) config["seed"] = kDefaultSeed;
  if (opts.threads) config["threads"] = *opts.threads;
  if (opts.tolerance) config["tolerance"] = *opts.tolerance;
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const int threads = config.contains("threads") ? config.at("threads").get<int>() : 0;
  std::optional<double> tolerance;
  if (config.contains("tolerance")) tolerance = config.at("tolerance").get<double>();

  const RegVarModel model = parse_model(cfg::need(config, "model", "config"));
  const double quad_tol =
      config.contains("quad_tol") ? config.at("quad_tol").get<double>() : 1e-9;

  auto int_of = [&](const char* key, std::int64_t fallback) -> std::int64_t {
    return config.contains(key) ? config.at(key).get<std::int64_t>() : fallback;
  };
  auto num_of = [&](const char* key, double fallback) -> double {
    return config.contains(key) ? cfg::number(config.at(key), key) : fallback;
  };

  std::vector<Row> rows;

  if (command == "mu" || command == "mu-star") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    MeasureValue v{0.0, 0.0, Method::closed_form};
    if (command == "mu") {
      v = mu(model, set);
    } else {
      const Vec drift = cfg::vector(cfg::need(config, "drift", "config"), "drift");
      v = mu_star(model, set, drift, quad_tol);
    }
    Row row;
    row.experiment = command;
    row.x_label = "-";
    row.estimate = v.value;
    row.ci_lo = v.value;
    row.ci_hi = v.value;
    row.theory = v.value;
    row.trunc_bound = v.abs_error_bound;
    row.seed = seed;
    row.note = v.method == Method::closed_form ? "closed-form" : "quadrature";
    rows.push_back(row);
  } else if (command == "ldp") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    const ScalingSchedule schedule = parse_schedule(config);
    const double t = num_of("t", 1.0);
    const std::int64_t reps = int_of("reps", 100000);
    std::vector<std::int64_t> ns;
    if (config.contains("grid") && config.at("grid").contains("n"))
      for (const auto& e : config.at("grid").at("n")) ns.push_back(e.get<std::int64_t>());
    else
      ns.push_back(int_of("n", 1000));
    require(!ns.empty(), Errc::config_error, "ldp needs n or grid.n");
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::uint64_t row_seed = derive_seed(seed, i);
      const EstimateResult r =
          ldp_ratio(model, schedule, set, t, ns[i], reps, row_seed, threads);
      rows.push_back(detail::row_from_estimate("ldp", std::to_string(ns[i]),
                                               static_cast<double>(ns[i]), r, row_seed));
    }
  } else if (command == "fidi") {
    const ScalingSchedule schedule = parse_schedule(config);
    const Json& sets_json = cfg::need(config, "sets", "config");
    std::vector<StarSet> sets;
    for (const auto& e : sets_json) sets.push_back(parse_set(e, model));
    std::vector<double> times;
    for (const auto& e : cfg::need(config, "times", "config"))
      times.push_back(cfg::number(e, "times entry"));
    const std::int64_t n = int_of("n", 1000);
    const std::int64_t reps = int_of("reps", 100000);
    const std::uint64_t row_seed = derive_seed(seed, 0);
    const EstimateResult r = fidi_ratio(model, schedule, times, sets, n, reps, row_seed, threads);
    rows.push_back(detail::row_from_estimate("fidi", std::to_string(n),
                                             static_cast<double>(n), r, row_seed));
  } else if (command == "ruin") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    const Vec drift = cfg::vector(cfg::need(config, "drift", "config"), "drift");
    const double horizon = num_of("horizon_M", 20.0);
    const std::int64_t reps = int_of("reps", 100000);
    std::vector<double> us;
    if (config.contains("grid") && config.at("grid").contains("u"))
      for (const auto& e : config.at("grid").at("u")) us.push_back(cfg::number(e, "grid.u"));
    else
      us.push_back(num_of("u", 50.0));
    for (std::size_t i = 0; i < us.size(); ++i) {
      const std::uint64_t row_seed = derive_seed(seed, i);
      const EstimateResult r =
          ruin_ratio(model, set, drift, us[i], horizon, reps, row_seed, threads, quad_tol);
      char label[32];
      std::snprintf(label, sizeof label, "%g", us[i]);
      rows.push_back(detail::row_from_estimate("ruin", label, us[i], r, row_seed));
    }
  } else if (command == "segments-ld") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    const double t = num_of("t", 0.5);
    const std::int64_t reps = int_of("reps", 100000);
    std::vector<std::int64_t> ns;
    if (config.contains("grid") && config.at("grid").contains("n"))
      for (const auto& e : config.at("grid").at("n")) ns.push_back(e.get<std::int64_t>());
    else
      ns.push_back(int_of("n", 500));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::uint64_t row_seed = derive_seed(seed, i);
      const EstimateResult r = segment_ld_ratio(model, set, t, ns[i], reps, row_seed, threads);
      rows.push_back(detail::row_from_estimate("segments-ld", std::to_string(ns[i]),
                                               static_cast<double>(ns[i]), r, row_seed));
    }
  } else if (command == "segments-frechet") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    const ScalingSchedule schedule = parse_schedule(config);
    const std::int64_t n = int_of("n", 10000);
    const std::int64_t reps = int_of("reps", 1000);
    std::vector<double> xs;
    if (config.contains("grid") && config.at("grid").contains("x"))
      for (const auto& e : config.at("grid").at("x")) xs.push_back(cfg::number(e, "grid.x"));
    require(!xs.empty(), Errc::config_error, "segments-frechet needs grid.x");
    const std::uint64_t row_seed = derive_seed(seed, 0);
    const auto estimates =
        segment_frechet_cdf(model, set, n, reps, row_seed, xs, threads, schedule);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      char label[32];
      std::snprintf(label, sizeof label, "%g", xs[i]);
      rows.push_back(detail::row_from_estimate("segments-frechet", label, xs[i], estimates[i],
                                               row_seed));
    }
    if (config.contains("dump_segments") && config.at("dump_segments").get<bool>() &&
        !opts.out_dir.empty()) {
      const auto results = segment_frechet_results(model, set, n, reps, row_seed, threads);
      std::filesystem::create_directories(opts.out_dir);
      std::ofstream dump(opts.out_dir + "/segments-frechet.segments.csv");
      dump << "rep,length,start\n";
      for (std::size_t i = 0; i < results.size(); ++i)
        dump << i << ',' << results[i].length << ',' << results[i].start << '\n';
    }
  } else if (command == "maxima") {
    const std::int64_t n = int_of("n", 10000);
    const std::int64_t reps = int_of("reps", 10000);
    const double beta = num_of("block_beta", 0.5);
    require(beta > 0.0 && beta < 1.0, Errc::config_error, "block_beta must lie in (0,1)");
    const auto block =
        int_of("block_r", static_cast<std::int64_t>(
                              std::floor(std::pow(static_cast<double>(n), beta))));
    require(config.contains("grid") && config.at("grid").contains("x"), Errc::config_error,
            "maxima needs grid.x");
    const std::vector<Vec> grid =
        detail::parse_x_grid(config.at("grid").at("x"), model.dimension());
    const std::uint64_t row_seed = derive_seed(seed, 0);
    const auto estimates = maxima_cdf(model, n, block, reps, row_seed, grid, threads);
    for (std::size_t i = 0; i < grid.size(); ++i)
      rows.push_back(detail::row_from_estimate("maxima", detail::x_label_of(grid[i]),
                                               grid[i][0], estimates[i], row_seed));
  } else if (command == "diag-onejump") {
    const StarSet set = parse_set(cfg::need(config, "set", "config"), model);
    const std::int64_t n = int_of("n", 2000);
    const std::int64_t reps = int_of("reps", 20000);
    const double threshold = num_of("jump_threshold", 0.8);
    const std::uint64_t row_seed = derive_seed(seed, 0);
    const EstimateResult r =
        one_jump_diagnostic(model, set, n, reps, row_seed, threshold, threads);
    Row row = detail::row_from_estimate("diag-onejump", std::to_string(n),
                                        static_cast<double>(n), r, row_seed);
    if (r.event_count == 0) row.note = "undefined diagnostic: no conditioning events";
    rows.push_back(row);
  } else {
    fail(Errc::config_error, "unknown command '" + command + "'");
  }

  bool all_pass = true;
  for (Row& row : rows) {
    row.pass = !tolerance || detail::row_within_tolerance(row, *tolerance);
    all_pass = all_pass && row.pass;
  }

  RunResult result;
  result.rows = rows;
  result.summary = Json{{"command", command}, {"config", config}, {"pass", all_pass}};
  Json jrows = Json::array();
  for (const Row& r : rows) jrows.push_back(detail::row_to_json(r));
  result.summary["rows"] = jrows;
  result.exit_code = all_pass ? 0 : 2;

  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    detail::write_csv(opts.out_dir + "/" + command + ".csv", rows);
    std::ofstream summary(opts.out_dir + "/" + command + ".summary.json");
    summary << result.summary.dump(2) << '\n';
    detail::emit_plot_data(rows, opts.out_dir, command);
  }
  return result;
}

}  // namespace rvwalk
