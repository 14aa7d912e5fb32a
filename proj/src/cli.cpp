#include "ansfd/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "ansfd/analysis.hpp"
#include "ansfd/csv.hpp"
#include "ansfd/errors.hpp"
#include "ansfd/estimator.hpp"
#include "ansfd/problems.hpp"
#include "ansfd/scheme_spec.hpp"
#include "ansfd/schemes.hpp"

namespace ansfd::cli {

namespace {

using nlohmann::json;

constexpr const char* kSchemeHelp =
    "Scheme spec: kind[:key=value,...]. Kinds: explicit_euler, rk2_midpoint, rk4_classic, "
    "euler_ansfd, rk_ansfd. Keys: eta=<int> (default 3); gain=calibrated|auto|unit|<K>; "
    "phi=identity|exp:<lambda>; bootstrap=euler|rk4 (euler_ansfd); "
    "delta=grid|random[:<min>:<max|auto>] (rk_ansfd); slope=scaled|step (rk_ansfd); "
    "seed=<uint> (rk_ansfd, needed for random deltas; falls back to --seed). "
    "Example: rk_ansfd:eta=5,delta=grid:0:auto,seed=42";

constexpr const char* kProblemHelp =
    "Problem name: linear_gain5, dahlquist:<lambda>, dahlquist_noisy:<lambda>, logistic, flat. "
    "Noise of noisy problems is indexed by step number, not time, and seeded by --seed";

constexpr const char* kSeedHelp = "Seed for noisy inputs and random deltas (default: $ANSFD_SEED or 0)";

struct OutputOptions {
  std::string path = "-";
  std::string format = "csv";
};

void add_output_options(CLI::App& cmd, OutputOptions& o) {
  cmd.add_option("-o,--output", o.path, "Output file, '-' for stdout")->capture_default_str();
  cmd.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

CLI::Option* add_seed_option(CLI::App& cmd, std::uint64_t& seed) {
  return cmd.add_option("--seed", seed, kSeedHelp)->envname("ANSFD_SEED");
}

/// Writes through `fn` to stdout or to a file opened in binary mode (LF endings).
void emit(const OutputOptions& o, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (o.path == "-") {
    fn(out);
    return;
  }
  std::ofstream file(o.path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidParameter("cannot open output file '" + o.path + "'");
  fn(file);
  if (!file) throw Error("failed writing output file '" + o.path + "'");
}

std::optional<double> parse_optional_number(const std::string& text, std::string_view what) {
  if (text.empty()) return std::nullopt;
  return parse_number(text, what);
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> values;
  for (auto item : split(text, ',')) values.push_back(parse_number(item, what));
  return values;
}

std::vector<int> parse_eta_list(std::string_view text) {
  std::vector<int> values;
  for (auto item : split(text, ',')) {
    const long long eta = parse_integer(item, "eta");
    if (eta < 1 || eta > 1'000'000) throw InvalidParameter("eta must be >= 1");
    values.push_back(static_cast<int>(eta));
  }
  return values;
}

OdeProblem load_problem(const std::string& name, std::uint64_t seed,
                        const std::optional<double>& t_final) {
  OdeProblem p = resolve_problem(name, seed);
  if (t_final) {
    if (!(*t_final > 0.0)) throw InvalidParameter("t-final must be positive");
    p.t_final = *t_final;
  }
  return p;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string problem = "dahlquist:-1";
  std::string scheme = "explicit_euler";
  double h = 0.1;
  std::string t_final;
  std::uint64_t seed = 0;
  OutputOptions output;
};

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const OdeProblem& problem) {
  const std::size_t dim = problem.dimension();
  const bool with_ref = problem.reference.has_value();
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string suffix = dim == 1 ? "" : "_" + std::to_string(i);
    header.push_back("y" + suffix);
    if (with_ref) {
      header.push_back("y_ref" + suffix);
      header.push_back("abs_err" + suffix);
    }
  }
  write_csv_row(os, header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<std::string> row{format_number(traj.times[k])};
    const State ref = with_ref ? (*problem.reference)(traj.times[k]) : State{};
    for (std::size_t i = 0; i < dim; ++i) {
      row.push_back(format_number(traj.values[k][i]));
      if (with_ref) {
        row.push_back(format_number(ref[i]));
        row.push_back(format_number(std::abs(traj.values[k][i] - ref[i])));
      }
    }
    write_csv_row(os, row);
  }
}

void write_trajectory_json(std::ostream& os, const Trajectory& traj, const OdeProblem& problem) {
  json doc;
  doc["problem"] = traj.meta.problem;
  doc["scheme"] = traj.meta.scheme;
  doc["h"] = traj.meta.h;
  doc["seed"] = traj.meta.seed ? json(*traj.meta.seed) : json(nullptr);
  doc["t"] = traj.times;
  doc["y"] = traj.values;
  if (problem.reference) {
    json ref = json::array();
    json err = json::array();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const State r = (*problem.reference)(traj.times[k]);
      State e(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) e[i] = std::abs(traj.values[k][i] - r[i]);
      ref.push_back(r);
      err.push_back(e);
    }
    doc["y_ref"] = std::move(ref);
    doc["abs_err"] = std::move(err);
  }
  os << doc.dump(2) << '\n';
}

void run_solve(const SolveArgs& a, std::ostream& out) {
  const OdeProblem problem = load_problem(a.problem, a.seed, parse_optional_number(a.t_final, "t-final"));
  const SchemeSpec spec = with_default_seed(SchemeSpec::parse(a.scheme), a.seed);
  if (!(a.h > 0.0)) throw InvalidParameter("h must be positive");
  Trajectory traj = integrate(problem, spec, a.h);
  traj.meta.seed = a.seed;
  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      write_trajectory_json(os, traj, problem);
    } else {
      write_trajectory_csv(os, traj, problem);
    }
  });
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string problem = "dahlquist:-1";
  std::string scheme = "euler_ansfd";
  std::string grid = "h=0.1,0.05,0.025:eta=1,2,3,5";
  double h = 0.1;
  std::string t_final;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  OutputOptions output;
};

struct SweepPoint {
  std::optional<int> eta;
  double h = 0.0;
  std::uint64_t seed = 0;

  auto key() const { return std::tuple(eta.value_or(0), h, seed); }
};

struct SweepResult {
  SweepPoint point;
  std::string scheme;
  std::optional<double> final_value;
  std::optional<double> final_error;
  std::optional<double> linf;
  std::optional<double> l2;
  std::string status = "ok";
};

std::vector<SweepPoint> expand_grid(const SweepArgs& a, const SchemeSpec& base) {
  std::vector<double> hs{a.h};
  std::vector<std::optional<int>> etas{base.eta()};
  std::vector<std::uint64_t> seeds{a.seed};
  for (auto axis : split(a.grid, ':')) {
    if (axis.empty()) continue;
    const auto eq = axis.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("grid axis must be name=v1,v2,..., got '" + std::string(axis) + "'");
    }
    const auto name = axis.substr(0, eq);
    const auto values = axis.substr(eq + 1);
    if (name == "h") {
      hs = parse_number_list(values, "grid h");
      for (double h : hs) {
        if (!(h > 0.0)) throw InvalidParameter("grid h values must be positive");
      }
    } else if (name == "eta") {
      etas.clear();
      if (base.eta()) {
        for (int eta : parse_eta_list(values)) etas.emplace_back(eta);
      } else {
        etas.emplace_back(std::nullopt);  // baselines have no window
      }
    } else if (name == "seed") {
      seeds.clear();
      for (auto item : split(values, ',')) seeds.push_back(parse_unsigned(item, "grid seed"));
    } else {
      throw ParseError("unknown grid axis '" + std::string(name) + "'; expected h, eta or seed");
    }
  }

  std::vector<SweepPoint> points;
  for (const auto& eta : etas) {
    for (double h : hs) {
      for (auto seed : seeds) points.push_back({eta, h, seed});
    }
  }
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& l, const SweepPoint& r) { return l.key() < r.key(); });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const SweepPoint& l, const SweepPoint& r) { return l.key() == r.key(); }),
               points.end());
  return points;
}

SweepResult run_point(const SweepArgs& a, const SchemeSpec& base, const SweepPoint& pt) {
  SweepResult r;
  r.point = pt;
  SchemeSpec spec = pt.eta ? with_eta(base, *pt.eta) : base;
  spec = with_default_seed(spec, pt.seed);
  r.scheme = spec.kind_name();
  try {
    const OdeProblem problem = load_problem(a.problem, pt.seed, parse_optional_number(a.t_final, "t-final"));
    const Trajectory traj = integrate(problem, spec, pt.h);
    r.final_value = traj.back()[0];
    if (problem.reference) {
      const ErrorReport e = error_norm(traj, *problem.reference);
      r.final_error = e.final_error;
      r.linf = e.linf;
      r.l2 = e.l2;
    }
  } catch (const DivergenceError& e) {
    r.status = "diverged@" + std::to_string(e.step_index());
  } catch (const InvalidParameter& e) {
    r.status = std::string("invalid: ") + e.what();
  }
  return r;
}

void run_sweep(const SweepArgs& a, std::ostream& out) {
  const SchemeSpec base = SchemeSpec::parse(a.scheme);
  resolve_problem(a.problem, a.seed);  // fail fast on unknown names
  parse_optional_number(a.t_final, "t-final");
  const std::vector<SweepPoint> points = expand_grid(a, base);

  // Runs are independent; each worker writes only its own result slots.
  std::vector<SweepResult> results(points.size());
  unsigned workers = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) results[i] = run_point(a, base, points[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      json rows = json::array();
      for (const auto& r : results) {
        rows.push_back({{"scheme", r.scheme},
                        {"eta", r.point.eta ? json(*r.point.eta) : json(nullptr)},
                        {"h", r.point.h},
                        {"seed", r.point.seed},
                        {"final_value", r.final_value ? json(*r.final_value) : json(nullptr)},
                        {"final_error", r.final_error ? json(*r.final_error) : json(nullptr)},
                        {"linf", r.linf ? json(*r.linf) : json(nullptr)},
                        {"l2", r.l2 ? json(*r.l2) : json(nullptr)},
                        {"status", r.status}});
      }
      os << rows.dump(2) << '\n';
      return;
    }
    write_csv_row(os, {"scheme", "eta", "h", "seed", "final_value", "final_error", "linf", "l2", "status"});
    for (const auto& r : results) {
      write_csv_row(os, {r.scheme, r.point.eta ? std::to_string(*r.point.eta) : "",
                         format_number(r.point.h), std::to_string(r.point.seed),
                         optional_field(r.final_value), optional_field(r.final_error),
                         optional_field(r.linf), optional_field(r.l2), r.status});
    }
  });
}

// ---------------------------------------------------------------------------
// order

struct OrderArgs {
  std::string problem = "dahlquist:-1";
  std::string scheme = "explicit_euler";
  std::string h_list = "0.1,0.05,0.025,0.0125";
  std::string t_final;
  std::uint64_t seed = 0;
  OutputOptions output;
};

void run_order(const OrderArgs& a, std::ostream& out, std::ostream& err) {
  const OdeProblem problem = load_problem(a.problem, a.seed, parse_optional_number(a.t_final, "t-final"));
  const SchemeSpec spec = with_default_seed(SchemeSpec::parse(a.scheme), a.seed);
  const OrderEstimate est = observed_order(problem, spec, parse_number_list(a.h_list, "h-list"));

  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      json rows = json::array();
      for (std::size_t i = 0; i < est.h_values.size(); ++i) {
        rows.push_back({{"h", est.h_values[i]},
                        {"final_error", est.errors[i]},
                        {"pairwise_order", i ? number_or_null(est.pairwise_orders[i - 1]) : json(nullptr)}});
      }
      json doc{{"problem", problem.name},
               {"scheme", spec.to_string()},
               {"rows", rows},
               {"summary_order", est.summary_order ? json(*est.summary_order) : json(nullptr)}};
      os << doc.dump(2) << '\n';
      return;
    }
    write_csv_row(os, {"h", "final_error", "pairwise_order"});
    for (std::size_t i = 0; i < est.h_values.size(); ++i) {
      write_csv_row(os, {format_number(est.h_values[i]), format_number(est.errors[i]),
                         i ? format_number(est.pairwise_orders[i - 1]) : ""});
    }
  });
  err << "summary order: " << (est.summary_order ? format_number(*est.summary_order) : "undefined")
      << '\n';
}

// ---------------------------------------------------------------------------
// stability

struct StabilityArgs {
  std::string scheme = "explicit_euler";
  std::string eta_list;
  double lambda = -1.0;
  std::string bracket = "1e-4:4";
  std::size_t steps = 1000;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  OutputOptions output;
};

void run_stability(const StabilityArgs& a, std::ostream& out) {
  const SchemeSpec base = with_default_seed(SchemeSpec::parse(a.scheme), a.seed);
  const auto bounds = split(a.bracket, ':');
  if (bounds.size() != 2) throw ParseError("bracket must be lo:hi, got '" + a.bracket + "'");
  const std::pair bracket{parse_number(bounds[0], "bracket lo"), parse_number(bounds[1], "bracket hi")};

  std::vector<SchemeSpec> specs;
  if (!a.eta_list.empty() && base.eta()) {
    for (int eta : parse_eta_list(a.eta_list)) specs.push_back(with_eta(base, eta));
  } else {
    specs.push_back(base);
  }

  struct Row {
    std::string scheme;
    std::optional<int> eta;
    double h_max;
  };
  std::vector<Row> rows;
  for (const auto& spec : specs) {
    rows.push_back({spec.kind_name(), spec.eta(),
                    stability_threshold(spec, a.lambda, bracket, {a.steps, a.tolerance})});
  }

  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      json doc = json::array();
      for (const auto& r : rows) {
        doc.push_back({{"scheme", r.scheme},
                       {"eta", r.eta ? json(*r.eta) : json(nullptr)},
                       {"lambda", a.lambda},
                       {"h_max", r.h_max}});
      }
      os << doc.dump(2) << '\n';
      return;
    }
    write_csv_row(os, {"scheme", "eta", "lambda", "h_max"});
    for (const auto& r : rows) {
      write_csv_row(os, {r.scheme, r.eta ? std::to_string(*r.eta) : "", format_number(a.lambda),
                         format_number(r.h_max)});
    }
  });
}

// ---------------------------------------------------------------------------
// coeffs

struct CoeffsArgs {
  int eta = 3;
  double h = 1.0;
  std::string gain = "auto";
  OutputOptions output;
};

Gain parse_gain_flag(const std::string& text) {
  if (text == "auto" || text == "calibrated") return Gain::calibrated();
  if (text == "unit") return Gain::unit();
  return Gain::manual(parse_number(text, "gain"));
}

void run_coeffs(const CoeffsArgs& a, std::ostream& out) {
  const EstimatorCoefficients c = make_coefficients(a.eta, a.h, parse_gain_flag(a.gain));
  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      json doc{{"eta", c.eta}, {"h", c.h}, {"K", c.gain}, {"scale", c.scale}, {"weights", c.raw_weights}};
      os << doc.dump(2) << '\n';
      return;
    }
    write_csv_row(os, {"j", "weight"});
    for (std::size_t j = 0; j < c.raw_weights.size(); ++j) {
      write_csv_row(os, {std::to_string(j), format_number(c.raw_weights[j])});
    }
    os << "# eta=" << c.eta << '\n'
       << "# h=" << format_number(c.h) << '\n'
       << "# K=" << format_number(c.gain) << '\n'
       << "# scale=" << format_number(c.scale) << '\n';
  });
}

// ---------------------------------------------------------------------------
// noise

struct NoiseArgs {
  std::string eta_list = "1,2,4,8,16";
  double sigma = 0.1;
  std::size_t trials = 10000;
  double h = 0.1;
  std::uint64_t seed = 0;
  OutputOptions output;
};

void run_noise(const NoiseArgs& a, std::ostream& out) {
  NoiseOptions opts;
  opts.h = a.h;
  opts.sigma = a.sigma;
  opts.trials = a.trials;
  opts.seed = a.seed;
  if (!(opts.h > 0.0)) throw InvalidParameter("h must be positive");
  const auto rows = noise_variance_report(parse_eta_list(a.eta_list), opts);
  emit(a.output, out, [&](std::ostream& os) {
    if (a.output.format == "json") {
      json doc = json::array();
      for (const auto& r : rows) {
        doc.push_back({{"eta", r.eta},
                       {"algebraic_std", r.algebraic_std},
                       {"two_point_std", r.two_point_std},
                       {"analytic_std", r.analytic_std}});
      }
      os << doc.dump(2) << '\n';
      return;
    }
    write_csv_row(os, {"eta", "algebraic_std", "two_point_std", "analytic_std"});
    for (const auto& r : rows) {
      write_csv_row(os, {std::to_string(r.eta), format_number(r.algebraic_std),
                         format_number(r.two_point_std), format_number(r.analytic_std)});
    }
  });
}

// ---------------------------------------------------------------------------
// config files

std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_shortest(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += json_scalar_text(item);
    }
    return joined;
  }
  return v.dump();
}

/// Inserts `--key value` pairs from a JSON config right after the subcommand,
/// so flags given later on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;

  std::ifstream in(*path);
  if (!in) throw ParseError("cannot read config file '" + *path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("config file '" + *path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config file must hold a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    injected.push_back("--" + flag);
    injected.push_back(json_scalar_text(value));
  }
  std::vector<std::string> merged;
  if (!rest.empty()) merged.push_back(rest.front());
  merged.insert(merged.end(), injected.begin(), injected.end());
  if (rest.size() > 1) merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic-estimation NSFD time stepping: integrate, sweep, measure orders, "
               "stability thresholds and noise filtering. Every subcommand accepts "
               "--config FILE.json whose keys mirror the long flags; flags override."};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Integrate one problem with one scheme");
  solve_cmd->add_option("--problem", solve.problem, kProblemHelp)->capture_default_str();
  solve_cmd->add_option("--scheme", solve.scheme, kSchemeHelp)->capture_default_str();
  solve_cmd->add_option("--h", solve.h, "Time step")->capture_default_str();
  solve_cmd->add_option("--t-final", solve.t_final, "Override the problem horizon");
  add_seed_option(*solve_cmd, solve.seed);
  add_output_options(*solve_cmd, solve.output);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of (eta, h, seed) integrations");
  sweep_cmd->add_option("--problem", sweep.problem, kProblemHelp)->capture_default_str();
  sweep_cmd->add_option("--scheme", sweep.scheme, kSchemeHelp)->capture_default_str();
  sweep_cmd->add_option("--grid", sweep.grid, "Axes name=v1,v2,... joined by ':'; names h, eta, seed")
      ->capture_default_str();
  sweep_cmd->add_option("--h", sweep.h, "Time step when the grid has no h axis")->capture_default_str();
  sweep_cmd->add_option("--t-final", sweep.t_final, "Override the problem horizon");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (0 = hardware concurrency)");
  add_seed_option(*sweep_cmd, sweep.seed);
  add_output_options(*sweep_cmd, sweep.output);

  OrderArgs order;
  auto* order_cmd = app.add_subcommand("order", "Observed convergence order from final errors");
  order_cmd->add_option("--problem", order.problem, kProblemHelp)->capture_default_str();
  order_cmd->add_option("--scheme", order.scheme, kSchemeHelp)->capture_default_str();
  order_cmd->add_option("--h-list", order.h_list, "Decreasing step sizes, comma separated")
      ->capture_default_str();
  order_cmd->add_option("--t-final", order.t_final, "Override the problem horizon");
  add_seed_option(*order_cmd, order.seed);
  add_output_options(*order_cmd, order.output);

  StabilityArgs stab;
  auto* stab_cmd = app.add_subcommand("stability", "Largest bounded step on y' = lambda y by bisection");
  stab_cmd->add_option("--scheme", stab.scheme, kSchemeHelp)->capture_default_str();
  stab_cmd->add_option("--eta-list", stab.eta_list, "Window lengths to scan (A-NSFD schemes)");
  stab_cmd->add_option("--lambda", stab.lambda, "Negative decay rate")->capture_default_str();
  stab_cmd->add_option("--bracket", stab.bracket, "lo:hi with lo stable and hi unstable")
      ->capture_default_str();
  stab_cmd->add_option("--steps", stab.steps, "Steps per boundedness test")->capture_default_str();
  stab_cmd->add_option("--tol", stab.tolerance, "Bisection tolerance on h")->capture_default_str();
  add_seed_option(*stab_cmd, stab.seed);
  add_output_options(*stab_cmd, stab.output);

  CoeffsArgs coeffs;
  auto* coeffs_cmd = app.add_subcommand("coeffs", "Print estimator window weights");
  coeffs_cmd->add_option("--eta", coeffs.eta, "Window length")->capture_default_str();
  coeffs_cmd->add_option("--h", coeffs.h, "Sample spacing")->capture_default_str();
  coeffs_cmd->add_option("--gain", coeffs.gain, "auto|unit|<K>")->capture_default_str();
  add_output_options(*coeffs_cmd, coeffs.output);

  NoiseArgs noise;
  auto* noise_cmd = app.add_subcommand("noise", "Monte-Carlo slope spread on a noisy unit ramp");
  noise_cmd->add_option("--eta-list", noise.eta_list, "Window lengths")->capture_default_str();
  noise_cmd->add_option("--sigma", noise.sigma, "Noise standard deviation")->capture_default_str();
  noise_cmd->add_option("--trials", noise.trials, "Monte-Carlo trials (>= 1000)")->capture_default_str();
  noise_cmd->add_option("--h", noise.h, "Sample spacing")->capture_default_str();
  add_seed_option(*noise_cmd, noise.seed);
  add_output_options(*noise_cmd, noise.output);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*solve_cmd) run_solve(solve, out);
    if (*sweep_cmd) run_sweep(sweep, out);
    if (*order_cmd) run_order(order, out, err);
    if (*stab_cmd) run_stability(stab, out);
    if (*coeffs_cmd) run_coeffs(coeffs, out);
    if (*noise_cmd) run_noise(noise, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const UnknownProblem& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace ansfd::cli
