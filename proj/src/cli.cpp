#include "oscimax/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscimax/error.hpp"
#include "oscimax/geometry.hpp"
#include "oscimax/kernelcheck.hpp"
#include "oscimax/maximal.hpp"
#include "oscimax/propagator.hpp"
#include "oscimax/scenarios.hpp"
#include "oscimax/spectral.hpp"

namespace oscimax::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One CSV table plus manifest fields produced by a subcommand.
struct Outcome {
  std::string csv;
  json extras = json::object();
  std::uint64_t seed = 0;
};

using Runner = std::function<Outcome(int threads)>;

class Csv {
 public:
  explicit Csv(std::string header) { os_ << header << '\n'; }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(fields), first = false), ...);
    os_ << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ostringstream os_;
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpectralProfile load_profile(const std::string& arg) {
  const bool inline_json = arg.find_first_not_of(" \t") != std::string::npos && arg[arg.find_first_not_of(" \t")] == '{';
  return profile_from_json(json::parse(inline_json ? arg : read_file(arg)));
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, delim)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw UsageError("bad number '" + s + "' in path spec");
  return v;
}

DirectionFactor parse_factor(const std::vector<std::string>& parts) {
  if (parts.size() == 2 && parts[0] == "point") return Singleton{to_number(parts[1])};
  if (parts.size() == 3 && parts[0] == "interval") return IntervalDirections{to_number(parts[1]), to_number(parts[2])};
  if (parts.size() == 3 && parts[0] == "cantor")
    return CantorDirections{to_number(parts[1]), static_cast<int>(to_number(parts[2]))};
  throw UsageError("bad direction factor; use point:θ, interval:a:b or cantor:r:k");
}

// vertical | power:κ | exp | lines:<factor>[*<factor>]
PathSpec parse_path(const std::string& spec) {
  if (spec == "vertical") return Vertical{};
  if (spec == "exp") return ExpTangential{};
  if (spec.rfind("power:", 0) == 0) return PowerCurve{to_number(spec.substr(6))};
  if (spec.rfind("lines:", 0) == 0) {
    LineField field;
    for (const std::string& factor : split(spec.substr(6), '*')) field.directions.factors.push_back(parse_factor(split(factor, ':')));
    return field;
  }
  throw UsageError("bad --path '" + spec + "'");
}

// Scenario flags shared by `scaling` and `sufficiency`.
void add_scenario_options(CLI::App* sub, ScenarioParams& p, std::string& directions) {
  sub->add_option("--m", p.m, "dispersion order");
  sub->add_option("--kappa", p.kappa, "power-curve exponent");
  sub->add_option("--q", p.q, "Lebesgue exponent in x");
  sub->add_option("--alpha", p.alpha, "measure dimension");
  sub->add_option("--s", p.s, "Sobolev index");
  sub->add_option("--r", p.r, "Cantor ratio");
  sub->add_option("--k-min", p.k_min, "first rung");
  sub->add_option("--k-max", p.k_max, "last rung");
  sub->add_option("--c", p.c, "frequency box scale");
  sub->add_option("--directions", directions, "cantor | point | interval")->check(CLI::IsMember({"cantor", "point", "interval"}));
  sub->add_option("--seed", p.seed, "random profile seed");
  sub->add_option("--trials", p.trials, "random profiles per rung");
  sub->add_option("--x-nodes", p.x_nodes, "Gauss nodes per cell");
  sub->add_option("--t-coarse", p.t_grid.coarse_size, "coarse time grid size");
  sub->add_option("--t-refine-levels", p.t_grid.refine_levels, "time refinement levels");
  sub->add_option("--t-refine-factor", p.t_grid.refine_factor, "subdivisions per refinement");
  sub->add_option("--t-log-floor", p.t_grid.log_floor, "smallest |t| of a signed grid, relative");
  sub->add_option("--interval-samples", p.interval_samples, "θ grid size per interval factor");
}

Outcome run_scaling_report(ScenarioId id, ScenarioParams p, const std::string& directions, int threads) {
  p.directions = parse_direction_mode(directions);
  p.threads = threads;
  const ScalingReport report = run_scaling(id, p);
  Csv csv("lambda,k,norm,sobolev,ratio");
  for (const ScalingRow& r : report.rows) csv.row(r.lambda, r.k, r.norm, r.sobolev, r.ratio);
  Outcome o{csv.str()};
  o.seed = p.seed;
  o.extras["scenario"] = std::string(scenario_name(id));
  o.extras["scenario_params"] = params_to_json(p);
  o.extras["fitted_slope"] = report.fitted_slope;
  o.extras["stderr"] = report.stderr_slope;
  o.extras["theoretical_slope"] = report.theoretical_slope;
  o.extras["norm_slope"] = report.norm_slope;
  return o;
}

// Turns a JSON value into the token that follows "--key=".
std::optional<std::string> config_token(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? std::optional<std::string>("true") : std::nullopt;
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string joined;
    for (const json& e : v) {
      const auto t = config_token(e);
      if (!t) throw UsageError("config arrays must hold scalars");
      joined += (joined.empty() ? "" : ",") + *t;
    }
    return joined;
  }
  throw UsageError("unsupported config value " + v.dump());
}

const std::vector<std::string> kSubcommands{"propagate", "maximal", "scaling", "cantor-dim",
                                            "vdc",       "kernel",  "ineq",    "sufficiency"};

// Splices --key=value tokens from a --config file (a plain object or a run manifest)
// in front of the command-line flags, which therefore take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  const json params = j.contains("params") ? j.at("params") : j;
  if (!params.is_object()) throw UsageError("config params must be a JSON object");

  std::vector<std::string> out = args;
  auto sub = std::find_if(out.begin(), out.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  if (j.contains("subcommand")) {
    const std::string named = j.at("subcommand").get<std::string>();
    if (sub == out.end()) {
      out.insert(out.begin(), named);
      sub = out.begin();
    } else if (*sub != named) {
      throw UsageError("config was written by '" + named + "', not '" + *sub + "'");
    }
  }
  if (sub == out.end()) throw UsageError("no subcommand given");
  std::vector<std::string> injected;
  for (const auto& [key, value] : params.items()) {
    if (key == "out" || key == "config" || key == "threads") continue;
    if (const auto token = config_token(value)) injected.push_back("--" + key + "=" + *token);
  }
  out.insert(sub + 1, injected.begin(), injected.end());
  return out;
}

json effective_params(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      std::string joined;
      for (const std::string& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      params[name] = opt->get_type_size() == 0 ? std::string(opt->as<bool>() ? "true" : "false") : joined;
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

int default_threads() {
  if (const char* env = std::getenv("OSCIMAX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for maximal estimates of fractional Schrödinger propagators", "oscimax"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);

  std::string out_path, config_path;
  int threads = default_threads();
  app.add_option("--out", out_path, "CSV destination (default stdout); the manifest goes to <out>.manifest.json");
  app.add_option("--threads", threads, "worker threads (default $OSCIMAX_THREADS or 1)")->check(CLI::Range(1, 1024));
  app.add_option("--config", config_path, "JSON parameters or a run manifest; flags override it");

  std::vector<std::pair<CLI::App*, Runner>> commands;

  {
    auto* sub = app.add_subcommand("propagate", "evaluate S_t^m f at one point");
    auto o = std::make_shared<std::tuple<std::string, EvalRequest, std::size_t>>();
    auto& [profile, req, oracle] = *o;
    oracle = 0;
    sub->add_option("--profile", profile, "profile JSON file or inline JSON")->required();
    sub->add_option("--m", req.m, "dispersion order");
    sub->add_option("--x", req.position[0], "first spatial coordinate")->required();
    sub->add_option("--y", req.position[1], "second spatial coordinate (dimension 2)");
    sub->add_option("--t", req.t, "time")->required();
    sub->add_option("--rel-tol", req.rel_tol, "relative tolerance");
    sub->add_option("--panel-budget", req.panel_budget, "panel budget");
    sub->add_flag("--allow-large-2d", req.allow_large_2d, "lift the dimension-2 frequency cap");
    sub->add_option("--oracle-nodes", oracle, "also run the Riemann-sum oracle with this many nodes");
    commands.emplace_back(sub, [o](int) {
      auto& [profile, req0, oracle] = *o;
      EvalRequest req = req0;
      req.profile = load_profile(profile);
      const std::complex<double> v = evaluate(req);
      Csv csv("x,y,t,re,im,abs,phase_bound,upper_bound,oracle_re,oracle_im");
      std::string ore, oim;
      if (oracle > 0) {
        const std::complex<double> w = evaluate_oracle(req, oracle);
        ore = format_double(w.real());
        oim = format_double(w.imag());
      }
      csv.row(req.position[0], req.position[1], req.t, v.real(), v.imag(), std::abs(v), phase_bound(req),
              magnitude_upper_bound(req), ore, oim);
      return Outcome{csv.str()};
    });
  }

  {
    auto* sub = app.add_subcommand("maximal", "mixed norm of the maximal function along a path");
    struct Opts {
      std::string profile, path = "vertical", alpha = "none";
      double m = 2.0, q = 2.0, x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
      MixedNormSpec spec;
      bool allow_large_2d = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--profile", o->profile, "profile JSON file or inline JSON")->required();
    sub->add_option("--m", o->m, "dispersion order");
    sub->add_option("--path", o->path, "vertical | power:κ | exp | lines:<factor>[*<factor>]");
    sub->add_option("--q", o->q, "Lebesgue exponent in x");
    sub->add_option("--alpha", o->alpha, "measure dimension, or none for Lebesgue");
    sub->add_option("--x-lo", o->x_lo, "domain, first axis");
    sub->add_option("--x-hi", o->x_hi, "domain, first axis");
    sub->add_option("--y-lo", o->y_lo, "domain, second axis (dimension 2)");
    sub->add_option("--y-hi", o->y_hi, "domain, second axis (dimension 2)");
    sub->add_option("--t-lo", o->spec.t_window.lo, "time window");
    sub->add_option("--t-hi", o->spec.t_window.hi, "time window");
    sub->add_option("--x-nodes", o->spec.x_nodes, "Gauss nodes per cell and axis");
    sub->add_option("--t-coarse", o->spec.t_grid.coarse_size, "coarse time grid size");
    sub->add_option("--t-refine-levels", o->spec.t_grid.refine_levels, "time refinement levels");
    sub->add_option("--t-refine-factor", o->spec.t_grid.refine_factor, "subdivisions per refinement");
    sub->add_option("--t-log-floor", o->spec.t_grid.log_floor, "smallest |t| of a signed grid, relative");
    sub->add_option("--interval-samples", o->spec.interval_samples, "θ grid size per interval factor");
    sub->add_option("--rel-tol", o->spec.rel_tol, "propagator tolerance");
    sub->add_flag("--allow-large-2d", o->allow_large_2d, "lift the dimension-2 frequency cap");
    commands.emplace_back(sub, [o](int threads) {
      MaximalProblem problem;
      problem.profile = load_profile(o->profile);
      problem.m = o->m;
      problem.path = parse_path(o->path);
      problem.allow_large_2d = o->allow_large_2d;
      problem.spec = o->spec;
      problem.spec.q = o->q;
      problem.spec.threads = threads;
      problem.spec.measure = AlphaMeasure{o->alpha == "none" ? 1.0 : to_number(o->alpha)};
      problem.spec.x_domain = XDomain::interval(o->x_lo, o->x_hi);
      if (problem.profile.dimension() == 2)
        problem.spec.x_domain = XDomain::with_second_axis(problem.spec.x_domain, o->y_lo, o->y_hi);
      const MixedNormResult result = mixed_norm_detail(problem);
      Csv csv("x,y,weight,value,norm");
      for (const NormNode& n : result.nodes) csv.row(n.x[0], n.x[1], n.weight, n.value, result.norm);
      Outcome out{csv.str()};
      out.extras["norm"] = result.norm;
      return out;
    });
  }

  {
    auto* sub = app.add_subcommand("scaling", "norm ratios over a scenario ladder and their fitted exponent");
    auto o = std::make_shared<std::tuple<std::string, ScenarioParams, std::string>>();
    auto& [scenario, params, directions] = *o;
    directions = "cantor";
    sub->add_option("--scenario", scenario, "scenario name")->required();
    add_scenario_options(sub, params, directions);
    commands.emplace_back(sub, [o](int threads) {
      auto& [scenario, params, directions] = *o;
      return run_scaling_report(parse_scenario(scenario), params, directions, threads);
    });
  }

  {
    auto* sub = app.add_subcommand("sufficiency", "alias of scaling --scenario sufficiency-probe");
    auto o = std::make_shared<std::pair<ScenarioParams, std::string>>();
    o->second = "cantor";
    add_scenario_options(sub, o->first, o->second);
    commands.emplace_back(sub, [o](int threads) {
      return run_scaling_report(ScenarioId::SufficiencyProbe, o->first, o->second, threads);
    });
  }

  {
    auto* sub = app.add_subcommand("cantor-dim", "box-counting dimension of a Cantor set");
    auto o = std::make_shared<std::pair<double, int>>(0.0, 0);
    sub->add_option("--r", o->first, "ratio in (0, 1/2)")->required();
    sub->add_option("--k-max", o->second, "generation")->required();
    commands.emplace_back(sub, [o](int) {
      const MinkowskiEstimate est = minkowski_dim_table(o->first, o->second);
      Csv csv("j,delta,count,slope");
      for (const BoxCountRow& r : est.rows) csv.row(r.j, r.delta, r.count, est.slope);
      Outcome out{csv.str()};
      out.extras["slope"] = est.slope;
      return out;
    });
  }

  {
    auto* sub = app.add_subcommand("vdc", "van der Corput decay fit");
    auto o = std::make_shared<std::tuple<std::string, double, double, double>>("", 0.0, 0.0, 2.0);
    auto& [phase, lmin, lmax, m] = *o;
    sub->add_option("--phase", phase, "quadratic | monotone_linearized | fractional")->required();
    sub->add_option("--lambda-min", lmin, "first rung")->required();
    sub->add_option("--lambda-max", lmax, "last rung (dyadic ladder)")->required();
    sub->add_option("--m", m, "exponent of the fractional family");
    commands.emplace_back(sub, [o](int) {
      auto& [phase, lmin, lmax, m] = *o;
      const VdcReport r = vdc_decay_fit(parse_vdc_phase(phase), dyadic_ladder(lmin, lmax), m);
      Csv csv("lambda,modulus,scaled,slope,constant");
      for (const VdcRow& row : r.rows) csv.row(row.lambda, row.modulus, row.scaled, r.slope, r.constant);
      Outcome out{csv.str()};
      out.extras["slope"] = r.slope;
      out.extras["stderr"] = r.stderr_slope;
      out.extras["k"] = r.k;
      out.extras["constant"] = r.constant;
      out.extras["top_decade_spread"] = r.top_decade_spread;
      return out;
    });
  }

  {
    auto* sub = app.add_subcommand("kernel", "kernel bounds, symmetry and decay constant over a λ ladder");
    struct Opts {
      double alpha = 0.0, q = 0.0, m = 2.0, lmin = 256.0, lmax = 16384.0;
      int samples = 1000;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--alpha", o->alpha, "measure dimension")->required();
    sub->add_option("--q", o->q, "Lebesgue exponent")->required();
    sub->add_option("--samples", o->samples, "samples per λ");
    sub->add_option("--seed", o->seed, "sample seed");
    sub->add_option("--m", o->m, "dispersion order");
    sub->add_option("--lambda-min", o->lmin, "first rung");
    sub->add_option("--lambda-max", o->lmax, "last rung (dyadic ladder)");
    commands.emplace_back(sub, [o](int threads) {
      const KernelReport r = kernel_sweep(o->alpha, o->q, o->m, dyadic_ladder(o->lmin, o->lmax), o->samples, o->seed,
                                          threads);
      Csv csv("lambda,samples,v1,v2,v3,violations,hermitian_error,constant");
      for (const KernelRow& row : r.rows)
        csv.row(row.lambda, row.samples, row.v1, row.v2, row.v3, row.violations, row.hermitian_error, row.constant);
      Outcome out{csv.str()};
      out.seed = o->seed;
      out.extras["max_constant"] = r.max_constant;
      out.extras["constant_spread"] = r.constant_spread;
      out.extras["violations"] = r.violations;
      out.extras["hermitian_error"] = r.hermitian_error;
      return out;
    });
  }

  {
    auto* sub = app.add_subcommand("ineq", "Young / HLS-type inequality ratios for random step functions");
    struct Opts {
      double alpha = 0.0, q = 0.0, rho = 0.4, a = -1.0, b = 1.0;
      std::string mode;
      int trials = 100;
      std::uint64_t seed = 0;
      std::vector<int> resolutions{256, 512, 1024};
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--alpha", o->alpha, "measure dimension")->required();
    sub->add_option("--q", o->q, "Lebesgue exponent")->required();
    sub->add_option("--mode", o->mode, "young | hls")->required()->check(CLI::IsMember({"young", "hls"}));
    sub->add_option("--rho", o->rho, "HLS exponent");
    sub->add_option("--a", o->a, "Young interval");
    sub->add_option("--b", o->b, "Young interval");
    sub->add_option("--trials", o->trials, "random pairs (g, h)");
    sub->add_option("--seed", o->seed, "step function seed");
    sub->add_option("--resolutions", o->resolutions, "cells per axis")->delimiter(',');
    commands.emplace_back(sub, [o](int threads) {
      InequalityMode mode = YoungMode{o->a, o->b};
      if (o->mode == "hls") mode = HlsMode{o->rho};
      const InequalityReport r = young_hls_check(o->alpha, o->q, mode, o->trials, o->resolutions, o->seed, threads);
      Csv csv("resolution,max_ratio");
      for (const InequalityRow& row : r.rows) csv.row(row.resolution, row.max_ratio);
      Outcome out{csv.str()};
      out.seed = o->seed;
      out.extras["max_ratio"] = r.max_ratio;
      return out;
    });
  }

  for (auto& [sub, runner] : commands) sub->fallthrough();

  const std::string started = utc_now();
  try {
    const std::vector<std::string> expanded = expand_config(raw_args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto it = std::find_if(commands.begin(), commands.end(), [&](const auto& c) { return c.first == chosen; });
  try {
    const Outcome result = it->second(threads);
    if (out_path.empty()) {
      out << result.csv;
      return kExitOk;
    }
    {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + out_path + "'");
      file << result.csv;
    }
    json manifest = json::object();
    manifest["tool_version"] = kToolVersion;
    manifest["subcommand"] = chosen->get_name();
    manifest["params"] = effective_params(chosen);
    manifest["seed"] = result.seed;
    manifest["started"] = started;
    manifest["finished"] = utc_now();
    manifest["outputs"] = json::array({out_path});
    for (const auto& [key, value] : result.extras.items()) manifest[key] = value;
    std::ofstream file(out_path + ".manifest.json", std::ios::binary);
    if (!file) throw UsageError("cannot write '" + out_path + ".manifest.json'");
    file << manifest.dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_budget_error() ? kExitBudget : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace oscimax::cli
