#include "kproc/cli.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "kproc/analytics.h"
#include "kproc/chains.h"
#include "kproc/env.h"
#include "kproc/error.h"
#include "kproc/experiments.h"
#include "kproc/kprocess.h"
#include "kproc/report.h"
#include "kproc/rng.h"

namespace kproc {

namespace {

using json = nlohmann::ordered_json;

// JSON config files: top-level keys are global options, nested objects hold
// the options of the subcommand with that name.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      input >> doc;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static json dump(const CLI::App* app, bool default_also) {
    json out = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->get_type_size() == 0) {
        if (opt->count() > 0) {
          out[name] = true;
        } else if (default_also) {
          out[name] = false;
        }
        continue;
      }
      std::vector<std::string> values;
      if (opt->count() > 0) {
        values = opt->results();
      } else if (default_also && !opt->get_default_str().empty()) {
        values = split_default(opt->get_default_str());
      } else {
        continue;
      }
      if (opt->get_expected_max() > 1) {
        json arr = json::array();
        for (const auto& v : values) arr.push_back(typed(v));
        out[name] = std::move(arr);
      } else if (!values.empty()) {
        out[name] = typed(values.back());
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      out[sub->get_name()] = dump(sub, default_also);
    }
    return out;
  }

  // Numbers become JSON numbers; everything else (including "inf") stays a string.
  static json typed(const std::string& s) {
    const char* end = s.data() + s.size();
    std::uint64_t u = 0;
    if (auto [p, ec] = std::from_chars(s.data(), end, u); ec == std::errc() && p == end) return u;
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(s.data(), end, i); ec == std::errc() && p == end) return i;
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(s.data(), end, d); ec == std::errc() && p == end &&
                                                          std::isfinite(d)) {
      return d;
    }
    return s;
  }

  static std::vector<std::string> split_default(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') return {s};
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s.substr(1, s.size() - 2)) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (ch != ' ') {
        cur += ch;
      }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
  }

  static std::string scalar(const json& v, const std::string& name) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    throw CLI::ConversionError(fmt::format("unsupported value for {}", name));
  }

  static void collect(const json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v, it.key()));
      } else {
        item.inputs.push_back(scalar(*it, it.key()));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Common {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string format = "csv";
  std::string out;
  std::string manifest;
  bool dump_config = false;
};

struct EnvArgs {
  std::string spec = "geometric:0.5:20";
  double c = 0.0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(fmt::format("{}: '{}' is not a number", what, s));
  }
}

std::uint64_t parse_count(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParameterError(fmt::format("{}: '{}' is not a non-negative integer", what, s));
  }
  return v;
}

// "geometric:R:LEN", "subordinator:ALPHA:EPS" or "file:PATH".
WeightEnv parse_env(const std::string& spec, double c, bool c_given, Rng& rng) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "file") {
    std::ifstream in(rest);
    if (!in) throw IoError(fmt::format("cannot read environment file '{}'", rest));
    std::stringstream buf;
    buf << in.rdbuf();
    WeightEnv env = WeightEnv::from_json(buf.str());
    return c_given ? env.with_c(c) : env;
  }
  const auto parts = split(rest, ':');
  if (parts.size() != 2) throw ParameterError(fmt::format("malformed environment '{}'", spec));
  if (kind == "geometric") {
    return make_geometric_env(parse_double(parts[0], "ratio"),
                              parse_count(parts[1], "prefix length"), c);
  }
  if (kind == "subordinator") {
    return sample_subordinator_env(parse_double(parts[0], "alpha"),
                                   parse_double(parts[1], "epsilon"), c, rng);
  }
  throw ParameterError(fmt::format("unknown environment kind '{}'", kind));
}

// "1..10", "1,3,5" and mixtures such as "1..3,7".
std::vector<std::uint32_t> parse_set(const std::string& s) {
  std::vector<std::uint32_t> out;
  for (const auto& part : split(s, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<std::uint32_t>(parse_count(part, "set element")));
      continue;
    }
    const auto lo = parse_count(part.substr(0, dots), "range start");
    const auto hi = parse_count(part.substr(dots + 2), "range end");
    if (lo > hi || hi > std::numeric_limits<std::uint32_t>::max()) {
      throw ParameterError(fmt::format("bad range '{}'", part));
    }
    for (auto x = lo; x <= hi; ++x) out.push_back(static_cast<std::uint32_t>(x));
  }
  return out;
}

State parse_state(const std::string& s) {
  try {
    return State::parse(s);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ParameterError(fmt::format("bad state '{}'", s));
  }
}

struct Output {
  Table table;
  std::vector<double> tail_frequencies;
  std::optional<PlotSpec> plot;
  std::optional<std::string> raw;  // written verbatim instead of the table
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path));
  f << contents;
  f.flush();
  if (!f) throw IoError(fmt::format("failed writing '{}'", path));
}

PlotSpec curve_plot(const std::string& title, const AgingCurve& mc, double alpha) {
  PlotSpec plot{title, "theta", "value", true, {}};
  PlotSeries est{to_string(mc.kind), mc.theta, {}, {}};
  for (const auto& v : mc.values) {
    est.y.push_back(v.value);
    est.error.push_back(3.0 * v.std_error);
  }
  plot.series.push_back(std::move(est));
  const AgingCurve exact = closed_form_curve(alpha, mc.theta);
  PlotSeries limit{"aging limit", exact.theta, {}, {}};
  for (const auto& v : exact.values) limit.y.push_back(v.value);
  plot.series.push_back(std::move(limit));
  return plot;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"K-process simulation and aging analysis", "kproc"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--seed", common.seed, "Master seed")->envname("KPROC_SEED");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", common.out, "Output file (default: standard output)");
  app.add_option("--manifest", common.manifest, "Write a JSON run manifest here");
  app.add_flag("--dump-config", common.dump_config, "Print the effective configuration and exit")
      ->configurable(false);

  auto add_env = [](CLI::App* sub, EnvArgs& e, const std::string& default_spec) {
    e.spec = default_spec;
    sub->add_option("--env", e.spec, "geometric:R:LEN | subordinator:ALPHA:EPS | file:PATH");
    sub->add_option("--c", e.c, "Occupation weight of infinity")->check(CLI::NonNegativeNumber);
  };

  // env
  auto* env_cmd = app.add_subcommand("env", "Build or sample a weight environment");
  EnvArgs env_args;
  add_env(env_cmd, env_args, "geometric:0.5:20");
  std::size_t truncate_to = 0;
  env_cmd->add_option("--truncate", truncate_to, "Keep only the first n weights (0 keeps all)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a K-process trajectory");
  EnvArgs sim_env;
  add_env(sim_cmd, sim_env, "geometric:0.5:20");
  std::string sim_start = "inf";
  double sim_horizon = 1.0;
  double tail_budget = std::numeric_limits<double>::infinity();
  sim_cmd->add_option("--start", sim_start, "Initial state (index or inf)");
  sim_cmd->add_option("--T", sim_horizon, "Time horizon")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--tail-budget", tail_budget, "Maximum real time allowed in TAIL");

  // aging
  auto* aging_cmd = app.add_subcommand("aging", "Aging curve: closed form or Monte Carlo");
  double aging_alpha = 0.5;
  std::vector<double> aging_theta{0.5, 1.0, 2.0};
  bool closed_form = false;
  double aging_t = 1e-3;
  double aging_eps = 1e-4;
  std::string aging_env;
  int aging_draws = 1;
  std::uint64_t aging_replicas = 10000;
  std::string aging_observable = "lambda_t";
  std::string aging_svg;
  aging_cmd->add_option("--alpha", aging_alpha, "Stability index in (0, 1)");
  aging_cmd->add_option("--theta", aging_theta, "Increasing theta grid");
  aging_cmd->add_flag("--closed-form", closed_form, "Evaluate the aging limit only");
  aging_cmd->add_option("--t", aging_t, "Macroscopic time");
  aging_cmd->add_option("--epsilon", aging_eps, "Subordinator jump cutoff");
  aging_cmd->add_option("--env", aging_env, "Explicit environment (overrides alpha/epsilon)");
  aging_cmd->add_option("--draws", aging_draws, "Independent environment draws")
      ->check(CLI::PositiveNumber);
  aging_cmd->add_option("--replicas", aging_replicas, "Replicas per draw");
  aging_cmd->add_option("--observable", aging_observable, "lambda_t | phi1 | phi2")
      ->check(CLI::IsMember({"lambda_t", "phi1", "phi2"}));
  aging_cmd->add_option("--svg", aging_svg, "Write an SVG plot here");

  // green
  auto* green_cmd = app.add_subcommand("green", "Green kernel: closed form against Monte Carlo");
  EnvArgs green_env;
  add_env(green_cmd, green_env, "geometric:0.5:20");
  std::vector<double> green_lambda{0.1, 1.0, 10.0};
  std::vector<std::string> green_x{"1", "2", "3", "4", "5"};
  std::uint64_t green_replicas = 10000;
  green_cmd->add_option("--lambda", green_lambda, "Rates");
  green_cmd->add_option("--x", green_x, "States (index, inf or tail)");
  green_cmd->add_option("--replicas", green_replicas, "Replicas per rate");

  // correlation
  auto* corr_cmd = app.add_subcommand("correlation", "Double Laplace transform of no-jump probability");
  EnvArgs corr_env;
  add_env(corr_cmd, corr_env, "geometric:0.5:20");
  std::vector<double> corr_lambda{0.1, 1.0, 10.0};
  std::vector<double> corr_mu{0.1, 1.0, 10.0};
  std::uint64_t corr_replicas = 10000;
  corr_cmd->add_option("--lambda", corr_lambda, "Rates for the observation time");
  corr_cmd->add_option("--mu", corr_mu, "Rates for the window length");
  corr_cmd->add_option("--replicas", corr_replicas, "Replicas per (lambda, mu)");

  // entrance
  auto* ent_cmd = app.add_subcommand("entrance", "Entrance law into a finite set");
  EnvArgs ent_env;
  add_env(ent_cmd, ent_env, "geometric:0.5:20");
  std::string ent_set = "1..10";
  std::uint64_t ent_replicas = 100000;
  std::string ent_sampler = "process";
  double ent_lambda = 0.0;
  std::string ent_from = "inf";
  ent_cmd->add_option("--set", ent_set, "Target set, e.g. 1..10 or 1,3,5");
  ent_cmd->add_option("--replicas", ent_replicas, "Entrance samples");
  ent_cmd->add_option("--sampler", ent_sampler, "process | stationary")
      ->check(CLI::IsMember({"process", "stationary"}));
  ent_cmd->add_option("--lambda", ent_lambda, "Also compare the Laplace transform at this rate (0: skip)")
      ->check(CLI::NonNegativeNumber);
  ent_cmd->add_option("--from", ent_from, "Start state for the Laplace transform");

  // trap
  auto* trap_cmd = app.add_subcommand("trap", "Aging of the trap model on the complete graph");
  double trap_alpha = 0.5;
  std::uint32_t trap_n = 10000;
  double trap_t = 1e-2;
  std::vector<double> trap_theta{0.5, 1.0, 2.0};
  int trap_draws = 20;
  std::uint64_t trap_replicas = 2000;
  std::string trap_observable = "phi1";
  std::string trap_svg;
  trap_cmd->add_option("--alpha", trap_alpha, "Tail index in (0, 1)");
  trap_cmd->add_option("--n", trap_n, "Number of traps")->check(CLI::PositiveNumber);
  trap_cmd->add_option("--t", trap_t, "Macroscopic time");
  trap_cmd->add_option("--theta", trap_theta, "Increasing theta grid");
  trap_cmd->add_option("--draws", trap_draws, "Disorder draws")->check(CLI::PositiveNumber);
  trap_cmd->add_option("--replicas", trap_replicas, "Replicas per draw");
  trap_cmd->add_option("--observable", trap_observable, "phi1 | phi2")
      ->check(CLI::IsMember({"phi1", "phi2"}));
  trap_cmd->add_option("--svg", trap_svg, "Write an SVG plot here");

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "Shared-clock convergence of finite chains");
  EnvArgs conv_env;
  add_env(conv_cmd, conv_env, "subordinator:0.5:1e-9");
  std::vector<std::uint32_t> conv_n{100, 1000, 10000};
  double conv_horizon = 1.0;
  double conv_step = 1e-3;
  std::uint64_t conv_replicas = 200;
  std::string conv_svg;
  conv_cmd->add_option("--n", conv_n, "Increasing chain sizes");
  conv_cmd->add_option("--T", conv_horizon, "Time horizon");
  conv_cmd->add_option("--step", conv_step, "Comparison grid step");
  conv_cmd->add_option("--replicas", conv_replicas, "Coupled replicas");
  conv_cmd->add_option("--svg", conv_svg, "Write an SVG plot here");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form values");
  std::string oracle_quantity = "aging";
  double oracle_alpha = 0.5;
  std::vector<double> oracle_theta{0.5, 1.0, 2.0};
  EnvArgs oracle_env;
  add_env(oracle_cmd, oracle_env, "geometric:0.5:20");
  std::vector<double> oracle_lambda{0.1, 1.0, 10.0};
  std::uint32_t oracle_x = 1;
  oracle_cmd->add_option("--quantity", oracle_quantity, "aging | env")
      ->check(CLI::IsMember({"aging", "env"}));
  oracle_cmd->add_option("--alpha", oracle_alpha, "Stability index (aging)");
  oracle_cmd->add_option("--theta", oracle_theta, "Theta grid (aging)");
  oracle_cmd->add_option("--lambda", oracle_lambda, "Rates (env)");
  oracle_cmd->add_option("--x", oracle_x, "State for hitting and Green values (env)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitParameter;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitParameter;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  }

  if (common.dump_config) {
    out << app.config_to_str(true, false);
    return kExitOk;
  }

  const auto started = std::chrono::steady_clock::now();
  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  auto opts_for = [&](std::uint64_t replicas, std::uint64_t stream) {
    return RunOptions{derive_seed(common.seed, stream), replicas, common.jobs};
  };
  auto env_rng = [&](std::uint64_t draw) { return replica_rng(derive_seed(common.seed, 0xE17), draw); };
  auto make_env = [&](CLI::App* sub, const EnvArgs& e, std::uint64_t draw) {
    Rng rng = env_rng(draw);
    return parse_env(e.spec, e.c, sub->count("--c") > 0, rng);
  };

  try {
    Output result;
    if (name == "env") {
      WeightEnv env = make_env(env_cmd, env_args, 0);
      if (truncate_to > 0) env = truncate_env(env, truncate_to);
      Table& t = result.table;
      t.columns = {"index", "weight"};
      t.add_meta("size", static_cast<std::int64_t>(env.size()));
      t.add_meta("tail_mass", env.tail_mass());
      t.add_meta("c", env.c());
      if (env.alpha()) t.add_meta("alpha", *env.alpha());
      t.add_meta("total_mass", env.total_mass());
      for (std::size_t i = 0; i < env.size(); ++i) {
        t.rows.push_back({static_cast<std::int64_t>(i + 1), env.weights()[i]});
      }
    } else if (name == "simulate") {
      const WeightEnv env = make_env(sim_cmd, sim_env, 0);
      Rng rng = replica_rng(derive_seed(common.seed, 1), 0);
      const Trajectory traj =
          simulate_trajectory(env, parse_state(sim_start), sim_horizon, tail_budget, rng);
      if (common.format == "csv") {
        std::ostringstream s;
        traj.write_csv(s);
        result.raw = s.str();
      } else {
        json doc;
        doc["horizon"] = traj.horizon();
        doc["start"] = traj.start_state().to_string();
        json segs = json::array();
        for (const auto& seg : traj.segments()) {
          segs.push_back({{"state", seg.state.to_string()}, {"start", seg.start}, {"end", seg.end}});
        }
        doc["segments"] = std::move(segs);
        result.raw = doc.dump(2) + "\n";
      }
      result.tail_frequencies.push_back(traj.occupation(State::tail()) / traj.horizon());
    } else if (name == "aging") {
      validate_alpha(aging_alpha);
      if (closed_form) {
        const AgingCurve curve = closed_form_curve(aging_alpha, aging_theta);
        if (aging_theta.size() == 1 && common.format == "csv") {
          result.raw = fmt::format("{:.12g}\n", curve.values.front().value);
        } else {
          result.table = curve_table(curve);
          result.table.add_meta("alpha", aging_alpha);
        }
      } else {
        std::vector<AgingCurve> curves;
        for (int d = 0; d < aging_draws; ++d) {
          Rng rng = env_rng(static_cast<std::uint64_t>(d));
          const WeightEnv env =
              aging_env.empty() ? sample_subordinator_env(aging_alpha, aging_eps, 0.0, rng)
                                : parse_env(aging_env, 0.0, true, rng);
          const RunOptions opts = opts_for(aging_replicas, 100 + static_cast<std::uint64_t>(d));
          if (aging_observable == "lambda_t") {
            curves.push_back(estimate_lambda_t(env, aging_t, aging_theta, opts));
          } else {
            const Observable obs = aging_observable == "phi1" ? Observable::kPhi1 : Observable::kPhi2;
            curves.push_back(estimate_phi(PhiSource{&env}, obs, aging_t, aging_theta, opts));
          }
          result.tail_frequencies.push_back(curves.back().tail_frequency);
        }
        const AgingCurve curve = curves.size() == 1 ? curves.front() : average_curves(curves);
        result.table = curve_table(curve);
        result.table.add_meta("alpha", aging_alpha);
        result.table.add_meta("draws", static_cast<std::int64_t>(aging_draws));
        if (!aging_svg.empty()) {
          result.plot = curve_plot(fmt::format("aging, alpha = {}, t = {}", aging_alpha, aging_t),
                                   curve, aging_alpha);
        }
      }
    } else if (name == "green") {
      const WeightEnv env = make_env(green_cmd, green_env, 0);
      std::vector<State> xs;
      for (const auto& s : green_x) xs.push_back(parse_state(s));
      Table& t = result.table;
      t.columns = {"x", "lambda", "analytic", "estimate", "se", "replicas"};
      for (std::size_t k = 0; k < green_lambda.size(); ++k) {
        const auto est = estimate_green_mc(env, green_lambda[k], xs, opts_for(green_replicas, 200 + k));
        for (std::size_t i = 0; i < xs.size(); ++i) {
          t.rows.push_back({xs[i].to_string(), green_lambda[k], green(env, green_lambda[k], xs[i]),
                            est[i].value, est[i].std_error,
                            static_cast<std::int64_t>(est[i].replicas)});
        }
      }
    } else if (name == "correlation") {
      const WeightEnv env = make_env(corr_cmd, corr_env, 0);
      Table& t = result.table;
      t.columns = {"lambda", "mu", "analytic", "tail_bound", "estimate", "se", "replicas"};
      std::uint64_t stream = 300;
      for (double l : corr_lambda) {
        for (double m : corr_mu) {
          const auto exact = correlation_laplace(env, l, m);
          const auto est = estimate_correlation_mc(env, l, m, opts_for(corr_replicas, stream++));
          t.rows.push_back({l, m, exact.value, exact.tail_bound, est.value, est.std_error,
                            static_cast<std::int64_t>(est.replicas)});
        }
      }
    } else if (name == "entrance") {
      const WeightEnv env = make_env(ent_cmd, ent_env, 0);
      const auto set = parse_set(ent_set);
      const auto sampler =
          ent_sampler == "process" ? EntranceSampler::kProcess : EntranceSampler::kStationary;
      const auto u = uniformity_test(env, set, opts_for(ent_replicas, 400), sampler);
      Table& t = result.table;
      t.columns = {"state", "count"};
      t.add_meta("chi_square", u.chi_square.statistic);
      t.add_meta("dof", static_cast<std::int64_t>(u.chi_square.dof));
      t.add_meta("p_value", u.chi_square.p_value);
      if (ent_lambda > 0.0) {
        const State from = parse_state(ent_from);
        const auto exact = entrance_laplace(env, set, ent_lambda, from);
        // Summing f = 1 over A turns the coefficient into E exp(-lambda tau^A).
        const double analytic = exact.value * static_cast<double>(set.size());
        const auto est = estimate_entrance_laplace_mc(env, set, ent_lambda, from,
                                                      opts_for(ent_replicas, 401));
        t.add_meta("laplace_analytic", analytic);
        t.add_meta("laplace_estimate", est.value);
        t.add_meta("laplace_se", est.std_error);
      }
      for (std::size_t i = 0; i < set.size(); ++i) {
        t.rows.push_back({static_cast<std::int64_t>(set[i]), static_cast<std::int64_t>(u.counts[i])});
      }
    } else if (name == "trap") {
      validate_alpha(trap_alpha);
      std::vector<AgingCurve> curves;
      const Observable obs = trap_observable == "phi1" ? Observable::kPhi1 : Observable::kPhi2;
      for (int d = 0; d < trap_draws; ++d) {
        Rng rng = env_rng(static_cast<std::uint64_t>(d));
        const TrapDisorder disorder = sample_trap_disorder(trap_n, trap_alpha, rng);
        curves.push_back(estimate_phi(PhiSource{&disorder}, obs, trap_t, trap_theta,
                                      opts_for(trap_replicas, 500 + static_cast<std::uint64_t>(d))));
        result.tail_frequencies.push_back(curves.back().tail_frequency);
      }
      const AgingCurve curve = curves.size() == 1 ? curves.front() : average_curves(curves);
      result.table = curve_table(curve);
      result.table.add_meta("alpha", trap_alpha);
      result.table.add_meta("n", static_cast<std::int64_t>(trap_n));
      result.table.add_meta("draws", static_cast<std::int64_t>(trap_draws));
      if (!trap_svg.empty()) {
        result.plot = curve_plot(fmt::format("trap model, n = {}, t = {}", trap_n, trap_t), curve,
                                 trap_alpha);
      }
    } else if (name == "converge") {
      const WeightEnv env = make_env(conv_cmd, conv_env, 0);
      const auto rows = convergence_study(env, env.c(), conv_n, conv_horizon, conv_step,
                                          opts_for(conv_replicas, 600));
      result.table = convergence_table(rows);
      result.table.add_meta("reference_n", static_cast<std::int64_t>(env.size()));
      result.table.add_meta("tail_mass", env.tail_mass());
      if (!conv_svg.empty()) {
        PlotSpec plot{"median path discrepancy", "n", "median discrepancy", true, {}};
        PlotSeries s{"median", {}, {}, {}};
        for (const auto& r : rows) {
          s.x.push_back(r.n);
          s.y.push_back(r.median_discrepancy);
        }
        plot.series.push_back(std::move(s));
        result.plot = std::move(plot);
      }
    } else if (name == "oracle") {
      Table& t = result.table;
      if (oracle_quantity == "aging") {
        validate_alpha(oracle_alpha);
        t.columns = {"theta", "lambda", "lambda_hat", "lambda_tilde", "derivative"};
        t.add_meta("alpha", oracle_alpha);
        for (double theta : oracle_theta) {
          const bool positive = theta > 0.0;
          const double nan = std::numeric_limits<double>::quiet_NaN();
          t.rows.push_back({theta, aging_limit(oracle_alpha, theta),
                            positive ? aging_hat(oracle_alpha, theta) : nan,
                            positive ? aging_tilde(oracle_alpha, theta) : nan,
                            positive ? aging_limit_derivative(oracle_alpha, theta) : nan});
        }
      } else {
        const WeightEnv env = make_env(oracle_cmd, oracle_env, 0);
        t.columns = {"lambda", "hitting", "green", "green_inf", "green_tail"};
        t.add_meta("x", static_cast<std::int64_t>(oracle_x));
        for (double l : oracle_lambda) {
          t.rows.push_back({l, hitting_laplace(env, oracle_x, l),
                            green(env, l, State::finite(oracle_x)), green(env, l, State::infinity()),
                            green(env, l, State::tail())});
        }
      }
    }

    std::ostringstream body;
    if (result.raw) {
      body << *result.raw;
    } else if (common.format == "json") {
      write_json(body, result.table);
    } else {
      write_csv(body, result.table);
    }
    if (common.out.empty()) {
      out << body.str();
    } else {
      write_file(common.out, body.str());
    }
    if (result.plot) {
      const std::string& path = name == "aging" ? aging_svg : name == "trap" ? trap_svg : conv_svg;
      write_file(path, render_svg(*result.plot));
    }
    if (!common.manifest.empty()) {
      const std::string config = app.config_to_str(true, false);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      json m;
      m["command"] = name;
      m["seed"] = common.seed;
      m["config_hash"] = fmt::format("{:016x}", fnv1a64(config));
      m["config"] = json::parse(config);
      m["wall_time_seconds"] = wall;
      m["tail_frequencies"] = result.tail_frequencies;
      write_file(common.manifest, m.dump(2) + "\n");
    }
    return kExitOk;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace kproc
