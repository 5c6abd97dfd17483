#include "kproc/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "kproc/analytics.h"
#include "kproc/chains.h"
#include "kproc/error.h"
#include "kproc/kprocess.h"
#include "kproc/parallel.h"
#include "kproc/rng.h"
#include "kproc/trajectory.h"

namespace kproc {

namespace {

constexpr double kNoBudget = std::numeric_limits<double>::infinity();

// Per-theta moments plus a TAIL counter.
struct CurveAccum {
  std::vector<Moments> moments;
  std::uint64_t tail = 0;

  void merge(const CurveAccum& other) {
    for (std::size_t i = 0; i < moments.size(); ++i) moments[i].merge(other.moments[i]);
    tail += other.tail;
  }
};

struct MomentsAccum {
  Moments m;
  void merge(const MomentsAccum& other) { m.merge(other.m); }
};

struct VectorAccum {
  std::vector<Moments> m;
  void merge(const VectorAccum& other) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i].merge(other.m[i]);
  }
};

void validate_options(const RunOptions& opts) {
  if (opts.replicas < 2) throw ParameterError("need at least two replicas");
  if (opts.jobs < 1) throw ParameterError("jobs must be >= 1");
}

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw ParameterError("theta grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw ParameterError("theta values must be finite and >= 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ParameterError("theta grid must be increasing");
  }
}

void validate_time(double t, const char* name) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw ParameterError(fmt::format("{} must be positive and finite", name));
  }
}

// State occupied at real time `at` (right-continuous), from infinity.
State state_at_time(const WeightEnv& env, double at, Rng& rng) {
  KProcessStream stream(env, State::infinity(), rng);
  for (;;) {
    const Segment seg = stream.next();
    if (seg.end > at) return seg.state;
  }
}

std::vector<Estimate> estimates_of(const std::vector<Moments>& moments) {
  std::vector<Estimate> out;
  out.reserve(moments.size());
  for (const auto& m : moments) out.push_back(m.estimate());
  return out;
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kMcLambdaT: return "mc_lambda_t";
    case CurveKind::kMcPhi1: return "mc_phi1";
    case CurveKind::kMcPhi2: return "mc_phi2";
    case CurveKind::kClosedForm: return "closed_form";
  }
  return "unknown";
}

AgingCurve closed_form_curve(double alpha, std::span<const double> theta_grid) {
  validate_alpha(alpha);
  validate_grid(theta_grid);
  AgingCurve curve{CurveKind::kClosedForm, {theta_grid.begin(), theta_grid.end()}, {}, {}, 0.0, {}};
  for (double theta : theta_grid) curve.values.push_back({aging_limit(alpha, theta), 0.0, 0});
  curve.tail_bias_bound.assign(theta_grid.size(), 0.0);
  return curve;
}

AgingCurve estimate_lambda_t(const WeightEnv& env, double t, std::span<const double> theta_grid,
                             const RunOptions& opts) {
  if (env.c() != 0.0) throw ParameterError("the aging estimator needs c = 0");
  validate_time(t, "t");
  validate_grid(theta_grid);
  validate_options(opts);
  if (env.size() == 0) throw ParameterError("environment has no stored weights");
  CurveAccum proto{std::vector<Moments>(theta_grid.size()), 0};
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, proto,
                                [&](std::uint64_t, Rng& rng, CurveAccum& a) {
    const State x = state_at_time(env, t, rng);
    if (x.is_tail()) ++a.tail;
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
      const double theta = theta_grid[i];
      double v;
      if (theta == 0.0) {
        v = 1.0;
      } else if (x.is_tail()) {
        v = 0.0;
      } else {
        v = std::exp(-theta * t / env.weight(x));
      }
      a.moments[i].add(v);
    }
  });
  AgingCurve curve{CurveKind::kMcLambdaT, {theta_grid.begin(), theta_grid.end()},
                   estimates_of(acc.moments), t, 0.0, {}};
  curve.tail_frequency = static_cast<double>(acc.tail) / static_cast<double>(opts.replicas);
  const double deepest = env.weights().back();
  for (double theta : theta_grid) {
    curve.tail_bias_bound.push_back(theta == 0.0 ? 0.0
                                                 : curve.tail_frequency *
                                                       std::exp(-theta * t / deepest));
  }
  return curve;
}

AgingCurve estimate_phi(const PhiSource& source, Observable phi, double t,
                        std::span<const double> theta_grid, const RunOptions& opts) {
  validate_time(t, "t");
  validate_grid(theta_grid);
  validate_options(opts);
  const double horizon = t + theta_grid.back() * t;
  validate_time(horizon, "horizon");
  CurveAccum proto{std::vector<Moments>(theta_grid.size()), 0};
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, proto,
                                [&](std::uint64_t, Rng& rng, CurveAccum& a) {
    const Trajectory traj =
        std::holds_alternative<const WeightEnv*>(source)
            ? simulate_trajectory(*std::get<const WeightEnv*>(source), State::infinity(), horizon,
                                  kNoBudget, rng)
            : simulate_trap_model(*std::get<const TrapDisorder*>(source), State::infinity(),
                                  horizon, rng);
    const State at_t = state_at(traj, t);
    if (at_t.is_tail()) ++a.tail;
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
      const double window = theta_grid[i] * t;
      int v;
      if (phi == Observable::kPhi1) {
        v = no_jump_indicator(traj, t, window);
      } else {
        v = (window == 0.0 || (at_t.is_finite() && state_at(traj, t + window) == at_t)) ? 1 : 0;
      }
      a.moments[i].add(v);
    }
  });
  AgingCurve curve{phi == Observable::kPhi1 ? CurveKind::kMcPhi1 : CurveKind::kMcPhi2,
                   {theta_grid.begin(), theta_grid.end()}, estimates_of(acc.moments), t, 0.0, {}};
  curve.tail_frequency = static_cast<double>(acc.tail) / static_cast<double>(opts.replicas);
  for (double theta : theta_grid) {
    curve.tail_bias_bound.push_back(theta == 0.0 ? 0.0 : curve.tail_frequency);
  }
  return curve;
}

AgingCurve average_curves(std::span<const AgingCurve> curves) {
  if (curves.empty()) throw ParameterError("no curves to average");
  const auto& first = curves.front();
  for (const auto& c : curves) {
    if (c.theta != first.theta || c.kind != first.kind) {
      throw ParameterError("curves differ in kind or theta grid");
    }
  }
  AgingCurve out{first.kind, first.theta, {}, first.t, 0.0, {}};
  const double k = static_cast<double>(curves.size());
  std::uint64_t replicas = 0;
  for (const auto& c : curves) {
    out.tail_frequency += c.tail_frequency / k;
    replicas += c.values.empty() ? 0 : c.values.front().replicas;
  }
  for (std::size_t i = 0; i < first.theta.size(); ++i) {
    Moments m;
    double bias = 0.0;
    for (const auto& c : curves) {
      m.add(c.values[i].value);
      if (i < c.tail_bias_bound.size()) bias += c.tail_bias_bound[i] / k;
    }
    const Estimate e = m.estimate();
    out.values.push_back({e.value, e.std_error, replicas});
    out.tail_bias_bound.push_back(bias);
  }
  return out;
}

std::vector<Estimate> estimate_green_mc(const WeightEnv& env, double lambda,
                                        std::span<const State> xs, const RunOptions& opts) {
  validate_time(lambda, "lambda");
  validate_options(opts);
  VectorAccum proto{std::vector<Moments>(xs.size())};
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, proto,
                                [&](std::uint64_t, Rng& rng, VectorAccum& a) {
    const double s = exponential(rng) / lambda;
    const State at = state_at_time(env, s, rng);
    for (std::size_t i = 0; i < xs.size(); ++i) a.m[i].add(at == xs[i] ? 1.0 : 0.0);
  });
  return estimates_of(acc.m);
}

Estimate estimate_green_mc(const WeightEnv& env, double lambda, State x, const RunOptions& opts) {
  const State xs[] = {x};
  return estimate_green_mc(env, lambda, xs, opts).front();
}

Estimate estimate_correlation_mc(const WeightEnv& env, double lambda, double mu,
                                 const RunOptions& opts) {
  validate_time(lambda, "lambda");
  validate_time(mu, "mu");
  validate_options(opts);
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, MomentsAccum{},
                                [&](std::uint64_t, Rng& rng, MomentsAccum& a) {
    const double s = exponential(rng) / lambda;
    const double t = exponential(rng) / mu;
    const Trajectory traj = simulate_trajectory(env, State::infinity(), s + t, kNoBudget, rng);
    a.m.add(no_jump_indicator(traj, s, std::min(t, traj.horizon() - s)));
  });
  return acc.m.estimate();
}

std::vector<Estimate> estimate_hitting_laplace(const WeightEnv& env, std::uint32_t x,
                                               std::span<const double> lambdas,
                                               const RunOptions& opts) {
  for (double l : lambdas) validate_time(l, "lambda");
  validate_options(opts);
  if (x == 0 || x > env.size()) throw ParameterError("target state outside the prefix");
  VectorAccum proto{std::vector<Moments>(lambdas.size())};
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, proto,
                                [&](std::uint64_t, Rng& rng, VectorAccum& a) {
    const double tau = sample_hitting_time(env, x, rng);
    for (std::size_t i = 0; i < lambdas.size(); ++i) a.m[i].add(std::exp(-lambdas[i] * tau));
  });
  return estimates_of(acc.m);
}

Estimate estimate_omega_mc(const WeightEnv& env, int i, int j, double r, const RunOptions& opts) {
  if (i != 0 && i != 1) throw ParameterError("omega index i must be 0 or 1");
  if (j != 1 && j != 2) throw ParameterError("omega index j must be 1 or 2");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("r must be >= 0");
  if (i == 1 && env.size() == 0) throw ParameterError("environment has no stored weights");
  validate_options(opts);
  const std::optional<std::uint32_t> excluded =
      i == 0 ? std::nullopt : std::optional<std::uint32_t>(1);
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, MomentsAccum{},
                                [&](std::uint64_t, Rng& rng, MomentsAccum& a) {
    const double s = gamma_variate(rng, static_cast<double>(j));
    a.m.add(std::exp(-r * sample_excluded_clock(env, excluded, s, rng)));
  });
  return acc.m.estimate();
}

Estimate estimate_entrance_laplace_mc(const WeightEnv& env, std::span<const std::uint32_t> set,
                                      double lambda, State from, const RunOptions& opts) {
  validate_time(lambda, "lambda");
  validate_options(opts);
  if (from.is_tail()) throw ParameterError("cannot start in TAIL");
  if (from.is_finite()) {
    if (from.index() > env.size()) throw ParameterError("starting state outside the prefix");
    if (std::find(set.begin(), set.end(), from.index()) != set.end()) {
      throw ParameterError("starting state must lie outside the entrance set");
    }
  }
  const double gamma_from = env.weight(from);
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs, MomentsAccum{},
                                [&](std::uint64_t, Rng& rng, MomentsAccum& a) {
    // After leaving a finite start the path restarts from infinity.
    const double hold = gamma_from > 0.0 ? gamma_from * exponential(rng) : 0.0;
    const Entrance e = sample_entrance(env, set, rng);
    a.m.add(std::exp(-lambda * (hold + e.time)));
  });
  return acc.m.estimate();
}

UniformityResult uniformity_test(const WeightEnv& env, std::span<const std::uint32_t> set,
                                 const RunOptions& opts, EntranceSampler sampler) {
  validate_options(opts);
  if (set.size() < 2) throw ParameterError("uniformity test needs |A| >= 2");
  std::set<std::uint32_t> distinct(set.begin(), set.end());
  if (distinct.size() != set.size()) throw ParameterError("entrance set has duplicates");
  for (auto x : set) {
    if (x == 0 || x > env.size()) throw ParameterError("entrance state outside the prefix");
  }
  std::vector<double> cumulative;
  double mass = 0.0;
  for (auto x : set) {
    mass += env.weight(x);
    cumulative.push_back(mass);
  }
  struct Counts {
    std::vector<std::uint64_t> c;
    void merge(const Counts& o) {
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    }
  };
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs,
                                Counts{std::vector<std::uint64_t>(set.size(), 0)},
                                [&](std::uint64_t, Rng& rng, Counts& a) {
    std::size_t slot;
    if (sampler == EntranceSampler::kProcess) {
      const auto state = sample_entrance(env, set, rng).state;
      slot = static_cast<std::size_t>(std::find(set.begin(), set.end(), state) - set.begin());
    } else {
      const double u = uniform_open(rng) * mass;
      slot = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      slot = std::min(slot, set.size() - 1);
    }
    ++a.c[slot];
  });
  return {acc.c, chi_square_uniform(acc.c)};
}

std::vector<ConvergenceRow> convergence_study(const WeightEnv& env, double c,
                                              std::span<const std::uint32_t> n_list,
                                              double horizon, double grid_step,
                                              const RunOptions& opts) {
  validate_options(opts);
  validate_time(horizon, "horizon");
  validate_time(grid_step, "grid step");
  if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("c must be >= 0");
  const auto reference = static_cast<std::uint32_t>(env.size());
  if (reference == 0) throw ParameterError("environment has no stored weights");
  if (n_list.empty()) throw ParameterError("n list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0 || n_list[i] > reference) {
      throw ParameterError(fmt::format("n = {} outside [1, {}]", n_list[i], reference));
    }
    if (i > 0 && !(n_list[i] > n_list[i - 1])) throw ParameterError("n list must be increasing");
  }
  struct Samples {
    std::vector<std::vector<double>> per_n;
    void merge(const Samples& o) {
      for (std::size_t i = 0; i < per_n.size(); ++i) {
        per_n[i].insert(per_n[i].end(), o.per_n[i].begin(), o.per_n[i].end());
      }
    }
  };
  const auto acc = run_replicas(opts.seed, opts.replicas, opts.jobs,
                                Samples{std::vector<std::vector<double>>(n_list.size())},
                                [&](std::uint64_t, Rng& rng, Samples& a) {
    ClockRealization clock(reference, rng);
    const Trajectory ref =
        realize_finite_chain(env, reference, c, State::infinity(), horizon, clock);
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const Trajectory approx =
          n_list[i] == reference
              ? ref
              : realize_finite_chain(env, n_list[i], c, State::infinity(), horizon, clock);
      a.per_n[i].push_back(path_discrepancy(approx, ref, horizon, grid_step));
    }
  });
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) rows.push_back({n_list[i], median(acc.per_n[i])});
  return rows;
}

}  // namespace kproc
