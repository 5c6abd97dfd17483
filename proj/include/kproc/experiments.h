#ifndef KPROC_EXPERIMENTS_H_
#define KPROC_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kproc/env.h"
#include "kproc/state.h"
#include "kproc/stats.h"

namespace kproc {

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint64_t replicas = 10000;
  int jobs = 1;
};

enum class CurveKind { kMcLambdaT, kMcPhi1, kMcPhi2, kClosedForm };

std::string to_string(CurveKind kind);

// Lambda-type curve over an increasing theta grid. Closed-form curves carry
// exact values as Estimates with std_error 0 and replicas 0.
struct AgingCurve {
  CurveKind kind;
  std::vector<double> theta;
  std::vector<Estimate> values;
  std::optional<double> t;
  // Fraction of replicas whose observation fell in TAIL.
  double tail_frequency = 0.0;
  // Worst-case contribution TAIL replicas could have made at each theta.
  std::vector<double> tail_bias_bound;
};

AgingCurve closed_form_curve(double alpha, std::span<const double> theta_grid);

// Lambda_t(theta) = E_inf exp(-theta t / gamma(X_t)). Requires c = 0. A replica
// in TAIL at time t contributes exp(-theta t / 0+), i.e. 0 for theta > 0.
AgingCurve estimate_lambda_t(const WeightEnv& env, double t, std::span<const double> theta_grid,
                             const RunOptions& opts);

enum class Observable { kPhi1, kPhi2 };

// K-process started at infinity, or the trap model (macroscopic time) with
// uniform initial law.
using PhiSource = std::variant<const WeightEnv*, const TrapDisorder*>;

// Phi1 = 1{path constant on [t, t + theta t]}, Phi2 = 1{X(t) = X(t + theta t)},
// both averaged over replicas; one trajectory per replica serves every theta.
AgingCurve estimate_phi(const PhiSource& source, Observable phi, double t,
                        std::span<const double> theta_grid, const RunOptions& opts);

// Pointwise mean of per-disorder curves; the standard error is the spread
// across disorders divided by sqrt(#curves), so it includes the disorder
// fluctuation.
AgingCurve average_curves(std::span<const AgingCurve> curves);

// Per replica: s ~ Exp(lambda), indicator {X(s) = x} from infinity.
Estimate estimate_green_mc(const WeightEnv& env, double lambda, State x, const RunOptions& opts);
std::vector<Estimate> estimate_green_mc(const WeightEnv& env, double lambda,
                                        std::span<const State> xs, const RunOptions& opts);

// Per replica: s ~ Exp(lambda), t ~ Exp(mu), no-jump indicator on [s, s + t].
Estimate estimate_correlation_mc(const WeightEnv& env, double lambda, double mu,
                                 const RunOptions& opts);

// E exp(-lambda tau^{x}) from infinity, one estimate per lambda; all lambdas
// share the same hitting-time samples.
std::vector<Estimate> estimate_hitting_laplace(const WeightEnv& env, std::uint32_t x,
                                               std::span<const double> lambdas,
                                               const RunOptions& opts);

// E exp(-r Gamma^(i)(S_j)) with S_j ~ Gamma(j, 1).
Estimate estimate_omega_mc(const WeightEnv& env, int i, int j, double r, const RunOptions& opts);

// E_from[exp(-lambda tau^A)] by simulation.
Estimate estimate_entrance_laplace_mc(const WeightEnv& env, std::span<const std::uint32_t> set,
                                      double lambda, State from, const RunOptions& opts);

enum class EntranceSampler {
  kProcess,     // sample_entrance
  kStationary,  // gamma-weighted draw over A; the alternative the test must reject
};

struct UniformityResult {
  std::vector<std::uint64_t> counts;  // aligned with the input set
  ChiSquareResult chi_square;
};

UniformityResult uniformity_test(const WeightEnv& env, std::span<const std::uint32_t> set,
                                 const RunOptions& opts,
                                 EntranceSampler sampler = EntranceSampler::kProcess);

struct ConvergenceRow {
  std::uint32_t n;
  double median_discrepancy;
};

// Shared-clock coupling of X~_n (n in n_list) with X~_N, N = env.size(), on
// [0, T]; medians over replicas of path_discrepancy at the given grid step.
std::vector<ConvergenceRow> convergence_study(const WeightEnv& env, double c,
                                              std::span<const std::uint32_t> n_list,
                                              double horizon, double grid_step,
                                              const RunOptions& opts);

}  // namespace kproc

#endif  // KPROC_EXPERIMENTS_H_
