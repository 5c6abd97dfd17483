#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "kproc/analytics.h"
#include "kproc/env.h"
#include "kproc/error.h"
#include "kproc/experiments.h"
#include "kproc/report.h"
#include "kproc/rng.h"

namespace kproc {
namespace {

RunOptions opts(std::uint64_t seed, std::uint64_t replicas, int jobs = 1) {
  RunOptions o;
  o.seed = seed;
  o.replicas = replicas;
  o.jobs = jobs;
  return o;
}

std::vector<std::uint32_t> range_set(std::uint32_t n) {
  std::vector<std::uint32_t> a(n);
  std::iota(a.begin(), a.end(), 1u);
  return a;
}

double within_sigmas(const Estimate& e, double truth) {
  return std::abs(e.value - truth) / std::max(e.std_error, 1e-12);
}

TEST(LambdaT, ThetaZeroIsExactlyOne) {
  const auto env = make_geometric_env(0.5, 30, 0.0);
  const std::vector<double> grid{0.0, 1.0};
  const auto curve = estimate_lambda_t(env, 0.1, grid, opts(1, 500));
  EXPECT_EQ(curve.kind, CurveKind::kMcLambdaT);
  EXPECT_EQ(curve.values[0].value, 1.0);
  EXPECT_EQ(curve.values[0].std_error, 0.0);
  EXPECT_LT(curve.values[1].value, 1.0);
}

TEST(LambdaT, DominantWeightGivesNearlyOne) {
  const WeightEnv env({1e6, 1e-9}, 0.0, 0.0);
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const auto curve = estimate_lambda_t(env, 1e-3, grid, opts(2, 2000));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Occupancy of state 1 is essentially one; the exponent is tiny.
    EXPECT_NEAR(curve.values[i].value, std::exp(-grid[i] * 1e-3 / 1e6), 1e-3);
  }
  EXPECT_EQ(curve.tail_frequency, 0.0);
}

TEST(LambdaT, NonzeroCRejected) {
  const auto env = make_geometric_env(0.5, 10, 1.0);
  const std::vector<double> grid{1.0};
  EXPECT_THROW(estimate_lambda_t(env, 0.1, grid, opts(1, 10)), ParameterError);
}

TEST(LambdaT, TailBiasBoundReported) {
  const auto env = make_geometric_env(0.5, 4, 0.0);
  const std::vector<double> grid{0.5, 1.0};
  const auto curve = estimate_lambda_t(env, 0.01, grid, opts(3, 4000));
  EXPECT_GT(curve.tail_frequency, 0.0);
  ASSERT_EQ(curve.tail_bias_bound.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(curve.tail_bias_bound[i], curve.tail_frequency);
    EXPECT_GE(curve.values[i].value + curve.tail_bias_bound[i], curve.values[i].value);
  }
}

TEST(Phi, ThetaZeroAndOrdering) {
  Rng rng(4);
  const auto env = sample_subordinator_env(0.5, 1e-4, 0.0, rng);
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  const auto p1 = estimate_phi(&env, Observable::kPhi1, 1e-2, grid, opts(5, 3000));
  const auto p2 = estimate_phi(&env, Observable::kPhi2, 1e-2, grid, opts(5, 3000));
  EXPECT_EQ(p1.values[0].value, 1.0);
  EXPECT_EQ(p2.values[0].value, 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(p1.values[i].value, p2.values[i].value + 3 * p2.values[i].std_error + 1e-15);
    if (i > 0) EXPECT_LE(p1.values[i].value, p1.values[i - 1].value);
  }
}

TEST(Phi, TrapSourceStartsUniformly) {
  Rng rng(6);
  const auto disorder = sample_trap_disorder(1000, 0.5, rng);
  const std::vector<double> grid{0.0, 1.0};
  const auto curve = estimate_phi(&disorder, Observable::kPhi1, 1e-2, grid, opts(7, 500));
  EXPECT_EQ(curve.values[0].value, 1.0);
  EXPECT_GT(curve.values[1].value, 0.0);
  EXPECT_LT(curve.values[1].value, 1.0);
}

TEST(AverageCurves, SpreadAcrossCurves) {
  AgingCurve a{CurveKind::kMcPhi1, {1.0}, {{0.4, 0.01, 100}}, 0.1, 0.1, {0.0}};
  AgingCurve b{CurveKind::kMcPhi1, {1.0}, {{0.6, 0.01, 100}}, 0.1, 0.3, {0.0}};
  const std::vector<AgingCurve> both{a, b};
  const auto avg = average_curves(both);
  EXPECT_DOUBLE_EQ(avg.values[0].value, 0.5);
  EXPECT_NEAR(avg.values[0].std_error, std::sqrt(0.02) / std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(avg.tail_frequency, 0.2);
}

TEST(Green, MatchesAnalytic) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  std::vector<State> xs;
  for (std::uint32_t x = 1; x <= 5; ++x) xs.push_back(State::finite(x));
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto est = estimate_green_mc(env, lambda, xs, opts(8, 20000));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_LT(within_sigmas(est[i], green(env, lambda, xs[i])), 3.5)
          << "lambda=" << lambda << " x=" << i + 1;
    }
  }
}

TEST(Green, PartitionOfOutcomes) {
  const auto env = make_geometric_env(0.6, 6, 0.5);
  std::vector<State> xs{State::infinity(), State::tail()};
  for (std::uint32_t x = 1; x <= 6; ++x) xs.push_back(State::finite(x));
  const auto est = estimate_green_mc(env, 1.0, xs, opts(9, 5000));
  double sum = 0.0;
  for (const auto& e : est) sum += e.value;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Green, SingleWeight) {
  const WeightEnv env({2.0}, 0.0, 0.0);
  const auto e = estimate_green_mc(env, 1.0, State::finite(1), opts(10, 1000));
  EXPECT_EQ(e.value, 1.0);
}

TEST(Correlation, MatchesAnalyticAndLimits) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto e = estimate_correlation_mc(env, lambda, 1.0, opts(11, 20000));
    EXPECT_LT(within_sigmas(e, correlation_laplace(env, lambda, 1.0).value), 3.5);
  }
  const auto big_mu = estimate_correlation_mc(env, 1.0, 1e9, opts(12, 2000));
  EXPECT_GT(big_mu.value, 0.999);
}

TEST(Correlation, DecreasingInLambda) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  const auto lo = estimate_correlation_mc(env, 0.1, 1.0, opts(13, 20000));
  const auto hi = estimate_correlation_mc(env, 10.0, 1.0, opts(13, 20000));
  EXPECT_GT(lo.value + 3 * std::hypot(lo.std_error, hi.std_error), hi.value);
}

TEST(Hitting, MatchesAnalytic) {
  for (double c : {0.0, 1.0}) {
    const auto env = make_geometric_env(0.5, 40, c);
    const std::vector<double> lambdas{0.1, 1.0, 10.0};
    const auto est = estimate_hitting_laplace(env, 2, lambdas, opts(14, 20000));
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      EXPECT_LT(within_sigmas(est[i], hitting_laplace(env, 2, lambdas[i])), 3.5) << c;
    }
  }
}

TEST(Omega, MatchesAnalytic) {
  const auto env = make_geometric_env(0.5, 40, 0.5);
  for (int i : {0, 1}) {
    for (int j : {1, 2}) {
      for (double r : {0.5, 2.0}) {
        const auto e = estimate_omega_mc(env, i, j, r, opts(15, 20000));
        EXPECT_LT(within_sigmas(e, omega_laplace(env, i, j, r)), 3.5) << i << j << ' ' << r;
      }
    }
  }
  EXPECT_THROW(estimate_omega_mc(env, 2, 1, 1.0, opts(1, 10)), ParameterError);
}

TEST(Entrance, LaplaceFromInfinityAndFiniteStart) {
  const auto env = make_geometric_env(0.5, 40, 1.0);
  const std::vector<std::uint32_t> set{2, 5};
  for (State from : {State::infinity(), State::finite(1), State::finite(3)}) {
    const auto e = estimate_entrance_laplace_mc(env, set, 1.0, from, opts(16, 20000));
    const auto a = entrance_laplace(env, set, 1.0, from);
    // The analytic value is the coefficient; the transform sums it over A.
    EXPECT_LT(within_sigmas(e, a.value * set.size()), 3.5) << from.to_string();
  }
}

TEST(Uniformity, GeometricEnvIsUniform) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  const auto set = range_set(10);
  const auto r = uniformity_test(env, set, opts(17, 100000));
  EXPECT_EQ(r.chi_square.dof, 9);
  EXPECT_GT(r.chi_square.p_value, 1e-3);
  EXPECT_EQ(std::accumulate(r.counts.begin(), r.counts.end(), std::uint64_t{0}), 100000u);
}

TEST(Uniformity, StationaryAlternativeRejected) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  const auto set = range_set(10);
  const auto r = uniformity_test(env, set, opts(18, 100000), EntranceSampler::kStationary);
  EXPECT_LT(r.chi_square.p_value, 1e-6);
}

TEST(Uniformity, NullPValuesAreUniform) {
  const auto env = make_geometric_env(0.3, 20, 0.0);
  const std::vector<std::uint32_t> set{1, 4};
  std::vector<double> p;
  for (std::uint64_t k = 0; k < 200; ++k) {
    p.push_back(uniformity_test(env, set, opts(100 + k, 2000)).chi_square.p_value);
  }
  // The chi-square p-value is discrete, so only a loose KS check applies.
  EXPECT_GT(ks_test(p, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value, 1e-4);
}

TEST(Uniformity, RejectsSingletonSet) {
  const auto env = make_geometric_env(0.5, 10, 0.0);
  const std::vector<std::uint32_t> set{1};
  EXPECT_THROW(uniformity_test(env, set, opts(1, 10)), ParameterError);
}

TEST(Convergence, ReferenceSizeGivesZeroAndMediansShrink) {
  Rng rng(19);
  const auto env = sample_subordinator_env(0.5, 1e-6, 0.0, rng);
  const auto n_ref = static_cast<std::uint32_t>(env.size());
  const std::vector<std::uint32_t> ns{10, 30, 100, 300, 1000, n_ref};
  const auto rows = convergence_study(env, 0.0, ns, 1.0, 1e-2, opts(20, 40));
  ASSERT_EQ(rows.size(), ns.size());
  EXPECT_EQ(rows.back().median_discrepancy, 0.0);
  int inversions = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].median_discrepancy > rows[i - 1].median_discrepancy) ++inversions;
  }
  EXPECT_LE(inversions, 1);
  EXPECT_LT(2 * rows[4].median_discrepancy, rows[0].median_discrepancy);
}

TEST(StdError, ShrinksLikeInverseRootOfReplicas) {
  const auto env = make_geometric_env(0.5, 40, 0.0);
  const auto a = estimate_correlation_mc(env, 1.0, 1.0, opts(21, 20000));
  const auto b = estimate_correlation_mc(env, 1.0, 1.0, opts(22, 40000));
  const double ratio = b.std_error / a.std_error;
  EXPECT_GE(ratio, 0.6);
  EXPECT_LE(ratio, 0.8);
}

TEST(Determinism, IndependentOfJobs) {
  Rng rng(23);
  const auto env = sample_subordinator_env(0.5, 1e-3, 0.0, rng);
  const std::vector<double> grid{0.5, 1.0, 2.0};
  std::string reference;
  for (int jobs : {1, 4, 16}) {
    const auto curve = estimate_lambda_t(env, 1e-2, grid, opts(24, 5000, jobs));
    std::ostringstream csv;
    write_csv(csv, curve_table(curve));
    if (jobs == 1) {
      reference = csv.str();
    } else {
      EXPECT_EQ(csv.str(), reference) << jobs;
    }
  }
  const auto set = range_set(5);
  const auto u1 = uniformity_test(env, set, opts(25, 5000, 1));
  const auto u16 = uniformity_test(env, set, opts(25, 5000, 16));
  EXPECT_EQ(u1.counts, u16.counts);
}

TEST(AgingSandwich, DeviationShrinksAsTimeDecreases) {
  // Averaged over disorder draws, since single draws fluctuate at finite t.
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const std::vector<double> ts{1e-2, 1e-3, 1e-4};
  std::vector<AgingCurve> averaged;
  for (double t : ts) {
    std::vector<AgingCurve> curves;
    for (std::uint64_t d = 0; d < 10; ++d) {
      Rng rng = replica_rng(26, d);
      const auto env = sample_subordinator_env(0.5, t * 1e-2, 0.0, rng);
      curves.push_back(estimate_lambda_t(env, t, grid, opts(27 + d, 2000)));
    }
    averaged.push_back(average_curves(curves));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double truth = aging_limit(0.5, grid[i]);
    for (std::size_t k = 1; k < ts.size(); ++k) {
      const auto& coarse = averaged[k - 1].values[i];
      const auto& fine = averaged[k].values[i];
      EXPECT_LE(std::abs(fine.value - truth),
                std::abs(coarse.value - truth) + 3 * std::hypot(coarse.std_error, fine.std_error))
          << "theta=" << grid[i] << " t=" << ts[k];
    }
  }
}

}  // namespace
}  // namespace kproc
