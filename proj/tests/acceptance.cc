// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "kproc/analytics.h"
#include "kproc/cli.h"
#include "kproc/env.h"
#include "kproc/experiments.h"
#include "kproc/kprocess.h"
#include "kproc/quadrature.h"
#include "kproc/rng.h"

namespace kproc {
namespace {

// Tolerances.
constexpr double kSelfConsistencyTol = 1e-8;
constexpr double kSpotTol = 1e-12;
constexpr double kDualityTol = 1e-4;
constexpr double kNormalizationTol = 1e-6;
constexpr double kChiSquareLevel = 1e-3;
constexpr double kPowerLevel = 1e-6;
constexpr double kSigmas = 3.0;
constexpr double kGreenSumTol = 1e-12;
constexpr double kAgingPerDrawTol = 0.02;
constexpr int kAgingDrawsRequired = 18;
constexpr double kAgingAveragedTol = 0.01;
constexpr double kTrapTol = 0.05;
constexpr double kConvergenceFactor = 2.0;

struct Outcome {
  bool pass;
  std::string detail;
};

double within_sigmas(const Estimate& e, double truth) {
  return std::abs(e.value - truth) / e.std_error;
}

RunOptions options(std::uint64_t seed, std::uint64_t replicas) {
  RunOptions o;
  o.seed = seed;
  o.replicas = replicas;
  return o;
}

Outcome closed_form_consistency() {
  double worst = 0.0;
  for (double alpha : {0.1, 0.5, 0.9}) {
    for (int k = 0; k < 50; ++k) {
      const double theta = std::pow(10.0, -3.0 + 6.0 * k / 49.0);
      const double diff = aging_hat(alpha, theta) - aging_tilde(alpha, theta);
      worst = std::max(worst, std::abs(diff - aging_limit(alpha, theta)));
    }
  }
  const double spot = aging_limit(0.5, 1.0);
  return {worst <= kSelfConsistencyTol && std::abs(spot - 0.5) <= kSpotTol,
          fmt::format("max |hat - tilde - Lambda| = {:.2e}, Lambda(1) = {:.15f}", worst, spot)};
}

double density_integral(double alpha, const std::function<double(double)>& weight) {
  auto f = [&](double x) {
    const double z = std::exp(x);
    return z_density(alpha, z) * z * weight(z);
  };
  return quad::integrate(f, -90.0, 90.0, {1e-12, 1e-10, 4000}).value;
}

Outcome z_duality() {
  double worst_lt = 0.0, worst_norm = 0.0;
  for (double alpha : {0.3, 0.5, 0.7}) {
    worst_norm = std::max(worst_norm, std::abs(density_integral(alpha, [](double) { return 1.0; }) - 1.0));
    for (double theta : {0.5, 1.0, 2.0}) {
      const double lt = density_integral(alpha, [&](double z) { return std::exp(-theta * z); });
      worst_lt = std::max(worst_lt, std::abs(lt - aging_limit(alpha, theta)));
    }
  }
  return {worst_lt <= kDualityTol && worst_norm <= kNormalizationTol,
          fmt::format("max transform error {:.2e}, max normalization error {:.2e}", worst_lt,
                      worst_norm)};
}

Outcome uniform_entrance() {
  const auto env = make_geometric_env(0.5, 60, 0.0);
  std::vector<std::uint32_t> set(10);
  std::iota(set.begin(), set.end(), 1u);
  const auto process = uniformity_test(env, set, options(3001, 100000));
  const auto stationary =
      uniformity_test(env, set, options(3002, 100000), EntranceSampler::kStationary);
  return {process.chi_square.p_value > kChiSquareLevel && stationary.chi_square.p_value < kPowerLevel,
          fmt::format("entrance p = {:.4f}, gamma-weighted alternative p = {:.3g}",
                      process.chi_square.p_value, stationary.chi_square.p_value)};
}

Outcome hitting_transform() {
  const std::vector<double> lambdas{0.1, 1.0, 10.0};
  double worst = 0.0;
  for (double c : {0.0, 1.0}) {
    const auto env = make_geometric_env(0.5, 60, c);
    const auto est = estimate_hitting_laplace(env, 1, lambdas, options(4001 + static_cast<int>(c), 1000000));
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      worst = std::max(worst, within_sigmas(est[i], hitting_laplace(env, 1, lambdas[i])));
    }
  }
  return {worst <= kSigmas, fmt::format("max deviation {:.2f} SE over 6 points", worst)};
}

Outcome green_function() {
  const auto env = make_geometric_env(0.5, 60, 0.0);
  std::vector<State> xs;
  for (std::uint32_t x = 1; x <= 5; ++x) xs.push_back(State::finite(x));
  double worst = 0.0, worst_sum = 0.0;
  std::uint64_t stream = 5001;
  for (double lambda : {0.1, 1.0, 10.0}) {
    const auto est = estimate_green_mc(env, lambda, xs, options(stream++, 100000));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      worst = std::max(worst, within_sigmas(est[i], green(env, lambda, xs[i])));
    }
    // Stored states plus the tail share exhaust the mass; infinity has none at c = 0.
    double sum = green(env, lambda, State::tail()) + green(env, lambda, State::infinity());
    for (std::uint32_t x = 1; x <= env.size(); ++x) sum += green(env, lambda, State::finite(x));
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  return {worst <= kSigmas && worst_sum <= kGreenSumTol,
          fmt::format("max deviation {:.2f} SE over 15 points, |sum - 1| = {:.1e}", worst, worst_sum)};
}

Outcome correlation() {
  const auto env = make_geometric_env(0.5, 60, 0.0);
  double worst = 0.0;
  std::uint64_t stream = 6001;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (double mu : {0.1, 1.0, 10.0}) {
      const auto est = estimate_correlation_mc(env, lambda, mu, options(stream++, 100000));
      worst = std::max(worst, within_sigmas(est, correlation_laplace(env, lambda, mu).value));
    }
  }
  return {worst <= kSigmas, fmt::format("max deviation {:.2f} SE over 9 points", worst)};
}

Outcome aging() {
  const std::vector<double> grid{0.5, 1.0, 2.0};
  constexpr int kDraws = 20;
  std::vector<AgingCurve> curves;
  int good_draws = 0;
  double worst_draw = 0.0;
  for (int d = 0; d < kDraws; ++d) {
    Rng rng = replica_rng(7000, static_cast<std::uint64_t>(d));
    const auto env = sample_subordinator_env(0.5, 1e-4, 0.0, rng);
    curves.push_back(estimate_lambda_t(env, 1e-3, grid, options(7100 + d, 100000)));
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dev = std::max(dev, std::abs(curves.back().values[i].value - aging_limit(0.5, grid[i])));
    }
    worst_draw = std::max(worst_draw, dev);
    if (dev <= kAgingPerDrawTol) ++good_draws;
  }
  const auto avg = average_curves(curves);
  double avg_dev = 0.0;
  std::string values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    avg_dev = std::max(avg_dev, std::abs(avg.values[i].value - aging_limit(0.5, grid[i])));
    values += fmt::format(" {:.4f}/{:.4f}", avg.values[i].value, aging_limit(0.5, grid[i]));
  }
  return {good_draws >= kAgingDrawsRequired && avg_dev <= kAgingAveragedTol,
          fmt::format("{}/{} draws within {}, averaged max deviation {:.4f} (estimate/limit:{}), "
                      "worst draw {:.4f}",
                      good_draws, kDraws, kAgingPerDrawTol, avg_dev, values, worst_draw)};
}

Outcome trap_agreement() {
  const std::vector<double> grid{0.5, 1.0, 2.0};
  std::vector<AgingCurve> curves;
  for (int d = 0; d < 20; ++d) {
    Rng rng = replica_rng(8000, static_cast<std::uint64_t>(d));
    const auto disorder = sample_trap_disorder(10000, 0.5, rng);
    curves.push_back(estimate_phi(PhiSource{&disorder}, Observable::kPhi1, 1e-2, grid,
                                  options(8100 + d, 5000)));
  }
  const auto avg = average_curves(curves);
  double dev = 0.0;
  std::string values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dev = std::max(dev, std::abs(avg.values[i].value - aging_limit(0.5, grid[i])));
    values += fmt::format(" {:.4f}/{:.4f}", avg.values[i].value, aging_limit(0.5, grid[i]));
  }
  return {dev <= kTrapTol, fmt::format("max deviation {:.4f} (estimate/limit:{})", dev, values)};
}

Outcome convergence() {
  Rng rng = replica_rng(9000, 0);
  const auto env = sample_subordinator_env(0.5, 1e-9, 0.0, rng);
  const std::vector<std::uint32_t> ns{100, 10000};
  const auto rows = convergence_study(env, 0.0, ns, 1.0, 1e-3, options(9001, 200));
  const double coarse = rows[0].median_discrepancy, fine = rows[1].median_discrepancy;
  return {fine * kConvergenceFactor <= coarse && fine < coarse,
          fmt::format("median at n=100: {:.4f}, at n=10000: {:.4f} (reference N = {})", coarse,
                      fine, env.size())};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> experiments{
      {"aging", "--alpha", "0.5", "--t", "1e-2", "--epsilon", "1e-3", "--theta", "0.5", "1", "2",
       "--replicas", "20000", "--draws", "2"},
      {"entrance", "--set", "1..10", "--replicas", "50000"},
      {"trap", "--n", "1000", "--draws", "2", "--replicas", "5000"},
      {"converge", "--env", "subordinator:0.5:1e-8", "--n", "10", "100", "1000", "--replicas", "50"},
  };
  int identical = 0;
  for (const auto& args : experiments) {
    std::string reference;
    bool same = true;
    for (int jobs : {1, 4, 16}) {
      std::vector<std::string> full{"--seed", "10", "--jobs", std::to_string(jobs)};
      full.insert(full.end(), args.begin(), args.end());
      std::ostringstream out, err;
      if (run(full, out, err) != kExitOk) same = false;
      if (jobs == 1) {
        reference = out.str();
      } else if (out.str() != reference) {
        same = false;
      }
    }
    if (same && !reference.empty()) ++identical;
  }
  return {identical == static_cast<int>(experiments.size()),
          fmt::format("{}/{} experiments byte-identical across 1, 4, 16 workers", identical,
                      experiments.size())};
}

}  // namespace
}  // namespace kproc

int main() {
  using namespace kproc;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 closed-form self-consistency", closed_form_consistency},
      {"2 z-density duality", z_duality},
      {"3 uniform entrance law", uniform_entrance},
      {"4 hitting-time transform", hitting_transform},
      {"5 green function", green_function},
      {"6 correlation", correlation},
      {"7 aging at t = 1e-3", aging},
      {"8 trap-model agreement", trap_agreement},
      {"9 convergence study", convergence},
      {"10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail
              << fmt::format(" [{:.1f}s]", secs) << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
