#include "kproc/stats.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "kproc/error.h"

namespace kproc {

void Moments::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void Moments::merge(const Moments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n_a = static_cast<double>(count_);
  const double n_b = static_cast<double>(other.count_);
  const double n = n_a + n_b;
  const double delta = other.mean_ - mean_;
  mean_ += delta * n_b / n;
  m2_ += other.m2_ + delta * delta * n_a * n_b / n;
  count_ += other.count_;
}

double Moments::variance() const {
  if (count_ < 2) return 0.0;
  return std::max(m2_, 0.0) / static_cast<double>(count_ - 1);
}

Estimate Moments::estimate() const {
  const double se = count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  return {mean_, se, count_};
}

double chi_square_survival(double x, int dof) {
  if (dof <= 0) throw ParameterError("chi-square needs at least one degree of freedom");
  if (!(x > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_test(std::span<const double> counts, std::span<const double> expected) {
  if (counts.size() != expected.size() || counts.size() < 2) {
    throw ParameterError("chi-square test needs matching histograms with >= 2 cells");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(expected[i] > 0.0)) throw ParameterError("expected counts must be positive");
    const double d = counts[i] - expected[i];
    stat += d * d / expected[i];
  }
  const int dof = static_cast<int>(counts.size()) - 1;
  return {stat, dof, chi_square_survival(stat, dof)};
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (!(total > 0.0)) throw ParameterError("chi-square test on an empty sample");
  std::vector<double> observed(counts.begin(), counts.end());
  std::vector<double> expected(counts.size(), total / static_cast<double>(counts.size()));
  return chi_square_test(observed, expected);
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw ParameterError("histograms differ in size");
  double n_a = 0.0, n_b = 0.0;
  for (auto v : a) n_a += static_cast<double>(v);
  for (auto v : b) n_b += static_cast<double>(v);
  if (!(n_a > 0.0 && n_b > 0.0)) throw ParameterError("chi-square test on an empty sample");
  const double k_a = std::sqrt(n_b / n_a);
  const double k_b = std::sqrt(n_a / n_b);
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    if (x + y == 0.0) continue;
    const double d = k_a * x - k_b * y;
    stat += d * d / (x + y);
    ++cells;
  }
  if (cells < 2) throw ParameterError("need at least two non-empty categories");
  return {stat, cells - 1, chi_square_survival(stat, cells - 1)};
}

double kolmogorov_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.0) {
    // P(K <= x) = sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double a = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * a);
      cdf += term;
      if (term < 1e-18 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, double (*cdf)(double, const void*), const void* ctx) {
  if (sample.empty()) throw ParameterError("KS test on an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i], ctx);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace kproc
