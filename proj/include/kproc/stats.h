#ifndef KPROC_STATS_H_
#define KPROC_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace kproc {

// Monte Carlo point estimate: std_error = sample sd / sqrt(replicas).
struct Estimate {
  double value;
  double std_error;
  std::uint64_t replicas;
};

// Streaming mean/variance (Welford); merge() combines partial results
// (Chan et al.) so that a fixed merge order gives bit-identical output.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for fewer than two samples
  Estimate estimate() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
};

// Goodness of fit of `counts` against `expected` (same total).
ChiSquareResult chi_square_test(std::span<const double> counts, std::span<const double> expected);
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts);

// Homogeneity of two histograms over the same categories. Categories empty
// in both samples are dropped.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b);

// Upper tail P(chi2_dof > x).
double chi_square_survival(double x, int dof);

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
// uses the asymptotic Kolmogorov law with Stephens' finite-n correction.
KsResult ks_test(std::vector<double> sample, double (*cdf)(double, const void*), const void* ctx);

template <class Cdf>
KsResult ks_test(std::vector<double> sample, const Cdf& cdf) {
  return ks_test(
      std::move(sample),
      [](double x, const void* c) { return (*static_cast<const Cdf*>(c))(x); }, &cdf);
}

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

// Median (mean of the two middle values for even sizes).
double median(std::vector<double> values);

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace kproc

#endif  // KPROC_STATS_H_
