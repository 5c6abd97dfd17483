#ifndef KPROC_QUADRATURE_H_
#define KPROC_QUADRATURE_H_

#include <functional>

namespace kproc::quad {

struct Result {
  double value;
  double error;      // Kronrod-Gauss difference, summed over panels
  int evaluations;
};

struct Tolerance {
  double absolute = 1e-14;
  double relative = 1e-13;
  int max_panels = 4000;
};

// Globally adaptive 15-point Gauss-Kronrod on [a, b]: the panel with the
// largest error estimate is bisected until the total error meets the
// tolerance or the panel budget is spent. Endpoints are never evaluated, so
// integrable endpoint singularities are admissible (though slow; prefer a
// substitution that removes them).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Tolerance& tol = {});

// Integral over [a, inf) via x = a + u / (1 - u), u in [0, 1).
Result integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const Tolerance& tol = {});

}  // namespace kproc::quad

#endif  // KPROC_QUADRATURE_H_
