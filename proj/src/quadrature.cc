#include "kproc/quadrature.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "kproc/error.h"

namespace kproc::quad {

namespace {

// Kronrod abscissae on [0, 1] (symmetric); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Tolerance& tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ParameterError("integration limits must be finite");
  if (a == b) return {0.0, 0.0, 0};
  if (a > b) {
    Result r = integrate(f, b, a, tol);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Panel> panels;
  panels.push(kronrod(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  int evaluations = 15;
  int count = 1;
  while (error > std::max(tol.absolute, tol.relative * std::abs(value)) &&
         count < tol.max_panels) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot bisect further
    panels.pop();
    const Panel left = kronrod(f, worst.a, mid);
    const Panel right = kronrod(f, mid, worst.b);
    panels.push(left);
    panels.push(right);
    evaluations += 30;
    ++count;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Sum in left-to-right order so the result does not depend on heap layout.
  double total = 0.0;
  double total_error = 0.0;
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : all) {
    total += p.value;
    total_error += p.error;
  }
  return {total, total_error, evaluations};
}

Result integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const Tolerance& tol) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = a + u / one_minus;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, tol);
}

}  // namespace kproc::quad
