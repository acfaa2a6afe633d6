#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace thinscan::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // summed Kronrod error estimate
  bool converged = true;
};

// Globally adaptive 15-point Gauss-Kronrod integration to an absolute error
// target. The interval is pre-split into panels no longer than `max_panel`
// (keeps oscillatory integrands resolved), then the panel with the largest
// error estimate is bisected until the summed estimate drops below `abs_tol`.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-12, double max_panel = 1.0,
                     int max_panels = 20000) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  QuadResult out;
  if (a == b) return out;

  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
    return Panel{lo, hi, v, err};
  };

  std::priority_queue<Panel> heap;
  const int initial = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / max_panel)));
  const double step = (b - a) / initial;
  double total_err = 0.0;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + i * step;
    const double hi = (i + 1 == initial) ? b : lo + step;
    Panel p = eval(lo, hi);
    total_err += p.error;
    heap.push(p);
  }

  int count = initial;
  while (total_err > abs_tol && count < max_panels) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // panel at roundoff width
    heap.pop();
    Panel left = eval(worst.lo, mid);
    Panel right = eval(mid, worst.hi);
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }

  // Sum in a fixed order so the result does not depend on heap layout.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  out.error = 0.0;
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  out.converged = out.error <= abs_tol;
  return out;
}

}  // namespace thinscan::quad
