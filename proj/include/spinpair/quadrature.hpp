// quadrature.hpp - globally adaptive Gauss-Legendre integration, half-line
// integrals with endpoint regularization, and principal-value integrals
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace spinpair::quad {

struct QuadratureConfig {
  double abs_tol = 1e-9;  // absolute error target
  double rel_tol = 1e-9;  // relative target; effective tol = max(abs, rel*|I|)
  int max_panels = 6000;  // panel budget for one adaptive run
};

// Thrown when the requested tolerance cannot be certified; carries the error
// bound that was actually reached so callers can decide whether to accept.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}
  double achieved() const { return achieved_; }
  double requested() const { return requested_; }

 private:
  double achieved_;
  double requested_;
};

namespace detail {

// Legendre nodes and weights on [-1, 1], found by Newton iteration on the
// three-term recurrence. Computed once per order; no tabulated constants.
template <int N>
struct GaussRule {
  double node[N];
  double weight[N];

  GaussRule() {
    constexpr double pi = std::numbers::pi;
    for (int i = 0; i < N; ++i) {
      double x = std::cos(pi * (i + 0.75) / (N + 0.5));
      for (int it = 0; it < 64; ++it) {
        auto [p, dp] = legendre(x);
        double dx = p / dp;
        x -= dx;
        if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) + 1e-300) {
          break;
        }
      }
      auto [p, dp] = legendre(x);
      x -= p / dp;
      std::tie(p, dp) = legendre(x);
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

 private:
  // Returns (P_N(x), P_N'(x)).
  static std::pair<double, double> legendre(double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= N; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = N * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
  }
};

inline const GaussRule<7>& rule_low() {
  static const GaussRule<7> r;
  return r;
}

inline const GaussRule<15>& rule_high() {
  static const GaussRule<15> r;
  return r;
}

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <class T>
struct PanelEstimate {
  T value;       // high-order estimate
  double error;  // |high - low|, conservative for smooth integrands
};

template <class F, class T>
PanelEstimate<T> estimate_panel(F& f, double a, double b) {
  const auto& lo = rule_low();
  const auto& hi = rule_high();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T sum_lo{};
  T sum_hi{};
  for (int i = 0; i < 7; ++i) {
    sum_lo += lo.weight[i] * f(c + h * lo.node[i]);
  }
  for (int i = 0; i < 15; ++i) {
    sum_hi += hi.weight[i] * f(c + h * hi.node[i]);
  }
  sum_lo *= h;
  sum_hi *= h;
  if (!finite(sum_hi) || !finite(sum_lo)) {
    throw std::domain_error("quadrature: integrand returned a non-finite value");
  }
  return {sum_hi, std::abs(sum_hi - sum_lo)};
}

}  // namespace detail

// Integrates f over [a, b]. Breakpoints inside (a, b) seed the initial panel
// set; after that the worst panel (by embedded error estimate) is bisected
// until the total estimate meets the tolerance. Works for real- and
// complex-valued integrands. Throws QuadratureError when the budget runs out
// or every remaining panel is at floating-point resolution.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg = {},
                        const std::vector<double>& breakpoints = {}) {
  using T = std::remove_cvref_t<std::invoke_result_t<F&, double>>;
  if (a == b) {
    return T{};
  }
  if (!(a < b)) {
    throw std::invalid_argument("integrate_adaptive: requires a <= b");
  }

  struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool dead;
  };

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints) {
    if (x > a && x < b) {
      edges.push_back(x);
    }
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Panel> panels;
  panels.reserve(256);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  double total_err = 0.0;
  T total_val{};

  auto push_panel = [&](double pa, double pb) {
    auto est = detail::estimate_panel<std::remove_reference_t<F>, T>(f, pa, pb);
    panels.push_back({pa, pb, est.value, est.error, false});
    total_err += est.error;
    total_val += est.value;
    const double width = pb - pa;
    const double scale = std::max({std::abs(pa), std::abs(pb), 1e-300});
    if (width > 16.0 * std::numeric_limits<double>::epsilon() * scale) {
      heap.push({est.error, panels.size() - 1});
    }
  };

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    push_panel(edges[i], edges[i + 1]);
  }

  auto tol = [&]() { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_val)); };

  while (total_err > tol()) {
    if (static_cast<int>(panels.size()) >= cfg.max_panels) {
      throw QuadratureError("quadrature: panel budget exhausted", total_err, tol());
    }
    std::size_t idx = panels.size();
    while (!heap.empty()) {
      auto [err, i] = heap.top();
      heap.pop();
      if (!panels[i].dead) {
        idx = i;
        break;
      }
    }
    if (idx == panels.size()) {
      throw QuadratureError("quadrature: interval fully resolved short of tolerance",
                            total_err, tol());
    }
    const double pa = panels[idx].a;
    const double pb = panels[idx].b;
    const double mid = 0.5 * (pa + pb);
    if (!(pa < mid && mid < pb)) {
      continue;  // unsplittable at machine resolution; error stays counted
    }
    total_err -= panels[idx].error;
    total_val -= panels[idx].value;
    panels[idx].dead = true;
    push_panel(pa, mid);
    push_panel(mid, pb);
  }

  // Recompute the sum in panel order to shed incremental rounding.
  T out{};
  for (const auto& p : panels) {
    if (!p.dead) {
      out += p.value;
    }
  }
  return out;
}

// Integrates f over [0, hi]. The leading segment is mapped through nu = u*u,
// which turns nu^(p-1) endpoint behavior (p > 0, e.g. sub-unit spectral
// exponents or Bose-enhanced weights) into a bounded analytic integrand.
// Breakpoints below the mapped segment shrink it so they stay effective.
template <class F>
auto integrate_halfline(F&& f, double hi, const QuadratureConfig& cfg = {},
                        const std::vector<double>& breakpoints = {}) {
  using T = std::remove_cvref_t<std::invoke_result_t<F&, double>>;
  if (!(hi > 0.0)) {
    if (hi == 0.0) {
      return T{};
    }
    throw std::invalid_argument("integrate_halfline: requires hi >= 0");
  }
  double m = 0.25 * hi;
  for (double x : breakpoints) {
    if (x > 0.0) {
      m = std::min(m, 0.5 * x);
    }
  }
  QuadratureConfig piece = cfg;
  piece.abs_tol = 0.5 * cfg.abs_tol;
  auto mapped = [&f](double u) { return (2.0 * u) * f(u * u); };
  T head = integrate_adaptive(mapped, 0.0, std::sqrt(m), piece);
  std::vector<double> tail_breaks;
  for (double x : breakpoints) {
    if (x > m && x < hi) {
      tail_breaks.push_back(x);
    }
  }
  T tail = integrate_adaptive(f, m, hi, piece, tail_breaks);
  return head + tail;
}

// Cauchy principal value of integral_0^hi w(nu) / (nu - omega) dnu for a
// weight w that is smooth across the pole. A symmetric window around the
// pole is folded into integral_0^h [w(omega+u) - w(omega-u)] / u du, which
// is bounded; the remaining segments are ordinary integrals. `scale` caps
// the window half-width (pass the weight's variation scale; 0 means omega).
// Poles at or beyond either end of [0, hi] need no excision and fall back
// to the half-line path.
template <class W>
double principal_value(W&& w, double hi, double omega, const QuadratureConfig& cfg = {},
                       double scale = 0.0) {
  if (!(hi > 0.0)) {
    throw std::invalid_argument("principal_value: requires hi > 0");
  }
  auto f = [&w, omega](double nu) { return w(nu) / (nu - omega); };
  if (!(omega > 0.0) || omega >= hi) {
    return integrate_halfline(f, hi, cfg);
  }
  double h = (scale > 0.0 ? std::min(omega, scale) : omega) / 10.0;
  h = std::min(h, 0.5 * (hi - omega));

  QuadratureConfig piece = cfg;
  piece.abs_tol = 0.25 * cfg.abs_tol;

  // [0, m] mapped through nu = u*u; [m, omega - h] plain.
  const double m = 0.5 * (omega - h);
  auto mapped = [&](double u) { return (2.0 * u) * f(u * u); };
  double left = integrate_adaptive(mapped, 0.0, std::sqrt(m), piece);
  double mid = integrate_adaptive(f, m, omega - h, piece);

  // Folded window: the u -> 0 limit is 2 w'(omega); nodes never hit u = 0.
  auto fold = [&w, omega](double u) { return (w(omega + u) - w(omega - u)) / u; };
  double window = integrate_adaptive(fold, 0.0, h, piece);

  std::vector<double> right_breaks;
  if (omega + 10.0 * h < hi) {
    right_breaks.push_back(omega + 10.0 * h);
  }
  double right = integrate_adaptive(f, omega + h, hi, piece, right_breaks);
  return left + mid + window + right;
}

}  // namespace spinpair::quad
