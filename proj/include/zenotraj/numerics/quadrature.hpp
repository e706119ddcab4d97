#pragma once

// Globally adaptive Gauss-Kronrod quadrature.
//
// The interval with the largest embedded error estimate is bisected until the
// summed estimate meets max(abs_tol, rel_tol * |I|). Works for any value type
// that forms a vector space over double: double, std::complex<double>, and
// fixed-size Eigen matrices (used for matrix-valued bath integrals).

#include <Eigen/Core>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "zenotraj/errors.hpp"

namespace zenotraj::numerics {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  std::size_t max_intervals = 4000;
};

template <class T>
struct QuadratureResult {
  T value;
  double error;
  std::size_t evaluations;
  std::size_t intervals;
};

namespace detail {

inline double magnitude(double x) noexcept { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) noexcept { return std::abs(z); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

inline std::pair<double, double> parts(double x) noexcept { return {x, 0.0}; }
inline std::pair<double, double> parts(const std::complex<double>& z) noexcept {
  return {z.real(), z.imag()};
}
template <class Derived>
std::pair<double, double> parts(const Eigen::MatrixBase<Derived>& m) {
  return {magnitude(m), 0.0};
}

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

// 21-point Kronrod extension of the 10-point Gauss rule. Node layout follows
// Boost.Math: abscissa()[0] is the centre, Gauss nodes sit at odd indices.
template <class T, class F>
Panel<T> gauss_kronrod_21(F& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();

  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  T fc = f(centre);
  T kronrod_sum = fc * wk[0];
  T gauss_sum = fc * 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = half * x[i];
    T pair = f(centre - dx) + f(centre + dx);
    kronrod_sum += pair * wk[i];
    if (i % 2 == 1) gauss_sum += pair * wg[i / 2];
  }
  T value = kronrod_sum * half;
  const double diff = magnitude(T((kronrod_sum - gauss_sum) * half));
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * magnitude(value);
  return {a, b, value, std::max(diff, floor)};
}

}  // namespace detail

// Integral over [points.front(), points.back()], starting from the partition
// given by `points` (strictly increasing, at least two entries). Interior
// points mark features such as narrow peaks that a single initial panel could
// step over.
template <class F>
auto integrate_adaptive(F&& f, const std::vector<double>& points, const QuadratureOptions& opts = {})
    -> QuadratureResult<std::decay_t<decltype(f(0.5 * (points.front() + points.back())))>> {
  using T = std::decay_t<decltype(f(0.5 * (points.front() + points.back())))>;
  if (points.size() < 2) {
    throw std::invalid_argument("integrate_adaptive: need at least two points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) {
      throw std::invalid_argument("integrate_adaptive: require a < b (points strictly increasing)");
    }
  }
  const double a = points.front();
  const double b = points.back();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate_adaptive: finite bounds required; use integrate_half_line");
  }
  constexpr std::size_t evals_per_panel = 21;

  std::priority_queue<detail::Panel<T>> heap;
  auto first = detail::gauss_kronrod_21<T>(f, points[0], points[1]);
  T total = first.value;
  double total_error = first.error;
  heap.push(std::move(first));
  for (std::size_t i = 2; i < points.size(); ++i) {
    auto next = detail::gauss_kronrod_21<T>(f, points[i - 1], points[i]);
    total += next.value;
    total_error += next.error;
    heap.push(std::move(next));
  }
  std::size_t evaluations = evals_per_panel * (points.size() - 1);
  // Panels too narrow to split further are parked here.
  std::vector<detail::Panel<T>> frozen;

  auto converged = [&] {
    return total_error <= std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total));
  };

  while (!converged() && !heap.empty()) {
    if (heap.size() + frozen.size() >= opts.max_intervals) {
      const auto [re, im] = detail::parts(total);
      throw QuadratureError("integrate_adaptive: no convergence after " +
                                std::to_string(opts.max_intervals) + " subintervals (error " +
                                std::to_string(total_error) + ")",
                            re, im, total_error);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-13 * (b - a)) {
      frozen.push_back(std::move(worst));
      continue;
    }
    auto left = detail::gauss_kronrod_21<T>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_21<T>(f, mid, worst.b);
    evaluations += 2 * evals_per_panel;
    total += (left.value + right.value) - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum from the panels to shed drift accumulated by incremental updates.
  std::vector<detail::Panel<T>> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  T sum = all.front().value;
  double err = all.front().error;
  for (std::size_t i = 1; i < all.size(); ++i) {
    sum += all[i].value;
    err += all[i].error;
  }
  if (err > std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(sum))) {
    const auto [re, im] = detail::parts(sum);
    throw QuadratureError("integrate_adaptive: tolerance unreachable (roundoff limited, error " +
                              std::to_string(err) + ")",
                          re, im, err);
  }
  return {sum, err, evaluations, all.size()};
}

template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, opts);
}

// Integral over [a, inf) through the map w = a + x / (1 - x), x in [0, 1).
template <class F>
auto integrate_half_line(F&& f, double a, const QuadratureOptions& opts = {}) {
  auto mapped = [&f, a](double x) {
    const double s = 1.0 - x;
    const double jac = 1.0 / (s * s);
    return f(a + x / s) * jac;
  };
  return integrate_adaptive(mapped, 0.0, 1.0, opts);
}

}  // namespace zenotraj::numerics
