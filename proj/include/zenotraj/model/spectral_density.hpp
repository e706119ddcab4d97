#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace zenotraj::model {

// J(w) = (1/2pi) gamma0 width^2 / ((qubit_frequency - w)^2 + width^2)
struct Lorentzian {
  double gamma0;
  double width;
  double qubit_frequency;
};

// J(w) = coupling * w^ohmicity * cutoff^(1 - ohmicity) * exp(-w / cutoff)
struct Ohmic {
  double coupling;
  double ohmicity;
  double cutoff;
};

// J(w) = amplitude * exp(-(w - center)^2 / width)
struct GaussianPeak {
  double center;
  double width;
  double amplitude = 1.0;
};

// Piecewise-linear interpolation of (w, J) samples; zero outside the table.
struct Tabulated {
  std::vector<double> omega;
  std::vector<double> value;
};

class SpectralDensity {
 public:
  using Variant = std::variant<Lorentzian, Ohmic, GaussianPeak, Tabulated>;

  explicit SpectralDensity(Variant v, std::optional<double> omega_max = std::nullopt)
      : variant_(std::move(v)) {
    validate();
    omega_max_ = omega_max ? *omega_max : default_cutoff();
    if (!(omega_max_ > 0.0) || !std::isfinite(omega_max_)) {
      throw std::invalid_argument("SpectralDensity: omega_max must be positive and finite");
    }
  }

  static SpectralDensity lorentzian(double gamma0, double width, double qubit_frequency,
                                    std::optional<double> omega_max = std::nullopt) {
    return SpectralDensity(Lorentzian{gamma0, width, qubit_frequency}, omega_max);
  }
  static SpectralDensity ohmic(double coupling, double ohmicity, double cutoff,
                               std::optional<double> omega_max = std::nullopt) {
    return SpectralDensity(Ohmic{coupling, ohmicity, cutoff}, omega_max);
  }
  static SpectralDensity gaussian_peak(double center, double width,
                                       std::optional<double> omega_max = std::nullopt) {
    return SpectralDensity(GaussianPeak{center, width, 1.0}, omega_max);
  }
  static SpectralDensity tabulated(std::vector<double> omega, std::vector<double> value) {
    return SpectralDensity(Tabulated{std::move(omega), std::move(value)});
  }
  // J identically zero.
  static SpectralDensity zero() { return tabulated({0.0, 1.0}, {0.0, 0.0}); }

  const Variant& variant() const noexcept { return variant_; }
  double omega_max() const noexcept { return omega_max_; }

  // Natural frequency scale of the density; used for small-w thresholds.
  double frequency_scale() const {
    return std::visit(
        [this](const auto& j) -> double {
          using T = std::decay_t<decltype(j)>;
          if constexpr (std::is_same_v<T, Ohmic>) return j.cutoff;
          else if constexpr (std::is_same_v<T, Lorentzian>) return j.width;
          else if constexpr (std::is_same_v<T, GaussianPeak>) return std::sqrt(j.width);
          else return omega_max_;
        },
        variant_);
  }

  std::string kind() const {
    return std::visit(
        [](const auto& j) -> std::string {
          using T = std::decay_t<decltype(j)>;
          if constexpr (std::is_same_v<T, Lorentzian>) return "lorentzian";
          else if constexpr (std::is_same_v<T, Ohmic>) return "ohmic";
          else if constexpr (std::is_same_v<T, GaussianPeak>) return "gaussian";
          else return "tabulated";
        },
        variant_);
  }

  double operator()(double w) const {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("SpectralDensity: frequency must be non-negative, got " +
                                  std::to_string(w));
    }
    if (w > omega_max_) return 0.0;
    return std::visit([w](const auto& j) { return evaluate(j, w); }, variant_);
  }

  // Same shape, J multiplied by factor >= 0 (omega_max unchanged).
  SpectralDensity scaled(double factor) const {
    if (!(factor >= 0.0)) throw std::invalid_argument("SpectralDensity::scaled: factor must be >= 0");
    Variant v = std::visit(
        [factor](auto j) -> Variant {
          using T = std::decay_t<decltype(j)>;
          if constexpr (std::is_same_v<T, Lorentzian>) j.gamma0 *= factor;
          else if constexpr (std::is_same_v<T, Ohmic>) j.coupling *= factor;
          else if constexpr (std::is_same_v<T, GaussianPeak>) j.amplitude *= factor;
          else for (auto& x : j.value) x *= factor;
          return j;
        },
        variant_);
    SpectralDensity out(std::move(v), omega_max_, /*unchecked=*/true);
    return out;
  }

  SpectralDensity with_cutoff(double omega_max) const { return SpectralDensity(variant_, omega_max); }

  // Quadrature partition of [lo, hi]: the end points plus the features of J
  // (peak centre and shoulders, table knots) that fall strictly inside.
  std::vector<double> integration_points(double lo, double hi) const {
    std::vector<double> marks = std::visit(
        [](const auto& j) -> std::vector<double> {
          using T = std::decay_t<decltype(j)>;
          std::vector<double> m;
          if constexpr (std::is_same_v<T, Lorentzian>) {
            for (double k : {-100.0, -30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0, 100.0}) {
              m.push_back(j.qubit_frequency + k * j.width);
            }
          } else if constexpr (std::is_same_v<T, Ohmic>) {
            for (double k : {0.1, 1.0, 3.0, 10.0, 25.0}) m.push_back(k * j.cutoff);
            m.push_back(j.ohmicity * j.cutoff);
          } else if constexpr (std::is_same_v<T, GaussianPeak>) {
            const double s = std::sqrt(j.width);
            for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) m.push_back(j.center + k * s);
          } else {
            m = j.omega;
          }
          return m;
        },
        variant_);
    marks.push_back(omega_max_);
    std::vector<double> pts{lo};
    std::sort(marks.begin(), marks.end());
    const double guard = 1e-12 * (hi - lo);
    for (double m : marks) {
      if (m > pts.back() + guard && m < hi - guard) pts.push_back(m);
    }
    pts.push_back(hi);
    return pts;
  }

 private:
  SpectralDensity(Variant v, double omega_max, bool /*unchecked*/)
      : variant_(std::move(v)), omega_max_(omega_max) {}

  static double evaluate(const Lorentzian& j, double w) {
    const double d = j.qubit_frequency - w;
    return j.gamma0 * j.width * j.width / (2.0 * std::numbers::pi * (d * d + j.width * j.width));
  }
  static double evaluate(const Ohmic& j, double w) {
    return j.coupling * std::pow(w, j.ohmicity) * std::pow(j.cutoff, 1.0 - j.ohmicity) *
           std::exp(-w / j.cutoff);
  }
  static double evaluate(const GaussianPeak& j, double w) {
    const double d = w - j.center;
    return j.amplitude * std::exp(-d * d / j.width);
  }
  static double evaluate(const Tabulated& j, double w) {
    if (w < j.omega.front() || w > j.omega.back()) return 0.0;
    const auto it = std::upper_bound(j.omega.begin(), j.omega.end(), w);
    if (it == j.omega.end()) return j.value.back();
    const auto i = static_cast<std::size_t>(it - j.omega.begin());
    const double x0 = j.omega[i - 1], x1 = j.omega[i];
    const double y0 = j.value[i - 1], y1 = j.value[i];
    return y0 + (y1 - y0) * (w - x0) / (x1 - x0);
  }

  double default_cutoff() const {
    return std::visit(
        [](const auto& j) -> double {
          using T = std::decay_t<decltype(j)>;
          if constexpr (std::is_same_v<T, Lorentzian>) return j.qubit_frequency + 50.0 * j.width;
          else if constexpr (std::is_same_v<T, Ohmic>) return 50.0 * j.cutoff;
          else if constexpr (std::is_same_v<T, GaussianPeak>) return j.center + 12.0 * std::sqrt(j.width);
          else return j.omega.back();
        },
        variant_);
  }

  void validate() const {
    std::visit(
        [](const auto& j) {
          using T = std::decay_t<decltype(j)>;
          auto positive = [](double x, const char* name) {
            if (!(x > 0.0) || !std::isfinite(x)) {
              throw std::invalid_argument(std::string("SpectralDensity: ") + name + " must be positive");
            }
          };
          if constexpr (std::is_same_v<T, Lorentzian>) {
            positive(j.gamma0, "gamma0");
            positive(j.width, "lambda");
            if (!std::isfinite(j.qubit_frequency)) throw std::invalid_argument("SpectralDensity: omega_q must be finite");
          } else if constexpr (std::is_same_v<T, Ohmic>) {
            positive(j.coupling, "eta");
            positive(j.ohmicity, "s");
            positive(j.cutoff, "omega_c");
          } else if constexpr (std::is_same_v<T, GaussianPeak>) {
            positive(j.width, "Delta");
            if (!std::isfinite(j.center)) throw std::invalid_argument("SpectralDensity: omega_M must be finite");
            if (!(j.amplitude >= 0.0)) throw std::invalid_argument("SpectralDensity: amplitude must be >= 0");
          } else {
            if (j.omega.size() < 2 || j.omega.size() != j.value.size()) {
              throw std::invalid_argument("SpectralDensity: table needs >= 2 matching (w, J) pairs");
            }
            if (j.omega.front() < 0.0) throw std::invalid_argument("SpectralDensity: table frequencies must be >= 0");
            for (std::size_t i = 1; i < j.omega.size(); ++i) {
              if (!(j.omega[i] > j.omega[i - 1])) {
                throw std::invalid_argument("SpectralDensity: table frequencies must be strictly increasing");
              }
            }
            for (double v : j.value) {
              if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("SpectralDensity: J must be >= 0");
            }
          }
        },
        variant_);
  }

  Variant variant_;
  double omega_max_ = 0.0;
};

inline double eval_spectral_density(const SpectralDensity& j, double w) { return j(w); }

}  // namespace zenotraj::model
