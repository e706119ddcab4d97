#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace zenotraj::model {

inline void check_paths(int paths, int shifted) {
  if (paths < 1) throw std::invalid_argument("path count N must be >= 1, got " + std::to_string(paths));
  if (shifted < 0 || shifted > paths) {
    throw std::invalid_argument("pi-shift count n must satisfy 0 <= n <= N, got n=" +
                                std::to_string(shifted) + ", N=" + std::to_string(paths));
  }
}

// Interference factor (N - 2n)^2 / N^2 for n pi-shifted arms out of N.
inline double r_factor(int paths, int shifted) {
  check_paths(paths, shifted);
  const double d = static_cast<double>(paths - 2 * shifted);
  const double nn = static_cast<double>(paths);
  return d * d / (nn * nn);
}

// n = N/2 makes the post-selected branch orthogonal to the input superposition.
inline bool is_null_configuration(int paths, int shifted) noexcept { return 2 * shifted == paths; }

// sum_{k,l} exp(-i(phi_k - phi_l)). The (k,l) and (l,k) terms are complex
// conjugates, so only the cosines survive; summing them directly keeps the
// result exact for phases in {0, pi}.
inline double phase_sum(const std::vector<double>& phases) {
  double s = 0.0;
  for (double pk : phases) {
    for (double pl : phases) s += std::cos(pk - pl);
  }
  return s;
}

struct PhaseVector {
  std::vector<double> phases;
};

struct BinaryCount {
  int shifted;
};

class InterferometerConfig {
 public:
  static InterferometerConfig binary(int paths, int shifted) {
    check_paths(paths, shifted);
    return InterferometerConfig(paths, BinaryCount{shifted});
  }
  static InterferometerConfig with_phases(std::vector<double> phases) {
    if (phases.empty()) throw std::invalid_argument("InterferometerConfig: empty phase vector");
    for (double p : phases) {
      if (!std::isfinite(p)) throw std::invalid_argument("InterferometerConfig: non-finite phase");
    }
    const int paths = static_cast<int>(phases.size());
    return InterferometerConfig(paths, PhaseVector{std::move(phases)});
  }

  int paths() const noexcept { return paths_; }
  bool is_binary() const noexcept { return std::holds_alternative<BinaryCount>(mode_); }

  int shifted() const {
    if (!is_binary()) throw std::logic_error("InterferometerConfig: not in binary-count mode");
    return std::get<BinaryCount>(mode_).shifted;
  }

  double r() const { return r_factor(paths_, shifted()); }

  bool is_null() const {
    if (is_binary()) return is_null_configuration(paths_, shifted());
    return phase_sum(phases()) < 1e-12 * paths_ * paths_;
  }

  // Explicit phase vector; binary mode puts pi on the first n arms.
  std::vector<double> phases() const {
    if (const auto* pv = std::get_if<PhaseVector>(&mode_)) return pv->phases;
    const int n = std::get<BinaryCount>(mode_).shifted;
    std::vector<double> out(static_cast<std::size_t>(paths_), 0.0);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::numbers::pi;
    return out;
  }

 private:
  InterferometerConfig(int paths, std::variant<PhaseVector, BinaryCount> mode)
      : paths_(paths), mode_(std::move(mode)) {}

  int paths_;
  std::variant<PhaseVector, BinaryCount> mode_;
};

}  // namespace zenotraj::model
