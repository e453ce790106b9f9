#pragma once

// Retrospective single-breakpoint statistics d_delta, their critical values and
// type-2 error exponents, and the continuous locating functions of both
// estimators for a piecewise-constant mean.

#include <squeeze/core.hpp>

#include <cmath>
#include <optional>
#include <utility>
#include <stdexcept>

namespace squeeze {

class SingularInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// {(t/n)(1 - t/n)}^delta {X_t / t - (X_n - X_t) / (n - t)}, 1 <= t <= n-1.
inline double d_delta(Index t, const IntegratedProcess<double>& X, double delta) {
  const Index n = X.n();
  if (t < 1 || t > n - 1) throw InvalidInput("d_delta needs 1 <= t <= n-1");
  const double x = double(t) / double(n);
  const double diff = X(t) / double(t) - (X(n) - X(t)) / double(n - t);
  return std::pow(x * (1.0 - x), delta) * diff;
}

/// d_delta(t) for t = 1..n-1 (entry t-1).
inline Vector<double> d_delta_row(const IntegratedProcess<double>& X, double delta) {
  const Index n = X.n();
  Vector<double> out(std::max<Index>(n - 1, 0));
  for (Index t = 1; t < n; ++t) out[t - 1] = d_delta(t, X, delta);
  return out;
}

struct DeltaStatConfig {
  double alpha = 0.05;
  double a1 = 0.25;
  double a2 = 0.75;

  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw InvalidInput("alpha must lie in (0, 1)");
    if (!(a1 > 0 && a1 < a2 && a2 < 1)) throw InvalidInput("need 0 < a1 < a2 < 1");
  }
  /// min(a1 (1 - a1), a2 (1 - a2)).
  double Delta() const { return std::min(a1 * (1 - a1), a2 * (1 - a2)); }
  /// -log(alpha).
  double A() const { return -std::log(alpha); }
  /// Candidate positions t with a1 <= t/n <= a2, clipped to [1, n-1].
  std::pair<Index, Index> window(Index n) const {
    const Index lo = std::max<Index>(1, Index(std::ceil(a1 * double(n) - 1e-9)));
    const Index hi = std::min<Index>(n - 1, Index(std::floor(a2 * double(n) + 1e-9)));
    if (lo > hi) throw InvalidInput("a1/a2: no grid position of n = " + std::to_string(n) + " lies in [a1, a2]");
    return {lo, hi};
  }
};

struct JumpSpec {
  double b = 0.5;  // breakpoint as a fraction of n
  double h = 1.0;  // jump magnitude

  double p() const { return b * (1 - b); }
};

namespace detail {

inline int delta_code(double delta) {
  if (delta == 0.0) return 0;
  if (delta == 0.5) return 1;
  if (delta == 1.0) return 2;
  throw Unsupported("critical values are available for delta in {0, 1/2, 1} only");
}

}  // namespace detail

/// c_delta^2 for a type-1 level with A = -log(alpha): 2A/(Delta n), 2A/n, A/(2n).
template <typename Scalar>
Scalar critical_value_squared(double delta, const Scalar& A, const Scalar& Delta, Index n) {
  switch (detail::delta_code(delta)) {
    case 0:
      return Scalar(2) * A / (Delta * Scalar(n));
    case 1:
      return Scalar(2) * A / Scalar(n);
    default:
      return A / (Scalar(2) * Scalar(n));
  }
}

inline double critical_value(double delta, const DeltaStatConfig& config, Index n) {
  config.validate();
  if (n < 1) throw InvalidInput("n must be positive");
  return std::sqrt(critical_value_squared(delta, config.A(), config.Delta(), n));
}

/// Square of the term subtracted from h sqrt(p) in C_delta:
/// 2pA/(Delta n), 2A/n, A/(2pn).
template <typename Scalar>
Scalar exponent_offset_squared(double delta, const Scalar& p, const Scalar& A, const Scalar& Delta, Index n) {
  switch (detail::delta_code(delta)) {
    case 0:
      return Scalar(2) * p * A / (Delta * Scalar(n));
    case 1:
      return Scalar(2) * A / Scalar(n);
    default:
      return A / (Scalar(2) * p * Scalar(n));
  }
}

/// c_delta < h p^delta, evaluated on squares so exact types stay exact.
template <typename Scalar>
bool is_detectable(double delta, const Scalar& h, const Scalar& p, const Scalar& A, const Scalar& Delta, Index n) {
  const Scalar c2 = critical_value_squared(delta, A, Delta, n);
  Scalar signal2 = h * h;
  switch (detail::delta_code(delta)) {
    case 0:
      break;
    case 1:
      signal2 = signal2 * p;
      break;
    default:
      signal2 = signal2 * p * p;
  }
  return h > Scalar(0) && c2 < signal2;
}

/// C_delta = (h p^delta - c_delta)^2 / p^(2 delta - 1), so that the type-2 error
/// behaves like exp(-n C_delta / 2). Empty when c_delta >= h p^delta.
inline std::optional<double> type2_exponent(double delta, const JumpSpec& jump, const DeltaStatConfig& config,
                                            Index n) {
  config.validate();
  const double p = jump.p();
  if (!is_detectable(delta, jump.h, p, config.A(), config.Delta(), n)) return std::nullopt;
  const double c = critical_value(delta, config, n);
  const double gap = jump.h * std::pow(p, delta) - c;
  return gap * gap / std::pow(p, 2 * delta - 1);
}

/// Numerator shared by h_uh and h_ts: the integral of f over (0, x).
double locating_numerator(double x, const PiecewiseConstantSpec& spec);

/// Continuous UH locating function; spec must have zero mean.
double h_uh(double x, const PiecewiseConstantSpec& spec);

/// Continuous TS locating function with denominator alpha1 x + alpha2 (1 - x),
/// alpha_k in {0, +-1, +-2}, |alpha1 + alpha2| = 2.
double h_ts(double x, const PiecewiseConstantSpec& spec, int alpha1, int alpha2);

struct Detection {
  Index b = 0;
  double statistic = 0.0;  // |d_delta(b)|
};

/// argmax of |d_delta(t)| over first <= t <= last (last = 0: n - 1); ties go to the smallest t.
Detection locate_single_breakpoint(const Signal<double>& x, double delta, Index first = 1, Index last = 0);

/// The breakpoint when |d_delta| at its argmax exceeds `critical`.
std::optional<Detection> detect_single_breakpoint(const Signal<double>& x, double delta, double critical,
                                                  Index first = 1, Index last = 0);

struct DHalfReport {
  Index argmax_d_half = 0;
  Index argmax_c_uh = 0;
  bool argmax_agree = false;
  double ratio_reference = 0.0;    // sqrt(n)
  double max_rel_deviation = 0.0;  // max_t |c_uh / |d_half| / sqrt(n) - 1| over t with d_half != 0
};

/// Compares |d_{1/2}| with c_uh(t; 1, n) on the same data.
DHalfReport relate_d_half_to_c_uh(const Signal<double>& y);

}  // namespace squeeze
