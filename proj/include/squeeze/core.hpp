#pragma once

// Shared data model for the piecewise-constant estimators: observation
// vectors, their integrated process, step-function estimates and the
// noise-scale / threshold helpers used by both methods.
//
// Positions follow the usual 1-based convention: observations are y_1..y_n,
// the integrated process is Y_0..Y_n with Y_0 = 0, and a breakpoint b means
// the level changes between y_b and y_{b+1}.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace squeeze {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Scalar>
bool is_finite(const Scalar& v) {
  if constexpr (std::numeric_limits<Scalar>::is_exact) {
    return true;
  } else {
    using std::isfinite;
    return isfinite(v);
  }
}

template <typename Scalar>
Scalar abs_value(const Scalar& v) {
  return v < Scalar(0) ? Scalar(-v) : v;
}

// Absolute tolerance used when deciding ties between scores derived from the
// integrated process. Exact scalar types compare exactly.
template <typename Scalar>
Scalar tie_tolerance(const Scalar& data_scale) {
  if constexpr (std::numeric_limits<Scalar>::is_exact) {
    return Scalar(0);
  } else {
    return Scalar(1e-12) * std::max(Scalar(1), data_scale);
  }
}

}  // namespace detail

/// Raw observations y_1..y_n on an equispaced grid.
template <typename Scalar = double>
class Signal {
 public:
  explicit Signal(Vector<Scalar> values) : values_(std::move(values)) {
    if (values_.size() < 1) throw InvalidInput("signal must contain at least one observation");
    for (Index i = 0; i < values_.size(); ++i) {
      if (!detail::is_finite(values_[i])) throw InvalidInput("signal values must be finite");
    }
  }

  explicit Signal(const std::vector<Scalar>& values)
      : Signal(Vector<Scalar>(Eigen::Map<const Vector<Scalar>>(values.data(), Index(values.size())))) {}

  Index size() const { return values_.size(); }
  const Vector<Scalar>& values() const { return values_; }
  /// y_t, 1-based.
  const Scalar& at(Index t) const { return values_[t - 1]; }

 private:
  Vector<Scalar> values_;
};

/// Prefix sums Y_0..Y_n, Y_0 = 0.
template <typename Scalar = double>
class IntegratedProcess {
 public:
  explicit IntegratedProcess(Vector<Scalar> partial_sums) : sums_(std::move(partial_sums)) {
    if (sums_.size() < 1 || sums_[0] != Scalar(0)) {
      throw InvalidInput("integrated process must start at Y_0 = 0");
    }
  }

  /// Number of observations n.
  Index n() const { return sums_.size() - 1; }
  const Scalar& operator()(Index t) const { return sums_[t]; }
  const Vector<Scalar>& partial_sums() const { return sums_; }

  /// Largest |Y_t|, used to scale tie tolerances.
  Scalar scale() const {
    Scalar m(0);
    for (Index t = 0; t < sums_.size(); ++t) m = std::max(m, detail::abs_value(sums_[t]));
    return m;
  }

 private:
  Vector<Scalar> sums_;
};

template <typename Scalar>
IntegratedProcess<Scalar> integrate(const Signal<Scalar>& signal) {
  const Index n = signal.size();
  Vector<Scalar> sums(n + 1);
  sums[0] = Scalar(0);
  for (Index t = 1; t <= n; ++t) sums[t] = sums[t - 1] + signal.at(t);
  return IntegratedProcess<Scalar>(std::move(sums));
}

/// The differential term shared by both locating functions on segment [s, e]:
/// ((t-s+1)/(e-s+1)) (Y_e - Y_{s-1}) - (Y_t - Y_{s-1}).
template <typename Scalar>
Scalar segment_contrast(Index t, Index s, Index e, const IntegratedProcess<Scalar>& Y) {
  const Scalar base = Y(s - 1);
  // Single division keeps the value exact for integer data.
  return (Scalar(t - s + 1) * (Y(e) - base) - Scalar(e - s + 1) * (Y(t) - base)) / Scalar(e - s + 1);
}

/// Step function on 1..n: level_k on (b_k, b_{k+1}] with b_0 = 0, b_{m+1} = n.
/// Adjacent levels always differ; construction merges equal neighbours.
template <typename Scalar = double>
class PiecewiseEstimate {
 public:
  PiecewiseEstimate() = default;

  /// Builds a canonical estimate. Neighbouring levels within `merge_tol`
  /// (relative to the level scale) are merged into their length-weighted mean.
  static PiecewiseEstimate from_segments(Index n, const std::vector<Index>& breakpoints,
                                         const std::vector<Scalar>& levels, Scalar merge_tol = Scalar(0)) {
    if (n < 1) throw InvalidInput("estimate length must be positive");
    if (levels.size() != breakpoints.size() + 1) {
      throw InvalidInput("levels count must equal breakpoints count + 1");
    }
    Index prev = 0;
    for (Index b : breakpoints) {
      if (b <= prev || b >= n) throw InvalidInput("breakpoints must be strictly increasing within (0, n)");
      prev = b;
    }
    Scalar scale(0);
    for (const auto& v : levels) scale = std::max(scale, detail::abs_value(v));
    const Scalar tol = merge_tol * std::max(Scalar(1), scale);

    PiecewiseEstimate out;
    out.n_ = n;
    std::vector<Scalar> merged_levels;
    Scalar run_sum(0);
    Index run_len = 0;
    Scalar run_ref = levels.front();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const Index seg_start = k == 0 ? 0 : breakpoints[k - 1];
      const Index seg_end = k == breakpoints.size() ? n : breakpoints[k];
      const Index len = seg_end - seg_start;
      if (k > 0 && detail::abs_value(Scalar(levels[k] - run_ref)) > tol) {
        out.breakpoints_.push_back(seg_start);
        merged_levels.push_back(run_len > 0 && tol > Scalar(0) ? Scalar(run_sum / Scalar(run_len)) : run_ref);
        run_sum = Scalar(0);
        run_len = 0;
        run_ref = levels[k];
      }
      run_sum += levels[k] * Scalar(len);
      run_len += len;
    }
    merged_levels.push_back(run_len > 0 && tol > Scalar(0) ? Scalar(run_sum / Scalar(run_len)) : run_ref);
    out.levels_ = Vector<Scalar>(Index(merged_levels.size()));
    for (std::size_t k = 0; k < merged_levels.size(); ++k) out.levels_[Index(k)] = merged_levels[k];
    return out;
  }

  /// Extracts the step structure of sampled values f_1..f_n.
  static PiecewiseEstimate from_samples(const Vector<Scalar>& samples, Scalar merge_tol = Scalar(0)) {
    const Index n = samples.size();
    if (n < 1) throw InvalidInput("estimate length must be positive");
    std::vector<Index> bps;
    std::vector<Scalar> levels{samples[0]};
    for (Index t = 1; t < n; ++t) {
      if (samples[t] != samples[t - 1]) {
        bps.push_back(t);
        levels.push_back(samples[t]);
      }
    }
    return from_segments(n, bps, levels, merge_tol);
  }

  static PiecewiseEstimate constant(Index n, Scalar level) { return from_segments(n, {}, {level}); }

  Index n() const { return n_; }
  const std::vector<Index>& breakpoints() const { return breakpoints_; }
  const Vector<Scalar>& levels() const { return levels_; }
  Index segment_count() const { return levels_.size(); }

  /// Level at observation t (1-based).
  Scalar at(Index t) const {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return levels_[Index(it - breakpoints_.begin())];
  }

  friend bool operator==(const PiecewiseEstimate& a, const PiecewiseEstimate& b) {
    return a.n_ == b.n_ && a.breakpoints_ == b.breakpoints_ && a.levels_ == b.levels_;
  }

 private:
  Index n_ = 0;
  std::vector<Index> breakpoints_;
  Vector<Scalar> levels_;
};

/// Samples the step function at t = 1..n.
template <typename Scalar>
Vector<Scalar> evaluate(const PiecewiseEstimate<Scalar>& estimate, Index n) {
  if (estimate.n() != n || (!estimate.breakpoints().empty() && estimate.breakpoints().back() >= n)) {
    throw InvalidInput("breakpoint outside (0, n)");
  }
  Vector<Scalar> out(n);
  Index seg = 0;
  const auto& bps = estimate.breakpoints();
  for (Index t = 1; t <= n; ++t) {
    while (seg < Index(bps.size()) && t > bps[std::size_t(seg)]) ++seg;
    out[t - 1] = estimate.levels()[seg];
  }
  return out;
}

template <typename Scalar>
Scalar total_variation(const PiecewiseEstimate<Scalar>& estimate) {
  Scalar tv(0);
  const auto& lv = estimate.levels();
  for (Index k = 1; k < lv.size(); ++k) tv += detail::abs_value(Scalar(lv[k] - lv[k - 1]));
  return tv;
}

/// Total variation of an arbitrary sample vector, sum |f_{t+1} - f_t|.
template <typename Derived>
typename Derived::Scalar total_variation(const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  if (f.size() < 2) return Scalar(0);
  return (f.tail(f.size() - 1) - f.head(f.size() - 1)).cwiseAbs().sum();
}

/// 0.75-quantile of the standard normal distribution.
inline constexpr double kNormalQuantile075 = 0.67448975019608174320;

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t m = v.size();
  const std::size_t mid = m / 2;
  std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid), v.end());
  const double hi = v[mid];
  if (m % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + std::ptrdiff_t(mid));
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Robust noise scale: median of |y_{t+1} - y_t| / sqrt(2) over the
/// 0.75-quantile of N(0, 1).
inline double estimate_sigma_mad(const Signal<double>& signal) {
  const Index n = signal.size();
  if (n < 2) throw InvalidInput("noise estimate needs at least two observations");
  std::vector<double> diffs(std::size_t(n - 1));
  for (Index t = 1; t < n; ++t) diffs[std::size_t(t - 1)] = std::abs(signal.at(t + 1) - signal.at(t)) / std::sqrt(2.0);
  return detail::median(std::move(diffs)) / kNormalQuantile075;
}

/// sigma * sqrt(2 log n).
inline double universal_threshold(double sigma, Index n) {
  if (sigma < 0 || n < 1) throw InvalidInput("universal threshold needs sigma >= 0 and n >= 1");
  return sigma * std::sqrt(2.0 * std::log(double(n)));
}

/// Piecewise-constant function on (0, 1]: value levels[i] on (knots[i-1], knots[i]]
/// with implicit knots 0 and 1 at the ends.
struct PiecewiseConstantSpec {
  std::vector<double> knots;   // a_1 < ... < a_l, all in (0, 1)
  std::vector<double> levels;  // lambda_0 .. lambda_l

  void validate() const {
    if (levels.size() != knots.size() + 1) throw InvalidInput("spec needs one more level than knots");
    double prev = 0.0;
    for (double a : knots) {
      if (!(a > prev) || !(a < 1.0)) throw InvalidInput("spec knots must be strictly increasing in (0, 1)");
      prev = a;
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (levels[i] == levels[i - 1]) throw InvalidInput("adjacent spec levels must differ");
    }
  }

  /// integral of f over (0, 1).
  double mean() const {
    double m = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double next = i < knots.size() ? knots[i] : 1.0;
      m += (next - prev) * levels[i];
      prev = next;
    }
    return m;
  }

  PiecewiseConstantSpec centered() const {
    PiecewiseConstantSpec out = *this;
    const double m = mean();
    for (auto& l : out.levels) l -= m;
    return out;
  }

  double operator()(double x) const {
    std::size_t i = 0;
    while (i < knots.size() && x > knots[i]) ++i;
    return levels[i];
  }

  /// Grid breakpoints floor(a_i * n). The small offset keeps knots such as
  /// 2/3, which are not representable, on the intended index.
  std::vector<Index> grid_breakpoints(Index n) const {
    std::vector<Index> out;
    out.reserve(knots.size());
    for (double a : knots) out.push_back(Index(std::floor(a * double(n) + 1e-9)));
    return out;
  }

  /// Sampled truth at size n; breakpoint i lands on index floor(a_i * n).
  PiecewiseEstimate<double> sample(Index n) const {
    validate();
    const auto bps = grid_breakpoints(n);
    for (std::size_t i = 0; i < bps.size(); ++i) {
      if (bps[i] < 1 || bps[i] >= n || (i > 0 && bps[i] <= bps[i - 1])) {
        throw InvalidInput("spec knots collide on a grid of size " + std::to_string(n));
      }
    }
    return PiecewiseEstimate<double>::from_segments(n, bps, levels);
  }
};

}  // namespace squeeze
