#pragma once

// Unbalanced Haar (UH) wavelet estimation with top-down basis selection.

#include <squeeze/core.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace squeeze {

/// Values of psi_{s,b,e} on [s, e]; positive on [s, b], negative on [b+1, e].
template <typename Scalar = double>
Vector<Scalar> uh_vector_values(Index s, Index b, Index e) {
  using std::sqrt;
  if (!(s <= b && b < e)) throw InvalidInput("UH vector needs s <= b < e");
  const Scalar len = Scalar(e - s + 1);
  const Scalar pos = sqrt(Scalar(1) / Scalar(b - s + 1) - Scalar(1) / len);
  const Scalar neg = sqrt(Scalar(1) / Scalar(e - b) - Scalar(1) / len);
  Vector<Scalar> v(e - s + 1);
  v.head(b - s + 1).setConstant(pos);
  v.tail(e - b).setConstant(-neg);
  return v;
}

/// Multiplying factor sqrt((e-s+1) / ((t-s+1)(e-t))) of the adjusted axis.
inline double rho_uh(Index t, Index s, Index e) {
  if (!(s <= t && t < e)) throw InvalidInput("rho_uh needs s <= t < e");
  return std::sqrt(double(e - s + 1) / (double(t - s + 1) * double(e - t)));
}

/// c_uh(t; s, e)^2. Rational in the data, so exact scalar types give exact values.
template <typename Scalar>
Scalar c_uh_squared(Index t, Index s, Index e, const IntegratedProcess<Scalar>& Y) {
  if (!(s <= t && t < e) || s < 1 || e > Y.n()) throw InvalidInput("c_uh needs 1 <= s <= t < e <= n");
  const Scalar d = segment_contrast(t, s, e, Y);
  return Scalar(e - s + 1) / (Scalar(t - s + 1) * Scalar(e - t)) * d * d;
}

/// Locating function |<y_s^e, psi_{s,t,e}>|.
template <typename Scalar>
Scalar c_uh(Index t, Index s, Index e, const IntegratedProcess<Scalar>& Y) {
  using std::sqrt;
  if (!(s <= t && t < e) || s < 1 || e > Y.n()) throw InvalidInput("c_uh needs 1 <= s <= t < e <= n");
  const Scalar rho = sqrt(Scalar(e - s + 1) / (Scalar(t - s + 1) * Scalar(e - t)));
  return detail::abs_value(Scalar(rho * segment_contrast(t, s, e, Y)));
}

/// Signed coefficient <y_s^e, psi_{s,t,e}>.
template <typename Scalar>
Scalar uh_coefficient(Index t, Index s, Index e, const IntegratedProcess<Scalar>& Y) {
  using std::sqrt;
  const Scalar rho = sqrt(Scalar(e - s + 1) / (Scalar(t - s + 1) * Scalar(e - t)));
  return -rho * segment_contrast(t, s, e, Y);
}

/// Admissibility of a split: max{(b-s+1)/(e-s+1), (e-b)/(e-s+1)} <= p.
class BalanceConstraint {
 public:
  BalanceConstraint() = default;
  explicit BalanceConstraint(double p) : p_(p) {
    if (!(p >= 0.5 && p <= 1.0)) throw InvalidInput("balance parameter p must lie in [1/2, 1]");
  }

  double p() const { return p_; }

  static double imbalance(Index s, Index b, Index e) {
    const double len = double(e - s + 1);
    return std::max(double(b - s + 1) / len, double(e - b) / len);
  }

  bool admits(Index s, Index b, Index e) const {
    return imbalance(s, b, e) <= p_ + 1e-15;
  }

 private:
  double p_ = 1.0;
};

struct UHNode {
  Index s = 0;
  Index b = 0;
  Index e = 0;
  double coefficient = 0.0;  // signed <y, psi_{s,b,e}>
  Index left = -1;           // child over [s, b], if that segment is divisible
  Index right = -1;          // child over [b+1, e]
  int level = 1;             // j: depth, root = 1
  int position = 1;          // k: rank among nodes of the same level, left to right
  bool relaxed = false;      // no split of [s, e] satisfied the balance constraint
};

/// Selected UH basis with its coefficients. Node 0 is the root when present.
struct UHBasisTree {
  Index n = 0;
  double smooth = 0.0;  // <y, n^{-1/2} 1>
  std::vector<UHNode> nodes;
};

UHBasisTree select_basis_topdown(const Signal<double>& signal, const BalanceConstraint& constraint = BalanceConstraint());

UHBasisTree hard_threshold(UHBasisTree tree, double lambda);

/// f = smooth n^{-1/2} 1 + sum_k coef_k psi_k sampled at 1..n.
Vector<double> reconstruct(const UHBasisTree& tree);

PiecewiseEstimate<double> inverse_uh(const UHBasisTree& tree);

enum class Termination {
  FullDecomposition,  // transform to the finest scale, then threshold
  RadiusStop,         // stop on a segment once its best |coefficient| < lambda
};

struct UHOptions {
  std::optional<double> lambda;  // empty: universal threshold with the MAD noise estimate
  BalanceConstraint constraint;
  Termination termination = Termination::FullDecomposition;
};

struct UHResult {
  PiecewiseEstimate<double> estimate;
  UHBasisTree tree;  // thresholded (full) or truncated (radius-stop) tree
  double lambda = 0.0;
};

UHResult estimate_uh(const Signal<double>& signal, const UHOptions& options = {});

}  // namespace squeeze
