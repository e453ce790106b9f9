#pragma once

// Brute-force references for validating the estimators on small inputs.

#include <squeeze/core.hpp>

#include <optional>
#include <vector>

namespace squeeze::oracle {

inline constexpr Index kMaxOracleLength = 10;

/// ||f - y||^2 + gamma sum |f_{t+1} - f_t|.
template <typename DerivedF, typename DerivedY>
double tv_objective(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedY>& y, double gamma) {
  return (f - y).squaredNorm() + gamma * total_variation(f);
}

/// Sign of each consecutive difference f_{t+1} - f_t, entries in {-1, 0, +1}.
using SignPattern = std::vector<int>;

/// Exact minimiser of the TV-penalised least-squares objective by enumerating
/// all 3^(n-1) sign patterns and keeping the KKT-consistent solution with the
/// lowest objective. Refuses n > kMaxOracleLength.
Vector<double> tv_ls_oracle(const Signal<double>& y, double gamma);

/// Solution restricted to a sign pattern, or empty when the pattern is not a
/// valid KKT certificate.
std::optional<Vector<double>> solve_pattern(const Vector<double>& y, double gamma, const SignPattern& pattern);

struct ArgmaxSet {
  std::vector<Index> indices;  // 1-based
  double max = 0.0;
};

ArgmaxSet exhaustive_argmax(const Vector<double>& values, double tol = 0.0);

}  // namespace squeeze::oracle
