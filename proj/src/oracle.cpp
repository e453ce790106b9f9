#include <squeeze/oracle.hpp>

#include <limits>
#include <optional>

namespace squeeze::oracle {

namespace {

constexpr double kKktSlack = 1e-12;

}  // namespace

std::optional<Vector<double>> solve_pattern(const Vector<double>& y, double gamma, const SignPattern& pattern) {
  const Index n = y.size();
  // Zero entries fuse neighbours into groups; each group value solves
  //   2 |G| (v - mean_G) + gamma (s_in - s_out) = 0
  // where s_in / s_out are the signs of the differences entering / leaving it.
  // The restricted normal matrix is diagonal (group sizes), so it is solved directly.
  std::vector<Index> group_start{0};
  for (Index t = 0; t + 1 < n; ++t) {
    if (pattern[std::size_t(t)] != 0) group_start.push_back(t + 1);
  }
  const Index groups = Index(group_start.size());
  Vector<double> value(groups);
  std::vector<int> sign_in(std::size_t(groups), 0), sign_out(std::size_t(groups), 0);
  for (Index g = 0; g < groups; ++g) {
    const Index lo = group_start[std::size_t(g)];
    const Index hi = g + 1 < groups ? group_start[std::size_t(g + 1)] : n;
    if (g > 0) sign_in[std::size_t(g)] = pattern[std::size_t(lo - 1)];
    if (g + 1 < groups) sign_out[std::size_t(g)] = pattern[std::size_t(hi - 1)];
    const double size = double(hi - lo);
    value[g] = y.segment(lo, hi - lo).mean() - gamma * double(sign_in[std::size_t(g)] - sign_out[std::size_t(g)]) / (2 * size);
  }
  // Nonzero entries must carry the sign they claim.
  for (Index g = 0; g + 1 < groups; ++g) {
    if (double(sign_out[std::size_t(g)]) * (value[g + 1] - value[g]) <= 0) return std::nullopt;
  }
  Vector<double> f(n);
  for (Index g = 0; g < groups; ++g) {
    const Index lo = group_start[std::size_t(g)];
    const Index hi = g + 1 < groups ? group_start[std::size_t(g + 1)] : n;
    f.segment(lo, hi - lo).setConstant(value[g]);
  }
  // Fused entries need a subgradient z in [-1, 1]: 2 (f_t - y_t) + gamma (z_{t-1} - z_t) = 0.
  if (gamma > 0) {
    double z = 0.0;  // z_0
    for (Index t = 0; t + 1 < n; ++t) {
      z += 2 * (f[t] - y[t]) / gamma;
      if (pattern[std::size_t(t)] == 0) {
        if (std::abs(z) > 1 + kKktSlack) return std::nullopt;
      } else {
        z = pattern[std::size_t(t)];
      }
    }
  }
  return f;
}

Vector<double> tv_ls_oracle(const Signal<double>& signal, double gamma) {
  const Index n = signal.size();
  if (n > kMaxOracleLength) throw InvalidInput("oracle enumeration is limited to n <= 10");
  if (!(gamma >= 0)) throw InvalidInput("gamma must be non-negative");
  const Vector<double>& y = signal.values();
  if (n == 1) return y;

  SignPattern pattern(std::size_t(n - 1), -1);
  std::optional<Vector<double>> best;
  double best_obj = std::numeric_limits<double>::infinity();
  while (true) {
    if (auto f = solve_pattern(y, gamma, pattern)) {
      const double obj = tv_objective(*f, y, gamma);
      if (obj < best_obj) {
        best_obj = obj;
        best = std::move(f);
      }
    }
    // Next pattern in base-3 order.
    std::size_t i = 0;
    while (i < pattern.size() && pattern[i] == 1) pattern[i++] = -1;
    if (i == pattern.size()) break;
    ++pattern[i];
  }
  if (!best) throw std::logic_error("no KKT-consistent sign pattern found");
  return *best;
}

ArgmaxSet exhaustive_argmax(const Vector<double>& values, double tol) {
  if (values.size() < 1) throw InvalidInput("argmax of an empty sequence");
  ArgmaxSet out;
  out.max = values.maxCoeff();
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] >= out.max - tol) out.indices.push_back(i + 1);
  }
  return out;
}

}  // namespace squeeze::oracle
