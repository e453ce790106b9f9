#include <squeeze/uh.hpp>

#include <deque>

namespace squeeze {

namespace {

struct PendingSegment {
  Index s;
  Index e;
  int level;
  Index parent;
  bool is_left;
};

// Best split of [s, e] under the constraint; ties go to the smallest t.
struct Split {
  Index b;
  double coefficient;
  bool relaxed;
};

Split best_split(Index s, Index e, const IntegratedProcess<double>& Y, const BalanceConstraint& constraint,
                 double tol) {
  bool any_admissible = false;
  for (Index t = s; t < e && !any_admissible; ++t) any_admissible = constraint.admits(s, t, e);

  double least_imbalance = std::numeric_limits<double>::infinity();
  if (!any_admissible) {
    for (Index t = s; t < e; ++t) least_imbalance = std::min(least_imbalance, BalanceConstraint::imbalance(s, t, e));
  }

  Index best_t = -1;
  double best = -1.0;
  for (Index t = s; t < e; ++t) {
    const bool ok = any_admissible ? constraint.admits(s, t, e)
                                   : BalanceConstraint::imbalance(s, t, e) <= least_imbalance + 1e-15;
    if (!ok) continue;
    const double c = c_uh(t, s, e, Y);
    if (best_t < 0 || c > best + tol) {
      best = c;
      best_t = t;
    }
  }
  return {best_t, uh_coefficient(best_t, s, e, Y), !any_admissible};
}

UHBasisTree build_tree(const Signal<double>& signal, const BalanceConstraint& constraint,
                       std::optional<double> stop_radius) {
  const auto Y = integrate(signal);
  const Index n = signal.size();
  const double tol = detail::tie_tolerance(Y.scale());

  UHBasisTree tree;
  tree.n = n;
  tree.smooth = Y(n) / std::sqrt(double(n));

  // Breadth-first so that positions within a level run left to right.
  std::deque<PendingSegment> queue;
  if (n >= 2) queue.push_back({1, n, 1, -1, false});
  int current_level = 0;
  int position = 0;
  while (!queue.empty()) {
    const PendingSegment seg = queue.front();
    queue.pop_front();
    const Split split = best_split(seg.s, seg.e, Y, constraint, tol);
    if (stop_radius && std::abs(split.coefficient) < *stop_radius) continue;

    if (seg.level != current_level) {
      current_level = seg.level;
      position = 0;
    }
    UHNode node;
    node.s = seg.s;
    node.b = split.b;
    node.e = seg.e;
    node.coefficient = split.coefficient;
    node.level = seg.level;
    node.position = ++position;
    node.relaxed = split.relaxed;
    const Index id = Index(tree.nodes.size());
    tree.nodes.push_back(node);
    if (seg.parent >= 0) {
      auto& parent = tree.nodes[std::size_t(seg.parent)];
      (seg.is_left ? parent.left : parent.right) = id;
    }
    if (split.b > seg.s) queue.push_back({seg.s, split.b, seg.level + 1, id, true});
    if (seg.e > split.b + 1) queue.push_back({split.b + 1, seg.e, seg.level + 1, id, false});
  }
  return tree;
}

}  // namespace

UHBasisTree select_basis_topdown(const Signal<double>& signal, const BalanceConstraint& constraint) {
  return build_tree(signal, constraint, std::nullopt);
}

UHBasisTree hard_threshold(UHBasisTree tree, double lambda) {
  if (!(lambda >= 0)) throw InvalidInput("threshold must be non-negative");
  for (auto& node : tree.nodes) {
    if (std::abs(node.coefficient) < lambda) node.coefficient = 0.0;
  }
  return tree;
}

Vector<double> reconstruct(const UHBasisTree& tree) {
  const Index n = tree.n;
  // Each psi is constant on [s, b] and [b+1, e]; accumulate as a difference array.
  Vector<double> delta = Vector<double>::Zero(n + 1);
  for (const auto& node : tree.nodes) {
    if (node.coefficient == 0.0) continue;
    const double len = double(node.e - node.s + 1);
    const double pos = std::sqrt(1.0 / double(node.b - node.s + 1) - 1.0 / len);
    const double neg = std::sqrt(1.0 / double(node.e - node.b) - 1.0 / len);
    delta[node.s - 1] += node.coefficient * pos;
    delta[node.b] -= node.coefficient * (pos + neg);
    delta[node.e] += node.coefficient * neg;
  }
  Vector<double> f(n);
  double running = tree.smooth / std::sqrt(double(n));
  for (Index t = 0; t < n; ++t) {
    running += delta[t];
    f[t] = running;
  }
  return f;
}

PiecewiseEstimate<double> inverse_uh(const UHBasisTree& tree) {
  // Floating-point reconstruction of a flat stretch differs by rounding only.
  return PiecewiseEstimate<double>::from_samples(reconstruct(tree), 1e-10);
}

UHResult estimate_uh(const Signal<double>& signal, const UHOptions& options) {
  const Index n = signal.size();
  if (n == 1) {
    return {PiecewiseEstimate<double>::constant(1, signal.at(1)), UHBasisTree{1, signal.at(1), {}},
            options.lambda.value_or(0.0)};
  }
  const double lambda = options.lambda ? *options.lambda : universal_threshold(estimate_sigma_mad(signal), n);
  if (!(lambda >= 0)) throw InvalidInput("threshold must be non-negative");

  UHBasisTree tree = options.termination == Termination::FullDecomposition
                         ? hard_threshold(select_basis_topdown(signal, options.constraint), lambda)
                         : build_tree(signal, options.constraint, lambda);
  auto estimate = inverse_uh(tree);
  return {std::move(estimate), std::move(tree), lambda};
}

}  // namespace squeeze
