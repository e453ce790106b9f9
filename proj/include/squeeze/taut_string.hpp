#pragma once

// Taut-string estimation, both as the classical fixed-radius tube sweep and as
// a recursive knot search over shrinking tubes. Everything is templated on the
// scalar type; with an exact rational type the two algorithms can be compared
// without rounding.

#include <squeeze/core.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

namespace squeeze {

/// Greatest convex minorant of the points (i, x_i), i = 0..m-1.
template <typename Derived>
Vector<typename Derived::Scalar> gcm(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index m = x.size();
  if (m < 2) throw InvalidInput("convex minorant needs at least two points");
  // Lower hull by monotone chain.
  std::vector<Index> hull;
  for (Index i = 0; i < m; ++i) {
    while (hull.size() >= 2) {
      const Index a = hull[hull.size() - 2];
      const Index b = hull.back();
      // b lies on or above the chord a -> i.
      if ((x[b] - x[a]) * Scalar(i - a) >= (x[i] - x[a]) * Scalar(b - a)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  Vector<Scalar> out(m);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const Index a = hull[h];
    const Index b = hull[h + 1];
    for (Index i = a; i < b; ++i) out[i] = x[a] + (x[b] - x[a]) * Scalar(i - a) / Scalar(b - a);
  }
  out[m - 1] = x[m - 1];
  return out;
}

/// Least concave majorant, -gcm(-x).
template <typename Derived>
Vector<typename Derived::Scalar> lcm(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> neg = -x;
  return -gcm(neg);
}

inline double ts_gamma_to_lambda(double gamma) {
  if (!(gamma > 0)) throw InvalidInput("gamma must be positive");
  return gamma / 2.0;
}

inline double ts_lambda_to_gamma(double lambda) {
  if (!(lambda > 0)) throw InvalidInput("lambda must be positive");
  return 2.0 * lambda;
}

/// C sigma sqrt(2 n log n).
inline double ts_stopping_radius(double sigma, Index n, double c_alpha = 1.0) {
  if (sigma < 0 || n < 1) throw InvalidInput("stopping radius needs sigma >= 0 and n >= 1");
  return c_alpha * sigma * std::sqrt(2.0 * double(n) * std::log(double(n)));
}

struct Iteration {
  int j = 0;  // depth
  int k = 0;  // segment rank from the left at that depth
  friend bool operator==(const Iteration&, const Iteration&) = default;
};

template <typename Scalar = double>
struct KnotRecord {
  Index t = 0;
  int side = 0;  // +1 upper bound, -1 lower bound
  Scalar detection_radius = Scalar(0);
  std::optional<Iteration> iteration;  // recursive search only
  std::optional<Index> plateau_end;    // last t tying with this knot's radius
};

template <typename Scalar = double>
struct StringAnchor {
  Index t = 0;
  Scalar value = Scalar(0);
};

template <typename Scalar = double>
struct TautStringResult {
  PiecewiseEstimate<Scalar> estimate;
  std::vector<KnotRecord<Scalar>> knots;  // sorted by position
  Vector<Scalar> string;                  // F_0..F_n
};

namespace detail {

template <typename Scalar>
void check_radius(const Scalar& lambda) {
  if (!(lambda > Scalar(0))) throw InvalidInput("tube radius must be positive");
}

// Linear interpolation of anchors (sorted, first at 0, last at n) plus slopes.
template <typename Scalar>
TautStringResult<Scalar> finish_string(Index n, const std::vector<StringAnchor<Scalar>>& anchors,
                                       std::vector<KnotRecord<Scalar>> knots) {
  Vector<Scalar> string(n + 1);
  std::vector<Index> bps;
  std::vector<Scalar> levels;
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    const auto& lo = anchors[a];
    const auto& hi = anchors[a + 1];
    const Scalar slope = (hi.value - lo.value) / Scalar(hi.t - lo.t);
    for (Index t = lo.t; t < hi.t; ++t) string[t] = lo.value + slope * Scalar(t - lo.t);
    if (a > 0) bps.push_back(lo.t);
    levels.push_back(slope);
  }
  string[n] = anchors.back().value;
  auto estimate = PiecewiseEstimate<Scalar>::from_segments(n, bps, levels);
  // A touch the string passes straight through is not a knot.
  const auto& kept = estimate.breakpoints();
  std::erase_if(knots, [&](const auto& k) { return !std::binary_search(kept.begin(), kept.end(), k.t); });
  return {std::move(estimate), std::move(knots), std::move(string)};
}

}  // namespace detail

/// Taut string through the tube [Y_t - lambda, Y_t + lambda] pinned at Y_0 and
/// Y_n, found by a left-to-right sweep: from the current anchor the feasible
/// slopes form a funnel bounded by the tightest upper and lower bound; when it
/// closes, the string bends at the bound that closed it.
template <typename Scalar>
TautStringResult<Scalar> ts_uniscale(const Signal<Scalar>& signal, const Scalar& lambda) {
  detail::check_radius(lambda);
  const auto Y = integrate(signal);
  const Index n = signal.size();
  auto upper = [&](Index t) { return t == 0 || t == n ? Y(t) : Scalar(Y(t) + lambda); };
  auto lower = [&](Index t) { return t == 0 || t == n ? Y(t) : Scalar(Y(t) - lambda); };

  std::vector<StringAnchor<Scalar>> anchors{{0, Y(0)}};
  std::vector<KnotRecord<Scalar>> knots;
  Index a = 0;
  Scalar va = Y(0);
  while (a < n) {
    Scalar hi_slope(0), lo_slope(0);
    Index hi_idx = -1, lo_idx = -1;
    bool bent = false;
    for (Index t = a + 1; t <= n && !bent; ++t) {
      const Scalar su = (upper(t) - va) / Scalar(t - a);
      const Scalar sl = (lower(t) - va) / Scalar(t - a);
      if (lo_idx >= 0 && su < lo_slope) {
        knots.push_back({lo_idx, -1, lambda, std::nullopt, std::nullopt});
        a = lo_idx;
        va = lower(lo_idx);
        bent = true;
      } else if (hi_idx >= 0 && sl > hi_slope) {
        knots.push_back({hi_idx, +1, lambda, std::nullopt, std::nullopt});
        a = hi_idx;
        va = upper(hi_idx);
        bent = true;
      } else if (t == n) {
        a = n;
        va = Y(n);
      } else {
        // Ties go to the farthest point so that collinear contacts bend once.
        if (hi_idx < 0 || su <= hi_slope) {
          hi_slope = su;
          hi_idx = t;
        }
        if (lo_idx < 0 || sl >= lo_slope) {
          lo_slope = sl;
          lo_idx = t;
        }
      }
    }
    anchors.push_back({a, va});
  }
  return detail::finish_string(n, anchors, std::move(knots));
}

/// Tube radius at which the chord between (s-1, Y_{s-1} + g_left r) and
/// (e, Y_e + g_right r) touches the bound (t, Y_t + g_t r). Empty when the chord
/// never touches that bound for r > 0.
template <typename Scalar>
std::optional<Scalar> c_ts(Index t, Index s, Index e, int g_t, int g_left, int g_right,
                           const IntegratedProcess<Scalar>& Y) {
  if (!(s <= t && t < e) || s < 1 || e > Y.n()) throw InvalidInput("c_ts needs 1 <= s <= t < e <= n");
  if ((g_t != 1 && g_t != -1) || g_left < -1 || g_left > 1 || g_right < -1 || g_right > 1) {
    throw InvalidInput("c_ts sides must be in {-1, 0, +1} with g_t = +-1");
  }
  const Index len = e - s + 1;
  const Index denom = len * (g_t - g_left) - (t - s + 1) * (g_right - g_left);
  if (denom == 0) return std::nullopt;
  const Scalar r = Scalar(len) * segment_contrast(t, s, e, Y) / Scalar(denom);
  if (!(r > Scalar(0))) return std::nullopt;
  return r;
}

template <typename Scalar = double>
struct KnotCandidate {
  Index t = 0;
  int side = 0;
  Scalar radius = Scalar(0);
  Index plateau_end = 0;
};

/// Largest-radius touch point on segment [s, e] given the endpoint sides.
/// Ties resolve to the smallest t; `plateau_end` closes the run of tied t.
template <typename Scalar>
std::optional<KnotCandidate<Scalar>> best_knot(Index s, Index e, int g_left, int g_right,
                                               const IntegratedProcess<Scalar>& Y, const Scalar& tol) {
  std::optional<KnotCandidate<Scalar>> best;
  bool in_plateau = false;
  for (Index t = s; t < e; ++t) {
    std::optional<Scalar> top;
    int top_side = 0;
    for (int g : {+1, -1}) {
      const auto r = c_ts(t, s, e, g, g_left, g_right, Y);
      if (r && (!top || *r > *top)) {
        top = r;
        top_side = g;
      }
    }
    if (!top) {
      in_plateau = false;
      continue;
    }
    if (!best || *top > best->radius + tol) {
      best = KnotCandidate<Scalar>{t, top_side, *top, t};
      in_plateau = true;
    } else if (in_plateau && top_side == best->side && detail::abs_value(Scalar(*top - best->radius)) <= tol) {
      best->plateau_end = t;
    } else {
      in_plateau = false;
    }
  }
  return best;
}

/// First knot of the shrinking tube: argmax over t in (0, n), g = +-1 of
/// g ((t/n) Y_n - Y_t). Empty when Y is linear.
template <typename Scalar>
std::optional<KnotCandidate<Scalar>> first_knot(const IntegratedProcess<Scalar>& Y) {
  if (Y.n() < 2) throw InvalidInput("first knot needs n >= 2");
  return best_knot(Index(1), Y.n(), 0, 0, Y, detail::tie_tolerance(Y.scale()));
}

template <typename Scalar = double>
struct TraceRecord {
  Iteration iteration;
  Index s = 0;
  Index e = 0;
  Scalar radius = Scalar(0);  // detection radius, or lambda when the segment terminates
  std::optional<KnotRecord<Scalar>> knot;
  std::vector<StringAnchor<Scalar>> string_anchors;
};

template <typename Scalar = double>
struct MultiscaleResult {
  TautStringResult<Scalar> result;
  std::vector<KnotRecord<Scalar>> knots_by_detection;  // in processing order
  std::vector<TraceRecord<Scalar>> trace;
};

/// Recursive tube squeezing. Each segment's chord rides the tube at its end
/// sides; the first bound it touches while the radius shrinks becomes a knot
/// when that radius exceeds lambda, and the segment splits there.
template <typename Scalar>
MultiscaleResult<Scalar> ts_multiscale(const Signal<Scalar>& signal, const Scalar& lambda) {
  detail::check_radius(lambda);
  const auto Y = integrate(signal);
  const Index n = signal.size();
  const Scalar tol = detail::tie_tolerance(Y.scale());

  struct Pending {
    Index s, e;
    int g_left, g_right;
    int level;
  };
  std::deque<Pending> queue;
  queue.push_back({1, n, 0, 0, 1});

  MultiscaleResult<Scalar> out;
  int current_level = 0;
  int position = 0;
  while (!queue.empty()) {
    const Pending seg = queue.front();
    queue.pop_front();
    if (seg.level != current_level) {
      current_level = seg.level;
      position = 0;
    }
    TraceRecord<Scalar> record;
    record.iteration = {seg.level, ++position};
    record.s = seg.s;
    record.e = seg.e;
    record.radius = lambda;

    const auto candidate = seg.e > seg.s ? best_knot(seg.s, seg.e, seg.g_left, seg.g_right, Y, tol) : std::nullopt;
    if (candidate && candidate->radius > lambda) {
      KnotRecord<Scalar> knot{candidate->t, candidate->side, candidate->radius, record.iteration,
                              candidate->plateau_end};
      record.radius = candidate->radius;
      record.knot = knot;
      out.knots_by_detection.push_back(knot);
      if (candidate->t > seg.s) queue.push_back({seg.s, candidate->t, seg.g_left, candidate->side, seg.level + 1});
      if (seg.e > candidate->t + 1) {
        queue.push_back({candidate->t + 1, seg.e, candidate->side, seg.g_right, seg.level + 1});
      }
    }
    out.trace.push_back(std::move(record));
  }

  auto knots = out.knots_by_detection;
  std::sort(knots.begin(), knots.end(), [](const auto& a, const auto& b) { return a.t < b.t; });

  // The string at radius r is pinned at every knot detected at a radius >= r.
  auto anchors_at = [&](const Scalar& r) {
    std::vector<StringAnchor<Scalar>> anchors{{0, Y(0)}};
    for (const auto& k : knots) {
      if (k.detection_radius >= r) anchors.push_back({k.t, Scalar(Y(k.t) + Scalar(k.side) * r)});
    }
    anchors.push_back({n, Y(n)});
    return anchors;
  };
  for (auto& record : out.trace) record.string_anchors = anchors_at(record.radius);

  auto final_anchors = anchors_at(lambda);
  out.result = detail::finish_string(n, final_anchors, std::move(knots));
  return out;
}

}  // namespace squeeze
