#include <squeeze/breakpoint.hpp>
#include <squeeze/uh.hpp>

namespace squeeze {

namespace {

void require_mean_zero(const PiecewiseConstantSpec& spec) {
  spec.validate();
  double scale = 1.0;
  for (double l : spec.levels) scale = std::max(scale, std::abs(l));
  if (std::abs(spec.mean()) > 1e-12 * scale) throw InvalidInput("locating functions need a mean-zero spec; center it first");
}

}  // namespace

double locating_numerator(double x, const PiecewiseConstantSpec& spec) {
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    const double next = i < spec.knots.size() ? spec.knots[i] : 1.0;
    if (x <= next) return acc + (x - prev) * spec.levels[i];
    acc += (next - prev) * spec.levels[i];
    prev = next;
  }
  return acc;
}

double h_uh(double x, const PiecewiseConstantSpec& spec) {
  if (!(x > 0 && x < 1)) throw InvalidInput("h_uh is defined on (0, 1)");
  require_mean_zero(spec);
  return locating_numerator(x, spec) / std::sqrt(x * (1 - x));
}

double h_ts(double x, const PiecewiseConstantSpec& spec, int alpha1, int alpha2) {
  if (!(x > 0 && x < 1)) throw InvalidInput("h_ts is defined on (0, 1)");
  if (std::abs(alpha1) > 2 || std::abs(alpha2) > 2 || std::abs(alpha1 + alpha2) != 2) {
    throw InvalidInput("h_ts needs alpha_k in {0, +-1, +-2} with |alpha1 + alpha2| = 2");
  }
  require_mean_zero(spec);
  const double denom = alpha1 * x + alpha2 * (1 - x);
  if (denom == 0.0) throw SingularInput("h_ts denominator vanishes at x");
  return locating_numerator(x, spec) / denom;
}

Detection locate_single_breakpoint(const Signal<double>& x, double delta, Index first, Index last) {
  const Index n = x.size();
  if (n < 2) throw InvalidInput("breakpoint detection needs n >= 2");
  if (last == 0) last = n - 1;
  if (first < 1 || last > n - 1 || first > last) throw InvalidInput("search window must satisfy 1 <= first <= last <= n-1");
  const auto X = integrate(x);
  Detection best{first, std::abs(d_delta(first, X, delta))};
  for (Index t = first + 1; t <= last; ++t) {
    const double v = std::abs(d_delta(t, X, delta));
    if (v > best.statistic) best = {t, v};
  }
  return best;
}

std::optional<Detection> detect_single_breakpoint(const Signal<double>& x, double delta, double critical,
                                                  Index first, Index last) {
  const Detection d = locate_single_breakpoint(x, delta, first, last);
  if (d.statistic > critical) return d;
  return std::nullopt;
}

DHalfReport relate_d_half_to_c_uh(const Signal<double>& y) {
  const Index n = y.size();
  if (n < 2) throw InvalidInput("need n >= 2");
  const auto Y = integrate(y);
  DHalfReport report;
  report.ratio_reference = std::sqrt(double(n));
  double best_d = -1.0, best_c = -1.0;
  for (Index t = 1; t < n; ++t) {
    const double d = std::abs(d_delta(t, Y, 0.5));
    const double c = c_uh(t, Index(1), n, Y);
    if (d > best_d) {
      best_d = d;
      report.argmax_d_half = t;
    }
    if (c > best_c) {
      best_c = c;
      report.argmax_c_uh = t;
    }
    if (d > 0) {
      report.max_rel_deviation = std::max(report.max_rel_deviation, std::abs(c / d / report.ratio_reference - 1.0));
    }
  }
  report.argmax_agree = report.argmax_d_half == report.argmax_c_uh;
  return report;
}

}  // namespace squeeze
