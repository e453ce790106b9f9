#pragma once

#include <squeeze/core.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace squeeze::test {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Index uniform_index(std::mt19937_64& g, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(g);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Signal<double> gaussian_signal(std::mt19937_64& g, Index n, double sigma = 1.0) {
  std::normal_distribution<double> z(0.0, sigma);
  Vector<double> y(n);
  for (auto& v : y) v = z(g);
  return Signal<double>(std::move(y));
}

/// Random step signal: a few jumps plus noise.
inline Signal<double> step_signal(std::mt19937_64& g, Index n, double sigma) {
  const Index jumps = uniform_index(g, 0, 4);
  std::vector<Index> cuts;
  for (Index k = 0; k < jumps && n > 1; ++k) cuts.push_back(uniform_index(g, 1, n - 1));
  std::sort(cuts.begin(), cuts.end());
  std::normal_distribution<double> z(0.0, sigma);
  Vector<double> y(n);
  double level = uniform(g, -3, 3);
  std::size_t c = 0;
  for (Index t = 1; t <= n; ++t) {
    while (c < cuts.size() && cuts[c] < t) {
      level = uniform(g, -3, 3);
      ++c;
    }
    y[t - 1] = level + z(g);
  }
  return Signal<double>(std::move(y));
}

/// Integer-valued signal, exactly representable as both double and rational.
inline std::vector<long> integer_values(std::mt19937_64& g, Index n, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  std::vector<long> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = d(g);
  return v;
}

template <typename Scalar>
Signal<Scalar> as_signal(const std::vector<long>& v) {
  Vector<Scalar> y(Index(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) y[Index(i)] = Scalar(v[i]);
  return Signal<Scalar>(std::move(y));
}

}  // namespace squeeze::test
