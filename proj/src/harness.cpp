#include <squeeze/harness.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

namespace squeeze::harness {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) { return std::mt19937_64(mix_seed(seed, stream)); }

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "paper-ex1") return GeneratorKind::PaperExample;
  if (name == "custom-piecewise") return GeneratorKind::CustomPiecewise;
  if (name == "pure-noise") return GeneratorKind::PureNoise;
  throw InvalidInput("unknown generator kind '" + name + "' (expected paper-ex1, custom-piecewise, pure-noise)");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::PaperExample:
      return "paper-ex1";
    case GeneratorKind::CustomPiecewise:
      return "custom-piecewise";
    case GeneratorKind::PureNoise:
      return "pure-noise";
  }
  return "?";
}

PiecewiseConstantSpec paper_example_spec() { return {{1.0 / 3.0, 2.0 / 3.0}, {-4.0, 0.0, 5.0}}; }

GeneratedSignal generate(const GeneratorSpec& spec, std::uint64_t stream) {
  if (spec.n < 1) throw InvalidInput("n must be positive");
  if (!(spec.sigma >= 0)) throw InvalidInput("sigma must be non-negative");
  PiecewiseEstimate<double> truth;
  switch (spec.kind) {
    case GeneratorKind::PaperExample:
      truth = paper_example_spec().sample(spec.n);
      break;
    case GeneratorKind::CustomPiecewise:
      truth = spec.custom.sample(spec.n);
      break;
    case GeneratorKind::PureNoise:
      truth = PiecewiseEstimate<double>::constant(spec.n, 0.0);
      break;
  }
  Vector<double> y = evaluate(truth, spec.n);
  if (spec.sigma > 0) {
    auto rng = substream(spec.seed, stream);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Index t = 0; t < spec.n; ++t) y[t] += spec.sigma * noise(rng);
  }
  return {Signal<double>(std::move(y)), std::move(truth)};
}

Method parse_method(const std::string& name) {
  if (name == "uh") return Method::UH;
  if (name == "ts-uni") return Method::TSUniscale;
  if (name == "ts-multi") return Method::TSMultiscale;
  throw InvalidInput("unknown method '" + name + "' (expected uh, ts-uni, ts-multi)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::UH:
      return "uh";
    case Method::TSUniscale:
      return "ts-uni";
    case Method::TSMultiscale:
      return "ts-multi";
  }
  return "?";
}

double default_lambda(const Signal<double>& signal, Method method, double c_alpha) {
  const Index n = signal.size();
  const double sigma = n >= 2 ? estimate_sigma_mad(signal) : 0.0;
  return method == Method::UH ? universal_threshold(sigma, n) : ts_stopping_radius(sigma, n, c_alpha);
}

MethodRun run_method(const Signal<double>& signal, Method method, const MethodParams& params) {
  MethodRun run;
  run.method = method;
  const auto start = std::chrono::steady_clock::now();
  if (method == Method::UH) {
    UHOptions options{params.lambda, params.constraint, params.termination};
    auto result = estimate_uh(signal, options);
    run.lambda = result.lambda;
    run.estimate = std::move(result.estimate);
    run.tree = std::move(result.tree);
  } else {
    run.lambda = params.lambda ? *params.lambda : default_lambda(signal, method, params.c_alpha);
    if (!(run.lambda > 0)) {
      // Degenerate data (zero noise estimate) leaves no positive default radius.
      throw InvalidInput("taut string needs a positive radius; pass --lambda or --gamma");
    }
    if (method == Method::TSUniscale) {
      auto result = ts_uniscale(signal, run.lambda);
      run.estimate = std::move(result.estimate);
      run.knots = std::move(result.knots);
    } else {
      auto result = ts_multiscale(signal, run.lambda);
      run.estimate = result.result.estimate;
      run.knots = result.result.knots;
      run.multiscale = std::move(result);
    }
  }
  run.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

double mean_squared_error(const PiecewiseEstimate<double>& estimate, const PiecewiseEstimate<double>& truth) {
  if (estimate.n() != truth.n()) throw InvalidInput("estimate and truth lengths differ");
  return (evaluate(estimate, estimate.n()) - evaluate(truth, truth.n())).squaredNorm() / double(truth.n());
}

double hausdorff_distance(const std::vector<Index>& a, const std::vector<Index>& b, Index n) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return double(n);
  auto directed = [](const std::vector<Index>& from, const std::vector<Index>& to) {
    Index worst = 0;
    for (Index x : from) {
      Index nearest = std::numeric_limits<Index>::max();
      for (Index y : to) nearest = std::min(nearest, std::abs(x - y));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return double(std::max(directed(a, b), directed(b, a)));
}

CompareRow summarize(Method method, const std::vector<MethodRun>& runs,
                     const std::vector<std::optional<PiecewiseEstimate<double>>>& truths) {
  CompareRow row;
  row.method = method;
  row.replicates = Index(runs.size());
  double mse = 0.0, haus = 0.0;
  bool have_truth = !truths.empty();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    row.breakpoints += double(run.estimate.breakpoints().size());
    row.total_variation += total_variation(run.estimate);
    row.runtime_ms += run.runtime_ms;
    if (r < truths.size() && truths[r]) {
      mse += mean_squared_error(run.estimate, *truths[r]);
      haus += hausdorff_distance(run.estimate.breakpoints(), truths[r]->breakpoints(), run.estimate.n());
    } else {
      have_truth = false;
    }
  }
  const double count = std::max<double>(1.0, double(runs.size()));
  row.breakpoints /= count;
  row.total_variation /= count;
  row.runtime_ms /= count;
  if (have_truth) {
    row.mse = mse / count;
    row.hausdorff = haus / count;
  }
  return row;
}

void ExperimentConfig::validate() const {
  if (n < 2) throw InvalidInput("n: must be at least 2");
  if (!(sigma > 0)) throw InvalidInput("sigma: must be positive");
  if (replicates < 1) throw InvalidInput("replicates: must be positive");
  if (deltas.empty()) throw InvalidInput("delta_list: must not be empty");
  stat.validate();
  stat.window(n);
  for (double d : deltas) {
    if (!(d >= 0 && d <= 1)) throw InvalidInput("delta_list: entries must lie in [0, 1]");
    if (critical == CriticalMode::PerDelta && d != 0.0 && d != 0.5 && d != 1.0) {
      throw InvalidInput("delta_list: per-delta critical values need entries in {0, 0.5, 1}");
    }
  }
  if (jump) {
    if (!(jump->b > 0 && jump->b < 1)) throw InvalidInput("jump.b: must lie in (0, 1)");
    if (!(jump->h >= 0)) throw InvalidInput("jump.h: must be non-negative");
    const Index b = Index(std::floor(jump->b * double(n)));
    if (b < 1 || b >= n) throw InvalidInput("jump.b: breakpoint falls outside the grid");
  }
  if (common_critical && !(*common_critical > 0)) throw InvalidInput("common_critical: must be positive");
}

namespace {

struct ReplicateOutcome {
  std::vector<char> false_alarm;
  std::vector<char> miss;
  std::vector<double> location_error;
};

Vector<double> noise_vector(std::uint64_t seed, std::uint64_t stream, Index n, double sigma) {
  auto rng = substream(seed, stream);
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector<double> x(n);
  for (Index t = 0; t < n; ++t) x[t] = sigma * noise(rng);
  return x;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const std::size_t D = config.deltas.size();
  const Index n = config.n;
  const bool has_jump = config.jump && config.jump->h > 0;
  const Index true_b = has_jump ? Index(std::floor(config.jump->b * double(n))) : 0;

  std::vector<double> critical(D);
  for (std::size_t d = 0; d < D; ++d) {
    critical[d] = config.critical == CriticalMode::Common
                      ? config.common_critical.value_or(critical_value(0.5, config.stat, n))
                      : critical_value(config.deltas[d], config.stat, n);
  }

  // The critical values assume the breakpoint is sought within [a1, a2].
  const auto [first, last] = config.stat.window(n);
  const Index R = config.replicates;
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(R));
  auto work = [&](Index r) {
    ReplicateOutcome& out = outcomes[std::size_t(r)];
    const Signal<double> null_signal(noise_vector(config.seed, std::uint64_t(2 * r), n, config.sigma));
    std::optional<Signal<double>> jump_signal;
    if (has_jump) {
      Vector<double> x = noise_vector(config.seed, std::uint64_t(2 * r + 1), n, config.sigma);
      x.tail(n - true_b).array() += config.jump->h;
      jump_signal.emplace(std::move(x));
    }
    for (std::size_t d = 0; d < D; ++d) {
      const double delta = config.deltas[d];
      // Critical values are stated for unit noise; the statistic scales with sigma.
      const double c = critical[d] * config.sigma;
      out.false_alarm.push_back(locate_single_breakpoint(null_signal, delta, first, last).statistic > c);
      if (jump_signal) {
        const Detection det = locate_single_breakpoint(*jump_signal, delta, first, last);
        out.miss.push_back(!(det.statistic > c));
        out.location_error.push_back(double(std::abs(det.b - true_b)));
      }
    }
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<Index>(workers, R));
  if (workers <= 1) {
    for (Index r = 0; r < R; ++r) work(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (Index r = w; r < R; r += workers) work(r);
      });
    }
  }

  auto mean_se = [R](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= double(R);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    const double var = R > 1 ? ss / double(R - 1) : 0.0;
    return std::pair{m, std::sqrt(var / double(R))};
  };

  std::vector<ExperimentRow> rows;
  for (std::size_t d = 0; d < D; ++d) {
    ExperimentRow row;
    row.delta = config.deltas[d];
    row.critical = critical[d];
    row.replicates = R;
    row.seed = config.seed;
    std::vector<double> fa, miss, loc;
    for (const auto& o : outcomes) {
      fa.push_back(o.false_alarm[d]);
      if (has_jump) {
        miss.push_back(o.miss[d]);
        loc.push_back(o.location_error[d]);
      }
    }
    std::tie(row.type1, row.type1_se) = mean_se(fa);
    if (has_jump) {
      auto [m2, s2] = mean_se(miss);
      auto [ml, sl] = mean_se(loc);
      row.type2 = m2;
      row.type2_se = s2;
      row.location_error = ml;
      row.location_error_se = sl;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace squeeze::harness
