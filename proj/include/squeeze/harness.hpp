#pragma once

// Simulation harness: seeded signal generation, a uniform front end over the
// estimators, comparison metrics and the single-breakpoint Monte Carlo study.

#include <squeeze/breakpoint.hpp>
#include <squeeze/core.hpp>
#include <squeeze/taut_string.hpp>
#include <squeeze/uh.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace squeeze::harness {

/// SplitMix64 finaliser; derives independent seeds for numbered substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Replicate `stream` of a run seeded with `seed`: mt19937_64 on a SplitMix64-derived seed.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream);

enum class GeneratorKind { PaperExample, CustomPiecewise, PureNoise };

GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

/// Three-level test function: -4 on (0, 1/3], 0 on (1/3, 2/3], 5 on (2/3, 1].
PiecewiseConstantSpec paper_example_spec();

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::PaperExample;
  Index n = 300;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  PiecewiseConstantSpec custom;  // used when kind == CustomPiecewise
};

struct GeneratedSignal {
  Signal<double> signal;
  PiecewiseEstimate<double> truth;
};

/// y_t = f(t/n) + sigma eps_t with iid standard normal eps, drawn from `stream`.
GeneratedSignal generate(const GeneratorSpec& spec, std::uint64_t stream = 0);

enum class Method { UH, TSUniscale, TSMultiscale };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct MethodParams {
  std::optional<double> lambda;  // default: universal threshold (UH) or stopping radius (TS)
  BalanceConstraint constraint;
  Termination termination = Termination::FullDecomposition;
  double c_alpha = 1.0;  // TS stopping-radius factor
};

struct MethodRun {
  Method method = Method::UH;
  double lambda = 0.0;
  PiecewiseEstimate<double> estimate;
  std::vector<KnotRecord<double>> knots;        // TS methods
  std::optional<UHBasisTree> tree;              // UH
  std::optional<MultiscaleResult<double>> multiscale;
  double runtime_ms = 0.0;
};

/// Default radius when none is given: universal threshold for UH, stopping radius for TS.
double default_lambda(const Signal<double>& signal, Method method, double c_alpha = 1.0);

MethodRun run_method(const Signal<double>& signal, Method method, const MethodParams& params = {});

double mean_squared_error(const PiecewiseEstimate<double>& estimate, const PiecewiseEstimate<double>& truth);

/// Hausdorff distance between breakpoint sets in index units. One empty set
/// against a non-empty one counts as n; two empty sets give 0.
double hausdorff_distance(const std::vector<Index>& a, const std::vector<Index>& b, Index n);

struct CompareRow {
  Method method = Method::UH;
  Index replicates = 0;
  std::optional<double> mse;
  double breakpoints = 0.0;  // mean count
  std::optional<double> hausdorff;
  double total_variation = 0.0;
  double runtime_ms = 0.0;
};

CompareRow summarize(Method method, const std::vector<MethodRun>& runs,
                     const std::vector<std::optional<PiecewiseEstimate<double>>>& truths);

enum class CriticalMode { PerDelta, Common };

struct ExperimentConfig {
  Index n = 1000;
  double sigma = 1.0;
  std::optional<JumpSpec> jump;  // absent or h == 0: type-2 and location columns stay empty
  std::vector<double> deltas{0.0, 0.5, 1.0};
  DeltaStatConfig stat;
  Index replicates = 1000;
  std::uint64_t seed = 1;
  CriticalMode critical = CriticalMode::PerDelta;
  std::optional<double> common_critical;  // default: c_{1/2}

  void validate() const;
};

struct ExperimentRow {
  double delta = 0.0;
  double critical = 0.0;  // on the sigma = 1 scale
  Index replicates = 0;
  std::uint64_t seed = 0;
  double type1 = 0.0;
  double type1_se = 0.0;
  std::optional<double> type2;
  std::optional<double> type2_se;
  std::optional<double> location_error;  // mean |b_hat - b| over all jump replicates
  std::optional<double> location_error_se;
};

/// Null replicates use substreams 2r, jump replicates 2r + 1; every delta sees
/// the same draws. Replicates run on `threads` workers (0: hardware concurrency)
/// and the result does not depend on the thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, unsigned threads = 0);

}  // namespace squeeze::harness
