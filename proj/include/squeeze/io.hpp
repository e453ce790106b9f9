#pragma once

// File formats: single-column signal files, estimate / basis-tree / trace JSON,
// Monte Carlo experiment configs and result CSV.

#include <squeeze/harness.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace squeeze::io {

using nlohmann::json;

/// One real per line; blank lines and '#' comments are skipped, as is a
/// non-numeric first line (a CSV header). Only the first column is read.
Signal<double> parse_signal(std::istream& in);
Signal<double> read_signal(const std::string& path);
void write_signal(std::ostream& out, const Signal<double>& signal);

/// {"breakpoints": [...], "levels": [...], "n": n}
json estimate_to_json(const PiecewiseEstimate<double>& estimate);
PiecewiseEstimate<double> estimate_from_json(const json& j);

/// Evaluated samples as CSV: t,value.
void write_samples_csv(std::ostream& out, const PiecewiseEstimate<double>& estimate);

json knots_to_json(const std::vector<KnotRecord<double>>& knots);

/// {"n", "smooth", "nodes": [{s, b, e, coef, iter: [j, k]}, ...]}
json uh_tree_to_json(const UHBasisTree& tree);

/// {"lambda", "iterations": [{j, k, segment: [s, e], radius, knot: {t, g} | null,
///  string_anchors: [[t, v], ...]}, ...]}
json ts_trace_to_json(const MultiscaleResult<double>& result, double lambda);

/// Parses an experiment config, reporting the offending field on error.
harness::ExperimentConfig experiment_config_from_json(const json& j);

void write_experiment_csv(std::ostream& out, const std::vector<harness::ExperimentRow>& rows);
json experiment_to_json(const std::vector<harness::ExperimentRow>& rows);

/// 64-bit FNV-1a of a byte string, rendered as 16 hex digits.
std::string digest(std::string_view bytes);

/// Shortest round-trip decimal for a double.
std::string format_real(double v);

}  // namespace squeeze::io
