#include <squeeze/cli.hpp>
#include <squeeze/io.hpp>
#include <squeeze/oracle.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace squeeze::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string format;  // empty: the subcommand's natural format
  std::string output;
};

struct SourceOptions {
  std::string input;
  std::string kind;
  Index n = 300;
  double sigma = 1.0;
  std::vector<double> knots;
  std::vector<double> levels;
};

struct RadiusOptions {
  std::optional<double> lambda;
  std::optional<double> gamma;
  double p = 1.0;
  std::string termination = "full";
  double c_alpha = 1.0;
};

struct LoadedSource {
  Signal<double> signal;
  std::optional<PiecewiseEstimate<double>> truth;
  std::string digest;
  std::string description;
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
  cmd->add_option("-i,--input", src.input, "Signal file, one value per line");
  cmd->add_option("--kind", src.kind, "Generate instead: paper-ex1 | custom-piecewise | pure-noise");
  cmd->add_option("--n", src.n, "Generated length")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", src.sigma, "Generated noise level")->check(CLI::NonNegativeNumber);
  cmd->add_option("--knots", src.knots, "custom-piecewise knots in (0, 1)")->delimiter(',');
  cmd->add_option("--levels", src.levels, "custom-piecewise levels")->delimiter(',');
}

void add_radius_options(CLI::App* cmd, RadiusOptions& r) {
  auto* lam = cmd->add_option("--lambda", r.lambda, "Threshold / tube radius");
  auto* gam = cmd->add_option("--gamma", r.gamma, "TV penalty; lambda = gamma / 2");
  lam->excludes(gam);
  gam->excludes(lam);
  cmd->add_option("--p", r.p, "UH balance parameter in [1/2, 1]");
  cmd->add_option("--termination", r.termination, "UH termination: full | radius-stop")
      ->check(CLI::IsMember({"full", "radius-stop"}));
  cmd->add_option("--c-alpha", r.c_alpha, "Factor of the default TS stopping radius");
}

harness::GeneratorSpec generator_spec(const SourceOptions& src, std::uint64_t seed) {
  harness::GeneratorSpec spec;
  spec.kind = harness::parse_generator_kind(src.kind);
  spec.n = src.n;
  spec.sigma = src.sigma;
  spec.seed = seed;
  if (spec.kind == harness::GeneratorKind::CustomPiecewise) {
    spec.custom = {src.knots, src.levels};
    spec.custom.validate();
  } else if (!src.knots.empty() || !src.levels.empty()) {
    throw UsageError("--knots/--levels apply to --kind custom-piecewise only");
  }
  return spec;
}

LoadedSource load_source(const SourceOptions& src, const GlobalOptions& global, std::uint64_t stream = 0) {
  if (!src.input.empty() && !src.kind.empty()) throw UsageError("give either --input or --kind, not both");
  if (src.input.empty() && src.kind.empty()) throw UsageError("an input is required: --input FILE or --kind KIND");
  if (!src.input.empty()) {
    std::ifstream in(src.input, std::ios::binary);
    if (!in) throw InputError("cannot read input '" + src.input + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    std::istringstream parse(bytes);
    try {
      return {io::parse_signal(parse), std::nullopt, io::digest(bytes), src.input};
    } catch (const InvalidInput& e) {
      throw InputError(src.input + ": " + e.what());
    }
  }
  const auto spec = generator_spec(src, global.seed);
  auto generated = harness::generate(spec, stream);
  std::ostringstream text;
  io::write_signal(text, generated.signal);
  return {std::move(generated.signal), std::move(generated.truth), io::digest(text.str()),
          src.kind + " n=" + std::to_string(src.n) + " sigma=" + io::format_real(src.sigma)};
}

harness::MethodParams method_params(const RadiusOptions& r) {
  harness::MethodParams params;
  if (r.gamma) params.lambda = ts_gamma_to_lambda(*r.gamma);
  if (r.lambda) {
    if (!(*r.lambda > 0)) throw UsageError("--lambda must be positive");
    params.lambda = r.lambda;
  }
  params.constraint = BalanceConstraint(r.p);
  params.termination = r.termination == "radius-stop" ? Termination::RadiusStop : Termination::FullDecomposition;
  params.c_alpha = r.c_alpha;
  return params;
}

std::string resolve_format(const GlobalOptions& g, const std::string& natural) {
  const std::string f = g.format.empty() ? natural : g.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

// Writes to --output when given, else to `out`.
void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
  if (g.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + g.output + "'");
  file << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
}

int cmd_generate(const GlobalOptions& g, const SourceOptions& src, const std::string& truth_path, std::ostream& out) {
  if (!src.input.empty()) throw UsageError("generate takes --kind, not --input");
  if (src.kind.empty()) throw UsageError("generate needs --kind");
  auto generated = harness::generate(generator_spec(src, g.seed));
  std::ostringstream text;
  if (resolve_format(g, "csv") == "csv") {
    io::write_signal(text, generated.signal);
  } else {
    std::vector<double> values(generated.signal.values().data(),
                               generated.signal.values().data() + generated.signal.size());
    io::json j{{"values", values}, {"truth", io::estimate_to_json(generated.truth)}, {"seed", g.seed}};
    text << j.dump(2) << '\n';
  }
  emit(g, out, text.str());
  if (!truth_path.empty()) write_file(truth_path, io::estimate_to_json(generated.truth).dump() + "\n");
  return kExitOk;
}

int cmd_estimate(const GlobalOptions& g, const SourceOptions& src, const RadiusOptions& r, const std::string& method_name,
                 const std::string& samples_path, const std::string& report_path, std::ostream& out) {
  const auto method = harness::parse_method(method_name);
  const auto params = method_params(r);
  const auto format = resolve_format(g, "json");
  const auto source = load_source(src, g);
  const auto run = harness::run_method(source.signal, method, params);

  std::ostringstream text;
  if (format == "json") {
    text << io::estimate_to_json(run.estimate).dump() << '\n';
  } else {
    io::write_samples_csv(text, run.estimate);
  }
  emit(g, out, text.str());
  if (!samples_path.empty()) {
    std::ostringstream csv;
    io::write_samples_csv(csv, run.estimate);
    write_file(samples_path, csv.str());
  }
  if (!report_path.empty()) {
    io::json report{{"method", harness::to_string(method)},
                    {"lambda", run.lambda},
                    {"estimate", io::estimate_to_json(run.estimate)},
                    {"seed", g.seed},
                    {"input", source.description},
                    {"input_digest", source.digest},
                    {"runtime_ms", run.runtime_ms}};
    if (run.tree) report["coefficients"] = io::uh_tree_to_json(*run.tree);
    if (method != harness::Method::UH) report["knots"] = io::knots_to_json(run.knots);
    write_file(report_path, report.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_compare(const GlobalOptions& g, const SourceOptions& src, const RadiusOptions& r,
                const std::vector<std::string>& method_names, const std::string& truth_path, Index replicates,
                std::ostream& out, std::ostream& err) {
  if (method_names.size() < 2) throw UsageError("compare needs at least two --methods");
  std::vector<harness::Method> methods;
  for (const auto& m : method_names) methods.push_back(harness::parse_method(m));
  const auto params = method_params(r);
  const auto format = resolve_format(g, "csv");
  if (replicates < 1) throw UsageError("--replicates must be positive");
  if (!src.input.empty() && replicates > 1) throw UsageError("--replicates needs a generator (--kind)");

  std::optional<PiecewiseEstimate<double>> file_truth;
  if (!truth_path.empty()) {
    std::ifstream in(truth_path);
    if (!in) throw InputError("cannot read truth '" + truth_path + "'");
    try {
      file_truth = io::estimate_from_json(io::json::parse(in));
    } catch (const io::json::exception& e) {
      throw InputError(truth_path + ": " + e.what());
    }
  }

  std::vector<std::vector<harness::MethodRun>> runs(methods.size());
  std::vector<std::optional<PiecewiseEstimate<double>>> truths;
  for (Index rep = 0; rep < replicates; ++rep) {
    auto source = load_source(src, g, std::uint64_t(rep));
    auto truth = source.truth ? source.truth : file_truth;
    if (truth && truth->n() != source.signal.size()) throw InputError("truth length does not match the input");
    truths.push_back(truth);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      runs[m].push_back(harness::run_method(source.signal, methods[m], params));
    }
  }
  const bool have_truth = std::all_of(truths.begin(), truths.end(), [](const auto& t) { return t.has_value(); });
  if (!have_truth) err << "warning: no truth available; mse and hausdorff columns left empty\n";

  std::vector<harness::CompareRow> rows;
  for (std::size_t m = 0; m < methods.size(); ++m) rows.push_back(harness::summarize(methods[m], runs[m], truths));

  std::ostringstream text;
  auto opt = [](const std::optional<double>& v) { return v ? io::format_real(*v) : std::string(); };
  if (format == "csv") {
    text << "method,replicates,mse,breakpoints,hausdorff,tv,runtime_ms\n";
    for (const auto& row : rows) {
      text << harness::to_string(row.method) << ',' << row.replicates << ',' << opt(row.mse) << ','
           << io::format_real(row.breakpoints) << ',' << opt(row.hausdorff) << ','
           << io::format_real(row.total_variation) << ',' << io::format_real(row.runtime_ms) << '\n';
    }
  } else {
    io::json arr = io::json::array();
    for (const auto& row : rows) {
      arr.push_back({{"method", harness::to_string(row.method)},
                     {"replicates", row.replicates},
                     {"mse", row.mse ? io::json(*row.mse) : io::json(nullptr)},
                     {"breakpoints", row.breakpoints},
                     {"hausdorff", row.hausdorff ? io::json(*row.hausdorff) : io::json(nullptr)},
                     {"tv", row.total_variation},
                     {"runtime_ms", row.runtime_ms}});
    }
    text << arr.dump(2) << '\n';
  }
  emit(g, out, text.str());
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& g, const std::string& config_path, unsigned threads, std::ostream& out) {
  std::ifstream in(config_path);
  if (!in) throw InputError("cannot read config '" + config_path + "'");
  io::json j;
  try {
    j = io::json::parse(in);
  } catch (const io::json::exception& e) {
    throw InputError(config_path + ": " + e.what());
  }
  const auto config = io::experiment_config_from_json(j);
  const auto format = resolve_format(g, "csv");
  const auto rows = harness::run_experiment(config, threads);
  std::ostringstream text;
  if (format == "csv") {
    io::write_experiment_csv(text, rows);
  } else {
    text << io::experiment_to_json(rows).dump(2) << '\n';
  }
  emit(g, out, text.str());
  return kExitOk;
}

int cmd_trace(const GlobalOptions& g, const SourceOptions& src, const RadiusOptions& r, const std::string& method_name,
              std::ostream& out) {
  const auto method = harness::parse_method(method_name);
  if (method == harness::Method::TSUniscale) {
    throw Unsupported("trace is unsupported for ts-uni: the uniscale sweep has no iteration structure");
  }
  const auto params = method_params(r);
  const auto format = resolve_format(g, "json");
  const auto source = load_source(src, g);
  std::ostringstream text;
  if (method == harness::Method::UH) {
    const auto tree = select_basis_topdown(source.signal, params.constraint);
    const double lambda = params.lambda ? *params.lambda : harness::default_lambda(source.signal, method);
    if (format == "json") {
      io::json j = io::uh_tree_to_json(tree);
      j["method"] = "uh";
      j["lambda"] = lambda;
      text << j.dump(2) << '\n';
    } else {
      text << "j,k,s,b,e,coef\n";
      for (const auto& node : tree.nodes) {
        text << node.level << ',' << node.position << ',' << node.s << ',' << node.b << ',' << node.e << ','
             << io::format_real(node.coefficient) << '\n';
      }
    }
  } else {
    const auto run = harness::run_method(source.signal, method, params);
    const auto& ms = *run.multiscale;
    if (format == "json") {
      io::json j = io::ts_trace_to_json(ms, run.lambda);
      j["method"] = "ts-multi";
      j["n"] = source.signal.size();
      text << j.dump(2) << '\n';
    } else {
      text << "j,k,s,e,radius,t,g\n";
      for (const auto& rec : ms.trace) {
        text << rec.iteration.j << ',' << rec.iteration.k << ',' << rec.s << ',' << rec.e << ','
             << io::format_real(rec.radius) << ',' << (rec.knot ? std::to_string(rec.knot->t) : "") << ','
             << (rec.knot ? std::to_string(rec.knot->side) : "") << '\n';
      }
    }
  }
  emit(g, out, text.str());
  return kExitOk;
}

int cmd_oracle(const GlobalOptions& g, const SourceOptions& src, double gamma, std::ostream& out) {
  const auto source = load_source(src, g);
  const Vector<double> f = oracle::tv_ls_oracle(source.signal, gamma);
  std::vector<double> values(f.data(), f.data() + f.size());
  io::json j{{"f", values}, {"objective", oracle::tv_objective(f, source.signal.values(), gamma)}, {"gamma", gamma}};
  emit(g, out, j.dump() + "\n");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piecewise-constant regression by Unbalanced Haar thresholding and taut strings", "squeeze"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--format", global.format, "Output format: json | csv");
  app.add_option("-o,--output", global.output, "Output path (default: stdout)");

  SourceOptions src;
  RadiusOptions radius;
  std::string method = "uh";
  std::string truth_path, samples_path, report_path, config_path;
  std::vector<std::string> methods;
  Index replicates = 1;
  unsigned threads = 0;
  double oracle_gamma = 1.0;

  auto* generate = app.add_subcommand("generate", "Generate a test signal");
  add_source_options(generate, src);
  generate->add_option("--truth", truth_path, "Also write the true estimate as JSON");

  auto* estimate = app.add_subcommand("estimate", "Estimate a piecewise-constant mean");
  add_source_options(estimate, src);
  add_radius_options(estimate, radius);
  estimate->add_option("-m,--method", method, "uh | ts-uni | ts-multi")->capture_default_str();
  estimate->add_option("--samples", samples_path, "Also write evaluated samples as CSV");
  estimate->add_option("--report", report_path, "Also write a run report as JSON");

  auto* compare = app.add_subcommand("compare", "Compare estimators on one input or simulated replicates");
  add_source_options(compare, src);
  add_radius_options(compare, radius);
  compare->add_option("--methods", methods, "Two or more of uh, ts-uni, ts-multi")->delimiter(',')->required();
  compare->add_option("--truth", truth_path, "True estimate JSON for file inputs");
  compare->add_option("--replicates", replicates, "Simulated replicates (generator input only)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the d_delta breakpoint statistics");
  simulate->add_option("-c,--config", config_path, "Experiment config JSON")->required();
  simulate->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* trace = app.add_subcommand("trace", "Iteration-by-iteration record of the multiscale algorithms");
  add_source_options(trace, src);
  add_radius_options(trace, radius);
  trace->add_option("-m,--method", method, "uh | ts-multi")->capture_default_str();

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force TV solver for debugging");
  oracle_cmd->group("");
  add_source_options(oracle_cmd, src);
  oracle_cmd->add_option("--gamma", oracle_gamma, "TV penalty")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(global, src, truth_path, out);
    if (estimate->parsed()) return cmd_estimate(global, src, radius, method, samples_path, report_path, out);
    if (compare->parsed()) return cmd_compare(global, src, radius, methods, truth_path, replicates, out, err);
    if (simulate->parsed()) return cmd_simulate(global, config_path, threads, out);
    if (trace->parsed()) return cmd_trace(global, src, radius, method, out);
    if (oracle_cmd->parsed()) return cmd_oracle(global, src, oracle_gamma, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace squeeze::cli
