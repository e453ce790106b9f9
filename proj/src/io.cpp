#include <squeeze/io.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace squeeze::io {

namespace {

bool parse_real(std::string_view text, double& value) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Signal<double> parse_signal(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto comma = line.find(',');
    std::string_view field(line);
    if (comma != std::string::npos) field = field.substr(0, comma);
    if (field.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    double v = 0;
    if (!parse_real(field, v)) {
      if (first_content) {
        first_content = false;
        continue;
      }
      throw InvalidInput("line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
    }
    first_content = false;
    values.push_back(v);
  }
  if (values.empty()) throw InvalidInput("signal file contains no observations");
  return Signal<double>(values);
}

Signal<double> read_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_signal(in);
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_signal(std::ostream& out, const Signal<double>& signal) {
  for (Index t = 1; t <= signal.size(); ++t) out << format_real(signal.at(t)) << '\n';
}

json estimate_to_json(const PiecewiseEstimate<double>& estimate) {
  json j;
  j["breakpoints"] = estimate.breakpoints();
  std::vector<double> levels(estimate.levels().data(), estimate.levels().data() + estimate.levels().size());
  j["levels"] = levels;
  j["n"] = estimate.n();
  return j;
}

PiecewiseEstimate<double> estimate_from_json(const json& j) {
  try {
    return PiecewiseEstimate<double>::from_segments(j.at("n").get<Index>(), j.at("breakpoints").get<std::vector<Index>>(),
                                                    j.at("levels").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed estimate JSON: ") + e.what());
  }
}

void write_samples_csv(std::ostream& out, const PiecewiseEstimate<double>& estimate) {
  const Vector<double> f = evaluate(estimate, estimate.n());
  out << "t,value\n";
  for (Index t = 0; t < f.size(); ++t) out << (t + 1) << ',' << format_real(f[t]) << '\n';
}

json knots_to_json(const std::vector<KnotRecord<double>>& knots) {
  json arr = json::array();
  for (const auto& k : knots) {
    json item{{"t", k.t}, {"g", k.side}, {"radius", k.detection_radius}};
    if (k.iteration) item["iter"] = {k.iteration->j, k.iteration->k};
    if (k.plateau_end) item["plateau_end"] = *k.plateau_end;
    arr.push_back(std::move(item));
  }
  return arr;
}

json uh_tree_to_json(const UHBasisTree& tree) {
  json nodes = json::array();
  for (const auto& node : tree.nodes) {
    json item{{"s", node.s},       {"b", node.b}, {"e", node.e}, {"coef", node.coefficient},
              {"iter", {node.level, node.position}}};
    if (node.relaxed) item["relaxed"] = true;
    nodes.push_back(std::move(item));
  }
  return {{"n", tree.n}, {"smooth", tree.smooth}, {"nodes", std::move(nodes)}};
}

json ts_trace_to_json(const MultiscaleResult<double>& result, double lambda) {
  json iterations = json::array();
  for (const auto& rec : result.trace) {
    json anchors = json::array();
    for (const auto& a : rec.string_anchors) anchors.push_back({a.t, a.value});
    json item{{"j", rec.iteration.j},
              {"k", rec.iteration.k},
              {"segment", {rec.s, rec.e}},
              {"radius", rec.radius},
              {"knot", nullptr},
              {"string_anchors", std::move(anchors)}};
    if (rec.knot) item["knot"] = {{"t", rec.knot->t}, {"g", rec.knot->side}};
    iterations.push_back(std::move(item));
  }
  return {{"lambda", lambda}, {"iterations", std::move(iterations)}};
}

namespace {

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw InvalidInput(std::string(name) + ": missing");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string(name) + ": wrong type");
  }
}

template <typename T>
T field_or(const json& j, const char* name, T fallback) {
  return j.contains(name) ? field<T>(j, name) : fallback;
}

}  // namespace

harness::ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  harness::ExperimentConfig c;
  c.n = field<Index>(j, "n");
  c.sigma = field_or<double>(j, "sigma", 1.0);
  if (j.contains("jump") && !j.at("jump").is_null()) {
    const json& jj = j.at("jump");
    if (!jj.is_object()) throw InvalidInput("jump: expected an object {b, h}");
    JumpSpec jump;
    try {
      jump.b = field<double>(jj, "b");
      jump.h = field<double>(jj, "h");
    } catch (const InvalidInput& e) {
      throw InvalidInput(std::string("jump.") + e.what());
    }
    c.jump = jump;
  }
  c.deltas = field_or<std::vector<double>>(j, "delta_list", c.deltas);
  c.stat.alpha = field_or<double>(j, "alpha", c.stat.alpha);
  c.stat.a1 = field_or<double>(j, "a1", c.stat.a1);
  c.stat.a2 = field_or<double>(j, "a2", c.stat.a2);
  c.replicates = field<Index>(j, "replicates");
  c.seed = field<std::uint64_t>(j, "seed");
  const auto mode = field_or<std::string>(j, "critical", "per-delta");
  if (mode == "per-delta") {
    c.critical = harness::CriticalMode::PerDelta;
  } else if (mode == "common") {
    c.critical = harness::CriticalMode::Common;
  } else {
    throw InvalidInput("critical: expected \"per-delta\" or \"common\"");
  }
  if (j.contains("common_critical")) c.common_critical = field<double>(j, "common_critical");
  try {
    c.stat.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("alpha/a1/a2: ") + e.what());
  }
  c.validate();
  return c;
}

void write_experiment_csv(std::ostream& out, const std::vector<harness::ExperimentRow>& rows) {
  out << "delta,empirical_type1,empirical_type2,mean_abs_location_error,critical,replicates,seed,"
         "type1_se,type2_se,location_error_se\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : rows) {
    out << format_real(r.delta) << ',' << format_real(r.type1) << ',' << opt(r.type2) << ','
        << opt(r.location_error) << ',' << format_real(r.critical) << ',' << r.replicates << ',' << r.seed << ','
        << format_real(r.type1_se) << ',' << opt(r.type2_se) << ',' << opt(r.location_error_se) << '\n';
  }
}

json experiment_to_json(const std::vector<harness::ExperimentRow>& rows) {
  json arr = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& r : rows) {
    arr.push_back({{"delta", r.delta},
                   {"empirical_type1", r.type1},
                   {"empirical_type2", opt(r.type2)},
                   {"mean_abs_location_error", opt(r.location_error)},
                   {"critical", r.critical},
                   {"replicates", r.replicates},
                   {"seed", r.seed},
                   {"type1_se", r.type1_se},
                   {"type2_se", opt(r.type2_se)},
                   {"location_error_se", opt(r.location_error_se)}});
  }
  return arr;
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace squeeze::io
