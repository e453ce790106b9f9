#include "support.hpp"

#include <squeeze/harness.hpp>
#include <squeeze/io.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace squeeze;
using namespace squeeze::harness;

TEST(Seeds, SubstreamsAreDistinctAndReproducible) {
  EXPECT_EQ(mix_seed(1, 0), mix_seed(1, 0));
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  auto a = substream(7, 3);
  auto b = substream(7, 3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Generate, PaperExampleTruth) {
  GeneratorSpec spec;
  spec.sigma = 0.0;
  const auto gen = generate(spec);
  EXPECT_EQ(gen.truth.breakpoints(), (std::vector<Index>{100, 200}));
  EXPECT_EQ(gen.signal.at(1), -4.0);
  EXPECT_EQ(gen.signal.at(150), 0.0);
  EXPECT_EQ(gen.signal.at(300), 5.0);
}

TEST(Generate, SeededNoiseReproducible) {
  GeneratorSpec spec;
  spec.seed = 42;
  EXPECT_EQ(generate(spec).signal.values(), generate(spec).signal.values());
  EXPECT_NE(generate(spec, 0).signal.values(), generate(spec, 1).signal.values());
  spec.kind = GeneratorKind::PureNoise;
  EXPECT_TRUE(generate(spec).truth.breakpoints().empty());
}

TEST(Generate, CustomAndErrors) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::CustomPiecewise;
  spec.custom = {{0.25}, {1.0, 2.0}};
  spec.n = 8;
  spec.sigma = 0;
  EXPECT_EQ(generate(spec).truth.breakpoints(), std::vector<Index>{2});
  spec.n = 0;
  EXPECT_THROW(generate(spec), InvalidInput);
  EXPECT_THROW(parse_generator_kind("sine"), InvalidInput);
  EXPECT_EQ(parse_generator_kind(to_string(GeneratorKind::PureNoise)), GeneratorKind::PureNoise);
}

TEST(Methods, NamesRoundTrip) {
  for (auto m : {Method::UH, Method::TSUniscale, Method::TSMultiscale}) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("cart"), InvalidInput);
}

TEST(Methods, DefaultLambdas) {
  auto g = test::rng(163);
  const auto y = test::gaussian_signal(g, 300);
  const double s = estimate_sigma_mad(y);
  EXPECT_DOUBLE_EQ(default_lambda(y, Method::UH), universal_threshold(s, 300));
  EXPECT_DOUBLE_EQ(default_lambda(y, Method::TSMultiscale, 0.5), ts_stopping_radius(s, 300, 0.5));
}

TEST(Methods, TautStringVariantsAgree) {
  auto g = test::rng(167);
  for (int rep = 0; rep < 10; ++rep) {
    GeneratorSpec spec;
    spec.seed = std::uint64_t(rep);
    const auto y = generate(spec).signal;
    const auto a = run_method(y, Method::TSUniscale);
    const auto b = run_method(y, Method::TSMultiscale);
    EXPECT_EQ(io::estimate_to_json(a.estimate).dump(), io::estimate_to_json(b.estimate).dump());
  }
}

TEST(Methods, DegenerateRadius) {
  const Signal<double> flat(Vector<double>::Constant(10, 1.0));
  EXPECT_THROW(run_method(flat, Method::TSUniscale), InvalidInput);
  EXPECT_NO_THROW(run_method(flat, Method::UH));
}

TEST(Metrics, Hausdorff) {
  EXPECT_EQ(hausdorff_distance({}, {}, 10), 0.0);
  EXPECT_EQ(hausdorff_distance({3}, {}, 10), 10.0);
  EXPECT_EQ(hausdorff_distance({2, 8}, {3}, 10), 5.0);
  EXPECT_EQ(hausdorff_distance({3}, {2, 8}, 10), 5.0);
}

TEST(Metrics, MeanSquaredError) {
  const auto a = PiecewiseEstimate<double>::from_segments(4, {2}, {0.0, 2.0});
  const auto b = PiecewiseEstimate<double>::constant(4, 1.0);
  EXPECT_DOUBLE_EQ(mean_squared_error(a, b), 1.0);
  EXPECT_THROW(mean_squared_error(a, PiecewiseEstimate<double>::constant(5, 1.0)), InvalidInput);
}

TEST(Experiment, ValidationNamesField) {
  ExperimentConfig c;
  c.replicates = 0;
  try {
    c.validate();
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(std::string(e.what()).rfind("replicates", 0), 0u);
  }
  c = {};
  c.deltas = {0.3};
  EXPECT_THROW(c.validate(), InvalidInput);
  c.critical = CriticalMode::Common;
  EXPECT_NO_THROW(c.validate());
  c.jump = JumpSpec{1.5, 1.0};
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Experiment, IndependentOfThreadCount) {
  ExperimentConfig c;
  c.n = 200;
  c.replicates = 40;
  c.seed = 9;
  c.jump = JumpSpec{0.4, 0.5};
  const auto one = run_experiment(c, 1);
  const auto four = run_experiment(c, 4);
  ASSERT_EQ(one.size(), 3u);
  for (std::size_t d = 0; d < one.size(); ++d) {
    EXPECT_EQ(one[d].type1, four[d].type1);
    EXPECT_EQ(*one[d].type2, *four[d].type2);
    EXPECT_EQ(*one[d].location_error, *four[d].location_error);
  }
}

TEST(Experiment, NoJumpLeavesColumnsEmpty) {
  ExperimentConfig c;
  c.n = 50;
  c.replicates = 5;
  const auto rows = run_experiment(c, 1);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.type2);
    EXPECT_FALSE(r.location_error);
  }
  std::ostringstream csv;
  io::write_experiment_csv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, 6), "delta,");
}

TEST(Io, SignalParsing) {
  std::istringstream in("value\n# comment\n1.5\n\n-2,ignored\n+3e0\n");
  const auto y = io::parse_signal(in);
  ASSERT_EQ(y.size(), 3);
  EXPECT_EQ(y.at(1), 1.5);
  EXPECT_EQ(y.at(2), -2.0);
  EXPECT_EQ(y.at(3), 3.0);
  std::istringstream bad("1\nfoo\n");
  EXPECT_THROW(io::parse_signal(bad), InvalidInput);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(io::parse_signal(empty), InvalidInput);
  std::istringstream nan("1\nnan\n");
  EXPECT_THROW(io::parse_signal(nan), InvalidInput);
}

TEST(Io, SignalRoundTrip) {
  auto g = test::rng(173);
  const auto y = test::gaussian_signal(g, 50);
  std::stringstream s;
  io::write_signal(s, y);
  EXPECT_EQ(io::parse_signal(s).values(), y.values());
}

TEST(Io, EstimateJson) {
  const auto f = PiecewiseEstimate<double>::from_segments(300, {100, 200}, {-4.0, 0.0, 5.0});
  EXPECT_EQ(io::estimate_to_json(f).dump(), R"({"breakpoints":[100,200],"levels":[-4.0,0.0,5.0],"n":300})");
  EXPECT_EQ(io::estimate_from_json(io::estimate_to_json(f)), f);
  EXPECT_THROW(io::estimate_from_json(io::json{{"n", 3}}), InvalidInput);
}

TEST(Io, ExperimentConfigErrorsNameField) {
  auto message = [](const io::json& j) {
    try {
      io::experiment_config_from_json(j);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_EQ(message({{"replicates", 1}, {"seed", 1}}).rfind("n:", 0), 0u);
  EXPECT_EQ(message({{"n", "ten"}, {"replicates", 1}, {"seed", 1}}).rfind("n:", 0), 0u);
  EXPECT_EQ(message({{"n", 10}, {"replicates", 1}, {"seed", 1}, {"jump", {{"b", 0.5}}}}).rfind("jump.h", 0), 0u);
  EXPECT_EQ(message({{"n", 10}, {"replicates", 1}, {"seed", 1}, {"critical", "x"}}).rfind("critical", 0), 0u);
  EXPECT_EQ(message({{"n", 10}, {"replicates", 1}, {"seed", 1}, {"delta_list", {0.2}}}).rfind("delta_list", 0), 0u);
  const auto ok = io::experiment_config_from_json(
      {{"n", 100}, {"replicates", 3}, {"seed", 5}, {"jump", {{"b", 0.3}, {"h", 1.0}}}, {"critical", "common"}});
  EXPECT_EQ(ok.critical, CriticalMode::Common);
  EXPECT_EQ(ok.jump->b, 0.3);
}

TEST(Io, Digest) {
  EXPECT_EQ(io::digest(""), "cbf29ce484222325");
  EXPECT_NE(io::digest("a"), io::digest("b"));
}
