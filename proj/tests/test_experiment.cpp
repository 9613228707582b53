#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rrslvq/experiment.hpp"

using namespace rrslvq;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(row);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

const char* kSmall = R"(
max_t = 1000
seeds = 1
[stream mixed]
generator = mixed
[learner rrslvq]
)";

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse("[stream s]\n[learner rrslvq]\n");
  EXPECT_EQ(cfg.max_t, 10000u);
  EXPECT_EQ(cfg.snapshot_every, 100u);
  EXPECT_EQ(cfg.seeds, std::vector<std::uint64_t>{1});
  EXPECT_EQ(cfg.tolerance, 10u);
  EXPECT_EQ(cfg.batch, 10u);
  ASSERT_EQ(cfg.streams.size(), 1u);
  EXPECT_EQ(cfg.streams[0].generator, "mixed");
  EXPECT_EQ(cfg.learners[0].type, "rrslvq");
  EXPECT_EQ(cfg.learners[0].kswin.n, 300u);
  EXPECT_EQ(cfg.learners[0].rslvq.prototypes_per_class, RslvqConfig{}.prototypes_per_class);
}

TEST(Config, FullManifest) {
  const auto cfg = parse(R"(
# comment
max_t = 500   # trailing
seeds = 3, 4,5
jobs = 2
[stream sea_g]
generator = sea
drift = gradual
position = 100
width = 50
noise = 0.1
blocks = 2, 3
[learner fast]
type = rslvq
sigma = 2
[learner nb]
type = naive_bayes
[detector]
alpha = 0.01
)");
  EXPECT_EQ(cfg.max_t, 500u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_EQ(cfg.jobs, 2u);
  const auto& s = cfg.stream("sea_g");
  EXPECT_EQ(s.schedule.kind, DriftKind::gradual);
  EXPECT_EQ(s.schedule.position, 100u);
  EXPECT_EQ(s.schedule.width, 50u);
  EXPECT_EQ(*s.noise, 0.1);
  EXPECT_EQ(s.sea_blocks, (std::vector<int>{2, 3}));
  EXPECT_EQ(cfg.learners[0].rslvq.sigma, 2.0);
  EXPECT_EQ(cfg.learners[1].type, "naive_bayes");
  ASSERT_EQ(cfg.detectors.size(), 1u);
  EXPECT_EQ(cfg.detectors[0].name, "kswin");
  EXPECT_EQ(cfg.detectors[0].kswin.alpha, 0.01);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(config_error("max_t = 10\nbogus = 1\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(config_error("\n\nmax_t = ten\n").find("test.cfg:3"), std::string::npos);
  EXPECT_NE(config_error("[stream s]\nnoise = 2\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(config_error("[stream s\n").find("test.cfg:1"), std::string::npos);
  EXPECT_NE(config_error("[widget w]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(config_error("[stream s]\n[stream s]\n").find("duplicate"), std::string::npos);
  EXPECT_NE(config_error("max_t = 1\nmax_t = 2\n").find("duplicate key"), std::string::npos);
  EXPECT_NE(config_error("just words\n").find("key = value"), std::string::npos);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_FALSE(config_error("[stream s]\ngenerator = wave\n").empty());
  EXPECT_FALSE(config_error("[stream s]\ndrift = sideways\n").empty());
  EXPECT_FALSE(config_error("[stream s]\ngenerator = rbf\ndrift = abrupt\n").empty());
  EXPECT_FALSE(config_error("[stream s]\ngenerator = csv\n").empty());
  EXPECT_FALSE(config_error("[stream s]\ngenerator = sea\nblocks = 5\n").empty());
  EXPECT_FALSE(config_error("[learner l]\ntype = svm\n").empty());
  EXPECT_FALSE(config_error("[learner l]\ntype = rrslvq\nr = 200\n").empty());
  EXPECT_FALSE(config_error("[learner l]\ntype = naive_bayes\nsigma = 1\n").empty());
  EXPECT_FALSE(config_error("[detector d]\nalpha = 1.5\n").empty());
  EXPECT_FALSE(config_error("seeds = \n").empty());
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST(Experiment, SingleRunShape) {
  const auto out = run_experiment(parse(kSmall));
  const auto rows = lines(out.results);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0] + "\n", csv_header(false));
  EXPECT_EQ(rows[0],
            "config_id,stream,learner,seed,kind,t,accuracy,kappa,windowed_accuracy,footprint,wall_ms");
  for (std::size_t i = 1; i <= 10; ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 11u) << rows[i];
    EXPECT_EQ(cells[0], "mixed/rrslvq/1");
    EXPECT_EQ(cells[4], "snapshot");
    EXPECT_EQ(cells[5], std::to_string(100 * i));
    EXPECT_EQ(cells[9], "1208");
    EXPECT_EQ(cells[10], "");
  }
  const auto summary = split(rows[11]);
  EXPECT_EQ(summary[4], "summary");
  EXPECT_EQ(summary[5], "1000");
  EXPECT_EQ(lines(out.audit)[0], "config_id,t,exceeded_dims,max_statistic");
}

TEST(Experiment, DeterministicAndJobIndependent) {
  auto cfg = parse(R"(
max_t = 1500
seeds = 1, 2
[stream a]
generator = mixed
drift = abrupt
position = 700
[stream b]
generator = sea
noise = 0.1
[learner rrslvq]
[learner rslvq]
[learner nb]
type = naive_bayes
)");
  const auto first = run_experiment(cfg);
  const auto second = run_experiment(cfg);
  cfg.jobs = 4;
  const auto parallel = run_experiment(cfg);
  EXPECT_EQ(first.results, second.results);
  EXPECT_EQ(first.audit, second.audit);
  EXPECT_EQ(first.results, parallel.results);
  EXPECT_EQ(first.audit, parallel.audit);
  EXPECT_EQ(lines(first.results).size(), 1u + 2 * 3 * 2 * 16);
}

TEST(Experiment, TimingFillsWallClock) {
  auto cfg = parse(kSmall);
  cfg.timing = true;
  const auto rows = lines(run_experiment(cfg).results);
  EXPECT_FALSE(split(rows.back())[10].empty());
}

TEST(Experiment, NoLearnersIsAnError) {
  EXPECT_THROW(run_experiment(parse("[stream s]\n")), ConfigError);
}

TEST(DetectorBenchmark, StationaryStreamHasNoPositives) {
  auto cfg = parse("max_t = 3000\n[stream s]\ndrift = abrupt\nposition = 100000\n[detector]\n");
  const auto rows = lines(run_detector_benchmark(cfg).results);
  EXPECT_EQ(rows[0] + "\n", csv_header(true));
  int summaries = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 15u) << rows[i];
    if (cells[4] != "summary") {
      EXPECT_EQ(cells[11], "");
      continue;
    }
    ++summaries;
    EXPECT_EQ(cells[14], "0");  // tp
    EXPECT_EQ(cells[13], "0");  // fn
    const auto total = std::stoul(cells[11]) + std::stoul(cells[12]) + std::stoul(cells[13]) + std::stoul(cells[14]);
    EXPECT_EQ(total, 300u);
  }
  EXPECT_EQ(summaries, 2);  // kswin and the no-detector baseline
}

TEST(DetectorBenchmark, ToleranceKeepsStepTotal) {
  auto cfg = parse("max_t = 4000\nseeds = 1,2\n[stream s]\ndrift = frequent_abrupt\nposition = 500\nperiod = 500\n[detector]\n");
  for (std::size_t tol : {0u, 10u}) {
    cfg.tolerance = tol;
    for (const auto& row : lines(run_detector_benchmark(cfg).results)) {
      const auto cells = split(row);
      if (cells[4] != "summary") continue;
      const auto total = std::stoul(cells[11]) + std::stoul(cells[12]) + std::stoul(cells[13]) + std::stoul(cells[14]);
      EXPECT_EQ(total, 400u);
    }
  }
}

TEST(DetectorBenchmark, DeterministicAcrossJobs) {
  auto cfg = parse("max_t = 3000\nseeds = 1,2,3\n[stream s]\ndrift = abrupt\nposition = 1500\n[detector]\n");
  const auto a = run_detector_benchmark(cfg);
  cfg.jobs = 3;
  const auto b = run_detector_benchmark(cfg);
  EXPECT_EQ(a.results, b.results);
  EXPECT_EQ(a.audit, b.audit);
  EXPECT_EQ(lines(a.audit)[0], "config_id,t,detected,max_statistic,exceeded_dims");
}

TEST(DetectorBenchmark, StreamWithoutTruthIsRejected) {
  const auto path = std::filesystem::temp_directory_path() / ("rrslvq_nt_" + std::to_string(::getpid()) + ".csv");
  std::ofstream(path) << "0.1,0.2,0\n0.3,0.4,1\n";
  EXPECT_THROW(run_detector_benchmark(parse("[stream s]\ngenerator = csv\npath = " + path.string() + "\n")),
               ConfigError);
  std::filesystem::remove(path);
}

TEST(Generate, HeaderOnlyForZeroSamples) {
  StreamSpec spec;
  auto stream = make_stream(spec, 7);
  std::ostringstream os;
  generate_csv(*stream, 0, os);
  EXPECT_EQ(os.str(), "f0,f1,f2,f3,label,drift_truth\n");
}

TEST(Generate, ReproducibleAndRoundTrips) {
  StreamSpec spec;
  spec.schedule = DriftSchedule{DriftKind::abrupt, 40};
  std::ostringstream a, b;
  auto s1 = make_stream(spec, 7);
  auto s2 = make_stream(spec, 7);
  generate_csv(*s1, 100, a);
  generate_csv(*s2, 100, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(lines(a.str()).size(), 101u);

  const auto path = std::filesystem::temp_directory_path() / ("rrslvq_gen_" + std::to_string(::getpid()) + ".csv");
  {
    std::ofstream os(path);
    os << a.str();
  }
  CsvOptions opts;
  opts.header = true;
  opts.labels = LabelMapping::integer;
  CsvStream csv(path.string(), opts);
  auto reference = make_stream(spec, 7);
  EXPECT_TRUE(csv.has_drift_truth());
  std::size_t n = 0;
  while (auto ev = csv.next()) {
    const auto ref = reference->next();
    ASSERT_TRUE(ref);
    EXPECT_EQ(ev->sample, ref->sample);
    EXPECT_EQ(ev->drift, ref->drift);
    ++n;
  }
  EXPECT_EQ(n, 100u);
  std::filesystem::remove(path);
}
