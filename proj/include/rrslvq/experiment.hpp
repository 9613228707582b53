#ifndef RRSLVQ_EXPERIMENT_HPP_
#define RRSLVQ_EXPERIMENT_HPP_

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "rrslvq/core.hpp"
#include "rrslvq/csv_stream.hpp"
#include "rrslvq/evaluation.hpp"
#include "rrslvq/generators.hpp"
#include "rrslvq/kswin.hpp"
#include "rrslvq/reactive.hpp"
#include "rrslvq/rslvq.hpp"

namespace rrslvq {

/// Malformed or inconsistent experiment manifest (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

// ---------------------------------------------------------------------------
// Manifest model

/// Key/value pairs of one manifest section, each remembering its line.
struct Section {
  std::string kind;  ///< "", "stream", "learner" or "detector"
  std::string name;
  std::size_t line = 0;
  std::map<std::string, std::pair<std::string, std::size_t>> values;
};

struct StreamSpec {
  std::string name;
  std::string generator = "mixed";
  DriftSchedule schedule;
  std::optional<double> noise;
  std::vector<int> sea_blocks{1, 2};
  RtgConfig rtg;
  RbfConfig rbf;
  HyperplaneConfig hyper;
  std::string csv_path;
  CsvOptions csv;
};

struct LearnerSpec {
  std::string name;
  std::string type = "rrslvq";  ///< rslvq | rrslvq | naive_bayes
  RslvqConfig rslvq;
  KswinConfig kswin;
};

struct DetectorSpec {
  std::string name = "kswin";
  KswinConfig kswin;
};

struct ExperimentConfig {
  std::vector<StreamSpec> streams;
  std::vector<LearnerSpec> learners;
  std::vector<DetectorSpec> detectors;
  std::vector<std::uint64_t> seeds{1};
  std::size_t max_t = 10000;
  std::size_t snapshot_every = 100;
  std::size_t jobs = 1;
  std::size_t tolerance = 10;
  std::size_t batch = 10;
  bool timing = false;
  std::string out;
  std::string audit_log;

  void validate() const {
    if (streams.empty()) throw ConfigError("manifest defines no [stream] section");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (max_t < 1) throw ConfigError("max_t must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
  }

  const StreamSpec& stream(std::string_view name) const {
    for (const auto& s : streams) {
      if (s.name == name) return s;
    }
    throw ConfigError("unknown stream '" + std::string(name) + "'");
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

class SectionReader {
 public:
  SectionReader(const Section& sec, std::string source) : sec_(sec), source_(std::move(source)) {}

  ~SectionReader() = default;

  /// Fails on keys that were never consumed.
  void finish() const {
    for (const auto& [key, entry] : sec_.values) {
      if (!used_.count(key)) throw ConfigError(source_, entry.second, "unknown key '" + key + "'");
    }
  }

  std::optional<std::string> str(const std::string& key) {
    const auto it = sec_.values.find(key);
    if (it == sec_.values.end()) return std::nullopt;
    used_.insert({key, true});
    return it->second.first;
  }

  template <typename T>
  std::optional<T> number(const std::string& key) {
    const auto it = sec_.values.find(key);
    if (it == sec_.values.end()) return std::nullopt;
    used_.insert({key, true});
    const std::string& text = it->second.first;
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError(source_, it->second.second, "'" + key + "' expects a number, got '" + text + "'");
    }
    return value;
  }

  std::optional<bool> boolean(const std::string& key) {
    const auto v = str(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(key, "expects true or false");
  }

  template <typename T>
  std::vector<T> list(const std::string& key) {
    std::vector<T> out;
    const auto v = str(key);
    if (!v) return out;
    if (v->empty()) fail(key, "must not be empty");
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_copy(item);
      T value{};
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
        fail(key, "expects a comma-separated list of numbers");
      }
      out.push_back(value);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = sec_.values.find(key);
    const std::size_t line = it == sec_.values.end() ? sec_.line : it->second.second;
    throw ConfigError(source_, line, "'" + key + "' " + what);
  }

  [[noreturn]] void fail_section(const std::string& what) const { throw ConfigError(source_, sec_.line, what); }

 private:
  const Section& sec_;
  std::string source_;
  std::map<std::string, bool> used_;
};

inline StreamSpec read_stream(const Section& sec, const std::string& source) {
  SectionReader in(sec, source);
  StreamSpec spec;
  spec.name = sec.name;
  spec.generator = in.str("generator").value_or("mixed");
  if (auto kind = in.str("drift")) {
    const auto parsed = parse_drift_kind(*kind);
    if (!parsed) in.fail("drift", "must be one of none, abrupt, gradual, frequent_abrupt, frequent_gradual");
    spec.schedule.kind = *parsed;
  }
  spec.schedule.position = in.number<std::size_t>("position").value_or(0);
  spec.schedule.width = in.number<std::size_t>("width").value_or(1);
  spec.schedule.period = in.number<std::size_t>("period").value_or(1);
  if (spec.schedule.gradual() && spec.schedule.width < 1) in.fail("width", "must be >= 1 for gradual drift");
  if (spec.schedule.frequent() && spec.schedule.period < 1) in.fail("period", "must be >= 1 for frequent drift");
  spec.noise = in.number<double>("noise");
  if (spec.noise && !(*spec.noise >= 0.0 && *spec.noise <= 1.0)) in.fail("noise", "must lie in [0, 1]");

  const std::string& g = spec.generator;
  if (g == "sea") {
    auto blocks = in.list<int>("blocks");
    if (!blocks.empty()) spec.sea_blocks = blocks;
    for (int b : spec.sea_blocks) {
      if (b < 1 || b > 4) in.fail("blocks", "entries must be in 1..4");
    }
  } else if (g == "mixed") {
  } else if (g == "rtg") {
    spec.rtg.features = in.number<std::size_t>("features").value_or(spec.rtg.features);
    spec.rtg.classes = in.number<std::size_t>("classes").value_or(spec.rtg.classes);
    spec.rtg.max_depth = in.number<std::size_t>("max_depth").value_or(spec.rtg.max_depth);
  } else if (g == "rbf") {
    spec.rbf.centroids = in.number<std::size_t>("centroids").value_or(spec.rbf.centroids);
    spec.rbf.classes = in.number<std::size_t>("classes").value_or(spec.rbf.classes);
    spec.rbf.features = in.number<std::size_t>("features").value_or(spec.rbf.features);
    spec.rbf.speed = in.number<double>("speed").value_or(spec.rbf.speed);
  } else if (g == "hyper") {
    spec.hyper.features = in.number<std::size_t>("features").value_or(spec.hyper.features);
    spec.hyper.magnitude = in.number<double>("magnitude").value_or(spec.hyper.magnitude);
  } else if (g == "csv") {
    const auto path = in.str("path");
    if (!path) in.fail_section("csv stream '" + sec.name + "' needs a path");
    spec.csv_path = *path;
    spec.csv.header = in.boolean("header").value_or(false);
    spec.csv.truth_column = in.boolean("truth_column").value_or(false);
    spec.csv.classes = in.number<std::size_t>("classes");
    spec.csv.name = sec.name;
    if (auto labels = in.str("labels")) {
      if (*labels == "first_seen") {
        spec.csv.labels = LabelMapping::first_seen;
      } else if (*labels == "integer") {
        spec.csv.labels = LabelMapping::integer;
      } else {
        in.fail("labels", "must be first_seen or integer");
      }
    }
    if (spec.schedule.kind != DriftKind::none) in.fail("drift", "cannot be applied to a csv stream");
  } else {
    in.fail("generator", "must be one of sea, mixed, rtg, rbf, hyper, csv");
  }
  const bool single_concept = g == "rtg" || g == "rbf" || g == "hyper";
  if (single_concept && spec.schedule.kind != DriftKind::none) {
    in.fail("drift", "is not supported by the " + g + " generator (one concept)");
  }
  in.finish();
  return spec;
}

inline KswinConfig read_kswin(SectionReader& in, KswinConfig cfg) {
  cfg.n = in.number<std::size_t>("n").value_or(cfg.n);
  cfg.r = in.number<std::size_t>("r").value_or(cfg.r);
  cfg.alpha = in.number<double>("alpha").value_or(cfg.alpha);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    in.fail_section(e.what());
  }
  return cfg;
}

inline LearnerSpec read_learner(const Section& sec, const std::string& source) {
  SectionReader in(sec, source);
  LearnerSpec spec;
  spec.name = sec.name;
  spec.type = in.str("type").value_or(sec.name);
  if (spec.type != "rslvq" && spec.type != "rrslvq" && spec.type != "naive_bayes") {
    in.fail("type", "must be rslvq, rrslvq or naive_bayes");
  }
  if (spec.type != "naive_bayes") {
    spec.rslvq.prototypes_per_class =
        in.number<std::size_t>("prototypes_per_class").value_or(spec.rslvq.prototypes_per_class);
    spec.rslvq.sigma = in.number<double>("sigma").value_or(spec.rslvq.sigma);
    spec.rslvq.gamma = in.number<double>("gamma").value_or(spec.rslvq.gamma);
    spec.rslvq.epsilon = in.number<double>("epsilon").value_or(spec.rslvq.epsilon);
    try {
      spec.rslvq.validate();
    } catch (const std::invalid_argument& e) {
      in.fail_section(e.what());
    }
  }
  if (spec.type == "rrslvq") spec.kswin = read_kswin(in, spec.kswin);
  in.finish();
  return spec;
}

inline DetectorSpec read_detector(const Section& sec, const std::string& source) {
  SectionReader in(sec, source);
  DetectorSpec spec;
  spec.name = sec.name.empty() ? "kswin" : sec.name;
  const auto type = in.str("type").value_or("kswin");
  if (type != "kswin") in.fail("type", "must be kswin");
  spec.kswin = read_kswin(in, spec.kswin);
  in.finish();
  return spec;
}

}  // namespace detail

/**
 * Parses a manifest: global `key = value` lines, then `[stream NAME]`,
 * `[learner NAME]` and `[detector NAME]` sections. `#` starts a comment.
 */
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config") {
  std::vector<Section> sections(1);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim_copy(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      std::istringstream header(line.substr(1, line.size() - 2));
      Section sec;
      sec.line = line_no;
      header >> sec.kind >> sec.name;
      std::string extra;
      if (header >> extra) throw ConfigError(source, line_no, "section header takes a kind and a name");
      if (sec.kind != "stream" && sec.kind != "learner" && sec.kind != "detector") {
        throw ConfigError(source, line_no, "unknown section kind '" + sec.kind + "'");
      }
      if (sec.name.empty() && sec.kind != "detector") {
        throw ConfigError(source, line_no, "section needs a name");
      }
      for (const auto& other : sections) {
        if (other.kind == sec.kind && other.name == sec.name) {
          throw ConfigError(source, line_no, "duplicate " + sec.kind + " '" + sec.name + "'");
        }
      }
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected key = value");
    const std::string key = detail::trim_copy(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim_copy(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "empty key");
    auto& target = sections.back();
    if (target.values.count(key)) throw ConfigError(source, line_no, "duplicate key '" + key + "'");
    target.values[key] = {value, line_no};
  }

  ExperimentConfig cfg;
  {
    detail::SectionReader global(sections.front(), source);
    cfg.max_t = global.number<std::size_t>("max_t").value_or(cfg.max_t);
    cfg.snapshot_every = global.number<std::size_t>("snapshot_every").value_or(cfg.snapshot_every);
    cfg.jobs = global.number<std::size_t>("jobs").value_or(cfg.jobs);
    cfg.tolerance = global.number<std::size_t>("tolerance").value_or(cfg.tolerance);
    cfg.batch = global.number<std::size_t>("batch").value_or(cfg.batch);
    cfg.timing = global.boolean("timing").value_or(false);
    cfg.out = global.str("out").value_or("");
    cfg.audit_log = global.str("audit_log").value_or("");
    if (auto seeds = global.list<std::uint64_t>("seeds"); !seeds.empty()) cfg.seeds = seeds;
    global.finish();
  }
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto& sec = sections[i];
    if (sec.kind == "stream") {
      cfg.streams.push_back(detail::read_stream(sec, source));
    } else if (sec.kind == "learner") {
      cfg.learners.push_back(detail::read_learner(sec, source));
    } else {
      cfg.detectors.push_back(detail::read_detector(sec, source));
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// Construction

/// Seed salts so each run's generator model, sampling and learner are independent.
inline constexpr std::uint64_t kSaltGeneratorModel = 1;
inline constexpr std::uint64_t kSaltStreamSampling = 2;
inline constexpr std::uint64_t kSaltLearner = 3;
inline constexpr std::uint64_t kSaltDetector = 4;

inline std::unique_ptr<StreamSource> make_stream(const StreamSpec& spec, std::uint64_t seed,
                                                 std::optional<std::size_t> length = std::nullopt) {
  if (spec.generator == "csv") return std::make_unique<CsvStream>(spec.csv_path, spec.csv);
  const std::uint64_t model_seed = derive_seed(seed, kSaltGeneratorModel);
  std::unique_ptr<ConceptGenerator> base;
  if (spec.generator == "sea") {
    SeaConfig cfg;
    cfg.blocks = spec.sea_blocks;
    if (spec.noise) cfg.noise = *spec.noise;
    base = std::make_unique<SeaGenerator>(cfg);
  } else if (spec.generator == "mixed") {
    base = std::make_unique<MixedGenerator>(MixedConfig{spec.noise.value_or(0.0)});
  } else if (spec.generator == "rtg") {
    base = std::make_unique<RtgGenerator>(spec.rtg, model_seed);
  } else if (spec.generator == "rbf") {
    base = std::make_unique<RbfGenerator>(spec.rbf, model_seed);
  } else if (spec.generator == "hyper") {
    HyperplaneConfig cfg = spec.hyper;
    if (spec.noise) cfg.noise = *spec.noise;
    base = std::make_unique<HyperplaneGenerator>(cfg, model_seed);
  } else {
    throw ConfigError("unknown generator '" + spec.generator + "'");
  }
  auto stream = compose_drift(std::move(base), spec.schedule, derive_seed(seed, kSaltStreamSampling), length);
  return stream;
}

// ---------------------------------------------------------------------------
// Output formatting

inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string csv_header(bool detector_columns) {
  std::string h = std::string("config_id,stream,") + (detector_columns ? "detector" : "learner") +
                  ",seed,kind,t,accuracy,kappa,windowed_accuracy,footprint,wall_ms";
  if (detector_columns) h += ",tn,fp,fn,tp";
  return h + '\n';
}

inline std::string csv_row(const std::string& config_id, const std::string& stream, const std::string& who,
                           std::uint64_t seed, std::string_view kind, const PrequentialRecord& rec, bool timing,
                           const std::optional<DetectorEvalRecord>& det = std::nullopt, bool detector_columns = false) {
  std::string row = config_id + ',' + stream + ',' + who + ',' + std::to_string(seed) + ',' + std::string(kind) + ',' +
                    std::to_string(rec.t) + ',' + fmt_real(rec.accuracy) + ',' + fmt_real(rec.kappa) + ',' +
                    fmt_real(rec.windowed_accuracy) + ',' + std::to_string(rec.footprint) + ',' +
                    (timing ? fmt_real(rec.wall_ms) : std::string());
  if (detector_columns) {
    if (det) {
      row += ',' + std::to_string(det->tn) + ',' + std::to_string(det->fp) + ',' + std::to_string(det->fn) + ',' +
             std::to_string(det->tp);
    } else {
      row += ",,,,";
    }
  }
  return row + '\n';
}

struct ExperimentOutput {
  std::string results;
  std::string audit;
};

namespace detail {

struct TaskOutput {
  std::string rows;
  std::string audit;
};

/// Runs `count` independent tasks on up to `jobs` threads; output order is the task order.
template <typename Fn>
std::vector<TaskOutput> run_tasks(std::size_t count, std::size_t jobs, Fn fn) {
  std::vector<TaskOutput> outputs(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        outputs[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

template <Learner L>
void emit_prequential(TaskOutput& out, const PrequentialResult& res, const std::string& id, const StreamSpec& stream,
                      const std::string& who, std::uint64_t seed, bool timing) {
  for (const auto& rec : res.snapshots) out.rows += csv_row(id, stream.name, who, seed, "snapshot", rec, timing);
  out.rows += csv_row(id, stream.name, who, seed, "summary", res.summary, timing);
}

}  // namespace detail

/// Cross product streams x learners x seeds, evaluated prequentially.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.learners.empty()) throw ConfigError("manifest defines no [learner] section");
  const std::size_t per_stream = cfg.learners.size() * cfg.seeds.size();
  const std::size_t count = cfg.streams.size() * per_stream;

  auto task = [&](std::size_t i) {
    const StreamSpec& sspec = cfg.streams[i / per_stream];
    const LearnerSpec& lspec = cfg.learners[(i % per_stream) / cfg.seeds.size()];
    const std::uint64_t seed = cfg.seeds[i % cfg.seeds.size()];
    const std::string id = sspec.name + '/' + lspec.name + '/' + std::to_string(seed);
    auto stream = make_stream(sspec, seed);
    const StreamMeta meta = stream->meta();
    const std::uint64_t learner_seed = derive_seed(seed, kSaltLearner);
    PrequentialOptions opts;
    opts.snapshot_every = cfg.snapshot_every;
    opts.timing = cfg.timing;

    detail::TaskOutput out;
    if (lspec.type == "rslvq") {
      SeededRng rng(learner_seed);
      RslvqModel model(meta, lspec.rslvq, rng);
      const auto res = prequential_run(*stream, model, cfg.max_t, opts);
      detail::emit_prequential<RslvqModel>(out, res, id, sspec, lspec.name, seed, cfg.timing);
    } else if (lspec.type == "rrslvq") {
      RrslvqModel model(meta, lspec.rslvq, lspec.kswin, learner_seed);
      const auto res = prequential_run(*stream, model, cfg.max_t, opts);
      detail::emit_prequential<RrslvqModel>(out, res, id, sspec, lspec.name, seed, cfg.timing);
      for (const auto& rep : model.adaptation_log()) {
        out.audit += id + ',' + std::to_string(rep.t) + ',' + join_dims(rep.exceeded_dims) + ',' +
                     fmt_real(rep.max_statistic) + '\n';
      }
    } else {
      NaiveBayesModel model(meta.d, meta.classes);
      const auto res = prequential_run(*stream, model, cfg.max_t, opts);
      detail::emit_prequential<NaiveBayesModel>(out, res, id, sspec, lspec.name, seed, cfg.timing);
    }
    return out;
  };

  const auto outputs = detail::run_tasks(count, cfg.jobs, task);
  ExperimentOutput result;
  result.results = csv_header(false);
  result.audit = "config_id,t,exceeded_dims,max_statistic\n";
  for (const auto& o : outputs) {
    result.results += o.rows;
    result.audit += o.audit;
  }
  return result;
}

/// KSWIN on every stream x seed: standalone confusion against the drift
/// marks plus the naive Bayes carrier, next to a carrier without detector.
inline ExperimentOutput run_detector_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<DetectorSpec> detectors = cfg.detectors;
  if (detectors.empty()) detectors.push_back(DetectorSpec{});
  const std::size_t per_stream = (detectors.size() + 1) * cfg.seeds.size();
  const std::size_t count = cfg.streams.size() * per_stream;

  auto task = [&](std::size_t i) {
    const StreamSpec& sspec = cfg.streams[i / per_stream];
    const std::size_t which = (i % per_stream) / cfg.seeds.size();  // == detectors.size() means "none"
    const std::uint64_t seed = cfg.seeds[i % cfg.seeds.size()];
    auto stream = make_stream(sspec, seed);
    if (!stream->has_drift_truth()) {
      throw ConfigError("stream '" + sspec.name + "' has no ground-truth drift marks");
    }
    PrequentialOptions opts;
    opts.snapshot_every = cfg.snapshot_every;
    opts.timing = cfg.timing;

    detail::TaskOutput out;
    const std::string who = which < detectors.size() ? detectors[which].name : "none";
    const std::string id = sspec.name + '/' + who + '/' + std::to_string(seed);
    CarrierResult res;
    if (which < detectors.size()) {
      KswinDetector detector(detectors[which].kswin, derive_seed(seed, kSaltDetector));
      struct Recording {
        KswinDetector& inner;
        std::string& audit;
        const std::string& id;
        std::size_t batch;
        std::size_t step = 0;
        bool observe(std::span<const LabeledSample> b) {
          step += 1;
          const bool fired = inner.observe(b);
          if (fired) audit += id + ',' + to_csv_row(*inner.last_signal(), step * batch) + '\n';
          return fired;
        }
      } recording{detector, out.audit, id, cfg.batch};
      res = detector_carrier_run(*stream, recording, cfg.max_t, cfg.batch, opts);
    } else {
      NeverDetector never;
      res = detector_carrier_run(*stream, never, cfg.max_t, cfg.batch, opts);
    }
    const auto conf = detector_confusion(res.signals, res.truth, cfg.tolerance);
    for (const auto& rec : res.prequential.snapshots) {
      out.rows += csv_row(id, sspec.name, who, seed, "snapshot", rec, cfg.timing, std::nullopt, true);
    }
    out.rows += csv_row(id, sspec.name, who, seed, "summary", res.prequential.summary, cfg.timing, conf, true);
    return out;
  };

  const auto outputs = detail::run_tasks(count, cfg.jobs, task);
  ExperimentOutput result;
  result.results = csv_header(true);
  result.audit = "config_id,t,detected,max_statistic,exceeded_dims\n";
  for (const auto& o : outputs) {
    result.results += o.rows;
    result.audit += o.audit;
  }
  return result;
}

/// Materialises k samples as CSV: f0..f{d-1},label,drift_truth.
inline void generate_csv(StreamSource& stream, std::size_t k, std::ostream& os) {
  const StreamMeta& meta = stream.meta();
  for (std::size_t i = 0; i < meta.d; ++i) os << 'f' << i << ',';
  os << "label,drift_truth\n";
  char buf[32];
  for (std::size_t n = 0; n < k; ++n) {
    auto event = stream.next();
    if (!event) break;
    for (double v : event->sample.x) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ',';
    }
    os << event->sample.y << ',' << (event->drift ? 1 : 0) << '\n';
  }
}

}  // namespace rrslvq

#endif  // RRSLVQ_EXPERIMENT_HPP_
