#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace snnforge;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(SNNFORGE_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("snnforge_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ----------------------------------------------------------------- configs

TEST(Config, MinimalConfig) {
  const auto s = parse_config(R"({"name": "m", "dt": 0.5, "groups": [{"id": "a", "num": 1}]})");
  EXPECT_EQ(s.name, "m");
  EXPECT_EQ(s.dt, 0.5);
  ASSERT_EQ(s.groups.size(), 1u);
  EXPECT_EQ(s.groups[0].model, "lif");
  EXPECT_TRUE(validate(s).empty());
}

TEST(Config, UnknownTopLevelKey) {
  try {
    parse_config(R"({"name": "m", "dt": 1.0, "grups": []})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_error);
    EXPECT_EQ(e.subject(), "grups");
  }
}

TEST(Config, UnknownNestedKeyNamesPath) {
  try {
    parse_config(R"({"name": "m", "dt": 1.0, "groups": [{"id": "a", "num": 1, "tau": 3}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_error);
    EXPECT_NE(e.subject().find("tau"), std::string::npos) << e.what();
  }
}

TEST(Config, ParseErrorCarriesLineAndColumn) {
  try {
    parse_config("{\n  \"name\": \"m\",\n  \"dt\": ,\n}", "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_EQ(e.subject(), "bad.json");
    EXPECT_NE(std::string(e.what()).find("line 3, column 9"), std::string::npos) << e.what();
  }
}

TEST(Config, WrongTypeIsSchemaError) {
  EXPECT_EQ(error_of([] { parse_config(R"({"name": "m", "dt": "fast"})"); }), ErrorCode::schema_error);
}

TEST(Config, CanonicalRoundTrip) {
  for (const char* f : {"minimal.json", "cyclic.json", "microcircuit.json", "c_elegans.json", "synth_bptt.json",
                        "synth_rstdp.json", "resblock.json"}) {
    const auto a = load_config(config_path(f));
    const auto dir = scratch("roundtrip");
    save_config(a, (dir / f).string());
    const auto b = load_config((dir / f).string());
    EXPECT_EQ(a, b) << f;
    EXPECT_EQ(canonical_config(a), canonical_config(b)) << f;
    EXPECT_EQ(config_hash(a), config_hash(b)) << f;
  }
}

TEST(Config, DefaultsAreEchoed) {
  const auto s = parse_config(R"({"name": "m", "dt": 1.0, "groups": [{"id": "a", "num": 2}]})");
  const auto j = spec_to_json(s);
  EXPECT_TRUE(j.contains("seed"));
  EXPECT_EQ(j["groups"][0]["model"], "lif");
  EXPECT_TRUE(j["groups"][0].contains("params"));
}

TEST(Config, HashDependsOnContent) {
  auto a = load_config(config_path("minimal.json"));
  auto b = a;
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, SeedEnvironmentOverride) {
  auto s = load_config(config_path("minimal.json"));
  ::setenv("SNNFORGE_SEED", "977", 1);
  apply_seed_env(s);
  EXPECT_EQ(s.seed, 977u);
  ::setenv("SNNFORGE_SEED", "abc", 1);
  EXPECT_EQ(error_of([&] { apply_seed_env(s); }), ErrorCode::invalid_argument);
  ::unsetenv("SNNFORGE_SEED");
  apply_seed_env(s);
  EXPECT_EQ(s.seed, 977u);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_EQ(error_of([] { load_config("/nonexistent/cfg.json"); }), ErrorCode::io_error);
}

// --------------------------------------------------------------------- CSV

TEST(Csv, SingleEvent) {
  SpikeRecord r;
  r.monitor = "m";
  r.width = 8;
  r.events = {{3, 4}};
  EXPECT_EQ(spike_csv(r, 1.0), "time_ms,neuron_id\n3.0,4\n");
}

TEST(Csv, EmptyRasterIsHeaderOnly) {
  SpikeRecord r;
  EXPECT_EQ(spike_csv(r, 1.0), "time_ms,neuron_id\n");
}

TEST(Csv, SortedByTimeThenNeuron) {
  SpikeRecord r;
  r.events = {{5, 2}, {1, 7}, {5, 0}, {1, 3}};
  EXPECT_EQ(spike_csv(r, 0.1), "time_ms,neuron_id\n0.1,3\n0.1,7\n0.5,0\n0.5,2\n");
}

TEST(Csv, TimeFormatting) {
  EXPECT_EQ(format_time_ms(0, 0.1), "0.0");
  EXPECT_EQ(format_time_ms(3, 0.1), "0.3");  // not 0.30000000000000004
  EXPECT_EQ(format_time_ms(125, 0.1), "12.5");
  EXPECT_EQ(format_time_ms(7, 1.0), "7.0");
  EXPECT_EQ(format_time_ms(1000, 0.025), "25.0");
}

TEST(Csv, StateTraceShape) {
  auto spec = parse_config(R"({"name": "s", "dt": 1.0,
    "nodes": [{"id": "drive", "kind": "generator", "method": "constant_current_generate", "num": 2,
               "params": {"amplitude": 0.5}}],
    "groups": [{"id": "a", "num": 2}],
    "connections": [{"id": "d", "pre": "drive", "post": "a", "link_type": "one_to_one",
                     "weight_init": {"kind": "constant", "a": 1.0}}],
    "monitors": [{"id": "va", "target": "a", "kind": "state", "var_name": "V"}]})");
  const auto g = compile(spec);
  auto s = SimState::create(g);
  Recorder rec(g);
  run(g, s, 10.0, &rec);
  const auto text = state_csv(rec.states().front(), g.dt);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "time_ms,n0,n1");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2) << line;
  }
  EXPECT_EQ(rows, 10);
}

TEST(Csv, ExportWritesOneFilePerMonitor) {
  const auto g = compile(load_config(config_path("minimal.json")));
  auto s = SimState::create(g);
  Recorder rec(g);
  run(g, s, 20.0, &rec);
  const auto dir = scratch("export");
  const auto files = export_monitors(rec, dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "exc_spikes.csv"));
  EXPECT_TRUE(fs::exists(dir / "exc_v.csv"));
  EXPECT_EQ(slurp(dir / "exc_spikes.csv"), spike_csv(*rec.spike("exc_spikes"), 1.0));
}

TEST(Csv, ExportToUnwritablePathNamesIt) {
  const auto g = compile(load_config(config_path("minimal.json")));
  Recorder rec(g);
  try {
    export_monitors(rec, "/proc/snnforge_no_such_dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
    EXPECT_NE(e.subject().find("/proc/snnforge_no_such_dir"), std::string::npos);
  }
}

// -------------------------------------------------------------- checkpoints

TEST(Checkpoint, ResumeIsBitExact) {
  for (const char* f : {"minimal.json", "cyclic.json", "synth_rstdp.json"}) {
    const auto spec = load_config(config_path(f));
    const auto g = compile(spec);
    auto through = SimState::create(g);
    rasters(g, through, 30.0);
    const auto expect = rasters(g, through, 40.0);

    auto first = SimState::create(g);
    rasters(g, first, 30.0);
    const auto dir = scratch("resume");
    save_model(spec, g, first, (dir / "m.snnf").string());
    auto loaded = load_model((dir / "m.snnf").string());
    EXPECT_EQ(loaded.state.step, first.step);
    for (std::size_t v = 0; v < g.variables.size(); ++v) EXPECT_EQ(loaded.state.values[v], first.values[v]);
    EXPECT_EQ(rasters(loaded.graph, loaded.state, 40.0), expect) << f;
  }
}

TEST(Checkpoint, SerialStrategyIsPreserved) {
  const auto spec = load_config(config_path("cyclic.json"));
  const auto g = compile(spec, Strategy::serial);
  auto s = SimState::create(g);
  run(g, s, 5.0);
  const auto m = checkpoint_from_bytes(checkpoint_bytes(spec, g, s));
  EXPECT_EQ(m.graph.strategy, Strategy::serial);
  EXPECT_EQ(format_schedule(m.graph), format_schedule(g));
}

TEST(Checkpoint, AnyCorruptByteIsDetected) {
  const auto spec = load_config(config_path("minimal.json"));
  const auto g = compile(spec);
  auto s = SimState::create(g);
  run(g, s, 10.0);
  const auto bytes = checkpoint_bytes(spec, g, s);
  for (std::size_t pos : {std::size_t{0}, std::size_t{5}, bytes.size() / 3, bytes.size() / 2, bytes.size() - 9,
                          bytes.size() - 1}) {
    auto bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x5a);
    EXPECT_EQ(error_of([&] { checkpoint_from_bytes(bad); }), ErrorCode::checksum_error) << pos;
  }
  EXPECT_EQ(error_of([&] { checkpoint_from_bytes(bytes.substr(0, bytes.size() / 2)); }), ErrorCode::checksum_error);
}

TEST(Checkpoint, NewerMajorVersionIsRejected) {
  const auto spec = load_config(config_path("minimal.json"));
  const auto g = compile(spec);
  const auto s = SimState::create(g);
  auto bytes = checkpoint_bytes(spec, g, s);
  const std::uint32_t major = checkpoint_major + 1;
  std::memcpy(bytes.data() + 4, &major, 4);
  // re-seal so only the version differs
  const std::uint32_t crc = crc32_of(bytes.data(), bytes.size() - 4);
  std::memcpy(bytes.data() + bytes.size() - 4, &crc, 4);
  EXPECT_EQ(error_of([&] { checkpoint_from_bytes(bytes); }), ErrorCode::version_mismatch);
}

TEST(Checkpoint, TrainedWeightsSurvive) {
  const auto spec = load_config(config_path("synth_bptt.json"));
  const auto g = compile(spec);
  auto s = SimState::create(g);
  const auto w = static_cast<std::size_t>(g.connection(g.learner->trainable.front())->weight);
  for (std::size_t i = 0; i < s.values[w].size(); ++i) s.values[w][i] = 0.001 * static_cast<double>(i) - 0.3;
  const auto m = checkpoint_from_bytes(checkpoint_bytes(spec, g, s));
  EXPECT_EQ(m.state.values[w], s.values[w]);
  EXPECT_EQ(m.spec, spec);
}

// ----------------------------------------------------------------- manifest

TEST(Manifest, HashMatchesCanonicalInput) {
  const auto spec = load_config(config_path("minimal.json"));
  const auto m = make_manifest(spec, "run", Strategy::parallel, {{"run", 0.5}});
  EXPECT_EQ(m["config_hash"], config_hash(spec));
  EXPECT_EQ(m["seed"], spec.seed);
  EXPECT_EQ(m["config"].dump(), canonical_config(spec));
  const auto dir = scratch("manifest");
  write_manifest(dir, m);
  const auto back = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(back, m);
  // the embedded config is itself a loadable config with the same hash
  EXPECT_EQ(config_hash(parse_config(back["config"].dump())), config_hash(spec));
}

// ------------------------------------------------------------------ dataset

TEST(Dataset, NoiselessSamplesEqualTemplates) {
  const auto d = make_dataset(3, 10, 4, 0.0, 1);
  ASSERT_EQ(d.samples.size(), 12u);
  for (const auto& s : d.samples) EXPECT_EQ(s.x, d.templates[s.label]);
  // blocks of 3, 3 and 4 (remainder to the last class)
  EXPECT_EQ(d.templates[2], (std::vector<double>{0, 0, 0, 0, 0, 0, 0.8, 0.8, 0.8, 0.8}));
}

TEST(Dataset, SameSeedSameBytes) {
  const auto a = make_dataset(2, 20, 30, 0.1, 42), b = make_dataset(2, 20, 30, 0.1, 42);
  const auto c = make_dataset(2, 20, 30, 0.1, 43);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    EXPECT_EQ(std::memcmp(a.samples[k].x.data(), b.samples[k].x.data(), a.n * sizeof(double)), 0);
  EXPECT_NE(a.samples[0].x, c.samples[0].x);
}

TEST(Dataset, NearestTemplateIsPerfectAtLowNoise) {
  const auto d = make_dataset(2, 20, 200, 0.1, 7);
  std::size_t correct = 0;
  for (const auto& s : d.samples) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t c = 0; c < d.classes; ++c) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d.n; ++i) dist += (s.x[i] - d.templates[c][i]) * (s.x[i] - d.templates[c][i]);
      if (dist < best_d) best_d = dist, best = c;
    }
    correct += best == s.label;
    for (double x : s.x) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
  }
  EXPECT_EQ(correct, d.samples.size());
}

TEST(Dataset, RejectsSingleClass) {
  EXPECT_EQ(error_of([] { make_dataset(1, 10, 3, 0.1, 0); }), ErrorCode::invalid_argument);
}

// -------------------------------------------------------------------- bench

TEST(Bench, DefaultsFollowTheProtocol) {
  const BenchOptions o;
  EXPECT_EQ(o.inputs, 100u);
  EXPECT_EQ(o.input_rate, 30.0);
  EXPECT_EQ(o.duration_ms, 100.0);
  EXPECT_EQ(o.dt, 1.0);
  EXPECT_EQ(o.cycles, 100);
  const auto g = compile(bench_network(o));
  EXPECT_EQ(g.group("test")->num, 10000u);
  EXPECT_EQ(g.connection("input_test")->n_pre, 100u);
}

TEST(Bench, SingleCycleHasNoDeviation) {
  BenchOptions o;
  o.neurons = 200;
  o.cycles = 1;
  const auto r = bench(o);
  EXPECT_FALSE(r.stddev_s.has_value());
  EXPECT_NE(r.text().find("cycle_std_s n/a"), std::string::npos);
  EXPECT_EQ(r.to_json()["cycle_std_s"], "n/a");
  EXPECT_EQ(r.cycle_s.size(), 1u);
}

TEST(Bench, SpikeTotalsAreDeterministic) {
  BenchOptions o;
  o.neurons = 500;
  o.cycles = 4;
  const auto a = bench(o), b = bench(o);
  EXPECT_EQ(a.spikes, b.spikes);
  ASSERT_TRUE(a.stddev_s.has_value());
  long long total = 0;
  for (auto x : a.spikes) total += x;
  EXPECT_GT(total, 0);
  EXPECT_GT(a.steps_per_s, 0.0);
}

TEST(Bench, RejectsZeroCycles) {
  BenchOptions o;
  o.cycles = 0;
  EXPECT_EQ(error_of([&] { bench(o); }), ErrorCode::invalid_argument);
}

// --------------------------------------------------------- example configs

TEST(Examples, AllShippedConfigsValidate) {
  for (const auto& entry : fs::directory_iterator(SNNFORGE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto spec = load_config(entry.path().string());
    const auto d = validate(spec);
    EXPECT_TRUE(d.empty()) << entry.path() << ": " << (d.empty() ? "" : d.front().to_string());
    EXPECT_NO_THROW(compile(spec)) << entry.path();
  }
}

TEST(Examples, MicrocircuitStructure) {
  const auto spec = load_config(config_path("microcircuit.json"));
  ASSERT_EQ(spec.groups.size(), 8u);
  for (const char* layer : {"L23", "L4", "L5", "L6"})
    for (const char* type : {"e", "i"}) {
      const std::string id = std::string(layer) + type;
      EXPECT_TRUE(std::any_of(spec.groups.begin(), spec.groups.end(), [&](const GroupSpec& g) { return g.id == id; }))
          << id;
    }
  std::size_t generators = 0;
  for (const auto& n : spec.nodes) generators += n.kind == NodeKind::generator && n.method == "poisson_generate";
  EXPECT_EQ(generators, 8u);
}

TEST(Examples, MicrocircuitIsIrregularAndStationary) {
  const auto g = compile(load_config(config_path("microcircuit.json")));
  auto s = SimState::create(g);
  Recorder rec(g);
  run(g, s, 1000.0, &rec);
  for (const auto& a : population_activity(rec, g.dt, 1000.0)) {
    EXPECT_GT(a.rate_hz, 0.1) << a.monitor;
    EXPECT_LT(a.rate_hz, 30.0) << a.monitor;
    EXPECT_GT(a.cv, 0.5) << a.monitor;
  }
  // stationary: the two halves of the run have similar population rates
  for (const auto& r : rec.spikes()) {
    double first = 0, second = 0;
    for (const auto& e : r.events) (e.step < 5000 ? first : second) += 1;
    EXPECT_LT(std::abs(first - second), 0.3 * (first + second) + 10) << r.monitor;
  }
}

TEST(Examples, ThermotaxisMotorBurstsAlternate) {
  const auto g = compile(load_config(config_path("c_elegans.json")));
  const auto t = thermotaxis(g);
  EXPECT_EQ(t.overlap_steps, 0);
  EXPECT_EQ(t.sequence, "ACA");  // cold, warm, cold again
  EXPECT_GT(t.cw_spikes, 0);
  EXPECT_GT(t.acw_spikes, 0);
}
