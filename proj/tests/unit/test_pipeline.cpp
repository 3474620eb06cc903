#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <sys/wait.h>

#include "crossnet/pipeline.hpp"
#include "support.hpp"

using namespace crossnet;

namespace {

Dataset small_dataset(std::uint64_t seed, bool corpora) {
  SynthSpec spec;
  spec.n_overlap = 80;
  spec.network_extras = {30, 30};
  spec.corpora = corpora;
  spec.rng_seed = seed;
  return dataset_from_synth(generate(spec));
}

PipelineConfig quick_config(const Dataset& ds) {
  PipelineConfig cfg;
  cfg.solver = SolverConfig::defaults_for(ds.hybrid, 2);
  cfg.solver.max_iter = 40;
  cfg.nmf.max_iter = 40;
  return cfg;
}

std::string cli() {
  const char* path = std::getenv("CROSSNET_CLI");
  if (path == nullptr) throw std::runtime_error("CROSSNET_CLI is not set");
  return path;
}

int run(const std::string& args) {
  const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("a sweep emits one report per k, in order") {
  const auto ds = small_dataset(1, false);
  auto cfg = quick_config(ds);
  for (std::size_t k = 14; k <= 20; ++k) cfg.ks.push_back(k);
  cfg.method = Method::KMeans;
  cfg.jobs = 3;
  const auto runs = run_pipeline(ds, cfg);
  REQUIRE(runs.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(runs[i].k == 14 + i);
    CHECK(runs[i].report.communities.size() == 14 + i);
  }
}

TEST_CASE("planted runs populate nmi; missing corpora leave text similarity empty") {
  const auto ds = small_dataset(2, false);
  auto cfg = quick_config(ds);
  cfg.ks = {4};
  const auto runs = run_pipeline(ds, cfg);
  REQUIRE(runs.size() == 1);
  const auto& r = runs[0].report;
  REQUIRE(r.nmi.has_value());
  CHECK(*r.nmi >= 0.0);
  CHECK_FALSE(r.mean_text_similarity.has_value());
  CHECK(r.mean_discovery.has_value());
  for (const auto& c : r.communities) CHECK_FALSE(c.text_similarity.has_value());

  const auto with_text = small_dataset(2, true);
  const auto r2 = run_pipeline(with_text, cfg)[0].report;
  CHECK(r2.mean_text_similarity.has_value());
}

TEST_CASE("results do not depend on the number of jobs") {
  const auto ds = small_dataset(3, true);
  auto cfg = quick_config(ds);
  cfg.ks = {3, 4, 5};
  const auto serial = run_pipeline(ds, cfg);
  cfg.jobs = 3;
  const auto parallel = run_pipeline(ds, cfg);
  std::vector<EvaluationReport> a, b;
  for (const auto& r : serial) a.push_back(r.report);
  for (const auto& r : parallel) b.push_back(r.report);
  CHECK(report_json(a) == report_json(b));
}

TEST_CASE("hidden users are never seeds") {
  const auto ds = small_dataset(4, false);
  auto cfg = quick_config(ds);
  const auto run = run_for_k(ds, reconstruct_all(ds, 0.0), cfg, 4);
  for (std::size_t t = 0; t < 4; ++t)
    for (auto h : run.split.hidden[t]) {
      CHECK_FALSE(run.split.visible[h]);
      for (const auto& c : run.stub_set.communities) CHECK(std::find(c.begin(), c.end(), h) == c.end());
    }
}

TEST_CASE("bench covers every method on shared seeds") {
  const auto ds = small_dataset(5, false);
  const auto runs = run_bench(ds, quick_config(ds), 4);
  std::vector<std::string> names;
  for (const auto& r : runs) names.push_back(r.report.method);
  CHECK(names == std::vector<std::string>{"cmn_nmf", "kmeans", "concat_nmf", "col_nmf", "multi_nmf", "random"});
  CHECK(bench_csv(runs).rfind("method,k,nmi,mean_discovery_ratio,mean_text_similarity,iterations\n", 0) == 0);
}

TEST_CASE("config json round-trip and method names") {
  PipelineConfig cfg;
  cfg.method = Method::MultiNmf;
  cfg.ks = {3, 4};
  cfg.rec_policy = RecPolicy::parse("fixed:0.25");
  cfg.discovery_rule = DiscoveryRule::Disjunction;
  cfg.seed = 99;
  PipelineConfig back;
  apply_pipeline_json(pipeline_config_to_json(cfg), back);
  CHECK(back.method == Method::MultiNmf);
  CHECK(back.ks == cfg.ks);
  CHECK(back.rec_policy.kind == RecPolicy::Kind::Fixed);
  CHECK(back.rec_policy.value == 0.25);
  CHECK(back.discovery_rule == DiscoveryRule::Disjunction);
  CHECK(back.seed == 99);
  CHECK(parse_method("random") == Method::Random);
  CHECK(testing::error_code_of([] { parse_method("louvain"); }) == "UnknownMethod");
  CHECK(testing::error_code_of([&] { apply_pipeline_json(Json::parse(R"({"jobs": "many"})"), back); }) == "InvalidConfig");
}

TEST_CASE("solver weights accept a scalar broadcast") {
  SolverConfig cfg;
  cfg.a = {1, 1, 1};
  apply_solver_json(Json::parse(R"({"a": 0.5, "max_iter": 7, "consistency": "community_gram"})"), cfg);
  CHECK(cfg.a == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(cfg.max_iter == 7);
  CHECK(cfg.consistency == ConsistencyForm::CommunitySimilarity);
}

TEST_CASE("parallel_for rethrows the first failure by index") {
  std::vector<int> hit(20, 0);
  CHECK_THROWS_WITH(parallel_for(20, 4,
                                 [&](std::size_t i) {
                                   hit[i] = 1;
                                   if (i == 7 || i == 13) throw std::runtime_error("boom " + std::to_string(i));
                                 }),
                    "boom 7");
  CHECK(std::count(hit.begin(), hit.end(), 1) == 20);
}

}

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  const auto dir = testing::scratch_dir("cli_codes");
  CHECK(run("") == 1);
  CHECK(run("solve --bogus") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("--help") == 0);
  REQUIRE(run("synth --seed 1 --n-overlap 40 --out " + (dir / "data").string()) == 0);
  const std::string data = (dir / "data" / "dataset.json").string();
  CHECK(run("solve --data " + data + " --out " + (dir / "s").string()) == 1);  // no --k
  CHECK(run("pipeline --data " + data + " --k 3 --rec-policy median:4 --out " + (dir / "p").string()) == 1);

  write_text_file(dir / "broken.json", R"({"directed": [{"label": "f", "path": "missing.tsv"}]})");
  CHECK(run("solve --k 2 --data " + (dir / "broken.json").string() + " --out " + (dir / "b").string()) == 2);
  write_text_file(dir / "garbage.json", "{not json");
  CHECK(run("solve --k 2 --data " + (dir / "garbage.json").string() + " --out " + (dir / "g").string()) == 2);

  write_text_file(dir / "huge.json", R"({"solver": {"a": 1e308, "b": 1e308}})");
  CHECK(run("solve --k 2 --data " + data + " --config " + (dir / "huge.json").string() + " --out " +
            (dir / "h").string()) == 3);
}

TEST_CASE("pipeline sweep writes reports, figures and a manifest") {
  const auto dir = testing::scratch_dir("cli_pipeline");
  REQUIRE(run("synth --seed 2 --n-overlap 60 --corpora --out " + (dir / "data").string()) == 0);
  write_text_file(dir / "cfg.json", R"({"method": "kmeans", "seed": 5})");
  REQUIRE(run("pipeline --data " + (dir / "data" / "dataset.json").string() + " --config " +
              (dir / "cfg.json").string() + " --sweep 14:20 --jobs 2 --out " + (dir / "out").string()) == 0);
  const auto report = read_text_file(dir / "out" / "report.csv");
  std::size_t means = 0;
  for (std::size_t pos = report.find(",mean,"); pos != std::string::npos; pos = report.find(",mean,", pos + 1)) ++means;
  CHECK(means == 7);
  const auto fig = read_text_file(dir / "out" / "fig_discovery.csv");
  CHECK(std::count(fig.begin(), fig.end(), '\n') == 8);
  const auto manifest = parse_json_file(dir / "out" / "run_manifest.json");
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.at("config").at("method") == "kmeans");
  CHECK(manifest.at("config").at("ks").size() == 7);
  CHECK(std::filesystem::exists(dir / "out" / "fig_similarity.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "communities_k14.csv"));
}

TEST_CASE("flags override the config file") {
  const auto dir = testing::scratch_dir("cli_override");
  REQUIRE(run("synth --seed 3 --n-overlap 40 --out " + (dir / "data").string()) == 0);
  write_text_file(dir / "cfg.json", R"({"k": 2, "seed": 1, "solver": {"max_iter": 20}})");
  REQUIRE(run("solve --data " + (dir / "data" / "dataset.json").string() + " --config " + (dir / "cfg.json").string() +
              " --k 3 --seed 8 --out " + (dir / "out").string()) == 0);
  const auto manifest = parse_json_file(dir / "out" / "run_manifest.json");
  CHECK(manifest.at("seed") == 8);
  CHECK(manifest.at("config").at("ks") == Json::array({3}));
  CHECK(manifest.at("config").at("solver").at("max_iter") == 20);
  CHECK(load_assignment(dir / "out" / "assignment.json").k == 3);
}

}
