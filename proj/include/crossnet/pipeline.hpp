#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crossnet/baselines.hpp"
#include "crossnet/config.hpp"
#include "crossnet/evaluate.hpp"
#include "crossnet/extend.hpp"
#include "crossnet/reconstruct.hpp"
#include "crossnet/solver.hpp"
#include "crossnet/synth.hpp"

namespace crossnet {

enum class Method { CmnNmf, KMeans, ConcatNmf, ColNmf, MultiNmf, Random };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws Usage on unknown names
const std::vector<Method>& all_methods();

struct PipelineConfig {
  Method method = Method::CmnNmf;
  std::vector<std::size_t> ks;  // empty: estimate from the hybrid layers
  SolverConfig solver;          // weights sized for the dataset; k and seed are set per run
  NmfOptions nmf;
  bool baselines_use_symmetric = true;
  double reconstruct_threshold = 0.0;
  RecPolicy rec_policy;
  double visible_fraction = 2.0 / 3.0;
  DiscoveryRule discovery_rule = DiscoveryRule::Conjunction;
  std::size_t estimate_runs = 10;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
};

Json pipeline_config_to_json(const PipelineConfig& cfg);
void apply_pipeline_json(const Json& j, PipelineConfig& cfg);

struct StubResult {
  CommunityAssignment assignment;
  std::optional<SolveTrace> trace;  // CMN_NMF only
};

StubResult find_stub_communities(const MultiplexNetwork& net, Method method, std::size_t k, const PipelineConfig& cfg,
                                 std::uint64_t seed);

struct PipelineRun {
  std::size_t k = 0;
  StubResult stubs;
  OverlapSplit split;
  StubCommunitySet stub_set;
  ExtensionResult extension;
  EvaluationReport report;
};

// One reconstructed similarity graph per single network.
std::vector<SimilarityGraph> reconstruct_all(const Dataset& ds, double threshold);

// Stub detection -> hide -> extend -> merge -> evaluate for one k.
PipelineRun run_for_k(const Dataset& ds, const std::vector<SimilarityGraph>& graphs, const PipelineConfig& cfg,
                      std::size_t k);

// Runs every k in cfg.ks (or the estimated range), up to cfg.jobs at a time.
// Results are ordered by k regardless of scheduling.
std::vector<PipelineRun> run_pipeline(const Dataset& ds, const PipelineConfig& cfg);

// Every method at one k on shared seeds.
std::vector<PipelineRun> run_bench(const Dataset& ds, const PipelineConfig& cfg, std::size_t k);
std::string bench_csv(const std::vector<PipelineRun>& runs);

// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown (by index) is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace crossnet
