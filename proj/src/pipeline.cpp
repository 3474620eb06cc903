#include "crossnet/pipeline.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "crossnet/error.hpp"
#include "crossnet/louvain.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

namespace {

const char* rule_name(DiscoveryRule r) { return r == DiscoveryRule::Conjunction ? "conjunction" : "disjunction"; }

std::vector<const UserIndex*> user_indices(const Dataset& ds) {
  std::vector<const UserIndex*> out;
  for (const auto& net : ds.networks) out.push_back(&net.users);
  return out;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::CmnNmf: return "cmn_nmf";
    case Method::KMeans: return "kmeans";
    case Method::ConcatNmf: return "concat_nmf";
    case Method::ColNmf: return "col_nmf";
    case Method::MultiNmf: return "multi_nmf";
    case Method::Random: return "random";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const Method m : all_methods())
    if (method_name(m) == name) return m;
  if (name == "random") return Method::Random;
  fail(ErrorKind::Usage, "UnknownMethod", "unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::CmnNmf, Method::KMeans, Method::ConcatNmf, Method::ColNmf,
                                              Method::MultiNmf};
  return methods;
}

Json pipeline_config_to_json(const PipelineConfig& cfg) {
  Json j;
  j["method"] = method_name(cfg.method);
  j["ks"] = cfg.ks;
  j["solver"] = solver_config_to_json(cfg.solver);
  j["nmf"] = {{"max_iter", cfg.nmf.max_iter}, {"rel_tol", cfg.nmf.rel_tol}};
  j["baselines_use_symmetric"] = cfg.baselines_use_symmetric;
  j["threshold"] = cfg.reconstruct_threshold;
  j["rec_policy"] = cfg.rec_policy.to_string();
  j["visible_fraction"] = cfg.visible_fraction;
  j["discovery_rule"] = rule_name(cfg.discovery_rule);
  j["estimate_runs"] = cfg.estimate_runs;
  j["jobs"] = cfg.jobs;
  j["seed"] = cfg.seed;
  return j;
}

void apply_pipeline_json(const Json& j, PipelineConfig& cfg) {
  if (!j.is_object()) fail(ErrorKind::Usage, "InvalidConfig", "config must be a JSON object");
  try {
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<std::size_t>>();
    if (j.contains("k")) cfg.ks = {j.at("k").get<std::size_t>()};
    if (j.contains("solver")) apply_solver_json(j.at("solver"), cfg.solver);
    if (j.contains("nmf")) {
      const auto& n = j.at("nmf");
      if (n.contains("max_iter")) cfg.nmf.max_iter = n.at("max_iter").get<std::size_t>();
      if (n.contains("rel_tol")) cfg.nmf.rel_tol = n.at("rel_tol").get<double>();
    }
    if (j.contains("baselines_use_symmetric")) cfg.baselines_use_symmetric = j.at("baselines_use_symmetric").get<bool>();
    if (j.contains("threshold")) cfg.reconstruct_threshold = j.at("threshold").get<double>();
    if (j.contains("rec_policy")) cfg.rec_policy = RecPolicy::parse(j.at("rec_policy").get<std::string>());
    if (j.contains("visible_fraction")) cfg.visible_fraction = j.at("visible_fraction").get<double>();
    if (j.contains("discovery_rule")) {
      const auto rule = j.at("discovery_rule").get<std::string>();
      if (rule == "conjunction") {
        cfg.discovery_rule = DiscoveryRule::Conjunction;
      } else if (rule == "disjunction") {
        cfg.discovery_rule = DiscoveryRule::Disjunction;
      } else {
        fail(ErrorKind::Usage, "InvalidConfig", "discovery_rule must be 'conjunction' or 'disjunction'");
      }
    }
    if (j.contains("estimate_runs")) cfg.estimate_runs = j.at("estimate_runs").get<std::size_t>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Usage, "InvalidConfig", e.what());
  }
}

StubResult find_stub_communities(const MultiplexNetwork& net, Method method, std::size_t k, const PipelineConfig& cfg,
                                 std::uint64_t seed) {
  StubResult out;
  switch (method) {
    case Method::CmnNmf: {
      SolverConfig sc = cfg.solver;
      if (sc.a.size() != net.p() || sc.b.size() != net.q() || sc.c.size() != net.p() || sc.d.size() != net.q()) {
        const auto defaults = SolverConfig::defaults_for(net, k);
        if (sc.a.size() != net.p()) sc.a = defaults.a;
        if (sc.b.size() != net.q()) sc.b = defaults.b;
        if (sc.c.size() != net.p()) sc.c = defaults.c;
        if (sc.d.size() != net.q()) sc.d = defaults.d;
      }
      sc.k = k;
      sc.rng_seed = seed;
      auto result = solve(net, sc);
      out.assignment = std::move(result.assignment);
      out.trace = std::move(result.trace);
      break;
    }
    case Method::KMeans: {
      FusionOptions fo;
      fo.include_symmetric = cfg.baselines_use_symmetric;
      out.assignment = kmeans_baseline(fuse(net, fo), k, seed).assignment;
      break;
    }
    case Method::ConcatNmf: {
      FusionOptions fo;
      fo.include_symmetric = cfg.baselines_use_symmetric;
      out.assignment = concat_nmf(fuse(net, fo), k, seed, cfg.nmf).assignment;
      break;
    }
    case Method::ColNmf: {
      const auto views = symmetric_views(net, cfg.baselines_use_symmetric);
      out.assignment = col_nmf(views, k, std::vector<double>(views.size(), 1.0), seed, cfg.nmf).assignment;
      break;
    }
    case Method::MultiNmf: {
      const auto views = symmetric_views(net, cfg.baselines_use_symmetric);
      out.assignment = multi_nmf(views, k, std::vector<double>(views.size(), 1.0), seed, cfg.nmf).assignment;
      break;
    }
    case Method::Random:
      out.assignment = random_assignment(net.n(), k, seed);
      break;
  }
  return out;
}

std::vector<SimilarityGraph> reconstruct_all(const Dataset& ds, double threshold) {
  std::vector<SimilarityGraph> graphs;
  for (const auto& net : ds.networks) graphs.push_back(reconstruct(net, threshold));
  return graphs;
}

PipelineRun run_for_k(const Dataset& ds, const std::vector<SimilarityGraph>& graphs, const PipelineConfig& cfg,
                      std::size_t k) {
  PipelineRun run;
  run.k = k;
  run.stubs = find_stub_communities(ds.hybrid, cfg.method, k, cfg, derive_seed(cfg.seed, 2 * k));
  const auto& labels = run.stubs.assignment.labels;
  run.split = hide_overlap(labels, k, cfg.visible_fraction, derive_seed(cfg.seed, 2 * k + 1));
  run.stub_set = make_stubs(labels, k, ds.overlap_mapping, run.split.visible);

  for (std::size_t net = 0; net < ds.networks.size(); ++net)
    run.extension.per_network.push_back(extend(graphs[net], net, ds.networks[net].label, run.stub_set, cfg.rec_policy));
  const auto users = user_indices(ds);
  run.extension.merged = merge(run.extension.per_network, run.stub_set, ds.hybrid.users, users);

  auto& report = run.report;
  report.method = method_name(cfg.method);
  report.k = k;
  const auto discovery = discovery_ratio(run.split.hidden, run.stub_set, run.extension.per_network, cfg.discovery_rule);
  const auto similarity = community_text_similarity(run.extension.per_network, run.stub_set, users, ds.corpora);
  for (std::size_t t = 0; t < k; ++t) {
    CommunityMetrics m;
    m.community = t;
    m.members = t < run.extension.merged.size() ? run.extension.merged[t].size() : 0;
    m.hidden = run.split.hidden[t].size();
    m.discovery = discovery[t];
    m.text_similarity = similarity[t];
    report.communities.push_back(m);
  }
  report.mean_discovery = defined_mean(discovery);
  report.mean_text_similarity = defined_mean(similarity);
  if (ds.truth_overlap) report.nmi = nmi(*ds.truth_overlap, labels);
  return run;
}

std::vector<PipelineRun> run_pipeline(const Dataset& ds, const PipelineConfig& cfg) {
  std::vector<std::size_t> ks = cfg.ks;
  if (ks.empty()) {
    const auto estimate = estimate_k(ds.hybrid, cfg.estimate_runs, cfg.seed);
    for (std::size_t k = estimate.k_min; k <= estimate.k_max; ++k) ks.push_back(k);
  }
  const auto graphs = reconstruct_all(ds, cfg.reconstruct_threshold);
  std::vector<PipelineRun> runs(ks.size());
  parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) { runs[i] = run_for_k(ds, graphs, cfg, ks[i]); });
  return runs;
}

std::vector<PipelineRun> run_bench(const Dataset& ds, const PipelineConfig& cfg, std::size_t k) {
  const auto graphs = reconstruct_all(ds, cfg.reconstruct_threshold);
  std::vector<Method> methods = all_methods();
  methods.push_back(Method::Random);
  std::vector<PipelineRun> runs(methods.size());
  parallel_for(methods.size(), cfg.jobs, [&](std::size_t i) {
    PipelineConfig c = cfg;
    c.method = methods[i];
    runs[i] = run_for_k(ds, graphs, c, k);
  });
  return runs;
}

std::string bench_csv(const std::vector<PipelineRun>& runs) {
  std::string out = "method,k,nmi,mean_discovery_ratio,mean_text_similarity,iterations\n";
  for (const auto& r : runs) {
    const auto& rep = r.report;
    out += rep.method + "," + std::to_string(rep.k) + "," + (rep.nmi ? format_fixed(*rep.nmi) : "") + "," +
           (rep.mean_discovery ? format_fixed(*rep.mean_discovery) : "") + "," +
           (rep.mean_text_similarity ? format_fixed(*rep.mean_text_similarity) : "") + "," +
           (r.stubs.trace ? std::to_string(r.stubs.trace->iterations_run) : "") + "\n";
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace crossnet
