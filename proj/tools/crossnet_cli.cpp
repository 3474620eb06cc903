// crossnet: community detection across a multiplex of overlapping users and
// expansion into the single networks they belong to.

#include <Eigen/Core>
#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "crossnet/config.hpp"
#include "crossnet/error.hpp"
#include "crossnet/io.hpp"
#include "crossnet/louvain.hpp"
#include "crossnet/pipeline.hpp"
#include "crossnet/rng.hpp"

using namespace crossnet;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string config_path;
  std::string data_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::string sweep;
  double threshold = 0.0;
  std::string rec_policy;
  std::size_t jobs = 1;
  std::string method;
  std::size_t runs = 10;
  std::string assignment_path;
  double visible_fraction = 1.0;
  // synth only
  std::size_t n_overlap = 0;
  std::size_t k_true = 0;
  double noise = -1.0;
  bool corpora = false;
};

struct Flags {
  CLI::Option* config = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* sweep = nullptr;
  CLI::Option* threshold = nullptr;
  CLI::Option* rec_policy = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* method = nullptr;
  CLI::Option* visible = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

std::vector<std::size_t> parse_sweep(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    const std::size_t lo = std::stoul(text.substr(0, colon));
    const std::size_t hi = std::stoul(text.substr(colon + 1));
    if (lo < 1 || hi < lo) throw std::invalid_argument(text);
    std::vector<std::size_t> ks;
    for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, "InvalidSweep", "--sweep expects A:B with 1 <= A <= B");
  }
}

struct Context {
  Json config = Json::object();  // file contents, flags applied on top
  Dataset dataset;
  std::string source;            // data path, or "synth"
  std::optional<SynthSpec> spec;
};

Json read_config(const Options& o) {
  if (o.config_path.empty()) return Json::object();
  Json j = parse_json_file(o.config_path);
  if (!j.is_object()) fail(ErrorKind::Usage, "InvalidConfig", "config file must hold a JSON object");
  return j;
}

// Dataset from --data, the config's "data" path, or its "synth" spec.
Context load_inputs(const Options& o) {
  Context ctx;
  ctx.config = read_config(o);
  std::string data = o.data_path;
  if (data.empty() && ctx.config.contains("data")) data = ctx.config.at("data").get<std::string>();
  if (!data.empty()) {
    ctx.dataset = load_dataset(data);
    ctx.source = data;
  } else if (ctx.config.contains("synth")) {
    SynthSpec spec = synth_spec_from_json(ctx.config.at("synth"));
    ctx.dataset = dataset_from_synth(generate(spec));
    ctx.source = "synth";
    ctx.spec = spec;
  } else {
    fail(ErrorKind::Usage, "MissingInput", "give --data <dataset.json> or a config with \"data\" or \"synth\"");
  }
  return ctx;
}

PipelineConfig pipeline_config(const Options& o, const Flags& f, const Context& ctx) {
  PipelineConfig cfg;
  cfg.solver = SolverConfig::defaults_for(ctx.dataset.hybrid, 2);
  apply_pipeline_json(ctx.config, cfg);
  if (given(f.seed)) cfg.seed = o.seed;
  if (given(f.k)) cfg.ks = {o.k};
  if (given(f.sweep)) cfg.ks = parse_sweep(o.sweep);
  if (ctx.config.contains("sweep") && !given(f.k) && !given(f.sweep)) cfg.ks = parse_sweep(ctx.config.at("sweep").get<std::string>());
  if (given(f.threshold)) cfg.reconstruct_threshold = o.threshold;
  if (given(f.rec_policy)) cfg.rec_policy = RecPolicy::parse(o.rec_policy);
  if (given(f.jobs)) cfg.jobs = o.jobs;
  if (given(f.method)) cfg.method = parse_method(o.method);
  if (given(f.visible)) cfg.visible_fraction = o.visible_fraction;
  if (cfg.jobs == 0) fail(ErrorKind::Usage, "InvalidConfig", "--jobs must be at least 1");
  return cfg;
}

void write_manifest(const fs::path& out, const std::string& subcommand, std::uint64_t seed, const Json& config,
                    const std::string& source) {
  Json m;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["input"] = source;
  m["config"] = config;
  m["versions"] = {{"crossnet", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  write_text_file(out / "run_manifest.json", m.dump(2) + "\n");
}

std::size_t single_k(const PipelineConfig& cfg, const char* stage) {
  if (cfg.ks.size() != 1) fail(ErrorKind::Usage, "MissingK", std::string(stage) + " needs exactly one --k");
  return cfg.ks.front();
}

void cmd_synth(const Options& o, const Flags& f) {
  const Json config = read_config(o);
  SynthSpec spec = config.contains("synth") ? synth_spec_from_json(config.at("synth"))
                                             : synth_spec_from_json(config);
  if (given(f.seed)) spec.rng_seed = o.seed;
  if (o.n_overlap > 0) spec.n_overlap = o.n_overlap;
  if (o.k_true > 0) spec.k_true = o.k_true;
  if (o.noise >= 0.0) spec.noise = o.noise;
  if (o.corpora) spec.corpora = true;
  const fs::path out = o.out_dir;
  write_synth_dataset(generate(spec), spec, out);
  write_manifest(out, "synth", spec.rng_seed, synth_spec_to_json(spec), "synth");
}

void cmd_estimate_k(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  const PipelineConfig cfg = pipeline_config(o, f, ctx);
  const auto estimate = estimate_k(ctx.dataset.hybrid, o.runs, cfg.seed);
  const fs::path out = o.out_dir;
  write_text_file(out / "modularity.csv", modularity_report_csv(estimate));
  Json range;
  range["k_min"] = estimate.k_min;
  range["k_max"] = estimate.k_max;
  range["warnings"] = estimate.warnings;
  write_text_file(out / "k_range.json", range.dump(2) + "\n");
  for (const auto& w : estimate.warnings) std::cerr << "crossnet estimate-k: warning: " << w << "\n";
  Json manifest_cfg = pipeline_config_to_json(cfg);
  manifest_cfg["runs"] = o.runs;
  write_manifest(out, "estimate-k", cfg.seed, manifest_cfg, ctx.source);
  std::cout << estimate.k_min << ":" << estimate.k_max << "\n";
}

void cmd_solve(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  const PipelineConfig cfg = pipeline_config(o, f, ctx);
  const std::size_t k = single_k(cfg, "solve");
  const auto result = find_stub_communities(ctx.dataset.hybrid, cfg.method, k, cfg, derive_seed(cfg.seed, 2 * k));
  const fs::path out = o.out_dir;
  save_assignment(result.assignment, ctx.dataset.hybrid.users, out / "assignment");
  if (result.trace) write_text_file(out / "trace.csv", trace_csv(*result.trace));
  if (ctx.dataset.truth_overlap)
    std::cout << "nmi " << format_fixed(nmi(*ctx.dataset.truth_overlap, result.assignment.labels)) << "\n";
  write_manifest(out, "solve", cfg.seed, pipeline_config_to_json(cfg), ctx.source);
}

void cmd_reconstruct(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  const PipelineConfig cfg = pipeline_config(o, f, ctx);
  const fs::path out = o.out_dir;
  const auto graphs = reconstruct_all(ctx.dataset, cfg.reconstruct_threshold);
  for (std::size_t net = 0; net < graphs.size(); ++net)
    save_similarity_graph(graphs[net], ctx.dataset.networks[net].users,
                          out / ("similarity_" + ctx.dataset.networks[net].label + ".tsv"));
  write_manifest(out, "reconstruct", cfg.seed, pipeline_config_to_json(cfg), ctx.source);
}

void cmd_extend(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  PipelineConfig cfg = pipeline_config(o, f, ctx);
  if (o.assignment_path.empty()) fail(ErrorKind::Usage, "MissingInput", "extend needs --assignment <assignment.json>");
  UserIndex users;
  const auto assignment = load_assignment(o.assignment_path, &users);
  if (users.ids() != ctx.dataset.hybrid.users.ids())
    fail(ErrorKind::Data, "UnknownUser", "assignment users differ from the dataset's overlapping users");

  const auto& ds = ctx.dataset;
  const std::size_t k = assignment.k;
  std::vector<bool> visible(ds.hybrid.n(), true);
  OverlapSplit split;
  if (cfg.visible_fraction < 1.0) {
    split = hide_overlap(assignment.labels, k, cfg.visible_fraction, derive_seed(cfg.seed, 2 * k + 1));
    visible = split.visible;
  }
  const auto stubs = make_stubs(assignment.labels, k, ds.overlap_mapping, visible);
  const auto graphs = reconstruct_all(ds, cfg.reconstruct_threshold);
  std::vector<NetworkExtension> per_network;
  std::vector<const UserIndex*> net_users;
  for (std::size_t net = 0; net < ds.networks.size(); ++net) {
    per_network.push_back(extend(graphs[net], net, ds.networks[net].label, stubs, cfg.rec_policy));
    net_users.push_back(&ds.networks[net].users);
    for (const auto& w : per_network.back().warnings) std::cerr << "crossnet extend: warning: " << w << "\n";
  }
  const auto merged = merge(per_network, stubs, ds.hybrid.users, net_users);
  const fs::path out = o.out_dir;
  write_text_file(out / "communities.csv", communities_csv(per_network, net_users));
  write_text_file(out / "merged.json", merged_json(merged, per_network, net_users));
  if (cfg.visible_fraction < 1.0) {
    const auto ratios = discovery_ratio(split.hidden, stubs, per_network, cfg.discovery_rule);
    const auto mean = defined_mean(ratios);
    if (mean) std::cout << "mean_discovery_ratio " << format_fixed(*mean) << "\n";
  }
  Json manifest_cfg = pipeline_config_to_json(cfg);
  manifest_cfg["assignment"] = o.assignment_path;
  write_manifest(out, "extend", cfg.seed, manifest_cfg, ctx.source);
}

void write_reports(const fs::path& out, const std::vector<PipelineRun>& runs) {
  std::vector<EvaluationReport> reports;
  for (const auto& r : runs) reports.push_back(r.report);
  write_text_file(out / "report.csv", report_csv(reports));
  write_text_file(out / "report.json", report_json(reports));
  write_text_file(out / "fig_similarity.csv", fig_similarity_csv(reports));
  write_text_file(out / "fig_discovery.csv", fig_discovery_csv(reports));
}

void cmd_pipeline(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  PipelineConfig cfg = pipeline_config(o, f, ctx);
  if (!given(f.visible) && !ctx.config.contains("visible_fraction")) cfg.visible_fraction = 2.0 / 3.0;
  const auto runs = run_pipeline(ctx.dataset, cfg);
  const fs::path out = o.out_dir;
  write_reports(out, runs);
  std::vector<const UserIndex*> net_users;
  for (const auto& net : ctx.dataset.networks) net_users.push_back(&net.users);
  for (const auto& r : runs) {
    const std::string suffix = "_k" + std::to_string(r.k);
    save_assignment(r.stubs.assignment, ctx.dataset.hybrid.users, out / ("assignment" + suffix));
    write_text_file(out / ("communities" + suffix + ".csv"), communities_csv(r.extension.per_network, net_users));
  }
  Json manifest_cfg = pipeline_config_to_json(cfg);
  if (ctx.spec) manifest_cfg["synth"] = synth_spec_to_json(*ctx.spec);
  write_manifest(out, "pipeline", cfg.seed, manifest_cfg, ctx.source);
}

void cmd_bench(const Options& o, const Flags& f) {
  const Context ctx = load_inputs(o);
  PipelineConfig cfg = pipeline_config(o, f, ctx);
  if (!given(f.visible) && !ctx.config.contains("visible_fraction")) cfg.visible_fraction = 2.0 / 3.0;
  const std::size_t k = single_k(cfg, "bench");
  const auto runs = run_bench(ctx.dataset, cfg, k);
  const fs::path out = o.out_dir;
  write_text_file(out / "bench.csv", bench_csv(runs));
  write_reports(out, runs);
  Json manifest_cfg = pipeline_config_to_json(cfg);
  if (ctx.spec) manifest_cfg["synth"] = synth_spec_to_json(*ctx.spec);
  write_manifest(out, "bench", cfg.seed, manifest_cfg, ctx.source);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::Data:
    case ErrorKind::Io: return 2;
    case ErrorKind::Numerical: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-network community detection and extension"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options o;
  std::map<std::string, Flags> flags;

  auto common = [&](CLI::App* sub, bool with_data) {
    Flags& fl = flags[sub->get_name()];
    fl.config = sub->add_option("--config", o.config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
    fl.seed = sub->add_option("--seed", o.seed, "Seed for all randomness");
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    if (with_data) sub->add_option("--data", o.data_path, "Dataset manifest (dataset.json)")->check(CLI::ExistingFile);
    return &fl;
  };

  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic dataset");
  common(synth, false);
  synth->add_option("--n-overlap", o.n_overlap, "Number of overlapping users");
  synth->add_option("--k-true", o.k_true, "Number of planted communities");
  synth->add_option("--noise", o.noise, "Fraction of edges rewired");
  synth->add_flag("--corpora", o.corpora, "Also generate per-user text");

  auto* est = app.add_subcommand("estimate-k", "Louvain community counts per directed layer");
  common(est, true);
  est->add_option("--runs", o.runs, "Louvain runs per layer")->capture_default_str();

  auto add_stage_flags = [&](CLI::App* sub, Flags* fl) {
    fl->threshold = sub->add_option("--threshold", o.threshold, "Jaccard threshold for reconstruction");
    fl->jobs = sub->add_option("--jobs", o.jobs, "Parallel runs");
  };

  auto* solve_cmd = app.add_subcommand("solve", "Find stub communities among overlapping users");
  {
    Flags* fl = common(solve_cmd, true);
    fl->k = solve_cmd->add_option("--k", o.k, "Number of communities");
    fl->method = solve_cmd->add_option("--method", o.method, "cmn_nmf, kmeans, concat_nmf, col_nmf, multi_nmf, random");
  }

  auto* rec = app.add_subcommand("reconstruct", "Build Jaccard similarity graphs for each single network");
  {
    Flags* fl = common(rec, true);
    fl->threshold = rec->add_option("--threshold", o.threshold, "Jaccard threshold");
  }

  auto* ext = app.add_subcommand("extend", "Grow stub communities into each single network");
  {
    Flags* fl = common(ext, true);
    add_stage_flags(ext, fl);
    ext->add_option("--assignment", o.assignment_path, "assignment.json written by solve")->check(CLI::ExistingFile);
    fl->rec_policy = ext->add_option("--rec-policy", o.rec_policy, "percentile:P or fixed:V");
    fl->visible = ext->add_option("--visible-fraction", o.visible_fraction, "Share of each stub kept as seeds");
  }

  auto* pipe = app.add_subcommand("pipeline", "Full run: stubs, extension, evaluation");
  auto* bench = app.add_subcommand("bench", "Every method at one k on shared seeds");
  for (auto* sub : {pipe, bench}) {
    Flags* fl = common(sub, true);
    add_stage_flags(sub, fl);
    fl->k = sub->add_option("--k", o.k, "Number of communities");
    if (sub == pipe) {
      fl->sweep = sub->add_option("--sweep", o.sweep, "k range A:B");
      fl->method = sub->add_option("--method", o.method, "cmn_nmf, kmeans, concat_nmf, col_nmf, multi_nmf, random");
    }
    fl->rec_policy = sub->add_option("--rec-policy", o.rec_policy, "percentile:P or fixed:V");
    fl->visible = sub->add_option("--visible-fraction", o.visible_fraction, "Share of each stub kept as seeds");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const Flags& fl = flags[name];
    if (name == "synth") cmd_synth(o, fl);
    else if (name == "estimate-k") cmd_estimate_k(o, fl);
    else if (name == "solve") cmd_solve(o, fl);
    else if (name == "reconstruct") cmd_reconstruct(o, fl);
    else if (name == "extend") cmd_extend(o, fl);
    else if (name == "pipeline") cmd_pipeline(o, fl);
    else if (name == "bench") cmd_bench(o, fl);
  } catch (const Error& e) {
    std::cerr << "crossnet " << name << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "crossnet " << name << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
