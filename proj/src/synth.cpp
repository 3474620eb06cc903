#include "crossnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "crossnet/config.hpp"
#include "crossnet/error.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

namespace {

void invalid(const std::string& msg) { fail(ErrorKind::Usage, "InvalidSpec", msg); }

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", i);
  return prefix + buf;
}

std::vector<std::size_t> block_sizes(std::size_t n, std::size_t k, double skew) {
  if (skew <= 0.0) return balanced_blocks(n, k);
  // Sizes proportional to (1 - skew)^c, each at least 1.
  std::vector<double> share(k);
  for (std::size_t c = 0; c < k; ++c) share[c] = std::pow(1.0 - skew, static_cast<double>(c));
  const double total = std::accumulate(share.begin(), share.end(), 0.0);
  std::vector<std::size_t> sizes(k, 1);
  std::size_t assigned = k;
  for (std::size_t c = 0; c < k; ++c) {
    const auto extra = static_cast<std::size_t>(std::floor(share[c] / total * static_cast<double>(n - k)));
    sizes[c] += extra;
    assigned += extra;
  }
  for (std::size_t c = 0; assigned < n; c = (c + 1) % k, ++assigned) ++sizes[c];
  return sizes;
}

// Bernoulli(p) over `count` slots via geometric skips; calls visit(slot).
template <typename Visit>
void sample_slots(Rng& rng, std::size_t count, double p, Visit&& visit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::size_t s = 0; s < count; ++s) visit(s);
    return;
  }
  const double log_q = std::log1p(-p);
  double pos = -1.0;
  while (true) {
    pos += std::floor(std::log(rng.uniform_open_closed()) / log_q) + 1.0;
    if (pos >= static_cast<double>(count)) return;
    visit(static_cast<std::size_t>(pos));
  }
}

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

// Planted-partition directed edges without self-loops.
EdgeSet planted_edges(Rng& rng, const std::vector<int>& labels, std::size_t k, double p_in, double p_out) {
  std::vector<std::vector<std::size_t>> blocks(k);
  for (std::size_t i = 0; i < labels.size(); ++i) blocks[static_cast<std::size_t>(labels[i])].push_back(i);
  EdgeSet edges;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto& rows = blocks[a];
      const auto& cols = blocks[b];
      if (cols.empty()) continue;
      sample_slots(rng, rows.size() * cols.size(), a == b ? p_in : p_out, [&](std::size_t slot) {
        const std::size_t i = rows[slot / cols.size()];
        const std::size_t j = cols[slot % cols.size()];
        if (i != j) edges.emplace(i, j);
      });
    }
  }
  return edges;
}

// Replaces round(noise * |E|) uniformly chosen edges by absent non-loop pairs.
void rewire(Rng& rng, EdgeSet& edges, std::size_t n, double noise) {
  if (noise <= 0.0 || edges.empty() || n < 2) return;
  std::vector<std::pair<std::size_t, std::size_t>> list(edges.begin(), edges.end());
  rng.shuffle(std::span(list));
  const auto flips = static_cast<std::size_t>(std::floor(noise * static_cast<double>(list.size()) + 0.5));
  const std::size_t capacity = n * (n - 1);
  for (std::size_t f = 0; f < flips && f < list.size(); ++f) {
    edges.erase(list[f]);
    if (edges.size() + 1 >= capacity) continue;
    while (true) {
      const auto i = static_cast<std::size_t>(rng.below(n));
      const auto j = static_cast<std::size_t>(rng.below(n));
      if (i != j && list[f] != std::make_pair(i, j) && edges.emplace(i, j).second) break;
    }
  }
}

Corpus make_corpus(Rng& rng, const UserIndex& users, const std::vector<int>& labels) {
  constexpr std::size_t kDocLength = 20;
  constexpr std::size_t kTopicWords = 30;
  constexpr std::size_t kCommonWords = 200;
  constexpr double kTopicShare = 0.6;
  Corpus corpus;
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto& doc = corpus[users.id(i)];
    for (std::size_t w = 0; w < kDocLength; ++w) {
      if (rng.bernoulli(kTopicShare)) {
        doc.push_back("topic" + std::to_string(labels[i]) + "_" + std::to_string(rng.below(kTopicWords)));
      } else {
        doc.push_back("common_" + std::to_string(rng.below(kCommonWords)));
      }
    }
  }
  return corpus;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_overlap < 1) invalid("n_overlap must be >= 1");
  if (k_true < 2) invalid("k_true must be >= 2");
  if (n_overlap < k_true) invalid("n_overlap must be >= k_true");
  if (p_in.size() != p_out.size() || directed_labels.size() != p_in.size()) invalid("directed layer lists differ in length");
  if (sim_in.size() != sim_out.size() || symmetric_labels.size() != sim_in.size()) invalid("symmetric layer lists differ in length");
  if (p_in.empty() && sim_in.empty()) invalid("at least one layer is required");
  for (std::size_t t = 0; t < p_in.size(); ++t) {
    if (!(0.0 <= p_out[t] && p_out[t] < p_in[t] && p_in[t] <= 1.0)) invalid("need 0 <= p_out < p_in <= 1");
  }
  for (std::size_t g = 0; g < sim_in.size(); ++g) {
    if (!(sim_in[g] >= 0.0 && sim_in[g] <= 1.0 && sim_out[g] >= 0.0 && sim_out[g] <= 1.0)) invalid("similarity means must lie in [0, 1]");
  }
  if (!(sim_noise >= 0.0)) invalid("sim_noise must be >= 0");
  if (network_labels.size() != network_extras.size()) invalid("network label and extras lists differ in length");
  if (!(0.0 <= network_p_out && network_p_out < network_p_in && network_p_in <= 1.0)) invalid("need 0 <= network_p_out < network_p_in <= 1");
  if (!(noise >= 0.0 && noise < 0.5)) invalid("noise must lie in [0, 0.5)");
  if (!(skew >= 0.0 && skew < 1.0)) invalid("skew must lie in [0, 1)");
  std::set<std::string> labels(directed_labels.begin(), directed_labels.end());
  labels.insert(symmetric_labels.begin(), symmetric_labels.end());
  if (labels.size() != directed_labels.size() + symmetric_labels.size()) invalid("layer labels must be unique");
  if (std::set<std::string>(network_labels.begin(), network_labels.end()).size() != network_labels.size()) {
    invalid("network labels must be unique");
  }
}

std::vector<std::size_t> balanced_blocks(std::size_t n, std::size_t k) {
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t c = 0; c < n % k; ++c) ++sizes[c];
  return sizes;
}

double expected_directed_edges(const std::vector<std::size_t>& block_sizes, double p_in, double p_out) {
  double n = 0.0, within = 0.0;
  for (auto b : block_sizes) {
    n += static_cast<double>(b);
    within += static_cast<double>(b) * static_cast<double>(b - (b > 0 ? 1 : 0));
  }
  const double across = n * (n - 1.0) - within;
  return p_in * within + p_out * across;
}

double calibrate_p_in(const std::vector<std::size_t>& block_sizes, double target_edges, double ratio) {
  const double per_unit = expected_directed_edges(block_sizes, 1.0, ratio);
  if (per_unit <= 0.0) invalid("cannot calibrate on an empty graph");
  const double p = target_edges / per_unit;
  if (p > 1.0) invalid("target edge count is unreachable");
  return p;
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  SynthData data;
  const std::size_t n = spec.n_overlap;
  const std::size_t k = spec.k_true;

  // Planted order: contiguous blocks over the sorted overlapping ids.
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(numbered("u", i));
  data.hybrid.users = UserIndex(ids);
  auto& truth = data.truth;
  for (std::size_t c = 0; const auto size : block_sizes(n, k, spec.skew)) {
    truth.overlap_labels.insert(truth.overlap_labels.end(), size, static_cast<int>(c));
    ++c;
  }

  const auto nn = static_cast<Eigen::Index>(n);
  for (std::size_t t = 0; t < spec.p(); ++t) {
    Rng layer_rng(derive_seed(spec.rng_seed, 100 + t));
    EdgeSet edges = planted_edges(layer_rng, truth.overlap_labels, k, spec.p_in[t], spec.p_out[t]);
    rewire(layer_rng, edges, n, spec.noise);
    Matrix a = Matrix::Zero(nn, nn);
    for (const auto& [i, j] : edges) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    data.hybrid.directed.push_back({spec.directed_labels[t], std::move(a)});
  }
  for (std::size_t g = 0; g < spec.q(); ++g) {
    Rng layer_rng(derive_seed(spec.rng_seed, 200 + g));
    Matrix x = Matrix::Identity(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      for (Eigen::Index j = i + 1; j < nn; ++j) {
        const bool same = truth.overlap_labels[static_cast<std::size_t>(i)] == truth.overlap_labels[static_cast<std::size_t>(j)];
        const double mean = same ? spec.sim_in[g] : spec.sim_out[g];
        const double v = std::clamp(mean + spec.sim_noise * layer_rng.normal(), 0.0, 1.0);
        x(i, j) = v;
        x(j, i) = v;
      }
    }
    data.hybrid.symmetric.push_back({spec.symmetric_labels[g], std::move(x)});
  }
  data.hybrid.validate();

  for (std::size_t net = 0; net < spec.network_labels.size(); ++net) {
    Rng net_rng(derive_seed(spec.rng_seed, 300 + net));
    const std::string& label = spec.network_labels[net];
    std::vector<std::string> local_ids = ids;
    std::vector<int> extra_labels;
    for (std::size_t x = 0; x < spec.network_extras[net]; ++x) {
      local_ids.push_back(numbered(label + "_x", x));
      extra_labels.push_back(static_cast<int>(net_rng.below(k)));
    }
    UserIndex users(local_ids);
    std::vector<int> local_labels(users.size());
    for (std::size_t i = 0; i < n; ++i) local_labels[users.ordinal(ids[i])] = truth.overlap_labels[i];
    for (std::size_t x = 0; x < extra_labels.size(); ++x) local_labels[users.ordinal(local_ids[n + x])] = extra_labels[x];

    EdgeSet edges = planted_edges(net_rng, local_labels, k, spec.network_p_in, spec.network_p_out);
    rewire(net_rng, edges, users.size(), spec.noise);
    std::vector<std::pair<std::size_t, std::size_t>> edge_list(edges.begin(), edges.end());

    std::vector<std::optional<std::size_t>> mapping(n);
    for (std::size_t i = 0; i < n; ++i) mapping[i] = users.ordinal(ids[i]);
    truth.overlap_mapping.push_back(std::move(mapping));
    truth.network_labels.push_back(local_labels);
    if (spec.corpora) data.corpora.push_back(make_corpus(net_rng, users, local_labels));
    data.networks.push_back(SingleNetwork::from_edges(label, std::move(users), edge_list));
  }
  return data;
}

OverlapSplit hide_overlap(const std::vector<int>& labels, std::size_t k, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorKind::Usage, "InvalidConfig", "visible fraction must lie in (0, 1)");
  Rng rng(seed);
  OverlapSplit split;
  split.visible.assign(labels.size(), false);
  split.hidden.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == static_cast<int>(t)) members.push_back(i);
    rng.shuffle(std::span(members));
    const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size()) + 0.5));
    for (std::size_t r = 0; r < members.size(); ++r) {
      if (r < keep) {
        split.visible[members[r]] = true;
      } else {
        split.hidden[t].push_back(members[r]);
      }
    }
    std::sort(split.hidden[t].begin(), split.hidden[t].end());
  }
  return split;
}

fs::path write_synth_dataset(const SynthData& data, const SynthSpec& spec, const fs::path& out_dir) {
  using Json = nlohmann::ordered_json;
  Json manifest;
  manifest["overlap_users"] = "overlap_users.txt";
  {
    std::string text;
    for (const auto& id : data.hybrid.users.ids()) text += id + "\n";
    write_text_file(out_dir / "overlap_users.txt", text);
  }
  manifest["directed"] = Json::array();
  for (const auto& layer : data.hybrid.directed) {
    const std::string file = "directed_" + layer.label + ".tsv";
    save_directed_layer(layer.weights, data.hybrid.users, out_dir / file);
    manifest["directed"].push_back({{"label", layer.label}, {"path", file}});
  }
  manifest["symmetric"] = Json::array();
  for (const auto& layer : data.hybrid.symmetric) {
    const std::string file = "symmetric_" + layer.label + ".tsv";
    save_symmetric_layer(layer.weights, data.hybrid.users, out_dir / file);
    manifest["symmetric"].push_back({{"label", layer.label}, {"path", file}});
  }
  manifest["networks"] = Json::array();
  for (std::size_t net = 0; net < data.networks.size(); ++net) {
    const auto& network = data.networks[net];
    const std::string edges = "network_" + network.label + ".tsv";
    const std::string users = "network_" + network.label + "_users.txt";
    save_single_network(network, out_dir / edges);
    std::string text;
    for (const auto& id : network.users.ids()) text += id + "\n";
    write_text_file(out_dir / users, text);
    Json entry = {{"label", network.label}, {"edges", edges}, {"users", users}};
    if (net < data.corpora.size()) {
      const std::string corpus = "corpus_" + network.label + ".tsv";
      save_corpus(data.corpora[net], out_dir / corpus);
      entry["corpus"] = corpus;
    }
    manifest["networks"].push_back(std::move(entry));
  }

  Json truth;
  truth["overlap"] = Json::object();
  for (std::size_t i = 0; i < data.hybrid.n(); ++i) truth["overlap"][data.hybrid.users.id(i)] = data.truth.overlap_labels[i];
  truth["networks"] = Json::object();
  for (std::size_t net = 0; net < data.networks.size(); ++net) {
    Json labels = Json::object();
    const auto& users = data.networks[net].users;
    for (std::size_t i = 0; i < users.size(); ++i) labels[users.id(i)] = data.truth.network_labels[net][i];
    truth["networks"][data.networks[net].label] = std::move(labels);
  }
  write_text_file(out_dir / "truth.json", truth.dump(2) + "\n");
  manifest["truth"] = "truth.json";
  manifest["spec"] = synth_spec_to_json(spec);

  const fs::path path = out_dir / "dataset.json";
  write_text_file(path, manifest.dump(2) + "\n");
  return path;
}

}  // namespace crossnet
