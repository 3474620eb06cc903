#include "crossnet/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "crossnet/error.hpp"

namespace crossnet {

namespace {

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Usage, "InvalidConfig", std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_weights(const Json& j, const char* key, std::vector<double>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_number()) {
    out.assign(out.size(), v.get<double>());
  } else {
    read_if(j, key, out);
  }
}

std::vector<std::string> read_id_list(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

}  // namespace

Json synth_spec_to_json(const SynthSpec& s) {
  Json j;
  j["n_overlap"] = s.n_overlap;
  j["k_true"] = s.k_true;
  j["directed_labels"] = s.directed_labels;
  j["p_in"] = s.p_in;
  j["p_out"] = s.p_out;
  j["symmetric_labels"] = s.symmetric_labels;
  j["sim_in"] = s.sim_in;
  j["sim_out"] = s.sim_out;
  j["sim_noise"] = s.sim_noise;
  j["network_labels"] = s.network_labels;
  j["network_extras"] = s.network_extras;
  j["network_p_in"] = s.network_p_in;
  j["network_p_out"] = s.network_p_out;
  j["noise"] = s.noise;
  j["skew"] = s.skew;
  j["corpora"] = s.corpora;
  j["rng_seed"] = s.rng_seed;
  return j;
}

SynthSpec synth_spec_from_json(const Json& j, SynthSpec s) {
  if (!j.is_object()) fail(ErrorKind::Usage, "InvalidConfig", "synthetic spec must be a JSON object");
  read_if(j, "n_overlap", s.n_overlap);
  read_if(j, "k_true", s.k_true);
  read_if(j, "directed_labels", s.directed_labels);
  read_if(j, "p_in", s.p_in);
  read_if(j, "p_out", s.p_out);
  read_if(j, "symmetric_labels", s.symmetric_labels);
  read_if(j, "sim_in", s.sim_in);
  read_if(j, "sim_out", s.sim_out);
  read_if(j, "sim_noise", s.sim_noise);
  read_if(j, "network_labels", s.network_labels);
  read_if(j, "network_extras", s.network_extras);
  read_if(j, "network_p_in", s.network_p_in);
  read_if(j, "network_p_out", s.network_p_out);
  read_if(j, "noise", s.noise);
  read_if(j, "skew", s.skew);
  read_if(j, "corpora", s.corpora);
  read_if(j, "rng_seed", s.rng_seed);
  return s;
}

Json solver_config_to_json(const SolverConfig& cfg) {
  Json j;
  j["k"] = cfg.k;
  j["a"] = cfg.a;
  j["b"] = cfg.b;
  j["c"] = cfg.c;
  j["d"] = cfg.d;
  j["max_iter"] = cfg.max_iter;
  j["rel_tol"] = cfg.rel_tol;
  j["epsilon"] = cfg.epsilon;
  j["floor"] = cfg.floor;
  j["rng_seed"] = cfg.rng_seed;
  j["consistency"] = cfg.consistency == ConsistencyForm::UserSimilarity ? "user" : "community_gram";
  j["normalize_consistency"] = cfg.normalize_consistency;
  j["normalization_chain_rule"] = cfg.normalization_chain_rule;
  return j;
}

void apply_solver_json(const Json& j, SolverConfig& cfg) {
  if (!j.is_object()) fail(ErrorKind::Usage, "InvalidConfig", "solver config must be a JSON object");
  read_if(j, "k", cfg.k);
  read_weights(j, "a", cfg.a);
  read_weights(j, "b", cfg.b);
  read_weights(j, "c", cfg.c);
  read_weights(j, "d", cfg.d);
  read_if(j, "max_iter", cfg.max_iter);
  read_if(j, "rel_tol", cfg.rel_tol);
  read_if(j, "epsilon", cfg.epsilon);
  read_if(j, "floor", cfg.floor);
  read_if(j, "rng_seed", cfg.rng_seed);
  if (j.contains("consistency")) {
    std::string form;
    read_if(j, "consistency", form);
    if (form == "user") {
      cfg.consistency = ConsistencyForm::UserSimilarity;
    } else if (form == "community_gram") {
      cfg.consistency = ConsistencyForm::CommunitySimilarity;
    } else {
      fail(ErrorKind::Usage, "InvalidConfig", "consistency must be 'user' or 'community_gram'");
    }
  }
  read_if(j, "normalize_consistency", cfg.normalize_consistency);
  read_if(j, "normalization_chain_rule", cfg.normalization_chain_rule);
}

Json parse_json_file(const fs::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorKind::Data, "MalformedJson", path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const fs::path& manifest_path) {
  const Json m = parse_json_file(manifest_path);
  const fs::path base = manifest_path.parent_path();
  auto resolve = [&](const Json& v) {
    const fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
  };

  Dataset ds;
  try {
    std::vector<LayerFile> directed, symmetric;
    if (m.contains("directed"))
      for (const auto& e : m.at("directed")) directed.push_back({e.at("label").get<std::string>(), resolve(e.at("path"))});
    if (m.contains("symmetric"))
      for (const auto& e : m.at("symmetric")) symmetric.push_back({e.at("label").get<std::string>(), resolve(e.at("path"))});
    std::optional<std::vector<std::string>> declared;
    if (m.contains("overlap_users")) declared = read_id_list(resolve(m.at("overlap_users")));
    ds.hybrid = load_multiplex(directed, symmetric, declared);

    std::optional<Json> truth;
    if (m.contains("truth")) truth = parse_json_file(resolve(m.at("truth")));
    if (truth && truth->contains("overlap")) {
      std::vector<int> labels(ds.hybrid.n(), kUnassigned);
      for (const auto& [id, label] : truth->at("overlap").items()) labels[ds.hybrid.users.ordinal(id)] = label.get<int>();
      ds.truth_overlap = std::move(labels);
    }

    if (m.contains("networks")) {
      for (const auto& e : m.at("networks")) {
        const std::string label = e.at("label").get<std::string>();
        std::vector<std::string> users;
        if (e.contains("users")) users = read_id_list(resolve(e.at("users")));
        ds.networks.push_back(load_single_network(label, resolve(e.at("edges")), users));
        const auto& net = ds.networks.back();

        if (e.contains("mapping")) {
          std::vector<std::optional<std::size_t>> mapping(ds.hybrid.n());
          std::istringstream in(read_text_file(resolve(e.at("mapping"))));
          std::string line;
          while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) fail(ErrorKind::Data, "MalformedRow", "mapping rows need overlap_id<TAB>local_id");
            mapping[ds.hybrid.users.ordinal(line.substr(0, tab))] = net.users.ordinal(line.substr(tab + 1));
          }
          ds.overlap_mapping.push_back(std::move(mapping));
        } else {
          std::vector<std::optional<std::size_t>> mapping(ds.hybrid.n());
          for (std::size_t i = 0; i < ds.hybrid.n(); ++i) mapping[i] = net.users.find(ds.hybrid.users.id(i));
          ds.overlap_mapping.push_back(std::move(mapping));
        }

        if (e.contains("corpus")) {
          ds.corpora.emplace_back(load_corpus(resolve(e.at("corpus"))));
        } else {
          ds.corpora.emplace_back(std::nullopt);
        }

        if (truth && truth->contains("networks") && truth->at("networks").contains(label)) {
          std::vector<int> labels(net.n(), kUnassigned);
          for (const auto& [id, l] : truth->at("networks").at(label).items()) labels[net.users.ordinal(id)] = l.get<int>();
          ds.truth_networks.emplace_back(std::move(labels));
        } else {
          ds.truth_networks.emplace_back(std::nullopt);
        }
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::Data, "MalformedJson", manifest_path.string() + ": " + e.what());
  }
  return ds;
}

Dataset dataset_from_synth(const SynthData& data) {
  Dataset ds;
  ds.hybrid = data.hybrid;
  ds.networks = data.networks;
  for (std::size_t net = 0; net < data.networks.size(); ++net) {
    if (net < data.corpora.size()) {
      ds.corpora.emplace_back(data.corpora[net]);
    } else {
      ds.corpora.emplace_back(std::nullopt);
    }
    ds.truth_networks.emplace_back(data.truth.network_labels[net]);
  }
  ds.overlap_mapping = data.truth.overlap_mapping;
  ds.truth_overlap = data.truth.overlap_labels;
  return ds;
}

}  // namespace crossnet
