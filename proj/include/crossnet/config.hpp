#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossnet/io.hpp"
#include "crossnet/model.hpp"
#include "crossnet/solver.hpp"
#include "crossnet/synth.hpp"

namespace crossnet {

using Json = nlohmann::ordered_json;

Json synth_spec_to_json(const SynthSpec& spec);
// Fields absent from `j` keep their values from `base`.
SynthSpec synth_spec_from_json(const Json& j, SynthSpec base = {});

Json solver_config_to_json(const SolverConfig& cfg);
// Overlays fields present in `j` onto `cfg`. Weight lists may be given as a
// single number (broadcast to every layer).
void apply_solver_json(const Json& j, SolverConfig& cfg);

Json parse_json_file(const fs::path& path);

// Inputs on disk described by a dataset manifest (see write_synth_dataset).
struct Dataset {
  MultiplexNetwork hybrid;
  std::vector<SingleNetwork> networks;
  std::vector<std::optional<Corpus>> corpora;  // per network
  std::vector<std::vector<std::optional<std::size_t>>> overlap_mapping;  // [network][overlap ordinal]
  std::optional<std::vector<int>> truth_overlap;                   // planted labels, when known
  std::vector<std::optional<std::vector<int>>> truth_networks;     // per network
};

// Manifest keys: overlap_users, directed[{label,path}], symmetric[{label,path}],
// networks[{label,edges,users?,corpus?,mapping?}], truth?. Relative paths are
// resolved against the manifest's directory. A network's optional `mapping`
// is a TSV `overlap_id<TAB>local_id`; without it accounts match by id.
Dataset load_dataset(const fs::path& manifest_path);

// In-memory dataset over generated data, truth included.
Dataset dataset_from_synth(const SynthData& data);

}  // namespace crossnet
