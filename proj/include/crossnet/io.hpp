#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossnet/model.hpp"

namespace crossnet {

namespace fs = std::filesystem;

enum class SymmetricFormat { Auto, Triples, DenseCsv };

struct LayerFile {
  std::string label;
  fs::path path;
  SymmetricFormat format = SymmetricFormat::Auto;  // symmetric layers only
};

// Reads TSV `src<TAB>dst<TAB>weight` directed layers and symmetric layers
// (TSV triples or dense CSV with a header row of ids). The user index is the
// sorted union of all ids, or `declared_users` when given (ids outside it are
// UnknownUser errors).
MultiplexNetwork load_multiplex(const std::vector<LayerFile>& directed,
                                const std::vector<LayerFile>& symmetric,
                                const std::optional<std::vector<std::string>>& declared_users = std::nullopt);

// Directed layer as TSV triples, zero entries omitted, rows in ordinal order.
void save_directed_layer(const Matrix& weights, const UserIndex& users, const fs::path& path);
// Symmetric layer as TSV triples with i <= j, zero entries omitted.
void save_symmetric_layer(const Matrix& weights, const UserIndex& users, const fs::path& path);

// Follow-edge TSV (`src<TAB>dst` with an optional weight column that is ignored).
// Users listed in `extra_users` are added even when they have no edges.
SingleNetwork load_single_network(const std::string& label, const fs::path& path,
                                  const std::vector<std::string>& extra_users = {});
void save_single_network(const SingleNetwork& net, const fs::path& path);

// Writes `<stem>.csv` (user_id,label) and `<stem>.json`.
void save_assignment(const CommunityAssignment& a, const UserIndex& users, const fs::path& stem);
// Reads the JSON document written by save_assignment.
CommunityAssignment load_assignment(const fs::path& json_path, UserIndex* users_out = nullptr);

// Per-user token documents: `user_id<TAB>text`, one line per user (lines for
// the same user are concatenated).
using Corpus = std::map<std::string, std::vector<std::string>>;
Corpus load_corpus(const fs::path& path);
void save_corpus(const Corpus& corpus, const fs::path& path);

// Lowercase + whitespace split.
std::vector<std::string> tokenize(const std::string& text);

// Fixed 9-digit decimal formatting used by every numeric output.
std::string format_fixed(double value, int digits = 9);

void write_text_file(const fs::path& path, const std::string& content);
std::string read_text_file(const fs::path& path);

}  // namespace crossnet
