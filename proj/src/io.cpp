#include "crossnet/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crossnet/error.hpp"

namespace crossnet {

namespace {

using Json = nlohmann::json;

constexpr double kSymmetryTolerance = 1e-9;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "IoFailure", "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

double parse_weight(const std::string& text, const fs::path& path) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::Data, "MalformedRow", "bad number '" + text + "' in " + path.string());
  }
  if (used != text.size() || !std::isfinite(value)) {
    fail(ErrorKind::Data, "MalformedRow", "bad number '" + text + "' in " + path.string());
  }
  if (value < 0.0) fail(ErrorKind::Data, "NegativeWeight", "negative weight in " + path.string());
  return value;
}

struct Triple {
  std::string a, b;
  double w;
};

std::vector<Triple> read_triples(const fs::path& path, bool weight_optional) {
  std::vector<Triple> out;
  for (const auto& line : read_lines(path)) {
    auto f = split(line, '\t');
    if (f.size() == 2 && weight_optional) {
      out.push_back({f[0], f[1], 1.0});
    } else if (f.size() == 3) {
      out.push_back({f[0], f[1], parse_weight(f[2], path)});
    } else {
      fail(ErrorKind::Data, "MalformedRow", "expected 3 tab-separated fields in " + path.string());
    }
  }
  return out;
}

bool looks_like_dense_csv(const fs::path& path) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.find('\t') == std::string::npos && first.find(',') != std::string::npos;
}

struct DenseCsv {
  std::vector<std::string> ids;
  Matrix values;
};

DenseCsv read_dense_csv(const fs::path& path) {
  auto lines = read_lines(path);
  if (lines.empty()) fail(ErrorKind::Data, "MalformedRow", "empty similarity file " + path.string());
  DenseCsv out;
  out.ids = split(lines[0], ',');
  // Allow a leading blank cell ("",a,b,...) for files with a row-id column.
  const bool row_ids = !out.ids.empty() && out.ids.front().empty();
  if (row_ids) out.ids.erase(out.ids.begin());
  const std::size_t n = out.ids.size();
  if (lines.size() != n + 1) {
    fail(ErrorKind::Data, "MalformedRow", "dense similarity file must have one row per header id: " + path.string());
  }
  out.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    auto f = split(lines[r + 1], ',');
    std::size_t offset = 0;
    if (f.size() == n + 1) {
      if (f[0] != out.ids[r]) fail(ErrorKind::Data, "MalformedRow", "row id mismatch in " + path.string());
      offset = 1;
    } else if (f.size() != n) {
      fail(ErrorKind::Data, "MalformedRow", "wrong column count in " + path.string());
    }
    for (std::size_t c = 0; c < n; ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_weight(f[c + offset], path);
    }
  }
  return out;
}

// Sum of values independent of their order.
double order_free_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

MultiplexNetwork load_multiplex(const std::vector<LayerFile>& directed, const std::vector<LayerFile>& symmetric,
                                const std::optional<std::vector<std::string>>& declared_users) {
  if (directed.empty() && symmetric.empty()) fail(ErrorKind::Usage, "NoLayers", "no layer files given");

  std::vector<std::vector<Triple>> directed_rows;
  for (const auto& file : directed) directed_rows.push_back(read_triples(file.path, false));

  struct SymInput {
    std::vector<Triple> triples;
    std::optional<DenseCsv> dense;
  };
  std::vector<SymInput> sym_inputs;
  for (const auto& file : symmetric) {
    SymInput in;
    const bool dense = file.format == SymmetricFormat::DenseCsv ||
                       (file.format == SymmetricFormat::Auto && looks_like_dense_csv(file.path));
    if (dense) {
      in.dense = read_dense_csv(file.path);
    } else {
      in.triples = read_triples(file.path, false);
    }
    sym_inputs.push_back(std::move(in));
  }

  MultiplexNetwork net;
  if (declared_users) {
    net.users = UserIndex(*declared_users);
  } else {
    std::vector<std::string> ids;
    for (const auto& rows : directed_rows)
      for (const auto& t : rows) {
        ids.push_back(t.a);
        ids.push_back(t.b);
      }
    for (const auto& in : sym_inputs) {
      if (in.dense) ids.insert(ids.end(), in.dense->ids.begin(), in.dense->ids.end());
      for (const auto& t : in.triples) {
        ids.push_back(t.a);
        ids.push_back(t.b);
      }
    }
    net.users = UserIndex(std::move(ids));
  }
  const auto n = static_cast<Eigen::Index>(net.users.size());

  for (std::size_t l = 0; l < directed.size(); ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
    for (const auto& t : directed_rows[l]) {
      cells[{net.users.ordinal(t.a), net.users.ordinal(t.b)}].push_back(t.w);
    }
    Matrix m = Matrix::Zero(n, n);
    for (auto& [ij, values] : cells) {
      m(static_cast<Eigen::Index>(ij.first), static_cast<Eigen::Index>(ij.second)) = order_free_sum(values);
    }
    net.directed.push_back({directed[l].label, std::move(m)});
  }

  for (std::size_t l = 0; l < symmetric.size(); ++l) {
    const auto& in = sym_inputs[l];
    const auto& path = symmetric[l].path;
    Matrix m = Matrix::Zero(n, n);
    if (in.dense) {
      std::vector<Eigen::Index> ord;
      for (const auto& id : in.dense->ids) ord.push_back(static_cast<Eigen::Index>(net.users.ordinal(id)));
      for (std::size_t r = 0; r < ord.size(); ++r)
        for (std::size_t c = 0; c < ord.size(); ++c)
          m(ord[r], ord[c]) = in.dense->values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    } else {
      std::map<std::pair<std::size_t, std::size_t>, double> given;
      for (const auto& t : in.triples) {
        auto key = std::make_pair(net.users.ordinal(t.a), net.users.ordinal(t.b));
        if (!given.emplace(key, t.w).second) {
          fail(ErrorKind::Data, "DuplicateEntry", "pair listed twice in " + path.string());
        }
      }
      for (const auto& [ij, w] : given) {
        const auto i = static_cast<Eigen::Index>(ij.first), j = static_cast<Eigen::Index>(ij.second);
        m(i, j) = w;
        if (!given.count({ij.second, ij.first})) m(j, i) = w;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (std::abs(m(i, j) - m(j, i)) > kSymmetryTolerance) {
          fail(ErrorKind::Data, "AsymmetricInput",
               "layer '" + symmetric[l].label + "' differs from its transpose at (" + net.users.id(i) + ", " +
                   net.users.id(j) + ")");
        }
        const double avg = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = avg;
        m(j, i) = avg;
      }
    }
    net.symmetric.push_back({symmetric[l].label, std::move(m)});
  }

  net.validate();
  return net;
}

namespace {

void write_triples(const Matrix& w, const UserIndex& users, const fs::path& path, bool upper_only) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = upper_only ? i : 0; j < w.cols(); ++j) {
      if (w(i, j) == 0.0) continue;
      out << users.id(static_cast<std::size_t>(i)) << '\t' << users.id(static_cast<std::size_t>(j)) << '\t'
          << format_fixed(w(i, j)) << '\n';
    }
  }
  write_text_file(path, out.str());
}

}  // namespace

void save_directed_layer(const Matrix& weights, const UserIndex& users, const fs::path& path) {
  write_triples(weights, users, path, false);
}

void save_symmetric_layer(const Matrix& weights, const UserIndex& users, const fs::path& path) {
  write_triples(weights, users, path, true);
}

SingleNetwork load_single_network(const std::string& label, const fs::path& path,
                                  const std::vector<std::string>& extra_users) {
  auto lines = read_lines(path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::string> ids = extra_users;
  for (const auto& line : lines) {
    auto f = split(line, '\t');
    if (f.size() < 2 || f.size() > 3) fail(ErrorKind::Data, "MalformedRow", "expected src<TAB>dst in " + path.string());
    if (f.size() == 3) parse_weight(f[2], path);
    rows.emplace_back(f[0], f[1]);
    ids.push_back(f[0]);
    ids.push_back(f[1]);
  }
  UserIndex users(std::move(ids));
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(rows.size());
  for (const auto& [a, b] : rows) edges.emplace_back(users.ordinal(a), users.ordinal(b));
  return SingleNetwork::from_edges(label, std::move(users), edges);
}

void save_single_network(const SingleNetwork& net, const fs::path& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < net.n(); ++i)
    for (auto j : net.out_edges[i]) out << net.users.id(i) << '\t' << net.users.id(j) << "\t1\n";
  write_text_file(path, out.str());
}

void save_assignment(const CommunityAssignment& a, const UserIndex& users, const fs::path& stem) {
  if (users.size() != a.n()) fail(ErrorKind::Data, "DimensionMismatch", "assignment and user index differ in size");
  std::ostringstream csv;
  csv << "user_id,label\n";
  for (std::size_t i = 0; i < a.n(); ++i) csv << users.id(i) << ',' << a.labels[i] << '\n';
  write_text_file(fs::path(stem.string() + ".csv"), csv.str());

  // Keys in sorted order; numbers in fixed 9-digit format.
  std::ostringstream js;
  js << "{\n  \"k\": " << a.k << ",\n  \"labels\": [";
  for (std::size_t i = 0; i < a.n(); ++i) js << (i ? "," : "") << a.labels[i];
  js << "],\n  \"membership\": [";
  for (Eigen::Index i = 0; i < a.membership.rows(); ++i) {
    js << (i ? ",\n    [" : "\n    [");
    for (Eigen::Index j = 0; j < a.membership.cols(); ++j) js << (j ? "," : "") << format_fixed(a.membership(i, j));
    js << "]";
  }
  js << (a.n() ? "\n  ],\n  \"users\": [" : "],\n  \"users\": [");
  for (std::size_t i = 0; i < a.n(); ++i) js << (i ? "," : "") << Json(users.id(i)).dump();
  js << "]\n}\n";
  write_text_file(fs::path(stem.string() + ".json"), js.str());
}

CommunityAssignment load_assignment(const fs::path& json_path, UserIndex* users_out) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(json_path));
  } catch (const Json::exception& e) {
    fail(ErrorKind::Data, "MalformedJson", json_path.string() + ": " + e.what());
  }
  CommunityAssignment a;
  try {
    a.k = doc.at("k").get<std::size_t>();
    const auto& rows = doc.at("membership");
    const auto n = static_cast<Eigen::Index>(rows.size());
    a.membership = Matrix::Zero(n, static_cast<Eigen::Index>(a.k));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (row.size() != a.k) fail(ErrorKind::Data, "DimensionMismatch", "membership row width != k");
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(a.k); ++j) a.membership(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    if (doc.contains("labels")) {
      a.labels = doc.at("labels").get<std::vector<int>>();
    } else {
      a.labels = harden(a.membership);
    }
    if (a.labels.size() != static_cast<std::size_t>(n)) fail(ErrorKind::Data, "DimensionMismatch", "labels length != rows");
    if (users_out) *users_out = UserIndex(doc.at("users").get<std::vector<std::string>>());
  } catch (const Json::exception& e) {
    fail(ErrorKind::Data, "MalformedJson", json_path.string() + ": " + e.what());
  }
  return a;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Corpus load_corpus(const fs::path& path) {
  Corpus corpus;
  for (const auto& line : read_lines(path)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::Data, "MalformedRow", "expected user<TAB>text in " + path.string());
    auto tokens = tokenize(line.substr(tab + 1));
    auto& doc = corpus[line.substr(0, tab)];
    doc.insert(doc.end(), tokens.begin(), tokens.end());
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& path) {
  std::ostringstream out;
  for (const auto& [user, tokens] : corpus) {
    out << user << '\t';
    for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  // Values that round to zero print without a sign.
  if (buf[0] == '-' && std::strspn(buf + 1, "0.") == std::strlen(buf + 1)) return buf + 1;
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "IoFailure", "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::Io, "IoFailure", "write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "IoFailure", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace crossnet
