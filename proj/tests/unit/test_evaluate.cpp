#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "crossnet/evaluate.hpp"
#include "support.hpp"

using namespace crossnet;

namespace {

using Docs = std::vector<std::vector<std::string>>;

// TF-IDF cosine written out term by term.
double tfidf_oracle(const Docs& a, const Docs& b) {
  std::map<std::string, double> ca, cb;
  for (const auto& d : a)
    for (const auto& w : d) ca[w] += 1;
  for (const auto& d : b)
    for (const auto& w : d) cb[w] += 1;
  std::set<std::string> vocab;
  for (const auto& [w, c] : ca) vocab.insert(w);
  for (const auto& [w, c] : cb) vocab.insert(w);
  double dot = 0, na = 0, nb = 0;
  for (const auto& w : vocab) {
    const double df = (ca.count(w) ? 1 : 0) + (cb.count(w) ? 1 : 0);
    const double idf = std::log((1.0 + 2.0) / (1.0 + df)) + 1.0;
    const double x = (ca.count(w) ? ca[w] : 0) * idf, y = (cb.count(w) ? cb[w] : 0) * idf;
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  return dot / std::sqrt(na * nb);
}

StubCommunitySet two_network_stubs(std::size_t n) {
  StubCommunitySet s;
  s.communities = {{}, {}};
  std::vector<std::optional<std::size_t>> mapping(n);
  for (std::size_t i = 0; i < n; ++i) mapping[i] = i;
  s.local_of_overlap = {mapping, mapping};
  return s;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("nmi examples") {
  const std::vector<int> a{0, 0, 1, 1, 2, 2};
  CHECK(nmi(a, a) == doctest::Approx(1.0));
  CHECK(nmi(a, {5, 5, 3, 3, 9, 9}) == doctest::Approx(1.0));
  CHECK(nmi({0, 0, 0, 0, 0, 0}, a) == 0.0);
  CHECK(nmi({0, 0, 0}, {1, 1, 1}) == 0.0);
  // [[5,0],[0,5]] with labels permuted.
  CHECK(nmi({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 0, 0, 0, 0, 0}) == doctest::Approx(1.0));
  // Reference value from scikit-learn (arithmetic normalization).
  CHECK(nmi({0, 0, 0, 1, 1, 1, 2, 2, 2, 2}, {0, 0, 1, 1, 1, 2, 2, 2, 0, 0}) ==
        doctest::Approx(0.3946483716358942).epsilon(1e-12));
  CHECK(nmi({0, 1, 0, 1}, {0, 0, 1, 1}) == doctest::Approx(0.0));
  CHECK(testing::error_code_of([] { nmi({0, 1}, {0}); }) == "LengthMismatch");
}

TEST_CASE("property: nmi is symmetric, bounded and label-permutation invariant") {
  crossnet::Rng rng(81);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(40), ka = 1 + rng.below(5), kb = 1 + rng.below(5);
    std::vector<int> a(n), b(n);
    for (auto& x : a) x = static_cast<int>(rng.below(ka));
    for (auto& x : b) x = static_cast<int>(rng.below(kb));
    const double v = nmi(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(nmi(b, a)).epsilon(1e-12));
    std::vector<int> perm(ka);
    for (std::size_t c = 0; c < ka; ++c) perm[c] = static_cast<int>(ka - 1 - c) * 7 + 3;
    std::vector<int> a2(n);
    for (std::size_t i = 0; i < n; ++i) a2[i] = perm[a[i]];
    CHECK(nmi(a2, b) == doctest::Approx(v).epsilon(1e-12));
    if (std::set<int>(a.begin(), a.end()).size() > 1) CHECK(nmi(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("text similarity examples") {
  const Docs a{{"apple", "pear"}, {"apple"}};
  CHECK(text_similarity(a, a) == doctest::Approx(1.0));
  CHECK(text_similarity(a, {{"kiwi", "plum"}}) == 0.0);
  CHECK(testing::error_code_of([&] { text_similarity(a, {}); }) == "EmptyCorpus");
  CHECK(testing::error_code_of([&] { text_similarity({{}}, a); }) == "EmptyCorpus");
}

TEST_CASE("text similarity matches the TF-IDF oracle on half-shared vocabularies") {
  crossnet::Rng rng(82);
  for (int trial = 0; trial < 30; ++trial) {
    Docs a, b;
    for (int d = 0; d < 4; ++d) {
      a.emplace_back();
      b.emplace_back();
      for (int w = 0; w < 10; ++w) {
        const bool shared = rng.bernoulli(0.5);
        a.back().push_back((shared ? "s" : "a") + std::to_string(rng.below(8)));
        b.back().push_back((rng.bernoulli(0.5) ? "s" : "b") + std::to_string(rng.below(8)));
      }
    }
    CHECK(std::abs(text_similarity(a, b) - tfidf_oracle(a, b)) <= 1e-10);
    CHECK(text_similarity(a, b) == doctest::Approx(text_similarity(b, a)).epsilon(1e-14));
    Docs shuffled = a;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(text_similarity(shuffled, b) == doctest::Approx(text_similarity(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("discovery ratio counts hidden users found in both networks") {
  auto stubs = two_network_stubs(20);
  std::vector<std::vector<std::size_t>> hidden{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {}};
  NetworkExtension w{"w", {{0, 1, 2, 3, 4, 5, 6, 7}, {}}, {}, {}};
  NetworkExtension z{"z", {{0, 1, 2, 3, 4, 5, 6, 9}, {}}, {}, {}};
  const auto conj = discovery_ratio(hidden, stubs, {w, z});
  CHECK(conj[0] == doctest::Approx(0.7));
  CHECK_FALSE(conj[1].has_value());
  CHECK(discovery_ratio(hidden, stubs, {w, z}, DiscoveryRule::Disjunction)[0] == doctest::Approx(0.9));
  NetworkExtension none{"z", {{}, {}}, {}, {}};
  CHECK(discovery_ratio(hidden, stubs, {w, none})[0] == 0.0);
  CHECK(defined_mean(conj) == doctest::Approx(0.7));
  CHECK_FALSE(defined_mean({std::nullopt}).has_value());
}

TEST_CASE("property: discovery ratio never drops when communities grow") {
  crossnet::Rng rng(83);
  const std::size_t n = 40;
  const auto stubs = two_network_stubs(n);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::size_t>> hidden(2);
    for (std::size_t i = 0; i < n; ++i)
      if (rng.bernoulli(0.3)) hidden[rng.below(2)].push_back(i);
    NetworkExtension w{"w", {{}, {}}, {}, {}}, z{"z", {{}, {}}, {}, {}};
    for (auto* e : {&w, &z})
      for (auto& c : e->communities)
        for (std::size_t i = 0; i < n; ++i)
          if (rng.bernoulli(0.4)) c.push_back(i);
    const auto before = discovery_ratio(hidden, stubs, {w, z});
    for (auto* e : {&w, &z})
      for (auto& c : e->communities) {
        for (std::size_t i = 0; i < n; ++i)
          if (rng.bernoulli(0.2)) c.push_back(i);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
      }
    const auto after = discovery_ratio(hidden, stubs, {w, z});
    for (std::size_t t = 0; t < 2; ++t)
      if (before[t]) CHECK(*after[t] >= *before[t]);
  }
}

TEST_CASE("community text similarity uses only non-overlapping members") {
  StubCommunitySet stubs;
  stubs.communities = {{0}};
  stubs.local_of_overlap = {{std::size_t{0}}, {std::size_t{0}}};
  const UserIndex w({"a", "wx"}), z({"a", "zx"});
  NetworkExtension ew{"w", {{0, 1}}, {}, {}}, ez{"z", {{0, 1}}, {}, {}};
  Corpus cw{{"a", {"noise", "noise"}}, {"wx", {"cat", "dog"}}};
  Corpus cz{{"a", {"other"}}, {"zx", {"cat", "dog"}}};
  const auto sim = community_text_similarity({ew, ez}, stubs, {&w, &z}, {cw, cz});
  CHECK(sim[0] == doctest::Approx(1.0));
  CHECK_FALSE(community_text_similarity({ew, ez}, stubs, {&w, &z}, {cw, std::nullopt})[0].has_value());
}

TEST_CASE("report formats") {
  EvaluationReport r;
  r.method = "cmn_nmf";
  r.k = 2;
  r.communities = {{0, 5, 2, 0.5, std::nullopt}, {1, 3, 0, std::nullopt, std::nullopt}};
  r.mean_discovery = 0.5;
  r.nmi = 1.0;
  CHECK(report_csv({r}) ==
        "method,k,community,members,hidden,discovery_ratio,text_similarity,nmi\n"
        "cmn_nmf,2,0,5,2,0.500000000,,\n"
        "cmn_nmf,2,1,3,0,,,\n"
        "cmn_nmf,2,mean,,,0.500000000,,1.000000000\n");
  CHECK(fig_discovery_csv({r}) == "method,k,mean_discovery_ratio\ncmn_nmf,2,0.500000000\n");
  CHECK(fig_similarity_csv({r}) == "method,k,mean_text_similarity\ncmn_nmf,2,\n");
  CHECK(report_json({r}).find("\"mean_text_similarity\": null") != std::string::npos);
}

}
