#include <doctest.h>

#include <cmath>
#include <set>

#include "crossnet/synth.hpp"
#include "support.hpp"

using namespace crossnet;

namespace {

// Observed within/across directed densities of one layer.
std::pair<double, double> densities(const Matrix& a, const std::vector<int>& labels) {
  double in_edges = 0, in_slots = 0, out_edges = 0, out_slots = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j) continue;
      if (labels[i] == labels[j]) {
        in_edges += a(i, j), in_slots += 1;
      } else {
        out_edges += a(i, j), out_slots += 1;
      }
    }
  return {in_edges / in_slots, out_edges / out_slots};
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("balanced blocks and expected edge counts") {
  CHECK(balanced_blocks(10, 3) == std::vector<std::size_t>{4, 3, 3});
  // Two blocks of 3: 12 ordered within pairs, 18 across.
  CHECK(expected_directed_edges({3, 3}, 0.5, 0.1) == doctest::Approx(12 * 0.5 + 18 * 0.1));
  const double p = calibrate_p_in({50, 50, 50, 50}, 2000.0, 0.1);
  CHECK(expected_directed_edges({50, 50, 50, 50}, p, 0.1 * p) == doctest::Approx(2000.0));
  CHECK(testing::error_code_of([] { calibrate_p_in({2, 2}, 1000.0, 0.1); }) == "InvalidSpec");
}

TEST_CASE("planted layers have the requested densities") {
  SynthSpec spec;
  spec.n_overlap = 400;
  spec.rng_seed = 13;
  const auto data = generate(spec);
  const auto& labels = data.truth.overlap_labels;
  for (const auto& layer : data.hybrid.directed) {
    const auto [din, dout] = densities(layer.weights, labels);
    // 4 blocks of 100: 39600 within slots, 120000 across; 5 sigma bounds.
    CHECK(std::abs(din - 0.3) < 5 * std::sqrt(0.3 * 0.7 / 39600));
    CHECK(std::abs(dout - 0.02) < 5 * std::sqrt(0.02 * 0.98 / 120000));
  }
  const Matrix& x = data.hybrid.symmetric[0].weights;
  CHECK(x.diagonal().minCoeff() == 1.0);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
  CHECK((x - x.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generation is deterministic per seed") {
  SynthSpec spec;
  spec.n_overlap = 60;
  spec.corpora = true;
  spec.rng_seed = 4;
  const auto a = generate(spec), b = generate(spec);
  CHECK(a.hybrid.directed[1].weights == b.hybrid.directed[1].weights);
  CHECK(a.networks[1].out_edges == b.networks[1].out_edges);
  CHECK(a.corpora == b.corpora);
  spec.rng_seed = 5;
  CHECK(generate(spec).hybrid.directed[1].weights != a.hybrid.directed[1].weights);
}

TEST_CASE("single networks contain every overlapping user plus extras") {
  SynthSpec spec;
  spec.n_overlap = 50;
  spec.network_extras = {7, 12};
  spec.corpora = true;
  const auto data = generate(spec);
  REQUIRE(data.networks.size() == 2);
  for (std::size_t net = 0; net < 2; ++net) {
    const auto& users = data.networks[net].users;
    CHECK(users.size() == 50 + spec.network_extras[net]);
    for (std::size_t i = 0; i < 50; ++i) {
      const auto local = data.truth.overlap_mapping[net][i];
      REQUIRE(local.has_value());
      CHECK(users.id(*local) == data.hybrid.users.id(i));
      CHECK(data.truth.network_labels[net][*local] == data.truth.overlap_labels[i]);
    }
    // Documents draw topic words from the author's own community only.
    for (std::size_t l = 0; l < users.size(); ++l) {
      const std::string own = "topic" + std::to_string(data.truth.network_labels[net][l]) + "_";
      for (const auto& tok : data.corpora[net].at(users.id(l)))
        CHECK((tok.rfind(own, 0) == 0 || tok.rfind("common_", 0) == 0));
    }
  }
}

TEST_CASE("noise rewires edges but keeps their number") {
  SynthSpec spec;
  spec.n_overlap = 80;
  spec.rng_seed = 21;
  const auto clean = generate(spec);
  spec.noise = 0.3;
  const auto noisy = generate(spec);
  for (std::size_t t = 0; t < spec.p(); ++t) {
    CHECK(noisy.hybrid.directed[t].weights.sum() == clean.hybrid.directed[t].weights.sum());
    CHECK(noisy.hybrid.directed[t].weights.diagonal().sum() == 0.0);
    const auto [din_c, dout_c] = densities(clean.hybrid.directed[t].weights, clean.truth.overlap_labels);
    const auto [din_n, dout_n] = densities(noisy.hybrid.directed[t].weights, noisy.truth.overlap_labels);
    CHECK(din_n < din_c);
    CHECK(dout_n > dout_c);
  }
}

TEST_CASE("skewed block sizes still cover every user") {
  SynthSpec spec;
  spec.n_overlap = 100;
  spec.skew = 0.5;
  const auto data = generate(spec);
  std::vector<std::size_t> sizes(4, 0);
  for (int l : data.truth.overlap_labels) ++sizes[l];
  CHECK(sizes[0] + sizes[1] + sizes[2] + sizes[3] == 100);
  CHECK(sizes[0] > sizes[3]);
  CHECK(sizes[3] >= 1);
}

TEST_CASE("invalid specs are rejected") {
  auto bad = [](auto mutate) {
    SynthSpec s;
    mutate(s);
    return testing::error_code_of([&] { generate(s); });
  };
  CHECK(bad([](SynthSpec& s) { s.k_true = 1; }) == "InvalidSpec");
  CHECK(bad([](SynthSpec& s) { s.p_out[0] = 0.5; }) == "InvalidSpec");
  CHECK(bad([](SynthSpec& s) { s.p_in.pop_back(); }) == "InvalidSpec");
  CHECK(bad([](SynthSpec& s) { s.noise = 0.7; }) == "InvalidSpec");
  CHECK(bad([](SynthSpec& s) { s.symmetric_labels = {"follow"}; }) == "InvalidSpec");
  CHECK(bad([](SynthSpec& s) { s.n_overlap = 3; }) == "InvalidSpec");
}

TEST_CASE("property: hide_overlap keeps round-half-up of each community visible") {
  crossnet::Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(80), k = 1 + rng.below(6);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.below(k));
    const double fraction = 0.05 + 0.9 * rng.uniform();
    const auto split = hide_overlap(labels, k, fraction, trial);
    for (std::size_t t = 0; t < k; ++t) {
      std::size_t size = 0, visible = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == static_cast<int>(t)) ++size, visible += split.visible[i] ? 1 : 0;
      CHECK(visible == static_cast<std::size_t>(std::floor(fraction * size + 0.5)));
      CHECK(split.hidden[t].size() == size - visible);
      for (auto h : split.hidden[t]) {
        CHECK(labels[h] == static_cast<int>(t));
        CHECK_FALSE(split.visible[h]);
      }
    }
  }
  CHECK(testing::error_code_of([] { hide_overlap({0, 1}, 2, 1.0, 0); }) == "InvalidConfig");
}

}
