#include <doctest.h>

#include "crossnet/baselines.hpp"
#include "crossnet/evaluate.hpp"
#include "crossnet/synth.hpp"
#include "support.hpp"

using namespace crossnet;

namespace {

void check_monotone(const std::vector<double>& obj) {
  REQUIRE(obj.size() >= 2);
  for (std::size_t i = 1; i < obj.size(); ++i) CHECK(obj[i] <= obj[i - 1] * (1.0 + 1e-9));
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("fusion symmetrizes directed layers and adds weighted symmetric layers") {
  crossnet::Rng rng(31);
  const auto net = testing::random_multiplex(rng, 7, 2, 1);
  FusionOptions fo;
  fo.directed_weights = {2.0, 0.5};
  fo.symmetric_weights = {3.0};
  const auto fn = fuse(net, fo);
  for (Eigen::Index i = 0; i < 7; ++i)
    for (Eigen::Index j = 0; j < 7; ++j) {
      double want = 0.0;
      want += 2.0 * 0.5 * (net.directed[0].weights(i, j) + net.directed[0].weights(j, i));
      want += 0.5 * 0.5 * (net.directed[1].weights(i, j) + net.directed[1].weights(j, i));
      want += 3.0 * net.symmetric[0].weights(i, j);
      CHECK(fn.fused(i, j) == doctest::Approx(want).epsilon(1e-14));
    }
  fo.include_symmetric = false;
  CHECK(fuse(net, fo).fused(0, 0) == doctest::Approx(0.0));
  CHECK(symmetric_views(net).size() == 3);
  CHECK(symmetric_views(net, false).size() == 2);
}

TEST_CASE("k-means separates well-separated rows and rejects degenerate data") {
  FusedNetwork fn;
  fn.n = 6;
  fn.fused = Matrix::Zero(6, 2);
  fn.fused << 0, 0, 0.1, 0, 0, 0.1, 10, 10, 10.1, 10, 10, 10.1;
  const auto r = kmeans_baseline(fn, 2, 4);
  CHECK(r.assignment.labels[0] == r.assignment.labels[2]);
  CHECK(r.assignment.labels[3] == r.assignment.labels[5]);
  CHECK(r.assignment.labels[0] != r.assignment.labels[3]);

  FusedNetwork flat;
  flat.n = 4;
  flat.fused = Matrix::Ones(4, 3);
  CHECK(testing::error_code_of([&] { kmeans_baseline(flat, 2, 1); }) == "DegenerateData");
}

TEST_CASE("property: NMF baselines are monotone, nonnegative and seed-deterministic") {
  crossnet::Rng rng(32);
  NmfOptions opt;
  opt.max_iter = 80;
  opt.rel_tol = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const auto net = testing::random_multiplex(rng, 10 + rng.below(20), 1 + rng.below(3), rng.below(2));
    const std::size_t k = 2 + rng.below(3);
    const auto views = symmetric_views(net);
    std::vector<double> lambda(views.size());
    for (auto& l : lambda) l = 0.2 + rng.uniform();

    const auto concat = concat_nmf(fuse(net), k, trial, opt);
    check_monotone(concat.objective_per_iter);
    CHECK(all_nonnegative(concat.assignment.membership));

    const auto col = col_nmf(views, k, lambda, trial, opt);
    check_monotone(col.objective_per_iter);
    const auto multi = multi_nmf(views, k, lambda, trial, opt);
    check_monotone(multi.objective_per_iter);

    CHECK(col_nmf(views, k, lambda, trial, opt).assignment.labels == col.assignment.labels);
    CHECK(multi_nmf(views, k, lambda, trial, opt).objective_per_iter == multi.objective_per_iter);
  }
}

TEST_CASE("consensus is the weighted mean") {
  Matrix a = Matrix::Constant(2, 2, 1.0), b = Matrix::Constant(2, 2, 4.0);
  const Matrix s = consensus({a, b}, {1.0, 2.0});
  CHECK(s(0, 0) == doctest::Approx(3.0));
  CHECK((consensus({a, a}, {5.0, 0.5}) - a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("random assignment is uniform-ish and seeded") {
  const auto a = random_assignment(4000, 4, 9);
  CHECK(a.labels == random_assignment(4000, 4, 9).labels);
  std::vector<int> counts(4, 0);
  for (int l : a.labels) ++counts[l];
  for (int c : counts) CHECK(std::abs(c - 1000) < 120);
  CHECK(testing::error_code_of([] { random_assignment(5, 0, 1); }) == "InvalidConfig");
}

TEST_CASE("baselines recover an easy planted partition") {
  SynthSpec spec;
  spec.n_overlap = 120;
  spec.k_true = 3;
  spec.rng_seed = 2;
  const auto data = generate(spec);
  const auto& truth = data.truth.overlap_labels;
  const auto fn = fuse(data.hybrid);
  const auto views = symmetric_views(data.hybrid);
  const std::vector<double> lambda(views.size(), 1.0);
  CHECK(nmi(truth, kmeans_baseline(fn, 3, 1).assignment.labels) > 0.8);
  CHECK(nmi(truth, concat_nmf(fn, 3, 1).assignment.labels) > 0.8);
  CHECK(nmi(truth, col_nmf(views, 3, lambda, 1).assignment.labels) > 0.8);
  CHECK(nmi(truth, multi_nmf(views, 3, lambda, 1).assignment.labels) > 0.6);
  CHECK(nmi(truth, random_assignment(120, 3, 1).labels) < 0.2);
}

}
