#include <doctest.h>

#include <cmath>
#include <numeric>

#include "zipfirm/error.hpp"
#include "zipfirm/rng.hpp"
#include "zipfirm/weight_tree.hpp"

using zipfirm::WeightTree;

TEST_SUITE("weight_tree") {

TEST_CASE("prefix sums and find") {
    WeightTree t(std::vector<double>{1.0, 0.0, 2.0, 3.0});
    CHECK(t.total() == 6.0);
    CHECK(t.prefix(0) == 0.0);
    CHECK(t.prefix(3) == 3.0);
    CHECK(t.find(0.0) == 0);
    CHECK(t.find(0.999) == 0);
    CHECK(t.find(1.0) == 2);  // slot 1 has zero weight
    CHECK(t.find(2.999) == 2);
    CHECK(t.find(3.0) == 3);
    CHECK(t.find(5.999) == 3);
}

TEST_CASE("append builds the same nodes as bulk construction") {
    std::vector<double> w;
    WeightTree grown;
    zipfirm::CounterRng rng(3);
    for (int i = 0; i < 1000; ++i) {
        w.push_back(static_cast<double>(rng.below(10)));
        grown.append(w.back());
    }
    const WeightTree bulk(w);
    REQUIRE(grown.size() == bulk.size());
    for (std::size_t i = 0; i <= w.size(); ++i) CHECK(grown.prefix(i) == bulk.prefix(i));
}

TEST_CASE("sampling frequencies follow the weights") {
    const std::vector<double> w{1.0, 0.0, 3.0, 6.0};
    WeightTree t(w);
    zipfirm::CounterRng rng(11);
    std::vector<int> hits(w.size());
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++hits[t.sample(rng.uniform())];
    CHECK(hits[1] == 0);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double p = w[k] / 10.0;
        const double sd = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(hits[k] - n * p) <= 4.0 * sd + 1e-9);
    }
}

TEST_CASE("updates do not drift from the leaves") {
    WeightTree t;
    for (int i = 0; i < 500; ++i) t.append(1.0);
    zipfirm::CounterRng rng(5);
    for (int i = 0; i < 200000; ++i) t.set(rng.below(t.size()), 0.1 + 10.0 * rng.uniform());
    const auto leaves = t.leaves();
    const double exact = std::accumulate(leaves.begin(), leaves.end(), 0.0);
    CHECK(std::abs(t.total() - exact) <= 1e-9 * exact);
    CHECK(t.updates_since_rebuild() < WeightTree::kRebuildInterval);

    auto copy = t;
    copy.rebuild();
    CHECK(copy.updates_since_rebuild() == 0);
    CHECK(copy.nodes().size() == WeightTree(leaves).nodes().size());
}

TEST_CASE("restore reproduces the exact tree") {
    WeightTree t(std::vector<double>{0.5, 1.5, 2.5});
    t.set(1, 0.25);
    const auto r = WeightTree::restore({t.leaves().begin(), t.leaves().end()}, {t.nodes().begin(), t.nodes().end()},
                                       t.updates_since_rebuild());
    CHECK(r == t);
}

TEST_CASE("invalid weights are rejected") {
    WeightTree t(std::vector<double>{1.0});
    CHECK_THROWS_AS(t.set(0, -1.0), zipfirm::Error);
    CHECK_THROWS_AS(t.set(0, std::nan("")), zipfirm::Error);
    CHECK_THROWS_AS(t.append(INFINITY), zipfirm::Error);
    CHECK_THROWS(t.set(5, 1.0));
}

}
