#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gspf/core.hpp"
#include "gspf/fpca.hpp"
#include "gspf/refine.hpp"
#include "gspf/rng.hpp"
#include "gspf/tuning.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace gspf;

namespace {

// Grid {0, 1/2, 1} has trapezoid weights (1/4, 1/2, 1/4) summing to one, so
// curves that are constant across the grid keep their plain absolute value
// as L2 norm; the spec's unit-weight CUSUM examples read off directly.
FunctionalSequence unit_weight_seq(const std::vector<double>& levels) {
    FunctionalSequence seq;
    seq.grid.points.resize(3);
    seq.grid.points << 0.0, 0.5, 1.0;
    seq.values.resize(static_cast<int>(levels.size()), 3);
    for (std::size_t t = 0; t < levels.size(); ++t) {
        seq.values.row(static_cast<int>(t)).setConstant(levels[t]);
    }
    return seq;
}

}  // namespace

TEST_CASE("merge_candidates splits at gaps larger than kappa") {
    ChangePointSet candidates({10, 11, 13, 40});
    const auto clusters = merge_candidates(candidates, 2, 50);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].members == std::vector<int>{10, 11, 13});
    CHECK(clusters[1].members == std::vector<int>{40});
    CHECK(clusters[0].lo == 1);
    CHECK(clusters[0].hi == 26);  // midpoint toward the next cluster
    CHECK(clusters[1].hi == 50);
}

TEST_CASE("merge_candidates with kappa zero yields singletons") {
    ChangePointSet candidates({4, 5, 9, 12});
    const auto clusters = merge_candidates(candidates, 0, 20);
    REQUIRE(clusters.size() == 4);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK(clusters[i].members.size() == 1);
    }
}

TEST_CASE("merge_candidates of nothing is nothing") {
    CHECK(merge_candidates(ChangePointSet{}, 3, 10).empty());
}

TEST_CASE("merge_candidates forms a partition with bracketing windows") {
    Rng rng(83);
    for (int rep = 0; rep < 30; ++rep) {
        const int T = 30 + rng.uniform_int(0, 70);
        ChangePointSet candidates;
        const int n = rng.uniform_int(0, 12);
        for (int i = 0; i < n; ++i) candidates.insert(rng.uniform_int(2, T));
        const int kappa = rng.uniform_int(0, 6);
        const auto clusters = merge_candidates(candidates, kappa, T);

        std::vector<int> recovered;
        for (const auto& cluster : clusters) {
            CHECK(!cluster.members.empty());
            CHECK(cluster.lo <= cluster.members.front());
            CHECK(cluster.members.back() <= cluster.hi);
            for (std::size_t i = 1; i < cluster.members.size(); ++i) {
                CHECK(cluster.members[i] - cluster.members[i - 1] <= kappa);
            }
            recovered.insert(recovered.end(), cluster.members.begin(), cluster.members.end());
        }
        CHECK(recovered == candidates.indices());
        for (std::size_t c = 1; c < clusters.size(); ++c) {
            CHECK(clusters[c].members.front() - clusters[c - 1].members.back() > kappa);
        }
    }
}

TEST_CASE("cusum_statistic hand example") {
    const FunctionalSequence seq = unit_weight_seq({0, 0, 1, 1});
    CHECK(cusum_statistic(seq, 1, 4, 1) == doctest::Approx(0.25));
    CHECK(cusum_statistic(seq, 1, 4, 2) == doctest::Approx(0.5));
    CHECK(cusum_statistic(seq, 1, 4, 3) == doctest::Approx(0.25));
}

TEST_CASE("cusum_statistic is zero on constant windows and positively homogeneous") {
    const FunctionalSequence flat = unit_weight_seq({2, 2, 2, 2, 2});
    for (int k = 1; k < 5; ++k) {
        CHECK(cusum_statistic(flat, 1, 5, k) == doctest::Approx(0.0));
    }

    Rng rng(89);
    FunctionalSequence seq;
    seq.grid = Grid::equispaced(4);
    seq.values.resize(6, 4);
    for (int t = 0; t < 6; ++t) {
        for (int j = 0; j < 4; ++j) seq.values(t, j) = rng.normal();
    }
    FunctionalSequence doubled = seq;
    doubled.values *= 2.0;
    for (int k = 1; k < 6; ++k) {
        CHECK(cusum_statistic(doubled, 1, 6, k) ==
              doctest::Approx(2.0 * cusum_statistic(seq, 1, 6, k)));
    }

    CHECK_THROWS_AS(cusum_statistic(seq, 2, 2, 2), Error);   // window too small
    CHECK_THROWS_AS(cusum_statistic(seq, 1, 6, 6), Error);   // k out of range
}

TEST_CASE("elect_representative keeps singletons and localizes steps") {
    const FunctionalSequence seq = unit_weight_seq({0, 0, 1, 1, 1});

    CandidateCluster singleton;
    singleton.members = {4};
    singleton.lo = 1;
    singleton.hi = 5;
    CHECK(elect_representative(singleton, seq) == 4);

    CandidateCluster pair;
    pair.members = {3, 4};
    pair.lo = 1;
    pair.hi = 5;
    CHECK(elect_representative(pair, seq) == 3);  // change begins at index 3
}

TEST_CASE("elect_representative finds a strong step in noise") {
    int hits = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + seed);
        const int T = 30, tau = 15;
        const double sigma = 0.1, h = 20.0 * sigma;
        FunctionalSequence seq;
        seq.grid = Grid::equispaced(5);
        seq.values.resize(T, 5);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < 5; ++j) {
                seq.values(t, j) = sigma * rng.normal() + (t + 1 >= tau ? h : 0.0);
            }
        }
        CandidateCluster cluster;
        cluster.members = {tau - 1, tau, tau + 1};
        cluster.lo = 1;
        cluster.hi = T;
        if (elect_representative(cluster, seq) == tau) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("bic_score prefers the empty set on pure noise") {
    int wins = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(2000 + seed);
        const int T = 200, d = 20;
        FunctionalSequence seq;
        seq.grid = Grid::equispaced(d);
        seq.values.resize(T, d);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < d; ++j) seq.values(t, j) = rng.normal();
        }
        const BasisSystem basis = make_basis(seq, 0.9);
        const ChangePointSet empty;
        ChangePointSet spurious;
        spurious.insert(rng.uniform_int(20, 180));
        // shared pilot so the two scores are comparable
        if (bic_score(seq, empty, basis, spurious) < bic_score(seq, spurious, basis, spurious)) {
            ++wins;
        }
    }
    CHECK(wins >= 95);
}

TEST_CASE("bic_score recovers an exact step and never rewards removing one") {
    Rng rng(97);
    const int T = 120, d = 10, tau = 61;
    const double sigma = 0.5, h = 10.0 * sigma;
    FunctionalSequence seq;
    seq.grid = Grid::equispaced(d);
    seq.values.resize(T, d);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < d; ++j) {
            seq.values(t, j) = sigma * rng.normal() + (t + 1 >= tau ? h : 0.0);
        }
    }
    const BasisSystem basis = make_basis(seq, 0.99);
    ChangePointSet truth;
    truth.insert(tau);
    const ChangePointSet empty;
    CHECK(bic_score(seq, truth, basis, truth) < bic_score(seq, empty, basis, truth));
}

TEST_CASE("implied refit rss never increases when adding a representative") {
    Rng rng(101);
    const int T = 80, d = 8;
    FunctionalSequence seq;
    seq.grid = Grid::equispaced(d);
    seq.values.resize(T, d);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < d; ++j) seq.values(t, j) = rng.normal() + (t >= 40 ? 2.0 : 0.0);
    }
    const BasisSystem basis = make_basis(seq, 0.95);
    const double n = static_cast<double>(T) * d;
    const double k = basis.K();

    ChangePointSet pilot({21, 41, 61});
    ChangePointSet nested;
    double prev_rss = std::numeric_limits<double>::infinity();
    for (int add : {41, 21, 61}) {
        nested.insert(add);
        const double bic = bic_score(seq, nested, basis, pilot);
        const double df = 1.0 + k * nested.size();
        const double rss = n * std::exp((bic - df * std::log(n)) / n);
        CHECK(rss <= prev_rss * (1.0 + 1e-9));
        prev_rss = rss;
    }
}

TEST_CASE("grid_search with singleton grids returns that triple") {
    Rng rng(103);
    const int T = 60, d = 6;
    FunctionalSequence seq;
    seq.grid = Grid::equispaced(d);
    seq.values.resize(T, d);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < d; ++j) seq.values(t, j) = rng.normal();
    }
    const BasisSystem basis = make_basis(seq, 0.9);
    DetectorConfig config = DetectorConfig::defaults();
    config.lambda_grid = {0.7};
    config.lambda_grid_absolute = true;
    config.eta_grid = {0.01};
    config.kappa_grid = {3};
    const GridSearchResult result = grid_search(seq, basis, config);
    CHECK(result.all.size() == 1);
    CHECK(result.best.lambda == doctest::Approx(0.7));
    CHECK(result.best.eta == doctest::Approx(0.01));
    CHECK(result.best.kappa == 3);
}

TEST_CASE("grid_search enumerates every triple and reports the minimum") {
    Rng rng(107);
    const int T = 70, d = 6;
    FunctionalSequence seq;
    seq.grid = Grid::equispaced(d);
    seq.values.resize(T, d);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < d; ++j) {
            seq.values(t, j) = 0.3 * rng.normal() + (t >= 35 ? 3.0 : 0.0);
        }
    }
    const BasisSystem basis = make_basis(seq, 0.95);
    DetectorConfig config = DetectorConfig::defaults();
    config.lambda_grid = {0.1, 1.0, 10.0};
    config.lambda_grid_absolute = true;
    config.eta_grid = {0.0, 0.5};
    config.kappa_grid = {1, 4};

    const GridSearchResult first = grid_search(seq, basis, config);
    CHECK(first.all.size() == 3 * 2 * 2);
    double min_bic = first.all.front().bic;
    for (const auto& rec : first.all) {
        min_bic = std::min(min_bic, rec.bic);
        CHECK(rec.n_representatives <= rec.n_candidates);
    }
    CHECK(first.best.bic == min_bic);

    // deterministic under repetition
    const GridSearchResult second = grid_search(seq, basis, config);
    CHECK(second.best.lambda == first.best.lambda);
    CHECK(second.best.eta == first.best.eta);
    CHECK(second.best.kappa == first.best.kappa);
    CHECK(second.best.bic == first.best.bic);
}

TEST_CASE("grid_search finds a planted change with the oracle in the grid") {
    int hits = 0;
    const int n_seeds = 60;
    for (int seed = 0; seed < n_seeds; ++seed) {
        Rng rng(3000 + seed);
        const int T = 200, d = 20, tau = 101;
        const double sigma = 0.4, h = 10.0 * sigma;
        FunctionalSequence seq;
        seq.grid = Grid::equispaced(d);
        seq.values.resize(T, d);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < d; ++j) {
                seq.values(t, j) = sigma * rng.normal() + (t + 1 >= tau ? h : 0.0);
            }
        }
        const BasisSystem basis = make_basis(seq, 0.95);
        const DifferencedSequence dseq = difference(seq);
        const GsContext ctx(dseq, basis);
        const GridSearchResult result =
            grid_search(seq, ctx, basis, DetectorConfig::defaults());
        const GsResult fit = ctx.fit(result.best.lambda, result.best.eta, 3.0);
        const auto clusters = merge_candidates(fit.candidates, result.best.kappa, T);
        const ChangePointSet reps = elect_representatives(clusters, seq);
        if (reps.indices() == std::vector<int>{tau}) ++hits;
    }
    CHECK(hits >= (n_seeds * 9) / 10);
}
