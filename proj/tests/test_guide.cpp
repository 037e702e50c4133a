#include <doctest.h>

#include <cmath>

#include "ngsp/errors.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/rng.hpp"
#include "test_helpers.hpp"

using namespace ngsp;
using namespace ngsp::testing;

namespace {

// Two-terminal grammar so rows are easy to write out.
Grammar g2t() { return Grammar::parse("root: r\nr -> x ; y"); }

std::vector<std::vector<std::uint16_t>> signatures(const std::vector<ScoredProposal>& ps) {
    std::vector<std::vector<std::uint16_t>> out;
    for (const auto& p : ps) out.push_back(p.signature);
    return out;
}

} // namespace

TEST_SUITE("guide_search") {

TEST_CASE("log_guide_prob basics") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.5, 0.5}, {0.5, 0.5}});
    CHECK(log_guide_prob(d, assign(g, {"x", "y"})) == doctest::Approx(std::log(0.25)).epsilon(1e-12));

    auto d2 = guide_from_rows(g, {{0.9, 0.1}, {0.6, 0.4}});
    CHECK(log_guide_prob(d2, assign(g, {"x", "y"})) ==
          doctest::Approx(std::log(0.36)).epsilon(1e-12));

    // A clamped hard-one row contributes ~log(1) = 0.
    auto d3 = guide_from_rows(g, {{1.0, 0.0}, {1.0, 0.0}});
    CHECK(log_guide_prob(d3, assign(g, {"x", "x"})) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("clamping removes hard zeros and renormalizes") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{1.0, 0.0}});
    CHECK(d.row(0)[1] > 0.0);
    CHECK(d.row(0)[0] + d.row(0)[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(log_guide_prob(d, assign(g, {"y"}))));
}

TEST_CASE("guide file parse and mismatch errors") {
    Grammar g = g2t();
    auto d = GuideDistribution::parse("terminals x y\nrow 0 0.25 0.75\nrow 1 0.5 0.5\n", g);
    CHECK(d.region_count() == 2);
    CHECK(d.row(0)[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(GuideDistribution::parse("terminals x\nrow 0 1.0\n", g), DataError);
    CHECK_THROWS_AS(GuideDistribution::parse("terminals x y\nrow 0 0.5\n", g), DataError);
    CHECK_THROWS_AS(GuideDistribution::parse("terminals x y\nrow 0 0.5 0.5\nrow 0 0.5 0.5\n", g),
                    DataError);
}

TEST_CASE("top-k on the 2x2 fixture") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.9, 0.1}, {0.8, 0.2}});
    auto ps = top_k_assignments(d, 4);
    REQUIRE(ps.size() == 4);
    const double expect[4] = {0.72, 0.18, 0.08, 0.02};
    const std::vector<std::vector<std::uint16_t>> sigs = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int i = 0; i < 4; ++i) {
        CHECK(ps[static_cast<std::size_t>(i)].log_q ==
              doctest::Approx(std::log(expect[i])).epsilon(1e-12));
        CHECK(ps[static_cast<std::size_t>(i)].signature == sigs[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("k=1 returns the per-region argmax") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.3, 0.7}, {0.6, 0.4}, {0.1, 0.9}});
    auto ps = top_k_assignments(d, 1);
    REQUIRE(ps.size() == 1);
    CHECK(ps[0].signature == std::vector<std::uint16_t>{1, 0, 1});
}

TEST_CASE("uniform rows enumerate in lexicographic signature order") {
    Grammar g = Grammar::parse("root: r\nr -> x ; y ; z");
    auto d = GuideDistribution::uniform(g, 3);
    auto ps = top_k_assignments(d, 27);
    REQUIRE(ps.size() == 27);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(ps[i].log_q == doctest::Approx(std::log(1.0 / 27.0)).epsilon(1e-12));
        if (i > 0) CHECK(ps[i - 1].signature < ps[i].signature);
    }
    CHECK(ps[0].signature == std::vector<std::uint16_t>{0, 0, 0});
    CHECK(ps[1].signature == std::vector<std::uint16_t>{0, 0, 1});
    CHECK(ps[26].signature == std::vector<std::uint16_t>{2, 2, 2});
}

TEST_CASE("brute force oracle: sorted, complete, self-consistent") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.9, 0.1}, {0.8, 0.2}});
    auto all = brute_force_assignments(d);
    auto topk = top_k_assignments(d, 4);
    REQUIRE(all.size() == 4);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i].signature == topk[i].signature);
        CHECK(all[i].log_q == topk[i].log_q);
    }

    auto one = guide_from_rows(Grammar::parse("root: r\nr -> x ; y ; z"),
                               {{0.5, 0.3, 0.2}});
    auto ps = brute_force_assignments(one);
    REQUIRE(ps.size() == 3);
    CHECK(ps[0].signature == std::vector<std::uint16_t>{0});
    CHECK(ps[1].signature == std::vector<std::uint16_t>{1});
    CHECK(ps[2].signature == std::vector<std::uint16_t>{2});
}

TEST_CASE("exactness against the oracle over seeded random instances") {
    Grammar g4 = Grammar::parse("root: r\nr -> t0 ; t1 ; t2 ; t3");
    Rng rng(20240817);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(6));
        auto d = random_guide(g4, n, rng);
        auto all = brute_force_assignments(d);
        for (std::int64_t k : {std::int64_t{1}, std::int64_t{5},
                               static_cast<std::int64_t>(all.size())}) {
            auto ps = top_k_assignments(d, k);
            REQUIRE(ps.size() == std::min<std::size_t>(static_cast<std::size_t>(k), all.size()));
            for (std::size_t i = 0; i < ps.size(); ++i) {
                CHECK(ps[i].signature == all[i].signature);
                CHECK(ps[i].log_q == doctest::Approx(all[i].log_q).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("monotone log_q and prefix stability") {
    Grammar g4 = Grammar::parse("root: r\nr -> t0 ; t1 ; t2");
    Rng rng(7);
    auto d = random_guide(g4, 5, rng);
    auto p20 = top_k_assignments(d, 20);
    auto p80 = top_k_assignments(d, 80);
    for (std::size_t i = 1; i < p80.size(); ++i) CHECK(p80[i - 1].log_q >= p80[i].log_q);
    for (std::size_t i = 0; i < p20.size(); ++i) CHECK(p20[i].signature == p80[i].signature);
}

TEST_CASE("k larger than the space returns the whole space") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.9, 0.1}, {0.8, 0.2}});
    CHECK(top_k_assignments(d, 1000).size() == 4);
}

TEST_CASE("per-region row rescaling preserves the assignment order") {
    Grammar g4 = Grammar::parse("root: r\nr -> t0 ; t1 ; t2");
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(4));
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < n; ++i) {
            std::vector<double> row(3);
            double sum = 0;
            for (double& p : row) {
                p = 0.05 + rng.next_double();
                sum += p;
            }
            for (double& p : row) p /= sum;
            rows.push_back(row);
        }
        auto base = top_k_assignments(guide_from_rows(g4, rows), 40);

        auto scaled_rows = rows;
        int target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        const double c = 0.25 + 3.0 * rng.next_double();
        for (double& p : scaled_rows[static_cast<std::size_t>(target)]) p *= c;
        double sum = 0;
        for (double p : scaled_rows[static_cast<std::size_t>(target)]) sum += p;
        for (double& p : scaled_rows[static_cast<std::size_t>(target)]) p /= sum;
        auto scaled = top_k_assignments(guide_from_rows(g4, scaled_rows), 40);

        REQUIRE(base.size() == scaled.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(base[i].signature == scaled[i].signature);
    }
}

TEST_CASE("stochastic sampling: distinct, sorted, deterministic per seed") {
    Grammar g4 = Grammar::parse("root: r\nr -> t0 ; t1 ; t2");
    Rng rng(5);
    auto d = random_guide(g4, 4, rng);
    auto a = sample_assignments(d, 20, 42);
    auto b = sample_assignments(d, 20, 42);
    REQUIRE(!a.empty());
    CHECK(signatures(a) == signatures(b));
    for (std::size_t i = 1; i < a.size(); ++i) {
        CHECK(a[i - 1].log_q >= a[i].log_q);
        CHECK(a[i - 1].signature != a[i].signature);
    }
    auto c = sample_assignments(d, 20, 43);
    CHECK(signatures(a) != signatures(c)); // different seed, different draw
}

TEST_CASE("error paths") {
    Grammar g = g2t();
    auto d = guide_from_rows(g, {{0.5, 0.5}});
    CHECK_THROWS_AS(top_k_assignments(d, 0), DataError);
    CHECK_THROWS_AS(log_guide_prob(d, assign(g, {"x", "x"})), DataError);
    Grammar g12 = Grammar::parse("root: r\nr -> x ; y");
    std::vector<std::vector<double>> big(21, {0.5, 0.5});
    CHECK_THROWS_AS(brute_force_assignments(guide_from_rows(g12, big)), DataError);
}

} // TEST_SUITE
