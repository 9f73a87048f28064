#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kbmom/estimators.hpp"
#include "kbmom/matrix.hpp"
#include "kbmom/rng.hpp"

using namespace kbmom;

TEST_CASE("lower_median hand values") {
    std::vector<double> a{5.0};
    CHECK(lower_median(a) == 5.0);
    std::vector<double> b{1.0, 2.0, 3.0};
    CHECK(lower_median(b) == 2.0);
    std::vector<double> c{3.0, 1.0, 2.0, 4.0};
    CHECK(lower_median(c) == 2.0);  // even length: lower of the two middles
    std::vector<double> d{2.0, 1.0};
    CHECK(lower_median(d) == 1.0);
    std::vector<double> empty;
    CHECK_THROWS_AS(lower_median(empty), std::invalid_argument);
}

TEST_CASE("lower_median is a realized element satisfying the rank counts") {
    RngStream rng(derive_key(1, tag::estimate));
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng.next_below(40);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.next_double() * 10.0 - 5.0;
        double med = lower_median(v);
        std::size_t le = 0, ge = 0;
        bool realized = false;
        for (double x : v) {
            if (x <= med) ++le;
            if (x >= med) ++ge;
            if (x == med) realized = true;
        }
        CHECK(realized);
        CHECK(2 * le >= n);
        CHECK(2 * ge >= n);
    }
}

TEST_CASE("mom_of_blocks on an explicit partition") {
    std::vector<double> sample{1, 2, 3, 4, 5, 6};
    std::vector<std::vector<std::size_t>> blocks{{0, 1}, {2, 3}, {4, 5}};
    CHECK(mom_of_blocks(sample, blocks) == 3.5);  // means 1.5, 3.5, 5.5

    CHECK_THROWS_AS(mom_of_blocks(sample, {}), std::invalid_argument);
    std::vector<std::vector<std::size_t>> with_empty{{0}, {}};
    CHECK_THROWS_AS(mom_of_blocks(sample, with_empty), std::invalid_argument);
    std::vector<std::vector<std::size_t>> oob{{0, 99}};
    CHECK_THROWS_AS(mom_of_blocks(sample, oob), std::invalid_argument);
}

TEST_CASE("mom with a single block is the sample mean") {
    std::vector<double> sample{1, 2, 3, 4, 5, 6};
    RngStream rng(derive_key(2, tag::estimate));
    CHECK(mom(sample, {1, 6}, rng) == doctest::Approx(3.5).epsilon(1e-15));

    // Property over many random samples: B = 1 must reproduce the mean to
    // floating-point accuracy regardless of the shuffle.
    for (int t = 0; t < 300; ++t) {
        RngStream data_rng(derive_key(3, tag::estimate, t));
        std::size_t n = 5 + data_rng.next_below(60);
        std::vector<double> v(n);
        double s = 0.0;
        for (auto& x : v) {
            x = data_rng.next_normal() * 3.0 + 1.0;
            s += x;
        }
        RngStream mom_rng(derive_key(4, tag::estimate, t));
        double est = mom(v, {1, n}, mom_rng);
        CHECK(est == doctest::Approx(s / static_cast<double>(n)).epsilon(1e-12));
    }
}

TEST_CASE("mom with singleton blocks over the whole sample is the lower median") {
    std::vector<double> sample{10, 10, 10, 1000};
    RngStream rng(derive_key(5, tag::estimate));
    CHECK(mom(sample, {4, 1}, rng) == 10.0);  // robust to the large point

    for (int t = 0; t < 100; ++t) {
        RngStream data_rng(derive_key(6, tag::estimate, t));
        std::size_t n = 1 + data_rng.next_below(30);
        std::vector<double> v(n);
        for (auto& x : v) x = data_rng.next_double() * 100.0;
        RngStream mom_rng(derive_key(7, tag::estimate, t));
        // Singleton blocks make every block mean a sample value; the estimate is
        // exactly the lower median, whatever order the shuffle produced.
        CHECK(mom(v, {n, 1}, mom_rng) == lower_median(v));
    }
}

TEST_CASE("mom validates its plan") {
    std::vector<double> sample{1, 2, 3};
    RngStream rng(derive_key(8, tag::estimate));
    CHECK_THROWS_AS(mom(sample, {2, 2}, rng), std::invalid_argument);  // needs 4 > 3
    CHECK_THROWS_AS(mom(sample, {0, 1}, rng), std::invalid_argument);
    CHECK_THROWS_AS(mom(sample, {1, 0}, rng), std::invalid_argument);
}

TEST_CASE("bmom on a constant sample returns the constant") {
    std::vector<double> sample(37, 4.25);
    RngStream rng(derive_key(9, tag::estimate));
    CHECK(bmom(sample, {11, 5}, rng) == 4.25);
}

TEST_CASE("bmom is deterministic in the stream key") {
    std::vector<double> sample(100);
    RngStream data_rng(derive_key(10, tag::estimate));
    for (auto& x : sample) x = data_rng.next_normal();
    RngStream r1(derive_key(11, tag::estimate));
    RngStream r2(derive_key(11, tag::estimate));
    double v1 = bmom(sample, {25, 8}, r1);
    double v2 = bmom(sample, {25, 8}, r2);
    CHECK(v1 == v2);  // bitwise
}

TEST_CASE("bmom shift equivariance") {
    std::vector<double> sample(60), shifted(60);
    RngStream data_rng(derive_key(12, tag::estimate));
    for (std::size_t i = 0; i < sample.size(); ++i) {
        sample[i] = data_rng.next_normal();
        shifted[i] = sample[i] + 7.5;
    }
    RngStream r1(derive_key(13, tag::estimate));
    RngStream r2(derive_key(13, tag::estimate));
    CHECK(bmom(shifted, {21, 6}, r1) ==
          doctest::Approx(bmom(sample, {21, 6}, r2) + 7.5).epsilon(1e-12));
}

TEST_CASE("bmom with singleton blocks resists a 20 percent outlier mass") {
    // One point at 1e9 among five: with 1001 singleton blocks the median block
    // is clean unless the outlier lands in a majority of blocks, which has
    // vanishing probability. Every seed should return 0 here.
    std::vector<double> sample{0.0, 0.0, 0.0, 0.0, 1e9};
    std::size_t zero_count = 0;
    const std::size_t seeds = 10000;
    for (std::size_t s = 0; s < seeds; ++s) {
        RngStream rng(derive_key(14, tag::estimate, s));
        if (bmom(sample, {1001, 1}, rng) == 0.0) ++zero_count;
    }
    CHECK(static_cast<double>(zero_count) / static_cast<double>(seeds) > 0.99);
}

TEST_CASE("bmom_vector matches scalar bmom in one dimension") {
    Matrix m(50, 1);
    std::vector<double> flat(50);
    RngStream data_rng(derive_key(15, tag::estimate));
    for (std::size_t i = 0; i < 50; ++i) {
        flat[i] = data_rng.next_normal() * 2.0;
        m(i, 0) = flat[i];
    }
    RngStream r1(derive_key(16, tag::estimate));
    RngStream r2(derive_key(16, tag::estimate));
    auto vec = bmom_vector(m, {15, 4}, r1);
    REQUIRE(vec.size() == 1u);
    CHECK(vec[0] == bmom(flat, {15, 4}, r2));  // identical draw sequence
}

TEST_CASE("bmom_vector is coordinatewise on constant columns") {
    Matrix m(20, 3);
    for (std::size_t i = 0; i < 20; ++i) {
        m(i, 0) = 1.5;
        m(i, 1) = -2.0;
        m(i, 2) = 0.0;
    }
    RngStream rng(derive_key(17, tag::estimate));
    auto vec = bmom_vector(m, {9, 4}, rng);
    REQUIRE(vec.size() == 3u);
    CHECK(vec[0] == 1.5);
    CHECK(vec[1] == -2.0);
    CHECK(vec[2] == 0.0);
}

TEST_CASE("mom_breakdown closed form") {
    CHECK(mom_breakdown({10, 10}, 100) == 0.05);   // floor(10/2)/100
    CHECK(mom_breakdown({1, 100}, 100) == 0.0);    // single block: no protection
    CHECK(mom_breakdown({100, 1}, 100) == 0.5);    // singleton blocks: maximal
    CHECK(mom_breakdown({7, 1}, 14) == doctest::Approx(3.0 / 14.0).epsilon(1e-15));
    CHECK_THROWS_AS(mom_breakdown({1, 1}, 0), std::invalid_argument);
}

TEST_CASE("bmom_breakdown_limit closed form and singleton bound") {
    CHECK(bmom_breakdown_limit(1) == 0.5);
    CHECK(bmom_breakdown_limit(18) == doctest::Approx(0.0377763).epsilon(1e-4));
    // The limit beats the naive 1/(2 n_B) rate; at n_B = 1 the two coincide
    // exactly (both are 1/2), so strictness starts at 2.
    for (std::size_t nb = 1; nb <= 60; ++nb) {
        double lim = bmom_breakdown_limit(nb);
        double naive = 1.0 / (2.0 * static_cast<double>(nb));
        if (nb == 1)
            CHECK(lim == naive);
        else
            CHECK(lim > naive);
        CHECK(lim <= 0.5);
    }
    CHECK_THROWS_AS(bmom_breakdown_limit(0), std::invalid_argument);
}

TEST_CASE("prob_breakdown_bound values") {
    // No contamination: the margin is 1/2, so the bound is 1 - exp(-B/2).
    auto clean = prob_breakdown_bound(100, 0, 10, 20);
    CHECK_FALSE(clean.degenerate);
    CHECK(clean.value == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));

    auto pb = prob_breakdown_bound(600, 9, 18, 20);
    CHECK_FALSE(pb.degenerate);
    double margin = std::pow(1.0 - 9.0 / 600.0, 18.0) - 0.5;
    CHECK(pb.value == doctest::Approx(1.0 - std::exp(-40.0 * margin * margin))
                          .epsilon(1e-12));
    CHECK(pb.value == doctest::Approx(0.9356).epsilon(1e-3));

    auto strong = prob_breakdown_bound(600, 9, 18, 250);
    CHECK(strong.value > 1.0 - 1e-14);

    // Heavy contamination with large blocks: clean-block probability <= 1/2, the
    // bound degenerates to zero.
    auto degen = prob_breakdown_bound(10, 4, 2, 50);
    CHECK(degen.degenerate);
    CHECK(degen.value == 0.0);

    CHECK_THROWS_AS(prob_breakdown_bound(0, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(prob_breakdown_bound(10, 11, 1, 1), std::invalid_argument);
}

TEST_CASE("plan_bounds pins the feasible region") {
    auto pb = plan_bounds(600, 9, 0.01, 18);
    CHECK_FALSE(pb.unbounded);
    CHECK(pb.block_size_max == 45u);
    CHECK(pb.blocks_min == 34u);
    CHECK(pb.blocks_min_at == 18u);

    auto at_max = plan_bounds(600, 9, 0.01);
    CHECK(at_max.block_size_max == 45u);
    CHECK(at_max.blocks_min_at == 45u);
    // At the boundary block size the margin is tiny, so the block requirement
    // explodes; the point of the hint argument is to avoid exactly this.
    CHECK(at_max.blocks_min > 1000u);

    auto free = plan_bounds(600, 0, 0.01);
    CHECK(free.unbounded);

    CHECK_THROWS_AS(plan_bounds(10, 5, 0.01), std::invalid_argument);   // m = n/2
    CHECK_THROWS_AS(plan_bounds(600, 9, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_bounds(600, 9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_bounds(600, 9, 0.01, 46), std::invalid_argument);
}

TEST_CASE("plan_bounds block_size_max satisfies the defining inequality") {
    RngStream rng(derive_key(18, tag::estimate));
    for (int t = 0; t < 50; ++t) {
        std::size_t n = 50 + rng.next_below(2000);
        std::size_t m = 1 + rng.next_below(n / 3);
        if (2 * m >= n) continue;
        auto pb = plan_bounds(n, m, 0.05);
        double q = 1.0 - static_cast<double>(m) / static_cast<double>(n);
        CHECK(std::pow(q, static_cast<double>(pb.block_size_max)) > 0.5);
        CHECK(std::pow(q, static_cast<double>(pb.block_size_max + 1)) <= 0.5);
    }
}

TEST_CASE("mc_breakdown with no contamination always succeeds") {
    auto rep = mc_breakdown(100, 0, 10, 21, 500, 42);
    CHECK(rep.mc_estimate == 1.0);
    CHECK(rep.mc_trials == 500u);
    CHECK(rep.deterministic_bdp == doctest::Approx(0.10).epsilon(1e-15));
}

TEST_CASE("mc_breakdown estimate respects the probabilistic lower bound") {
    auto rep = mc_breakdown(600, 9, 18, 20, 10000, 7);
    CHECK_FALSE(rep.bound_degenerate);
    // True success probability is ~0.993; the Hoeffding bound is ~0.936. Allow
    // Monte-Carlo noise of a few sigma around the bound comparison.
    CHECK(rep.mc_estimate >= rep.prob_lower_bound - 0.01);
    CHECK(rep.mc_estimate > 0.98);
    CHECK(rep.mc_estimate <= 1.0);
}

TEST_CASE("mc_breakdown singleton blocks survive 40 percent contamination") {
    auto rep = mc_breakdown(10, 4, 1, 1001, 2000, 11);
    CHECK(rep.mc_estimate >= 0.99);
}

TEST_CASE("mc_breakdown is identical across worker counts") {
    auto a = mc_breakdown(600, 9, 18, 20, 4000, 99, 1);
    auto b = mc_breakdown(600, 9, 18, 20, 4000, 99, 3);
    auto c = mc_breakdown(600, 9, 18, 20, 4000, 99, 8);
    CHECK(a.mc_estimate == b.mc_estimate);
    CHECK(a.mc_estimate == c.mc_estimate);
}
