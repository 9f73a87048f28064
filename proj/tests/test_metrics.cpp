#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kbmom/matrix.hpp"
#include "kbmom/metrics.hpp"
#include "kbmom/rng.hpp"

using namespace kbmom;

namespace {

std::vector<std::uint8_t> ones(std::size_t n) {
    return std::vector<std::uint8_t>(n, 1);
}

}  // namespace

TEST_CASE("ari hand values") {
    auto mask = ones(4);

    std::vector<int> a{0, 0, 1, 1};
    CHECK(ari(a, a, mask) == 1.0);  // identical partitions

    std::vector<int> relabeled{7, 7, -2, -2};  // same partition, new names
    CHECK(ari(relabeled, a, mask) == 1.0);

    // Maximally disagreeing 2x2 case: every contingency cell is 1.
    std::vector<int> cross{0, 1, 0, 1};
    std::vector<int> truth{0, 0, 1, 1};
    CHECK(ari(cross, truth, mask) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("ari degenerate cases return 1") {
    auto mask = ones(5);
    std::vector<int> all_same{3, 3, 3, 3, 3};
    CHECK(ari(all_same, all_same, mask) == 1.0);  // one class on each side

    std::vector<int> truth{0, 1, 2, 3, 4};
    CHECK(ari(truth, truth, mask) == 1.0);  // all singletons, index == expected

    std::vector<int> one_label{0};
    std::vector<std::uint8_t> single(1, 1);
    CHECK(ari(one_label, one_label, single) == 1.0);  // fewer than two clean rows
}

TEST_CASE("ari respects the clean mask") {
    // Disagreement confined to masked rows: clean rows agree perfectly.
    std::vector<int> pred{0, 0, 1, 1, 9, 9};
    std::vector<int> truth{0, 0, 1, 1, 0, 1};
    std::vector<std::uint8_t> mask{1, 1, 1, 1, 0, 0};
    CHECK(ari(pred, truth, mask) == 1.0);

    std::vector<std::uint8_t> none(6, 0);
    CHECK_THROWS_AS(ari(pred, truth, none), std::invalid_argument);

    std::vector<std::uint8_t> short_mask(5, 1);
    CHECK_THROWS_AS(ari(pred, truth, short_mask), std::invalid_argument);
}

TEST_CASE("accuracy_matched hand values") {
    auto mask3 = ones(3);
    std::vector<int> pred{0, 0, 1};
    std::vector<int> truth{0, 1, 1};
    CHECK(accuracy_matched(pred, truth, mask3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // The matching maximizes over label permutations, so inverted names score 1.
    std::vector<int> flipped{1, 1, 0};
    std::vector<int> same{0, 0, 1};
    CHECK(accuracy_matched(flipped, same, mask3) == 1.0);

    // Unequal label counts: 3 predicted classes onto 2 true ones.
    std::vector<int> wide{0, 1, 2};
    std::vector<int> narrow{0, 1, 1};
    CHECK(accuracy_matched(wide, narrow, mask3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // Mask removes the disagreeing row.
    std::vector<int> pred4{0, 0, 1, 1};
    std::vector<int> truth4{0, 1, 1, 1};
    std::vector<std::uint8_t> mask4{1, 0, 1, 1};
    CHECK(accuracy_matched(pred4, truth4, mask4) == 1.0);
}

TEST_CASE("accuracy and ari are invariant to relabeling") {
    for (int t = 0; t < 100; ++t) {
        RngStream rng(derive_key(31, tag::estimate, t));
        std::size_t n = 10 + rng.next_below(60);
        std::size_t kp = 2 + rng.next_below(5);
        std::size_t kt = 2 + rng.next_below(5);
        std::vector<int> pred(n), truth(n);
        for (auto& v : pred) v = static_cast<int>(rng.next_below(kp));
        for (auto& v : truth) v = static_cast<int>(rng.next_below(kt));
        auto mask = ones(n);

        // Random permutation of the predicted label names.
        auto perm = rng.sample_without_replacement(kp, kp);
        std::vector<int> renamed(n);
        for (std::size_t i = 0; i < n; ++i)
            renamed[i] = static_cast<int>(perm[pred[i]]);

        CHECK(accuracy_matched(renamed, truth, mask) ==
              doctest::Approx(accuracy_matched(pred, truth, mask)).epsilon(1e-12));
        CHECK(ari(renamed, truth, mask) ==
              doctest::Approx(ari(pred, truth, mask)).epsilon(1e-12));
        // ARI is additionally symmetric in its arguments.
        CHECK(ari(pred, truth, mask) ==
              doctest::Approx(ari(truth, pred, mask)).epsilon(1e-12));
    }
}

TEST_CASE("rmse_matched hand values") {
    Matrix fitted(2, 2), truth(2, 2);
    fitted(0, 0) = 0; fitted(0, 1) = 0;
    fitted(1, 0) = 1; fitted(1, 1) = 1;
    truth(0, 0) = 1; truth(0, 1) = 1;
    truth(1, 0) = 0; truth(1, 1) = 0;
    CHECK(rmse_matched(fitted, truth) == 0.0);  // swap matching is exact

    Matrix f2(2, 2, 0.0), t2(2, 2, 0.0);
    t2(0, 0) = 1.0;  // truth centers (1,0) and (0,0); both fitted at origin
    CHECK(rmse_matched(f2, t2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    Matrix f1(1, 1), t1(1, 1);
    f1(0, 0) = 2.0;
    t1(0, 0) = 5.0;
    CHECK(rmse_matched(f1, t1) == doctest::Approx(3.0).epsilon(1e-12));

    Matrix wrong(3, 2);
    CHECK_THROWS_AS(rmse_matched(fitted, wrong), std::invalid_argument);
}

TEST_CASE("rmse_matched picks the optimal permutation among many") {
    // Truth on a line; fitted are the same points cyclically shifted plus a
    // small jitter. The optimal matching undoes the shift.
    for (std::size_t k : {3u, 5u, 8u}) {
        Matrix truth(k, 1), fitted(k, 1);
        for (std::size_t i = 0; i < k; ++i) truth(i, 0) = 10.0 * static_cast<double>(i);
        for (std::size_t i = 0; i < k; ++i)
            fitted(i, 0) = truth((i + 1) % k, 0) + 0.25;
        CHECK(rmse_matched(fitted, truth) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("rmse_matched agrees with the assignment solver beyond K = 8") {
    // K = 9 exercises the Hungarian path; a permuted copy must match exactly.
    const std::size_t k = 9;
    Matrix truth(k, 2), fitted(k, 2);
    RngStream rng(derive_key(32, tag::estimate));
    for (std::size_t i = 0; i < k; ++i) {
        truth(i, 0) = 50.0 * static_cast<double>(i);
        truth(i, 1) = rng.next_double();
    }
    auto perm = rng.sample_without_replacement(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        fitted(i, 0) = truth(perm[i], 0);
        fitted(i, 1) = truth(perm[i], 1);
    }
    CHECK(rmse_matched(fitted, truth) == 0.0);

    // Shift every fitted center by 0.5 in one coordinate: optimum is 0.5.
    for (std::size_t i = 0; i < k; ++i) fitted(i, 1) += 0.5;
    CHECK(rmse_matched(fitted, truth) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("min_cost_assignment matches brute force on random instances") {
    for (int t = 0; t < 60; ++t) {
        RngStream rng(derive_key(33, tag::estimate, t));
        std::size_t k = 2 + rng.next_below(6);  // up to 7: brute force is cheap
        Matrix cost(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                cost(i, j) = rng.next_double() * 10.0 - 3.0;  // negatives included

        auto assignment = min_cost_assignment(cost);
        std::vector<char> seen(k, 0);
        double solver_total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            REQUIRE(assignment[i] < k);
            CHECK(!seen[assignment[i]]);
            seen[assignment[i]] = 1;
            solver_total += cost(i, assignment[i]);
        }

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double brute = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (std::size_t i = 0; i < k; ++i) total += cost(i, perm[i]);
            brute = std::min(brute, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(solver_total == doctest::Approx(brute).epsilon(1e-12));
    }
    Matrix bad(2, 3);
    CHECK_THROWS_AS(min_cost_assignment(bad), std::invalid_argument);
}

TEST_CASE("distortion_clean sums squared distances over clean rows") {
    Matrix points(3, 1);
    points(0, 0) = 0.0;
    points(1, 0) = 2.0;
    points(2, 0) = 10.0;
    Matrix centers(2, 1);
    centers(0, 0) = 1.0;
    centers(1, 0) = 10.0;
    std::vector<int> labels{0, 0, 1};

    CHECK(distortion_clean(points, labels, centers, ones(3)) == 2.0);  // 1 + 1 + 0

    std::vector<std::uint8_t> mask{1, 0, 1};
    CHECK(distortion_clean(points, labels, centers, mask) == 1.0);

    std::vector<int> bad{0, 0, 7};
    CHECK_THROWS_AS(distortion_clean(points, bad, centers, ones(3)),
                    std::invalid_argument);
}

TEST_CASE("nb_clusters_clean counts distinct labels under the mask") {
    std::vector<int> labels{0, 0, 3, 5};
    CHECK(nb_clusters_clean(labels, ones(4)) == 3u);
    std::vector<std::uint8_t> mask{1, 1, 1, 0};
    CHECK(nb_clusters_clean(labels, mask) == 2u);
    std::vector<std::uint8_t> none(4, 0);
    CHECK(nb_clusters_clean(labels, none) == 0u);
}
