#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "kdsum/clustering.hpp"
#include "kdsum/error.hpp"
#include "kdsum/rng.hpp"
#include "oracles.hpp"

using namespace kdsum;

namespace {

DissimilarityMatrix three_points() { return DissimilarityMatrix(3, {0, 1, 5, 1, 0, 5, 5, 5, 0}); }

// Euclidean distances of random planar points; integer coordinates give ties.
DissimilarityMatrix planar(Rng& rng, std::size_t n, bool integer) {
    std::vector<double> x(n), y(n), d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = integer ? double(rng.below(4)) : rng.normal();
        y[i] = integer ? double(rng.below(4)) : rng.normal();
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::hypot(x[i] - x[j], y[i] - y[j]);
    return DissimilarityMatrix(n, d);
}

DissimilarityMatrix permuted(const DissimilarityMatrix& dm, const std::vector<std::size_t>& perm) {
    const std::size_t n = dm.n();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = dm(perm[i], perm[j]);
    return DissimilarityMatrix(n, d);
}

}  // namespace

TEST(Linkage, Names) {
    for (auto l : kAllLinkages) EXPECT_EQ(parse_linkage(linkage_name(l)), l);
    EXPECT_THROW(parse_linkage("mcquitty"), ValidationError);
}

TEST(Hac, ThreePointSingle) {
    auto dg = hac(three_points(), Linkage::Single);
    ASSERT_EQ(dg.merges.size(), 2u);
    EXPECT_EQ(dg.merges[0].left, 0u);
    EXPECT_EQ(dg.merges[0].right, 1u);
    EXPECT_EQ(dg.merges[0].height, 1.0);
    EXPECT_EQ(dg.merges[0].node, 3u);
    EXPECT_EQ(dg.merges[1].left, 2u);
    EXPECT_EQ(dg.merges[1].right, 3u);
    EXPECT_EQ(dg.merges[1].height, 5.0);
}

TEST(Hac, ThreePointAverage) {
    EXPECT_EQ(hac(three_points(), Linkage::Average).merges[1].height, 5.0);
}

TEST(Hac, NeedsTwoPoints) {
    EXPECT_THROW(hac(DissimilarityMatrix(1, {0}), Linkage::Single), ValidationError);
}

TEST(Cut, Examples) {
    auto dg = hac(three_points(), Linkage::Single);
    EXPECT_EQ(cut(dg, 1), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(cut(dg, 3), (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(cut(dg, 2), (std::vector<int>{0, 0, 1}));
    EXPECT_THROW(cut(dg, 0), ValidationError);
    EXPECT_THROW(cut(dg, 4), ValidationError);
}

TEST(Hac, MatchesNaiveAgglomeration) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        std::size_t n = 2 + rng.below(7);
        auto dm = planar(rng, n, seed % 3 == 0);
        for (int l = 0; l < 6; ++l) {
            auto dg = hac(dm, kAllLinkages[l]);
            auto ref = oracle::naive_hac(dm.entries(), n, l);
            ASSERT_EQ(dg.merges.size(), ref.size());
            for (std::size_t m = 0; m < ref.size(); ++m) {
                EXPECT_NEAR(dg.merges[m].height, ref[m].height, 1e-9) << "seed " << seed << " linkage " << l;
                EXPECT_EQ(dg.merges[m].left, ref[m].left) << "seed " << seed << " linkage " << l;
                EXPECT_EQ(dg.merges[m].right, ref[m].right) << "seed " << seed << " linkage " << l;
            }
            for (std::size_t k = 1; k <= n; ++k) EXPECT_EQ(oracle::partition_of(cut(dg, k)), oracle::naive_cut(ref, n, k));
        }
    }
}

TEST(Hac, MonotoneLinkagesHaveNondecreasingHeights) {
    Rng rng(71);
    for (int t = 0; t < 50; ++t) {
        auto dm = planar(rng, 5 + rng.below(30), false);
        for (auto l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
            auto dg = hac(dm, l);
            for (std::size_t m = 1; m < dg.merges.size(); ++m)
                EXPECT_GE(dg.merges[m].height, dg.merges[m - 1].height * (1 - 1e-12));
        }
    }
}

TEST(Hac, EveryNodeMergedOnce) {
    Rng rng(72);
    auto dm = planar(rng, 40, true);
    for (auto l : kAllLinkages) {
        auto dg = hac(dm, l);
        std::vector<int> used(2 * 40 - 1, 0);
        for (const auto& m : dg.merges) {
            ++used[m.left];
            ++used[m.right];
            EXPECT_LT(m.left, m.node);
            EXPECT_LT(m.right, m.node);
        }
        for (std::size_t i = 0; i + 1 < used.size(); ++i) EXPECT_EQ(used[i], 1);
    }
}

TEST(Hac, SingleLinkageCutIsThresholdComponents) {
    Rng rng(73);
    for (int t = 0; t < 50; ++t) {
        std::size_t n = 3 + rng.below(25);
        auto dm = planar(rng, n, false);
        auto dg = hac(dm, Linkage::Single);
        std::vector<double> h;
        for (const auto& m : dg.merges) h.push_back(m.height);
        std::sort(h.rbegin(), h.rend());
        for (std::size_t k = 2; k <= n; ++k) {
            double thr = h[k - 2];  // (k-1)-th largest merge height
            // components of the graph with edges strictly below the threshold
            std::vector<std::size_t> comp(n);
            std::iota(comp.begin(), comp.end(), 0);
            std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
                return comp[x] == x ? x : comp[x] = find(comp[x]);
            };
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (dm(i, j) < thr) comp[find(i)] = find(j);
            std::vector<int> lab(n);
            for (std::size_t i = 0; i < n; ++i) lab[i] = static_cast<int>(find(i));
            EXPECT_EQ(oracle::partition_of(lab), oracle::partition_of(cut(dg, k)));
        }
    }
}

TEST(Hac, RowPermutationInvariance) {
    Rng rng(74);
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 4 + rng.below(20);
        auto dm = planar(rng, n, false);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        auto pm = permuted(dm, perm);
        for (auto l : kAllLinkages) {
            auto a = hac(dm, l), b = hac(pm, l);
            std::vector<double> ha, hb;
            for (std::size_t m = 0; m < a.merges.size(); ++m) {
                ha.push_back(a.merges[m].height);
                hb.push_back(b.merges[m].height);
            }
            std::sort(ha.begin(), ha.end());
            std::sort(hb.begin(), hb.end());
            for (std::size_t m = 0; m < ha.size(); ++m) EXPECT_NEAR(ha[m], hb[m], 1e-9);
            for (std::size_t k = 1; k <= n; ++k) {
                auto la = cut(a, k), lb = cut(b, k);
                std::vector<int> back(n);
                for (std::size_t i = 0; i < n; ++i) back[perm[i]] = lb[i];
                EXPECT_EQ(oracle::partition_of(la), oracle::partition_of(back));
            }
        }
    }
}

TEST(Hac, NonFiniteInput) {
    EXPECT_THROW(DissimilarityMatrix(2, {0, NAN, NAN, 0}), NumericalError);
}

TEST(KMeansDist, Trivial) {
    Rng rng(75);
    auto dm = planar(rng, 12, false);
    auto one = kmeans_dist(dm, 1, 3);
    EXPECT_EQ(one.labels, std::vector<int>(12, 0));
    auto all = kmeans_dist(dm, 12, 3);
    EXPECT_EQ(all.cost, 0.0);
    auto sorted = all.labels;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::unique(sorted.begin(), sorted.end()) - sorted.begin(), 12);
    EXPECT_THROW(kmeans_dist(dm, 13, 3), ValidationError);
    EXPECT_THROW(kmeans_dist(dm, 0, 3), ValidationError);
}

TEST(KMeansDist, SeparatedBlobs) {
    Rng rng(76);
    const std::size_t n = 20;
    std::vector<double> d(n * n);
    std::vector<int> blob(n);
    for (std::size_t i = 0; i < n; ++i) blob[i] = i < 10 ? 0 : 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = blob[i] == blob[j] ? rng.uniform(0.1, 1.0) : rng.uniform(10.0, 11.0);
    DissimilarityMatrix dm(n, d);
    for (std::uint64_t seed = 0; seed < 30; ++seed) EXPECT_EQ(kmeans_dist(dm, 2, seed).labels, blob);
}

TEST(KMeansDist, CostNonincreasingAndDeterministic) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed + 1000);
        auto dm = planar(rng, 10 + rng.below(60), seed % 2 == 0);
        std::size_t k = 2 + rng.below(5);
        auto r = kmeans_dist(dm, k, seed);
        ASSERT_EQ(r.traces.size(), 10u);
        for (const auto& tr : r.traces)
            for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_LE(tr[i], tr[i - 1] + 1e-12);
        double cost = 0.0;
        for (std::size_t i = 0; i < dm.n(); ++i) cost += dm(i, r.medoids[static_cast<std::size_t>(r.labels[i])]);
        EXPECT_NEAR(cost, r.cost, 1e-9);
        EXPECT_EQ(kmeans_dist(dm, k, seed).labels, r.labels);
        EXPECT_EQ(r.labels[0], 0);
    }
}

TEST(Relabel, FirstOccurrence) {
    EXPECT_EQ(relabel_by_first({5, 5, 2, 9, 2}), (std::vector<int>{0, 0, 1, 2, 1}));
}
