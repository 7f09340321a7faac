#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdsum/datagen.hpp"
#include "kdsum/error.hpp"

using namespace kdsum;

namespace {

std::vector<std::size_t> cluster_sizes(const std::vector<int>& labels) {
    std::vector<std::size_t> out;
    for (int l : labels) {
        if (static_cast<std::size_t>(l) >= out.size()) out.resize(static_cast<std::size_t>(l) + 1, 0);
        ++out[static_cast<std::size_t>(l)];
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double chi_square_2x2(const std::vector<int>& a, const std::vector<int>& b) {
    double c[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < a.size(); ++i) c[a[i]][b[i]] += 1;
    double n = double(a.size()), stat = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double e = (c[i][0] + c[i][1]) * (c[0][j] + c[1][j]) / n;
            stat += (c[i][j] - e) * (c[i][j] - e) / e;
        }
    return stat;
}

}  // namespace

TEST(Sims, DefaultSizes) {
    const std::vector<std::vector<std::size_t>> expect{{97, 276}, {2000, 50}, {100, 100}, {100, 100}, {67, 67, 66}, {97, 276}};
    for (int sim = 1; sim <= 6; ++sim) {
        auto s = gen_sim({sim, 11, {}});
        EXPECT_EQ(cluster_sizes(s.labels), expect[sim - 1]) << sim;
        EXPECT_EQ(s.labels.size(), s.data.n());
    }
    EXPECT_THROW(gen_sim({7, 1, {}}), ValidationError);
    EXPECT_THROW(gen_sim({1, 1, {10}}), ValidationError);
}

TEST(Sims, SizeOverride) {
    auto s = gen_sim({3, 2, {20, 30}});
    EXPECT_EQ(cluster_sizes(s.labels), (std::vector<std::size_t>{20, 30}));
}

TEST(Sims, Deterministic) {
    for (int sim = 1; sim <= 6; ++sim) {
        auto a = gen_sim({sim, 5, {}}), b = gen_sim({sim, 5, {}}), c = gen_sim({sim, 6, {}});
        EXPECT_TRUE(a.data == b.data);
        EXPECT_EQ(a.labels, b.labels);
        EXPECT_FALSE(a.data == c.data);
    }
}

TEST(Sims, Sim5Blocks) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = gen_sim({5, seed, {}});
        ASSERT_EQ(s.data.n(), 200u);
        ASSERT_EQ(s.data.p(), 5u);
        EXPECT_EQ(s.data.unordered_count(), 5u);
        for (std::size_t i = 0; i < 200; ++i) {
            int c = s.labels[i];
            for (std::size_t k = 2; k < 5; ++k) {
                EXPECT_GE(s.data.at(i, k), 10.0 * c);
                EXPECT_LT(s.data.at(i, k), 10.0 * c + 10);
            }
        }
    }
}

TEST(Sims, Sim6NoiseColumnIndependentOfLabels) {
    // chi-square with 1 df; the 1% critical value is 6.635
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = gen_sim({6, seed, {}});
        std::vector<int> x3(s.data.n());
        for (std::size_t i = 0; i < s.data.n(); ++i) x3[i] = static_cast<int>(s.data.at(i, 2));
        rejected += chi_square_2x2(x3, s.labels) > 6.635;
    }
    EXPECT_LE(rejected, 5);
}

TEST(Sims, Sim6InformativeColumnsSeparate) {
    auto s = gen_sim({6, 3, {}});
    for (std::size_t i = 0; i < s.data.n(); ++i)
        for (std::size_t k = 3; k < 5; ++k) {
            if (s.labels[i] == 0) EXPECT_LE(s.data.at(i, k), 2.0);
            else EXPECT_GE(s.data.at(i, k), 3.0);
        }
}

TEST(Sims, Sim3InnerClusterIsInside) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = gen_sim({3, seed, {}});
        std::vector<double> r[2];
        for (std::size_t i = 0; i < s.data.n(); ++i) r[s.labels[i]].push_back(std::hypot(s.data.at(i, 0), s.data.at(i, 1)));
        EXPECT_LT(median(r[0]), median(r[1]));
    }
}

TEST(Grid, ContinuousShape) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = gen_gridsearch_continuous(seed);
        EXPECT_EQ(s.data.p(), 2u);
        EXPECT_GE(s.data.n(), 250u);
        EXPECT_LE(s.data.n(), 1000u);
        auto sizes = cluster_sizes(s.labels);
        ASSERT_EQ(sizes.size(), 5u);
        for (std::size_t c = 0; c < 5; ++c) {
            EXPECT_GE(sizes[c], 50u);
            EXPECT_LE(sizes[c], 200u);
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < s.data.n(); ++i)
                if (s.labels[i] == int(c)) {
                    mx += s.data.at(i, 0);
                    my += s.data.at(i, 1);
                }
            mx /= double(sizes[c]);
            my /= double(sizes[c]);
            // sample centre within 0.5 of the box (sd 1, at least 50 points)
            EXPECT_GT(mx, -0.5);
            EXPECT_LT(mx, 12.5);
            EXPECT_GT(my, -0.5);
            EXPECT_LT(my, 12.5);
        }
        EXPECT_TRUE(gen_gridsearch_continuous(seed).data == s.data);
    }
}

TEST(Grid, CategoricalBlocks) {
    auto s = gen_gridsearch_categorical(4);
    ASSERT_EQ(s.data.n(), 225u);
    EXPECT_EQ(s.data.unordered_count(), 3u);
    EXPECT_EQ(cluster_sizes(s.labels), (std::vector<std::size_t>{75, 75, 75}));
    const int lo[3] = {1, 5, 10}, hi[3] = {5, 10, 15};
    for (std::size_t i = 0; i < 225; ++i) {
        int c = s.labels[i];
        for (std::size_t k = 1; k < 3; ++k) {
            double v = s.data.at(i, k) + 1;  // codes are value - 1
            EXPECT_GE(v, lo[c]);
            EXPECT_LE(v, hi[c]);
        }
        EXPECT_TRUE(s.data.at(i, 0) == 0 || s.data.at(i, 0) == 1);
    }
    EXPECT_EQ(s.data.schema()[1].labels.front(), "1");
    auto two = gen_gridsearch_categorical(4, false);
    EXPECT_EQ(two.data.n(), 150u);
    EXPECT_TRUE(gen_gridsearch_categorical(4).data == s.data);
}

TEST(Mixed, SeparationForOverlap) {
    double d = overlap_separation(0.20);
    EXPECT_NEAR(d, 2.563, 1e-3);
    EXPECT_NEAR(std::erfc(d / 2 / std::numbers::sqrt2), 0.20, 1e-9);
    EXPECT_THROW(overlap_separation(1.0), ValidationError);
    EXPECT_THROW(overlap_separation(0.0), ValidationError);
}

TEST(Mixed, MassesHitOverlap) {
    for (int g : {2, 3, 4, 7}) {
        for (double w : {0.05, 0.35, 0.8}) {
            auto [p1, p2] = overlap_masses(g, w);
            double s1 = 0, s2 = 0, m = 0;
            for (int j = 0; j < g; ++j) {
                EXPECT_GE(p1[j], 0.0);
                EXPECT_GE(p2[j], 0.0);
                s1 += p1[j];
                s2 += p2[j];
                m += std::min(p1[j], p2[j]);
            }
            EXPECT_NEAR(s1, 1.0, 1e-12);
            EXPECT_NEAR(s2, 1.0, 1e-12);
            EXPECT_NEAR(m, w, 1e-9);
        }
    }
    EXPECT_THROW(overlap_masses(1, 0.3), ValidationError);
}

TEST(Mixed, EmpiricalContinuousOverlap) {
    MixedGenSpec spec;
    spec.n = 100000;
    spec.ratio = 0.5;
    spec.unordered = 0;
    spec.ordered = 0;
    spec.continuous_overlap = 0.2;
    spec.seed = 9;
    auto s = gen_mixed(spec);
    // fit a normal per cluster and integrate min of the two densities
    double mu[2] = {0, 0}, var[2] = {0, 0}, cnt[2] = {0, 0};
    for (std::size_t i = 0; i < s.data.n(); ++i) {
        mu[s.labels[i]] += s.data.at(i, 0);
        cnt[s.labels[i]] += 1;
    }
    for (int c = 0; c < 2; ++c) mu[c] /= cnt[c];
    for (std::size_t i = 0; i < s.data.n(); ++i) {
        double e = s.data.at(i, 0) - mu[s.labels[i]];
        var[s.labels[i]] += e * e;
    }
    for (int c = 0; c < 2; ++c) var[c] /= cnt[c] - 1;
    auto pdf = [](double x, double m, double v) {
        return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    };
    double area = 0.0, h = 1e-3;
    for (double x = -10; x < 15; x += h) area += h * std::min(pdf(x, mu[0], var[0]), pdf(x, mu[1], var[1]));
    EXPECT_NEAR(area, 0.2, 0.02);
}

TEST(Mixed, ShapeAndRatio) {
    MixedGenSpec spec;
    spec.seed = 4;
    auto s = gen_mixed(spec);
    EXPECT_EQ(s.data.n(), 200u);
    EXPECT_EQ(s.data.continuous_count(), 1u);
    EXPECT_EQ(s.data.unordered_count(), 1u);
    EXPECT_EQ(s.data.ordered_count(), 1u);
    EXPECT_EQ(cluster_sizes(s.labels), (std::vector<std::size_t>{80, 120}));
    EXPECT_TRUE(gen_gridsearch_mixed(4).data == s.data);
    spec.categorical_overlap = 1.0;
    EXPECT_THROW(gen_mixed(spec), ValidationError);
}
