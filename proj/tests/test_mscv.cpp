#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kdsum/datagen.hpp"
#include "kdsum/error.hpp"
#include "kdsum/mscv.hpp"
#include "kdsum/rng.hpp"
#include "oracles.hpp"

using namespace kdsum;

namespace {

TypedDataset toy() {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}},
                                  {"u", VariableKind::Unordered, 2, {"0", "1"}},
                                  {"o", VariableKind::Ordered, 4, {"0", "1", "2", "3"}}};
    return TypedDataset(s, {1.5, 1, 3, 1.5, 1, 3, 1.5, 0, 0, 0, 1, 0, 0, 0, 3});
}

std::vector<double> random_bandwidths(Rng& rng, const TypedDataset& ds) {
    std::vector<double> lam;
    for (const auto& v : ds.schema())
        lam.push_back(v.kind == VariableKind::Continuous ? std::exp(rng.uniform(std::log(0.1), std::log(3.0)))
                                                         : rng.uniform(0.05, 1.0));
    return lam;
}

}  // namespace

TEST(Objective, TwoIdenticalRowsGaussian) {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}}};
    TypedDataset ds(s, {2.0, 2.0});
    EXPECT_NEAR(mscv_objective(ds, validate_bandwidths({1.0}, ds)), 2 * std::log(oracle::gauss(0, 0, 1)), 1e-14);
    EXPECT_NEAR(mscv_objective(ds, validate_bandwidths({1.0}, ds)), -1.8379, 1e-4);
}

TEST(Objective, IsolatedCategoricalRowGetsSentinel) {
    std::vector<VariableSchema> s{{"u", VariableKind::Unordered, 2, {}}, {"o", VariableKind::Ordered, 3, {}}};
    TypedDataset ds(s, {0, 1, 0, 1, 1, 2});
    auto t = mscv_terms(ds, validate_bandwidths({0, 0}, ds));
    EXPECT_NEAR(t[0], std::log(2.0 / 2.0), 1e-15);
    EXPECT_NEAR(t[1], std::log(2.0 / 2.0), 1e-15);
    EXPECT_EQ(t[2], kObjectiveSentinel);
    EXPECT_EQ(mscv_objective(ds, validate_bandwidths({0, 0}, ds)), kObjectiveSentinel);
}

TEST(Objective, NeedsTwoRows) {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}}};
    TypedDataset ds(s, {2.0});
    EXPECT_THROW(mscv_objective(ds, validate_bandwidths({1.0}, ds)), ValidationError);
}

TEST(Objective, MatchesNaiveLeaveOneOut) {
    Rng rng(41);
    for (int t = 0; t < 200; ++t) {
        auto ds = oracle::random_mixed(rng, 2 + rng.below(20), rng.below(3), rng.below(3), rng.below(3));
        if (ds.p() == 0) continue;
        auto lam = random_bandwidths(rng, ds);
        double ref = oracle::mscv(ds, lam);
        double got = mscv_objective(ds, validate_bandwidths(lam, ds));
        EXPECT_NEAR(got, ref, 1e-10 * std::max(1.0, std::fabs(ref)));
    }
}

TEST(Objective, HandlesHugeContinuousScale) {
    // 40 continuous columns at tiny bandwidth: the product scale overflows a double
    std::vector<VariableSchema> s;
    for (int k = 0; k < 40; ++k) s.push_back({"c" + std::to_string(k), VariableKind::Continuous, 0, {}});
    TypedDataset ds(s, std::vector<double>(80, 1.0));
    double v = mscv_objective(ds, validate_bandwidths(std::vector<double>(40, 1e-9), ds));
    double expect = 2 * 40 * (std::log(1e9) + std::log(oracle::gauss(0, 0, 1)));
    EXPECT_NEAR(v, expect, 1e-9 * expect);
}

TEST(Objective, RowPermutationInvariant) {
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        auto ds = oracle::random_mixed(rng, 3 + rng.below(30), 1 + rng.below(2), rng.below(3), rng.below(3));
        auto bw = validate_bandwidths(random_bandwidths(rng, ds), ds);
        std::vector<std::size_t> perm(ds.n());
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        double a = mscv_objective(ds, bw), b = mscv_objective(ds.select_rows(perm), bw);
        EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::fabs(a)));
    }
}

TEST(Objective, ToySelectedBandwidthsBeatHandPickedOnes) {
    auto ds = toy();
    double cv1 = mscv_objective(ds, validate_bandwidths({0.01, 0, 0}, ds));
    double cv2 = mscv_objective(ds, validate_bandwidths({10, 1, 1}, ds));
    double cv3 = mscv_objective(ds, validate_bandwidths({1.027, 0.591, 4.94e-32}, ds));
    EXPECT_GE(cv3, cv2);
    EXPECT_GE(cv3, cv1);
}

TEST(StartingPoints, PrefixProperty) {
    Rng rng(43);
    auto ds = oracle::random_mixed(rng, 40, 2, 2, 1);
    auto b = admissible_bounds(ds);
    auto few = starting_points(ds, b, 7, 99);
    auto many = starting_points(ds, b, 23, 99);
    ASSERT_EQ(few.size(), 8u);
    ASSERT_EQ(many.size(), 24u);
    for (std::size_t i = 0; i < few.size(); ++i) EXPECT_EQ(few[i], many[i]);
    for (const auto& s : many)
        for (std::size_t k = 0; k < s.size(); ++k) EXPECT_TRUE(b[k].contains(s[k])) << k << " " << s[k];
}

TEST(StartingPoints, RuleOfThumbFirst) {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}}, {"u", VariableKind::Unordered, 3, {}}};
    TypedDataset ds(s, {0, 0, 1, 1, 2, 2, 3, 0});
    auto pts = starting_points(ds, admissible_bounds(ds), 0, 1);
    ASSERT_EQ(pts.size(), 1u);
    double sd = std::sqrt(5.0 / 3.0);
    EXPECT_NEAR(pts[0][0], 1.06 * sd * std::pow(4.0, -0.2), 1e-14);
    EXPECT_EQ(pts[0][1], 0.5);
}

TEST(Select, DuplicatedRowsDriveBandwidthToFloor) {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}}};
    TypedDataset ds(s, {0.7, 0.7});
    OptimizerOptions o;
    o.restarts = 2;
    auto r = select_bandwidths(ds, {}, o);
    EXPECT_NEAR(r.bandwidths[0], o.continuous_floor, 1e-20);
    EXPECT_TRUE(r.converged);
}

TEST(Select, FeasibleAndReproducible) {
    Rng rng(44);
    for (int t = 0; t < 12; ++t) {
        auto ds = oracle::random_mixed(rng, 10 + rng.below(30), rng.below(3), rng.below(2), rng.below(2));
        if (ds.p() == 0) continue;
        OptimizerOptions o;
        o.restarts = 3;
        o.seed = 100 + t;
        o.aitken_cap = t % 2 == 1;
        CvResult r;
        try {
            r = select_bandwidths(ds, {}, o);
        } catch (const NumericalError&) {
            continue;
        }
        auto b = admissible_bounds(ds, BoundsOptions{o.continuous_floor, o.aitken_cap});
        for (std::size_t k = 0; k < ds.p(); ++k) EXPECT_TRUE(b[k].contains(r.bandwidths[k]));
        double again = mscv_objective(ds, validate_bandwidths(r.bandwidths.values(), ds, {o.continuous_floor, o.aitken_cap}));
        EXPECT_NEAR(again, r.objective, 1e-10 * std::max(1.0, std::fabs(again)));
        EXPECT_EQ(r.restarts, 4);
        EXPECT_EQ(r.start_objectives.size(), 4u);
        auto r2 = select_bandwidths(ds, {}, o);
        EXPECT_EQ(r2.bandwidths.values(), r.bandwidths.values());
        EXPECT_EQ(r2.objective, r.objective);
    }
}

TEST(Select, MoreRestartsNeverWorse) {
    Rng rng(45);
    for (int t = 0; t < 6; ++t) {
        auto ds = oracle::random_mixed(rng, 25, 1 + rng.below(2), 1, 1, false);
        double prev = -std::numeric_limits<double>::infinity();
        for (int m : {0, 1, 3, 6}) {
            OptimizerOptions o;
            o.restarts = m;
            o.seed = 7;
            double v = select_bandwidths(ds, {}, o).objective;
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(Select, DistinctCategoricalRowsAvoidTheZeroPlateau) {
    // at lambda = 0 every row is isolated; the search has to move off that plateau
    std::vector<VariableSchema> s{{"u", VariableKind::Unordered, 3, {}}};
    TypedDataset ds(s, {0, 1, 2});
    OptimizerOptions o;
    o.restarts = 2;
    auto r = select_bandwidths(ds, {}, o);
    EXPECT_GT(r.objective, kObjectiveSentinel);
    EXPECT_GT(r.bandwidths[0], 0.95);
}

TEST(Select, NoiseVariableSmoothedOut) {
    auto sample = gen_gridsearch_categorical(5);
    OptimizerOptions o;
    o.restarts = 2;
    o.seed = 5;
    auto r = select_bandwidths(sample.data, {}, o);
    EXPECT_GE(r.bandwidths[0], 1.0 - 0.05);
}

TEST(Select, GridsearchContinuousBandwidths) {
    auto sample = gen_gridsearch_continuous(1);
    OptimizerOptions o;
    o.restarts = 2;
    o.seed = 1;
    auto r = select_bandwidths(sample.data, {}, o);
    EXPECT_NEAR(r.bandwidths[0], 0.443, 0.15);
    EXPECT_NEAR(r.bandwidths[1], 0.483, 0.15);
    EXPECT_TRUE(r.converged);
}

TEST(Select, SubsampleIsFlaggedAndReproducible) {
    Rng rng(46);
    auto ds = oracle::random_mixed(rng, 120, 1, 1, 0);
    OptimizerOptions o;
    o.restarts = 1;
    o.subsample = true;
    o.subsample_size = 50;
    o.seed = 3;
    auto r = select_bandwidths(ds, {}, o);
    EXPECT_TRUE(r.subsampled);
    ASSERT_EQ(r.sample_rows.size(), 50u);
    EXPECT_TRUE(std::is_sorted(r.sample_rows.begin(), r.sample_rows.end()));
    double again = mscv_objective(ds.select_rows(r.sample_rows), r.bandwidths);
    EXPECT_NEAR(again, r.objective, 1e-10 * std::max(1.0, std::fabs(again)));
    o.subsample = false;
    EXPECT_FALSE(select_bandwidths(ds, {}, o).subsampled);
}

TEST(Select, RejectsBadInput) {
    std::vector<VariableSchema> s{{"c", VariableKind::Continuous, 0, {}}};
    EXPECT_THROW(select_bandwidths(TypedDataset(s, {1.0})), ValidationError);
    OptimizerOptions o;
    o.restarts = -1;
    EXPECT_THROW(select_bandwidths(TypedDataset(s, {1.0, 2.0}), {}, o), ValidationError);
}
