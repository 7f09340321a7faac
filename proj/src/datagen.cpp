#include "kdsum/datagen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kdsum/error.hpp"
#include "kdsum/rng.hpp"

namespace kdsum {

namespace {

constexpr double kPi = std::numbers::pi;

VariableSchema cont(const std::string& name) { return {name, VariableKind::Continuous, 0, {}}; }

VariableSchema categorical(const std::string& name, VariableKind kind, int levels, int first_label = 0) {
    VariableSchema v{name, kind, levels, {}};
    for (int i = 0; i < levels; ++i) v.labels.push_back(std::to_string(first_label + i));
    return v;
}

std::vector<std::size_t> sizes_or(const SimSpec& spec, std::size_t clusters) {
    auto s = spec.sizes.empty() ? default_sim_sizes(spec.sim) : spec.sizes;
    if (s.size() != clusters)
        throw ValidationError("sim " + std::to_string(spec.sim) + " needs " + std::to_string(clusters) + " cluster sizes");
    for (auto v : s)
        if (v == 0) throw ValidationError("cluster sizes must be positive");
    return s;
}

// Upper moon for cluster 0, lower interleaved moon for cluster 1, radius 3, then
// normal noise and a uniform shift in each coordinate.
void moons(Rng& rng, const std::vector<std::size_t>& sizes, std::vector<double>& xy, std::vector<int>& labels) {
    const double R = 3.0;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            double t = rng.uniform(0.0, kPi);
            double x = c == 0 ? R * std::cos(t) : R - R * std::cos(t);
            double y = c == 0 ? R * std::sin(t) : 0.5 * R - R * std::sin(t);
            x += rng.normal(0.0, 0.1);
            y += rng.normal(0.0, 0.1);
            x += rng.uniform(-0.5, 0.5);
            y += rng.uniform(-0.5, 0.5);
            xy.push_back(x);
            xy.push_back(y);
            labels.push_back(c);
        }
    }
}

Sample continuous_sample(std::vector<double> xy, std::vector<int> labels) {
    return {TypedDataset({cont("x1"), cont("x2")}, std::move(xy)), std::move(labels)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

int draw_level(Rng& rng, const std::vector<double>& masses) {
    double u = rng.uniform(), acc = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j) {
        acc += masses[j];
        if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(masses.size()) - 1;
}

}  // namespace

std::vector<std::size_t> default_sim_sizes(int sim) {
    switch (sim) {
    case 1: return {97, 276};
    case 2: return {2000, 50};
    case 3: return {100, 100};
    case 4: return {100, 100};
    case 5: return {67, 67, 66};
    case 6: return {97, 276};
    }
    throw ValidationError("unknown simulation " + std::to_string(sim) + " (expected 1-6)");
}

Sample gen_sim(const SimSpec& spec) {
    Rng rng(spec.seed);
    std::vector<double> v;
    std::vector<int> labels;
    switch (spec.sim) {
    case 1: {
        moons(rng, sizes_or(spec, 2), v, labels);
        return continuous_sample(std::move(v), std::move(labels));
    }
    case 2: {
        auto s = sizes_or(spec, 2);
        for (std::size_t i = 0; i < s[0]; ++i) {
            v.push_back(rng.normal(0.0, 0.5));
            v.push_back(rng.normal(0.0, 0.5));
            labels.push_back(0);
        }
        for (std::size_t i = 0; i < s[1]; ++i) {
            v.push_back(rng.normal(4.0, 3.0));
            v.push_back(rng.normal(0.0, 3.0));
            labels.push_back(1);
        }
        return continuous_sample(std::move(v), std::move(labels));
    }
    case 3: {
        auto s = sizes_or(spec, 2);
        for (std::size_t i = 0; i < s[0]; ++i) {
            v.push_back(rng.normal(0.0, 0.5));
            v.push_back(rng.normal(0.0, 0.5));
            labels.push_back(0);
        }
        for (std::size_t i = 0; i < s[1]; ++i) {
            double th = rng.uniform(0.0, 2.0 * kPi);
            double r = 5.0 + rng.normal(0.0, 0.3);
            v.push_back(r * std::cos(th));
            v.push_back(r * std::sin(th));
            labels.push_back(1);
        }
        return continuous_sample(std::move(v), std::move(labels));
    }
    case 4: {
        auto s = sizes_or(spec, 2);
        const double turns = 3.0, rmax = 10.0;
        for (int c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < s[c]; ++i) {
                double th = rng.uniform(0.0, 2.0 * kPi * turns);
                double r = rmax * th / (2.0 * kPi * turns);
                double a = th + rng.normal(0.0, 0.05) + (c == 0 ? 0.0 : kPi);
                v.push_back(r * std::cos(a));
                v.push_back(r * std::sin(a));
                labels.push_back(c);
            }
        }
        return continuous_sample(std::move(v), std::move(labels));
    }
    case 5: {
        auto s = sizes_or(spec, 3);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t i = 0; i < s[c]; ++i) {
                v.push_back(double(rng.integer(0, 1)));
                v.push_back(double(rng.integer(0, 1)));
                for (int k = 0; k < 3; ++k) v.push_back(double(rng.integer(10 * c, 10 * c + 9)));
                labels.push_back(c);
            }
        }
        std::vector<VariableSchema> schema{categorical("x1", VariableKind::Unordered, 2),
                                           categorical("x2", VariableKind::Unordered, 2),
                                           categorical("x3", VariableKind::Unordered, 30),
                                           categorical("x4", VariableKind::Unordered, 30),
                                           categorical("x5", VariableKind::Unordered, 30)};
        return {TypedDataset(std::move(schema), std::move(v)), std::move(labels)};
    }
    case 6: {
        auto s = sizes_or(spec, 2);
        std::vector<double> xy;
        moons(rng, s, xy, labels);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            v.push_back(xy[2 * i]);
            v.push_back(xy[2 * i + 1]);
            v.push_back(double(rng.integer(0, 1)));
            for (int k = 0; k < 2; ++k)
                v.push_back(labels[i] == 0 ? std::round(rng.uniform(0.0, 2.0)) : std::round(rng.uniform(3.0, 4.0)));
        }
        std::vector<VariableSchema> schema{cont("x1"), cont("x2"), categorical("x3", VariableKind::Unordered, 2),
                                           categorical("x4", VariableKind::Unordered, 5),
                                           categorical("x5", VariableKind::Unordered, 5)};
        return {TypedDataset(std::move(schema), std::move(v)), std::move(labels)};
    }
    }
    throw ValidationError("unknown simulation " + std::to_string(spec.sim) + " (expected 1-6)");
}

Sample gen_gridsearch_continuous(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v;
    std::vector<int> labels;
    for (int c = 0; c < 5; ++c) {
        double cx = rng.uniform(0.0, 12.0), cy = rng.uniform(0.0, 12.0);
        auto m = rng.integer(50, 200);
        for (long long i = 0; i < m; ++i) {
            v.push_back(rng.normal(cx, 1.0));
            v.push_back(rng.normal(cy, 1.0));
            labels.push_back(c);
        }
    }
    return continuous_sample(std::move(v), std::move(labels));
}

Sample gen_gridsearch_categorical(std::uint64_t seed, bool three_clusters) {
    Rng rng(seed);
    const int clusters = three_clusters ? 3 : 2;
    const int top = three_clusters ? 15 : 10;
    const int lo[3] = {1, 5, 10}, hi[3] = {5, 10, 15};
    std::vector<double> v;
    std::vector<int> labels;
    for (int c = 0; c < clusters; ++c) {
        for (int i = 0; i < 75; ++i) {
            v.push_back(double(rng.integer(0, 1)));
            v.push_back(double(rng.integer(lo[c], hi[c]) - 1));
            v.push_back(double(rng.integer(lo[c], hi[c]) - 1));
            labels.push_back(c);
        }
    }
    std::vector<VariableSchema> schema{categorical("x1", VariableKind::Unordered, 2),
                                       categorical("x2", VariableKind::Unordered, top, 1),
                                       categorical("x3", VariableKind::Unordered, top, 1)};
    return {TypedDataset(std::move(schema), std::move(v)), std::move(labels)};
}

double overlap_separation(double overlap) {
    if (!(overlap > 0.0 && overlap < 1.0)) throw ValidationError("overlap must lie in (0, 1)");
    // overlap of N(0,1) and N(d,1) is 2 * Phi(-d/2), decreasing in d
    double lo = 0.0, hi = 80.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (2.0 * normal_cdf(-mid / 2.0) > overlap) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<std::vector<double>, std::vector<double>> overlap_masses(int levels, double overlap) {
    if (!(overlap > 0.0 && overlap < 1.0)) throw ValidationError("overlap must lie in (0, 1)");
    if (levels < 2) throw ValidationError("categorical overlap needs at least 2 levels");
    const int half = levels / 2;
    std::vector<double> p1(levels), p2(levels);
    for (int j = 0; j < levels; ++j) {
        double shared = overlap / levels;
        p1[j] = shared + (j < half ? (1.0 - overlap) / half : 0.0);
        p2[j] = shared + (j >= half ? (1.0 - overlap) / (levels - half) : 0.0);
    }
    return {p1, p2};
}

Sample gen_mixed(const MixedGenSpec& spec) {
    if (spec.n < 2) throw ValidationError("need at least 2 rows");
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) throw ValidationError("cluster ratio must lie in (0, 1)");
    if (spec.continuous + spec.unordered + spec.ordered == 0) throw ValidationError("no variables requested");
    const double delta = spec.continuous ? overlap_separation(spec.continuous_overlap) : 0.0;
    std::pair<std::vector<double>, std::vector<double>> masses;
    if (spec.unordered + spec.ordered > 0) masses = overlap_masses(spec.levels, spec.categorical_overlap);

    auto n0 = static_cast<std::size_t>(std::llround(spec.ratio * double(spec.n)));
    n0 = std::min(std::max<std::size_t>(n0, 1), spec.n - 1);
    Rng rng(spec.seed);
    std::vector<double> v;
    std::vector<int> labels;
    for (std::size_t i = 0; i < spec.n; ++i) {
        int c = i < n0 ? 0 : 1;
        for (std::size_t k = 0; k < spec.continuous; ++k) v.push_back(rng.normal(c == 0 ? 0.0 : delta, 1.0));
        const auto& m = c == 0 ? masses.first : masses.second;
        for (std::size_t k = 0; k < spec.unordered + spec.ordered; ++k) v.push_back(double(draw_level(rng, m)));
        labels.push_back(c);
    }
    std::vector<VariableSchema> schema;
    for (std::size_t k = 0; k < spec.continuous; ++k) schema.push_back(cont("c" + std::to_string(k + 1)));
    for (std::size_t k = 0; k < spec.unordered; ++k)
        schema.push_back(categorical("u" + std::to_string(k + 1), VariableKind::Unordered, spec.levels));
    for (std::size_t k = 0; k < spec.ordered; ++k)
        schema.push_back(categorical("o" + std::to_string(k + 1), VariableKind::Ordered, spec.levels));
    return {TypedDataset(std::move(schema), std::move(v)), std::move(labels)};
}

Sample gen_gridsearch_mixed(std::uint64_t seed) {
    MixedGenSpec spec;
    spec.seed = seed;
    return gen_mixed(spec);
}

}  // namespace kdsum
