#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kdsum/dataset.hpp"

namespace kdsum {

struct Sample {
    TypedDataset data;
    std::vector<int> labels;
};

struct SimSpec {
    int sim = 1;
    std::uint64_t seed = 0;
    std::vector<std::size_t> sizes;  // per cluster; empty means defaults
};

std::vector<std::size_t> default_sim_sizes(int sim);
Sample gen_sim(const SimSpec& spec);

// Five unit-covariance normal clusters with centres in [0,12]^2, 50..200 rows each.
Sample gen_gridsearch_continuous(std::uint64_t seed);
// Binary noise plus two informative unordered variables, 75 rows per cluster.
Sample gen_gridsearch_categorical(std::uint64_t seed, bool three_clusters = true);

struct MixedGenSpec {
    std::size_t n = 200;
    double ratio = 0.4;  // share of rows in cluster 0
    std::size_t continuous = 1;
    std::size_t unordered = 1;
    std::size_t ordered = 1;
    int levels = 4;
    double continuous_overlap = 0.05;
    double categorical_overlap = 0.35;
    std::uint64_t seed = 0;
};

Sample gen_mixed(const MixedGenSpec& spec);
// One continuous, one unordered, one ordered variable; 200 rows at 40:60.
Sample gen_gridsearch_mixed(std::uint64_t seed);

// Mean separation of two unit normals whose densities overlap by `overlap`.
double overlap_separation(double overlap);
// Two level distributions with sum_j min(p1_j, p2_j) == overlap.
std::pair<std::vector<double>, std::vector<double>> overlap_masses(int levels, double overlap);

}  // namespace kdsum
