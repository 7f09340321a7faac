#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "kdsum/matrix.hpp"

namespace kdsum {

enum class Linkage { Single, Complete, Average, Ward, Median, Centroid };

std::string_view linkage_name(Linkage l);
Linkage parse_linkage(std::string_view text);
inline constexpr Linkage kAllLinkages[] = {Linkage::Single, Linkage::Complete, Linkage::Average,
                                           Linkage::Ward,   Linkage::Median,   Linkage::Centroid};

// Leaves are nodes 0..n-1; merge m creates node n+m. left < right.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t node = 0;
};

struct Dendrogram {
    std::size_t n = 0;
    std::vector<Merge> merges;
};

// Lance-Williams agglomeration. Ward, median and centroid update squared distances
// and report square-rooted heights. Linkage values equal to a relative 1e-12 merge the pair with the
// lexicographically smallest (lower id, higher id).
Dendrogram hac(const DissimilarityMatrix& dm, Linkage linkage);

// Applies the first n-k merges; labels numbered by first member.
std::vector<int> cut(const Dendrogram& dg, std::size_t k);

struct KMedoidsResult {
    std::vector<int> labels;
    std::vector<std::size_t> medoids;
    double cost = 0.0;
    int best_replicate = 0;
    std::vector<std::vector<double>> traces;  // objective after each assignment, per replicate
};

KMedoidsResult kmeans_dist(const DissimilarityMatrix& dm, std::size_t k, std::uint64_t seed, int max_iter = 100,
                           int replicates = 10);

// Renumbers labels 0,1,2,... in order of first appearance.
std::vector<int> relabel_by_first(const std::vector<int>& labels);

}  // namespace kdsum
