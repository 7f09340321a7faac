#pragma once

#include <cstddef>
#include <vector>

#include "kdsum/dataset.hpp"

namespace kdsum {

// Dense symmetric n x n matrix with zero diagonal and nonnegative entries.
class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;
    explicit DissimilarityMatrix(std::size_t n, std::vector<double> entries);

    std::size_t n() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    const std::vector<double>& entries() const { return d_; }

    bool operator==(const DissimilarityMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct MetricReport {
    std::size_t triples_checked = 0;
    std::size_t triangle_violations = 0;
    double worst_excess = 0.0;  // max of d(i,k) - d(i,j) - d(j,k)
    std::size_t wi = 0, wj = 0, wk = 0;
    std::size_t identity_violations = 0;  // d == 0 iff rows equal

    bool ok() const { return triangle_violations == 0 && identity_violations == 0; }
};

// All triples when n <= exhaustive_limit, otherwise `samples` seeded random triples.
MetricReport check_triangle(const DissimilarityMatrix& dm, double tol, std::size_t exhaustive_limit = 60,
                            std::size_t samples = 200000, unsigned long long seed = 1);
// Counts pairs where (d == 0) disagrees with exact row equality.
std::size_t check_indiscernibles(const DissimilarityMatrix& dm, const TypedDataset& ds);

}  // namespace kdsum
