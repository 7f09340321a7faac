#include "kdsum/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdsum/error.hpp"
#include "kdsum/rng.hpp"

namespace kdsum {

DissimilarityMatrix::DissimilarityMatrix(std::size_t n, std::vector<double> entries) : n_(n), d_(std::move(entries)) {
    if (d_.size() != n * n) throw ValidationError("matrix needs n*n entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (d_[i * n + i] != 0.0) throw ValidationError("nonzero diagonal at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            double a = d_[i * n + j];
            if (std::isnan(a)) throw NumericalError("NaN distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (a != d_[j * n + i]) throw ValidationError("asymmetric entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (a < 0) throw ValidationError("negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

namespace {

void check_one(const DissimilarityMatrix& dm, std::size_t i, std::size_t j, std::size_t k, double tol,
               MetricReport& r) {
    double excess = dm(i, k) - dm(i, j) - dm(j, k);
    ++r.triples_checked;
    if (excess > tol) ++r.triangle_violations;
    if (excess > r.worst_excess) {
        r.worst_excess = excess;
        r.wi = i;
        r.wj = j;
        r.wk = k;
    }
}

}  // namespace

MetricReport check_triangle(const DissimilarityMatrix& dm, double tol, std::size_t exhaustive_limit,
                            std::size_t samples, unsigned long long seed) {
    MetricReport r;
    const std::size_t n = dm.n();
    if (n < 3) return r;
    if (n <= exhaustive_limit) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (i != j && j != k && i != k) check_one(dm, i, j, k, tol, r);
        return r;
    }
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t i = rng.below(n), j = rng.below(n), k = rng.below(n);
        if (i == j || j == k || i == k) continue;
        check_one(dm, i, j, k, tol, r);
    }
    return r;
}

std::size_t check_indiscernibles(const DissimilarityMatrix& dm, const TypedDataset& ds) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < ds.n(); ++i)
        for (std::size_t j = i + 1; j < ds.n(); ++j) {
            auto a = ds.row(i), b = ds.row(j);
            bool same = std::equal(a.begin(), a.end(), b.begin());
            if (same != (dm(i, j) == 0.0)) ++bad;
        }
    return bad;
}

}  // namespace kdsum
