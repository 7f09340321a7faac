#pragma once

#include <span>

#include "kdsum/bandwidths.hpp"
#include "kdsum/dataset.hpp"
#include "kdsum/kernels.hpp"
#include "kdsum/matrix.hpp"

namespace kdsum {

struct SimilarityConfig {
    KernelSelection kernels;
    BandwidthVector bandwidths;
};

// Continuous block is a product of scaled kernels (0 when there are no continuous
// columns), categorical blocks are sums of kernel values.
double psi(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
           const SimilarityConfig& cfg);
double kdsum_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                      const SimilarityConfig& cfg);

DissimilarityMatrix build_matrix(const TypedDataset& ds, const SimilarityConfig& cfg);

// Same pair evaluator as psi with the bandwidth-dependent constants hoisted.
class PairSimilarity {
public:
    PairSimilarity(const ColumnLayout& layout, const SimilarityConfig& cfg);

    double operator()(const double* a, const double* b) const;
    // Continuous block and categorical sum kept apart; psi = scale * cont + cat.
    void split(const double* a, const double* b, double& cont, double& cat) const;
    double continuous_scale() const { return scale_; }
    double log_continuous_scale() const { return log_scale_; }

private:
    ColumnLayout layout_;
    ContinuousKernel kernel_;
    std::vector<double> inv2l2_;  // gaussian: 1/(2 lambda^2); epanechnikov: 1/lambda^2
    std::vector<double> lam_;
    double scale_ = 0.0;
    double log_scale_ = 0.0;
    std::vector<double> aitken_;
    std::vector<double> wvr_match_, wvr_half_, wvr_lam_;
};

}  // namespace kdsum
