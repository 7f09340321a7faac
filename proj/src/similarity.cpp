#include "kdsum/similarity.hpp"

#include <cmath>
#include <string>

#include "kdsum/error.hpp"

namespace kdsum {

PairSimilarity::PairSimilarity(const ColumnLayout& layout, const SimilarityConfig& cfg)
    : layout_(layout), kernel_(cfg.kernels.continuous) {
    const auto& bw = cfg.bandwidths;
    if (bw.size() != layout.p()) throw ValidationError("bandwidth vector length does not match the dataset");
    std::size_t k = 0;
    if (layout.pc > 0) {
        scale_ = 1.0;
        log_scale_ = 0.0;
    }
    for (; k < layout.pc; ++k) {
        double l = bw[k];
        if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("continuous bandwidth must be positive and finite");
        lam_.push_back(l);
        double c = kernel_ == ContinuousKernel::Gaussian ? kInvSqrt2Pi / l : 0.75 / l;
        scale_ *= c;
        log_scale_ += std::log(c);
        inv2l2_.push_back(kernel_ == ContinuousKernel::Gaussian ? 0.5 / (l * l) : 1.0 / (l * l));
    }
    for (; k < layout.pc + layout.pu; ++k) {
        if (!(bw[k] >= 0.0 && bw[k] <= 1.0)) throw ValidationError("categorical bandwidth must lie in [0, 1]");
        aitken_.push_back(bw[k]);
    }
    for (; k < layout.p(); ++k) {
        double l = bw[k];
        if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("categorical bandwidth must lie in [0, 1]");
        wvr_lam_.push_back(l);
        wvr_match_.push_back(1.0 - l);
        wvr_half_.push_back(0.5 * (1.0 - l));
    }
}

void PairSimilarity::split(const double* a, const double* b, double& cont, double& cat) const {
    const std::size_t pc = layout_.pc, pu = layout_.pu;
    cont = 0.0;
    if (pc > 0) {
        if (kernel_ == ContinuousKernel::Gaussian) {
            double e = 0.0;
            bool zero = false;
            for (std::size_t k = 0; k < pc; ++k) {
                double d = a[k] - b[k];
                double ek = -d * d * inv2l2_[k];
                if (ek < kExpFloor) zero = true;
                e += ek;
            }
            cont = zero || e < kExpFloor ? 0.0 : std::exp(e);
        } else {
            double prod = 1.0;
            for (std::size_t k = 0; k < pc && prod > 0.0; ++k) {
                double d = a[k] - b[k];
                double u2 = d * d * inv2l2_[k];
                prod = u2 > 1.0 ? 0.0 : prod * (1.0 - u2);
            }
            cont = prod;
        }
    }
    cat = 0.0;
    for (std::size_t k = 0; k < pu; ++k) cat += a[pc + k] == b[pc + k] ? 1.0 : aitken_[k];
    const std::size_t off = pc + pu;
    for (std::size_t k = 0; k < layout_.po; ++k) {
        double x = a[off + k], y = b[off + k];
        if (x == y) {
            cat += wvr_match_[k];
        } else if (wvr_lam_[k] > 0.0) {
            cat += wvr_half_[k] * std::pow(wvr_lam_[k], std::abs(x - y));
        }
    }
}

double PairSimilarity::operator()(const double* a, const double* b) const {
    double cont, cat;
    split(a, b, cont, cat);
    return (cont == 0.0 ? 0.0 : scale_ * cont) + cat;
}

double psi(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
           const SimilarityConfig& cfg) {
    if (xi.size() != layout.p() || xj.size() != layout.p()) throw ValidationError("row length does not match the layout");
    return PairSimilarity(layout, cfg)(xi.data(), xj.data());
}

double kdsum_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                      const SimilarityConfig& cfg) {
    if (xi.size() != layout.p() || xj.size() != layout.p()) throw ValidationError("row length does not match the layout");
    PairSimilarity sim(layout, cfg);
    return sim(xi.data(), xi.data()) + sim(xj.data(), xj.data()) - 2.0 * sim(xi.data(), xj.data());
}

DissimilarityMatrix build_matrix(const TypedDataset& ds, const SimilarityConfig& cfg) {
    const std::size_t n = ds.n(), p = ds.p();
    PairSimilarity sim(ds.layout(), cfg);
    const double* x = ds.values().data();
    std::vector<double> self(n);
    for (std::size_t i = 0; i < n; ++i) self[i] = sim(x + i * p, x + i * p);
    if (n > 0 && !std::isfinite(self[0]))
        throw NumericalError("self-similarity overflows; continuous bandwidths too small for this many variables");

    std::vector<double> d(n * n, 0.0);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long ii = 0; ii < nn; ++ii) {
        std::size_t i = static_cast<std::size_t>(ii);
        d[i * n + i] = self[i] + self[i] - 2.0 * self[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = self[i] + self[j] - 2.0 * sim(x + i * p, x + j * p);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i * n + i] != 0.0) throw NumericalError("nonzero self-distance at row " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j)
            if (!std::isfinite(d[i * n + j]))
                throw NumericalError("non-finite distance between rows " + std::to_string(i) + " and " + std::to_string(j) +
                                     "; bandwidths too small for this data");
    }
    return DissimilarityMatrix(n, std::move(d));
}

}  // namespace kdsum
