#include "kdsum/kernels.hpp"

#include <cmath>
#include <string>

#include "kdsum/error.hpp"

namespace kdsum {

std::string_view kernel_name(ContinuousKernel k) {
    return k == ContinuousKernel::Gaussian ? "gaussian" : "epanechnikov";
}

ContinuousKernel parse_kernel(std::string_view text) {
    if (text == "gaussian") return ContinuousKernel::Gaussian;
    if (text == "epanechnikov") return ContinuousKernel::Epanechnikov;
    throw ValidationError("unknown continuous kernel '" + std::string(text) + "'");
}

namespace {

void require_positive(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("continuous bandwidth must be positive and finite");
}

void require_unit(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("categorical bandwidth must lie in [0, 1]");
}

}  // namespace

double eval_gaussian(double xi, double xj, double lambda) {
    require_positive(lambda);
    double u = (xi - xj) / lambda;
    double e = -0.5 * u * u;
    if (e < kExpFloor) return 0.0;
    return kInvSqrt2Pi * std::exp(e);
}

double eval_epanechnikov(double xi, double xj, double lambda) {
    require_positive(lambda);
    double u = (xi - xj) / lambda;
    if (std::abs(u) > 1.0) return 0.0;
    return 0.75 * (1.0 - u * u);
}

double eval_aitken(long xi, long xj, double lambda) {
    require_unit(lambda);
    return xi == xj ? 1.0 : lambda;
}

double eval_wvr(long xi, long xj, double lambda) {
    require_unit(lambda);
    if (xi == xj) return 1.0 - lambda;
    if (lambda == 0.0) return 0.0;
    long d = xi > xj ? xi - xj : xj - xi;
    return 0.5 * (1.0 - lambda) * std::pow(lambda, static_cast<double>(d));
}

double eval_joint(std::span<const double> xi, std::span<const double> xj, const BandwidthVector& bw,
                  const ColumnLayout& layout, const KernelSelection& kernels) {
    if (xi.size() != layout.p() || xj.size() != layout.p() || bw.size() != layout.p())
        throw ValidationError("row or bandwidth length does not match the column layout");
    double prod = 1.0;
    std::size_t k = 0;
    for (; k < layout.pc; ++k) {
        double kv = kernels.continuous == ContinuousKernel::Gaussian ? eval_gaussian(xi[k], xj[k], bw[k])
                                                                      : eval_epanechnikov(xi[k], xj[k], bw[k]);
        prod *= kv / bw[k];
    }
    for (; k < layout.pc + layout.pu; ++k) prod *= eval_aitken(long(xi[k]), long(xj[k]), bw[k]);
    for (; k < layout.p(); ++k) prod *= eval_wvr(long(xi[k]), long(xj[k]), bw[k]);
    return prod;
}

}  // namespace kdsum
