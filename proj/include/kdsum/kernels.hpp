#pragma once

#include <span>
#include <string_view>

#include "kdsum/bandwidths.hpp"
#include "kdsum/dataset.hpp"

namespace kdsum {

enum class ContinuousKernel { Gaussian, Epanechnikov };

std::string_view kernel_name(ContinuousKernel k);
ContinuousKernel parse_kernel(std::string_view text);

// Unordered variables always use Aitken, ordered always Wang-van Ryzin.
struct KernelSelection {
    ContinuousKernel continuous = ContinuousKernel::Gaussian;
};

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
// Exponents below this evaluate to exactly zero.
inline constexpr double kExpFloor = -745.0;

double eval_gaussian(double xi, double xj, double lambda);
double eval_epanechnikov(double xi, double xj, double lambda);
double eval_aitken(long xi, long xj, double lambda);
double eval_wvr(long xi, long xj, double lambda);

// Product of every kernel factor: continuous (1/lambda) k, Aitken, Wang-van Ryzin.
double eval_joint(std::span<const double> xi, std::span<const double> xj, const BandwidthVector& bw,
                  const ColumnLayout& layout, const KernelSelection& kernels = {});

}  // namespace kdsum
