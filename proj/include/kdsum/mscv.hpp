#pragma once

#include <cstdint>
#include <vector>

#include "kdsum/bandwidths.hpp"
#include "kdsum/dataset.hpp"
#include "kdsum/kernels.hpp"

namespace kdsum {

// Returned for a leave-one-out average similarity that is not positive.
inline constexpr double kObjectiveSentinel = -1e300;

// ln of each row's leave-one-out average similarity, sentinel where it is <= 0.
std::vector<double> mscv_terms(const TypedDataset& ds, const BandwidthVector& bw, const KernelSelection& kernels = {});
// Sum of the terms (to be maximized); sentinel if any term is.
double mscv_objective(const TypedDataset& ds, const BandwidthVector& bw, const KernelSelection& kernels = {});

struct OptimizerOptions {
    int restarts = 10;            // Latin-hypercube starts besides the rule-of-thumb start
    std::uint64_t seed = 0;
    int max_evals = 0;            // per start; 0 means 500 * p
    double tolerance = 1e-6;      // simplex diameter in transformed coordinates
    bool aitken_cap = false;
    double continuous_floor = 1e-12;
    bool subsample = false;
    std::size_t subsample_size = 2000;
};

struct CvResult {
    BandwidthVector bandwidths;
    double objective = kObjectiveSentinel;
    std::size_t evaluations = 0;
    int restarts = 0;             // number of starts actually run
    bool converged = false;       // winning start met the diameter criterion
    bool subsampled = false;
    std::vector<double> start_objectives;
    std::vector<std::size_t> sample_rows;  // rows the objective was evaluated on when subsampled
};

CvResult select_bandwidths(const TypedDataset& ds, const KernelSelection& kernels = {},
                           const OptimizerOptions& opts = {});

// Starting points in bandwidth space: index 0 is the rule of thumb, then `restarts`
// Latin-hypercube points. The list for m restarts is a prefix of the list for m+1.
std::vector<std::vector<double>> starting_points(const TypedDataset& ds, const std::vector<Interval>& bounds,
                                                 int restarts, std::uint64_t seed);

}  // namespace kdsum
