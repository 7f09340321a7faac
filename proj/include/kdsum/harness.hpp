#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kdsum/clustering.hpp"
#include "kdsum/datagen.hpp"
#include "kdsum/dataset.hpp"
#include "kdsum/kernels.hpp"
#include "kdsum/matrix.hpp"
#include "kdsum/mscv.hpp"

namespace kdsum {

enum class Algo { Hac, KMeansDist };
std::string_view algo_name(Algo a);
Algo parse_algo(std::string_view text);

struct DistanceOptions {
    std::string metric = "kdsum";  // kdsum | gower | huang | podani | wishart
    KernelSelection kernels;
    std::optional<std::vector<double>> bandwidths;  // kdsum only; MSCV when absent
    OptimizerOptions optimizer;
    std::optional<double> gamma;  // huang only
};

struct DistanceResult {
    DissimilarityMatrix matrix;
    std::optional<CvResult> cv;
    std::vector<double> bandwidths;  // kdsum only
    double seconds = 0.0;
};

DistanceResult compute_distance(const TypedDataset& ds, const DistanceOptions& opts);

struct Report {
    std::size_t n = 0;
    std::size_t k_true = 0;
    std::size_t k_pred = 0;
    double ca = 0.0;
    double ari = 0.0;
};

Report evaluate(const std::vector<int>& truth, const std::vector<int>& pred);

std::vector<int> cluster_labels(const DissimilarityMatrix& dm, Algo algo, Linkage linkage, std::size_t k,
                                std::uint64_t seed);

struct MethodReport {
    std::string method;  // "hac/average", "kmeansdist"
    Report report;
    double seconds = 0.0;
};

struct PipelineResult {
    DistanceResult distance;
    std::vector<MethodReport> methods;
    std::size_t best = 0;  // highest CA, then ARI, then first listed
};

PipelineResult run_pipeline(const TypedDataset& ds, const std::vector<int>& truth, const DistanceOptions& dopts,
                            Algo algo, const std::vector<Linkage>& linkages, std::size_t k, std::uint64_t seed);

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.05;

    std::size_t count() const;
    double value(std::size_t i) const;
};

// "lo:hi:step"
GridAxis parse_axis(std::string_view text);
std::size_t grid_size(const std::vector<GridAxis>& axes);
// Row-major enumeration, last axis fastest.
std::vector<double> grid_point(const std::vector<GridAxis>& axes, std::size_t index);

struct GridRow {
    std::vector<double> lambda;
    double ca = 0.0;
    double ari = 0.0;
};

struct GridOptions {
    KernelSelection kernels;
    Algo algo = Algo::KMeansDist;
    Linkage linkage = Linkage::Average;
    std::size_t k = 2;
    std::uint64_t seed = 0;
    int replicates = 10;
    double continuous_floor = 1e-12;
    bool allow_large = false;
};

inline constexpr std::size_t kLargeGrid = 1000000;

// Continuous grid values below the floor are evaluated at the floor.
std::vector<GridRow> run_gridsearch(const TypedDataset& ds, const std::vector<int>& truth,
                                    const std::vector<GridAxis>& axes, const GridOptions& opts);

struct MonteCarloSpec {
    std::string generator = "sim";  // sim | mixed
    int sim = 1;
    MixedGenSpec mixed;
    std::vector<std::size_t> sizes;  // mixed: total n per study size; sim: ignored when empty
    int reps = 100;
    DistanceOptions distance;
    Algo algo = Algo::Hac;
    std::vector<Linkage> linkages{Linkage::Average};
    std::size_t k = 2;
    std::uint64_t seed = 0;
};

struct MonteCarloRow {
    std::size_t size = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string method;
    double ca = 0.0;
    double ari = 0.0;
    double seconds = 0.0;
};

struct SummaryRow {
    std::size_t size = 0;
    std::string method;
    std::size_t reps = 0;
    double mean_ca = 0.0, median_ca = 0.0, q05_ca = 0.0, q95_ca = 0.0;
    double mean_ari = 0.0, median_ari = 0.0, q05_ari = 0.0, q95_ari = 0.0;
    double mean_seconds = 0.0;
};

std::vector<MonteCarloRow> run_montecarlo(const MonteCarloSpec& spec,
                                          const std::function<void(std::size_t, std::size_t)>& progress = {});
std::vector<SummaryRow> summarize(const std::vector<MonteCarloRow>& rows);

// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace kdsum
