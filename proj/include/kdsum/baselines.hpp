#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kdsum/dataset.hpp"
#include "kdsum/matrix.hpp"

namespace kdsum {

enum class BaselineKind { Gower, Huang, Podani, Wishart };

std::string_view baseline_name(BaselineKind k);
BaselineKind parse_baseline(std::string_view text);

// Per continuous column: max - min and sample standard deviation.
struct ColumnStats {
    std::vector<double> range;
    std::vector<double> sd;
};

ColumnStats column_stats(const TypedDataset& ds);
// Mean sample variance of the continuous columns; throws when there are none.
double huang_gamma(const TypedDataset& ds);

double gower_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                      std::span<const double> ranges);
double huang_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                      double gamma);
double podani_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                       std::span<const double> ranges);
double wishart_distance(std::span<const double> xi, std::span<const double> xj, const ColumnLayout& layout,
                        std::span<const double> sds);

// gamma only applies to Huang; defaults to huang_gamma(ds).
DissimilarityMatrix baseline_matrix(const TypedDataset& ds, BaselineKind kind,
                                    std::optional<double> gamma = std::nullopt);

}  // namespace kdsum
