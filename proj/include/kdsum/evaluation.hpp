#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kdsum {

struct ContingencyTable {
    std::size_t rows = 0;  // true classes
    std::size_t cols = 0;  // predicted clusters
    std::vector<long long> counts;
    std::vector<long long> row_sums;
    std::vector<long long> col_sums;
    long long n = 0;

    long long at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

// Labels are densified by sorted distinct value.
ContingencyTable contingency(std::span<const int> truth, std::span<const int> pred);

struct AriFraction {
    __int128 num = 0;
    __int128 den = 1;
};

AriFraction ari_exact(const ContingencyTable& ct);
double ari(const ContingencyTable& ct);
double ari(std::span<const int> truth, std::span<const int> pred);

// Maximum-weight assignment on a rows x cols matrix; result[i] is the column for row i
// or -1 when unassigned (rows > cols).
std::vector<int> max_assignment(const std::vector<long long>& weights, std::size_t rows, std::size_t cols);

double clustering_accuracy(std::span<const int> truth, std::span<const int> pred);

}  // namespace kdsum
