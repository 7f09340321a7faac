#include "kdsum/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "kdsum/error.hpp"

namespace kdsum {

namespace {

std::vector<std::size_t> densify(std::span<const int> labels, std::size_t& count) {
    std::map<int, std::size_t> code;
    for (int l : labels) code.emplace(l, 0);
    std::size_t c = 0;
    for (auto& [l, v] : code) v = c++;
    count = c;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = code[labels[i]];
    return out;
}

__int128 choose2(long long m) { return static_cast<__int128>(m) * (m - 1) / 2; }

}  // namespace

ContingencyTable contingency(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size())
        throw ValidationError("label vectors differ in length (" + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()) + ")");
    ContingencyTable ct;
    auto t = densify(truth, ct.rows);
    auto p = densify(pred, ct.cols);
    ct.counts.assign(ct.rows * ct.cols, 0);
    ct.row_sums.assign(ct.rows, 0);
    ct.col_sums.assign(ct.cols, 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        ++ct.counts[t[i] * ct.cols + p[i]];
        ++ct.row_sums[t[i]];
        ++ct.col_sums[p[i]];
    }
    ct.n = static_cast<long long>(truth.size());
    return ct;
}

AriFraction ari_exact(const ContingencyTable& ct) {
    if (ct.n < 2) throw ValidationError("ARI needs at least 2 points");
    __int128 index = 0, a = 0, b = 0;
    for (long long c : ct.counts) index += choose2(c);
    for (long long r : ct.row_sums) a += choose2(r);
    for (long long c : ct.col_sums) b += choose2(c);
    const __int128 total = choose2(ct.n);
    AriFraction f;
    f.num = 2 * total * index - 2 * a * b;
    f.den = total * (a + b) - 2 * a * b;
    if (f.den == 0) {
        // both partitions trivial: all-in-one or all singletons
        bool identical = a == b && index == a;
        f.num = identical ? 1 : 0;
        f.den = 1;
    }
    if (f.den < 0) {
        f.num = -f.num;
        f.den = -f.den;
    }
    return f;
}

double ari(const ContingencyTable& ct) {
    auto f = ari_exact(ct);
    return static_cast<double>(static_cast<long double>(f.num) / static_cast<long double>(f.den));
}

double ari(std::span<const int> truth, std::span<const int> pred) { return ari(contingency(truth, pred)); }

std::vector<int> max_assignment(const std::vector<long long>& weights, std::size_t rows, std::size_t cols) {
    if (weights.size() != rows * cols) throw ValidationError("weight matrix has the wrong size");
    const std::size_t N = std::max(rows, cols);
    if (N == 0) return {};
    long long top = 0;
    for (long long w : weights) top = std::max(top, w);
    auto cost = [&](std::size_t i, std::size_t j) -> long long {
        long long w = (i < rows && j < cols) ? weights[i * cols + j] : 0;
        return top - w;
    };
    // Hungarian method with potentials, 1-based.
    const long long INF = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(N + 1, 0), v(N + 1, 0), minv(N + 1);
    std::vector<std::size_t> p(N + 1, 0), way(N + 1, 0);
    std::vector<char> used(N + 1);
    for (std::size_t i = 1; i <= N; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), INF);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            long long delta = INF;
            for (std::size_t j = 1; j <= N; ++j) {
                if (used[j]) continue;
                long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= N; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> out(rows, -1);
    for (std::size_t j = 1; j <= N; ++j)
        if (p[j] >= 1 && p[j] - 1 < rows && j - 1 < cols) out[p[j] - 1] = static_cast<int>(j - 1);
    return out;
}

double clustering_accuracy(std::span<const int> truth, std::span<const int> pred) {
    auto ct = contingency(truth, pred);
    if (ct.n == 0) throw ValidationError("no labels to score");
    if (ct.rows > 64 || ct.cols > 64) throw ValidationError("clustering accuracy supports at most 64 classes and clusters");
    auto match = max_assignment(ct.counts, ct.rows, ct.cols);
    long long hits = 0;
    for (std::size_t i = 0; i < ct.rows; ++i)
        if (match[i] >= 0) hits += ct.at(i, static_cast<std::size_t>(match[i]));
    return double(hits) / double(ct.n);
}

}  // namespace kdsum
