#include "kdsum/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "kdsum/error.hpp"
#include "kdsum/rng.hpp"

namespace kdsum {

std::string_view linkage_name(Linkage l) {
    switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Ward: return "ward";
    case Linkage::Median: return "median";
    case Linkage::Centroid: return "centroid";
    }
    return "?";
}

Linkage parse_linkage(std::string_view text) {
    for (auto l : kAllLinkages)
        if (linkage_name(l) == text) return l;
    throw ValidationError("unknown linkage '" + std::string(text) + "'");
}

namespace {

bool squared_update(Linkage l) { return l == Linkage::Ward || l == Linkage::Median || l == Linkage::Centroid; }

constexpr double kTieTolerance = 1e-12;

// Values within a relative kTieTolerance are equal, so rounding in the updates
// cannot override the id order.
struct Key {
    double v;
    std::size_t lo, hi;
    bool operator<(const Key& o) const {
        if (std::fabs(v - o.v) > kTieTolerance * std::max(std::fabs(v), std::fabs(o.v))) return v < o.v;
        return std::tie(lo, hi) < std::tie(o.lo, o.hi);
    }
};

}  // namespace

Dendrogram hac(const DissimilarityMatrix& dm, Linkage linkage) {
    const std::size_t n = dm.n();
    if (n < 2) throw ValidationError("hierarchical clustering needs at least 2 points");
    const bool sq = squared_update(linkage);
    std::vector<double> D(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        double v = dm.entries()[i];
        if (!std::isfinite(v)) throw NumericalError("non-finite entry in distance matrix");
        D[i] = sq ? v * v : v;
    }
    std::vector<std::size_t> id(n), size(n, 1), active(n), nn(n);
    std::iota(id.begin(), id.end(), 0);
    std::iota(active.begin(), active.end(), 0);

    auto key = [&](std::size_t s, std::size_t t) {
        return Key{D[s * n + t], std::min(id[s], id[t]), std::max(id[s], id[t])};
    };
    auto rescan = [&](std::size_t s) {
        bool first = true;
        Key best{};
        for (std::size_t t : active) {
            if (t == s) continue;
            Key k = key(s, t);
            if (first || k < best) {
                best = k;
                nn[s] = t;
                first = false;
            }
        }
    };
    for (std::size_t s : active) rescan(s);

    Dendrogram dg;
    dg.n = n;
    for (std::size_t m = 0; m + 1 < n; ++m) {
        std::size_t a = active[0];
        Key best = key(a, nn[a]);
        for (std::size_t s : active) {
            Key k = key(s, nn[s]);
            if (k < best) {
                best = k;
                a = s;
            }
        }
        std::size_t b = nn[a];
        const double dab = D[a * n + b];
        const double na = double(size[a]), nb = double(size[b]);

        Merge mg;
        mg.left = std::min(id[a], id[b]);
        mg.right = std::max(id[a], id[b]);
        mg.height = sq ? std::sqrt(std::max(0.0, dab)) : dab;
        mg.node = n + m;
        dg.merges.push_back(mg);

        active.erase(std::find(active.begin(), active.end(), b));
        for (std::size_t s : active) {
            if (s == a) continue;
            const double das = D[a * n + s], dbs = D[b * n + s], ns = double(size[s]);
            double v = 0.0;
            switch (linkage) {
            case Linkage::Single: v = std::min(das, dbs); break;
            case Linkage::Complete: v = std::max(das, dbs); break;
            case Linkage::Average: v = (na * das + nb * dbs) / (na + nb); break;
            case Linkage::Ward: v = ((na + ns) * das + (nb + ns) * dbs - ns * dab) / (na + nb + ns); break;
            case Linkage::Centroid: v = (na * das + nb * dbs) / (na + nb) - na * nb * dab / ((na + nb) * (na + nb)); break;
            case Linkage::Median: v = 0.5 * das + 0.5 * dbs - 0.25 * dab; break;
            }
            D[a * n + s] = v;
            D[s * n + a] = v;
        }
        id[a] = n + m;
        size[a] += size[b];

        if (active.size() < 2) break;
        for (std::size_t s : active) {
            if (s == a) continue;
            if (nn[s] == a || nn[s] == b) {
                rescan(s);
            } else if (key(s, a) < key(s, nn[s])) {
                nn[s] = a;
            }
        }
        rescan(a);
    }
    return dg;
}

std::vector<int> cut(const Dendrogram& dg, std::size_t k) {
    const std::size_t n = dg.n;
    if (k < 1 || k > n) throw ValidationError("k must lie in [1, " + std::to_string(n) + "]");
    std::vector<std::size_t> parent(2 * n, 0);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t m = 0; m < n - k && m < dg.merges.size(); ++m) {
        parent[dg.merges[m].left] = dg.merges[m].node;
        parent[dg.merges[m].right] = dg.merges[m].node;
    }
    auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x];
        return x;
    };
    std::vector<int> labels(n);
    std::map<std::size_t, int> seen;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = root(i);
        auto it = seen.find(r);
        if (it == seen.end()) it = seen.emplace(r, static_cast<int>(seen.size())).first;
        labels[i] = it->second;
    }
    return labels;
}

std::vector<int> relabel_by_first(const std::vector<int>& labels) {
    std::map<int, int> seen;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = seen.find(labels[i]);
        if (it == seen.end()) it = seen.emplace(labels[i], static_cast<int>(seen.size())).first;
        out[i] = it->second;
    }
    return out;
}

namespace {

struct Replicate {
    std::vector<int> labels;
    std::vector<std::size_t> medoids;
    double cost = 0.0;
    std::vector<double> trace;
};

Replicate run_replicate(const DissimilarityMatrix& dm, std::size_t k, std::uint64_t seed, int max_iter) {
    const std::size_t n = dm.n();
    Rng rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    Replicate r;
    r.medoids.assign(pool.begin(), pool.begin() + static_cast<long>(k));
    r.labels.assign(n, 0);

    auto assign = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            for (std::size_t c = 1; c < k; ++c)
                if (dm(i, r.medoids[c]) < dm(i, r.medoids[best])) best = static_cast<int>(c);
            r.labels[i] = best;
        }
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        assign();
        for (std::size_t guard = 0; guard < k; ++guard) {
            std::vector<std::size_t> count(k, 0);
            for (int l : r.labels) ++count[l];
            auto empty = std::find(count.begin(), count.end(), 0);
            if (empty == count.end()) break;
            std::size_t far = n;
            double fd = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = dm(i, r.medoids[r.labels[i]]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            if (far == n) break;  // every point sits on a medoid
            r.medoids[static_cast<std::size_t>(empty - count.begin())] = far;
            assign();
        }
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) cost += dm(i, r.medoids[r.labels[i]]);
        r.trace.push_back(cost);
        r.cost = cost;

        bool changed = false;
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t i = 0; i < n; ++i) members[r.labels[i]].push_back(i);
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t best = r.medoids[c];
            double incumbent = 0.0;
            for (std::size_t j : members[c]) incumbent += dm(best, j);
            double best_sum = incumbent;
            for (std::size_t m : members[c]) {
                double s = 0.0;
                for (std::size_t j : members[c]) s += dm(m, j);
                if (s < best_sum) {
                    best_sum = s;
                    best = m;
                }
            }
            // a rounding-level gain is a tie and keeps the incumbent
            if (best != r.medoids[c] && best_sum < incumbent - kTieTolerance * incumbent) {
                r.medoids[c] = best;
                changed = true;
            }
        }
        if (!changed) return r;
    }
    // out of iterations with moved medoids: reassign so labels, medoids and cost agree
    assign();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += dm(i, r.medoids[r.labels[i]]);
    r.trace.push_back(cost);
    r.cost = cost;
    return r;
}

}  // namespace

KMedoidsResult kmeans_dist(const DissimilarityMatrix& dm, std::size_t k, std::uint64_t seed, int max_iter,
                           int replicates) {
    const std::size_t n = dm.n();
    if (k < 1 || k > n) throw ValidationError("k must lie in [1, " + std::to_string(n) + "]");
    if (max_iter < 1 || replicates < 1) throw ValidationError("max_iter and replicates must be positive");
    for (double v : dm.entries())
        if (!std::isfinite(v)) throw NumericalError("non-finite entry in distance matrix");
    std::vector<Replicate> reps(static_cast<std::size_t>(replicates));
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicates; ++r)
        reps[static_cast<std::size_t>(r)] = run_replicate(dm, k, derive_seed(seed, static_cast<std::uint64_t>(r)), max_iter);

    KMedoidsResult out;
    std::size_t best = 0;
    for (std::size_t r = 1; r < reps.size(); ++r)
        if (reps[r].cost < reps[best].cost) best = r;
    out.best_replicate = static_cast<int>(best);
    out.cost = reps[best].cost;
    out.labels = relabel_by_first(reps[best].labels);
    std::vector<bool> placed(k, false);
    out.medoids.assign(k, 0);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto old = static_cast<std::size_t>(reps[best].labels[i]);
        if (placed[old]) continue;
        placed[old] = true;
        out.medoids[static_cast<std::size_t>(out.labels[i])] = reps[best].medoids[old];
        next = std::max(next, out.labels[i] + 1);
    }
    for (std::size_t c = 0; c < k; ++c)
        if (!placed[c]) out.medoids[static_cast<std::size_t>(next++)] = reps[best].medoids[c];
    for (auto& r : reps) out.traces.push_back(std::move(r.trace));
    return out;
}

}  // namespace kdsum
