#include "kdsum/mscv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kdsum/error.hpp"
#include "kdsum/rng.hpp"
#include "kdsum/similarity.hpp"

namespace kdsum {

namespace {

constexpr std::size_t kBlockPairs = std::size_t(1) << 21;

// Leave-one-out sums of the continuous block (unscaled) and the categorical sums.
// Pairs are evaluated in parallel per block of rows and accumulated serially in a
// fixed order, so the result does not depend on the thread count.
void loo_sums(const TypedDataset& ds, const PairSimilarity& sim, std::vector<double>& cont, std::vector<double>& cat) {
    const std::size_t n = ds.n(), p = ds.p();
    const double* x = ds.values().data();
    cont.assign(n, 0.0);
    cat.assign(n, 0.0);
    // per calling thread, reused across calls; workers below only see raw pointers
    thread_local std::vector<double> bc, bk;
    thread_local std::vector<std::size_t> offset;
    std::size_t i0 = 0;
    while (i0 < n) {
        std::size_t i1 = i0, pairs = 0;
        offset.clear();
        while (i1 < n && (pairs == 0 || pairs + (n - 1 - i1) <= kBlockPairs)) {
            offset.push_back(pairs);
            pairs += n - 1 - i1;
            ++i1;
        }
        bc.resize(pairs);
        bk.resize(pairs);
        double* pc = bc.data();
        double* pk = bk.data();
        const std::size_t* off = offset.data();
        const long long lo = static_cast<long long>(i0), hi = static_cast<long long>(i1);
#pragma omp parallel for schedule(dynamic, 8)
        for (long long ii = lo; ii < hi; ++ii) {
            std::size_t i = static_cast<std::size_t>(ii);
            std::size_t o = off[i - i0];
            for (std::size_t j = i + 1; j < n; ++j, ++o) sim.split(x + i * p, x + j * p, pc[o], pk[o]);
        }
        for (std::size_t i = i0; i < i1; ++i) {
            std::size_t o = offset[i - i0];
            for (std::size_t j = i + 1; j < n; ++j, ++o) {
                cont[i] += bc[o];
                cont[j] += bc[o];
                cat[i] += bk[o];
                cat[j] += bk[o];
            }
        }
        i0 = i1;
    }
}

double log_average(double c, double k, const PairSimilarity& sim, double denom) {
    double scale = sim.continuous_scale();
    double total = (c == 0.0 ? 0.0 : scale * c) + k;
    if (std::isfinite(total)) {
        if (!(total > 0.0)) return kObjectiveSentinel;
        return std::log(total) - std::log(denom);
    }
    // scale overflowed: combine in log space
    double a = c > 0.0 ? sim.log_continuous_scale() + std::log(c) : -std::numeric_limits<double>::infinity();
    double b = k > 0.0 ? std::log(k) : -std::numeric_limits<double>::infinity();
    double m = std::max(a, b);
    if (!std::isfinite(m)) return kObjectiveSentinel;
    return m + std::log1p(std::exp(std::min(a, b) - m)) - std::log(denom);
}

std::vector<double> terms_with(const TypedDataset& ds, const PairSimilarity& sim) {
    if (ds.n() < 2) throw ValidationError("the cross-validation objective needs at least 2 rows");
    std::vector<double> cont, cat;
    loo_sums(ds, sim, cont, cat);
    std::vector<double> out(ds.n());
    const double denom = static_cast<double>(ds.n() - 1);
    for (std::size_t i = 0; i < ds.n(); ++i) out[i] = log_average(cont[i], cat[i], sim, denom);
    return out;
}

double sum_terms(const std::vector<double>& t) {
    double s = 0.0;
    for (double v : t) {
        if (v == kObjectiveSentinel || std::isnan(v)) return kObjectiveSentinel;
        s += v;
    }
    return s;
}

struct Transform {
    std::vector<Interval> bounds;
    std::vector<bool> continuous;
    double floor = 1e-12;

    static constexpr double kCatRange = 100.0;
    static constexpr double kContMax = 34.538776394910684;  // ln(1e15)

    double t_lo(std::size_t k) const { return continuous[k] ? std::log(floor) - 2.0 : -kCatRange; }
    double t_hi(std::size_t k) const { return continuous[k] ? kContMax : kCatRange; }

    std::vector<double> to_lambda(const std::vector<double>& t) const {
        std::vector<double> l(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            double tk = std::clamp(t[k], t_lo(k), t_hi(k));
            if (continuous[k]) {
                l[k] = std::max(floor, std::exp(tk));
            } else {
                double s = 1.0 / (1.0 + std::exp(-tk));
                l[k] = bounds[k].lo + (bounds[k].hi - bounds[k].lo) * s;
            }
        }
        return l;
    }

    std::vector<double> to_t(const std::vector<double>& l) const {
        std::vector<double> t(l.size());
        for (std::size_t k = 0; k < l.size(); ++k) {
            if (continuous[k]) {
                t[k] = std::log(std::max(l[k], floor));
            } else {
                double w = bounds[k].hi - bounds[k].lo;
                double u = w > 0 ? (l[k] - bounds[k].lo) / w : 0.5;
                u = std::clamp(u, 1e-12, 1.0 - 1e-12);
                t[k] = std::log(u / (1.0 - u));
            }
            t[k] = std::clamp(t[k], t_lo(k), t_hi(k));
        }
        return t;
    }
};

struct StartResult {
    std::vector<double> t;
    double value = kObjectiveSentinel;
    std::size_t evals = 0;
    bool converged = false;
};

// Nelder-Mead maximization in transformed coordinates, vertices kept inside the box.
template <class F>
StartResult nelder_mead(const F& f, std::vector<double> x0, const Transform& tr, int max_evals, double tol) {
    const std::size_t d = x0.size();
    StartResult res;
    auto clampv = [&](std::vector<double>& x) {
        for (std::size_t k = 0; k < d; ++k) x[k] = std::clamp(x[k], tr.t_lo(k), tr.t_hi(k));
    };
    // minimize g = -f
    auto g = [&](const std::vector<double>& x) {
        ++res.evals;
        double v = f(x);
        if (std::isnan(v) || v == kObjectiveSentinel) return std::numeric_limits<double>::infinity();
        return -v;
    };
    clampv(x0);
    std::vector<std::vector<double>> s(d + 1, x0);
    std::vector<double> gv(d + 1);
    for (std::size_t k = 0; k < d; ++k) {
        double step = 0.5;
        if (s[k + 1][k] + step > tr.t_hi(k)) step = -step;
        s[k + 1][k] += step;
        clampv(s[k + 1]);
    }
    for (std::size_t v = 0; v <= d; ++v) gv[v] = g(s[v]);

    std::vector<std::size_t> idx(d + 1);
    auto order = [&] {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gv[a] < gv[b]; });
    };
    auto diameter = [&](std::size_t best) {
        double m = 0.0;
        for (std::size_t v = 0; v <= d; ++v)
            for (std::size_t k = 0; k < d; ++k) m = std::max(m, std::abs(s[v][k] - s[best][k]));
        return m;
    };
    auto combo = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> out(d);
        for (std::size_t k = 0; k < d; ++k) out[k] = a[k] + t * (b[k] - a[k]);
        clampv(out);
        return out;
    };

    for (;;) {
        order();
        const std::size_t best = idx[0], worst = idx[d], second = idx[d > 0 ? d - 1 : 0];
        if (diameter(best) < tol) {
            res.converged = true;
            break;
        }
        if (res.evals >= static_cast<std::size_t>(max_evals)) break;
        std::vector<double> c(d, 0.0);
        for (std::size_t v = 0; v < d; ++v)
            for (std::size_t k = 0; k < d; ++k) c[k] += s[idx[v]][k] / double(d);

        auto xr = combo(c, s[worst], -1.0);
        double gr = g(xr);
        if (gr < gv[best]) {
            auto xe = combo(c, s[worst], -2.0);
            double ge = g(xe);
            if (ge < gr) {
                s[worst] = xe;
                gv[worst] = ge;
            } else {
                s[worst] = xr;
                gv[worst] = gr;
            }
            continue;
        }
        if (gr < gv[second]) {
            s[worst] = xr;
            gv[worst] = gr;
            continue;
        }
        bool shrink = false;
        if (gr < gv[worst]) {
            auto xc = combo(c, xr, 0.5);
            double gc = g(xc);
            if (gc <= gr) {
                s[worst] = xc;
                gv[worst] = gc;
            } else {
                shrink = true;
            }
        } else {
            auto xc = combo(c, s[worst], 0.5);
            double gc = g(xc);
            if (gc < gv[worst]) {
                s[worst] = xc;
                gv[worst] = gc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t v = 0; v <= d; ++v) {
                if (v == best) continue;
                s[v] = combo(s[best], s[v], 0.5);
                gv[v] = g(s[v]);
            }
        }
    }
    order();
    res.t = s[idx[0]];
    res.value = std::isinf(gv[idx[0]]) ? kObjectiveSentinel : -gv[idx[0]];
    return res;
}

}  // namespace

std::vector<double> mscv_terms(const TypedDataset& ds, const BandwidthVector& bw, const KernelSelection& kernels) {
    PairSimilarity sim(ds.layout(), SimilarityConfig{kernels, bw});
    return terms_with(ds, sim);
}

double mscv_objective(const TypedDataset& ds, const BandwidthVector& bw, const KernelSelection& kernels) {
    return sum_terms(mscv_terms(ds, bw, kernels));
}

std::vector<std::vector<double>> starting_points(const TypedDataset& ds, const std::vector<Interval>& bounds,
                                                 int restarts, std::uint64_t seed) {
    const std::size_t p = ds.p(), n = ds.n();
    std::vector<double> rot(p);
    for (std::size_t k = 0; k < p; ++k) {
        if (ds.schema()[k].kind == VariableKind::Continuous) {
            double mean = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += ds.at(i, k);
            mean /= double(n);
            for (std::size_t i = 0; i < n; ++i) ss += (ds.at(i, k) - mean) * (ds.at(i, k) - mean);
            double sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
            if (!(sd > 0.0)) sd = 1.0;
            rot[k] = std::max(bounds[k].lo, 1.06 * sd * std::pow(double(n), -0.2));
        } else {
            rot[k] = 0.5 * (bounds[k].lo + bounds[k].hi);
        }
    }
    std::vector<std::vector<double>> out{rot};
    constexpr int kBatch = 10;
    for (int b = 0; static_cast<int>(out.size()) < restarts + 1; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        std::vector<std::vector<double>> u(kBatch, std::vector<double>(p));
        for (std::size_t k = 0; k < p; ++k) {
            std::vector<int> perm(kBatch);
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = kBatch - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
            for (int i = 0; i < kBatch; ++i) u[i][k] = (perm[i] + rng.uniform()) / kBatch;
        }
        for (int i = 0; i < kBatch && static_cast<int>(out.size()) < restarts + 1; ++i) {
            std::vector<double> l(p);
            for (std::size_t k = 0; k < p; ++k) {
                if (ds.schema()[k].kind == VariableKind::Continuous)
                    l[k] = std::max(bounds[k].lo, rot[k] * std::exp(std::log(0.05) + u[i][k] * std::log(400.0)));
                else
                    l[k] = bounds[k].lo + (bounds[k].hi - bounds[k].lo) * u[i][k];
            }
            out.push_back(std::move(l));
        }
    }
    return out;
}

CvResult select_bandwidths(const TypedDataset& full, const KernelSelection& kernels, const OptimizerOptions& opts) {
    if (full.n() < 2) throw ValidationError("bandwidth selection needs at least 2 rows");
    if (opts.restarts < 0) throw ValidationError("restarts must be nonnegative");
    if (full.p() == 0) throw ValidationError("dataset has no columns");

    CvResult result;
    TypedDataset sub;
    const TypedDataset* ds = &full;
    if (opts.subsample && full.n() > opts.subsample_size && opts.subsample_size >= 2) {
        std::vector<std::size_t> rows(full.n());
        std::iota(rows.begin(), rows.end(), 0);
        Rng rng(derive_seed(opts.seed, 0x5eedf00dULL));
        for (std::size_t i = 0; i < opts.subsample_size; ++i) std::swap(rows[i], rows[i + rng.below(full.n() - i)]);
        rows.resize(opts.subsample_size);
        std::sort(rows.begin(), rows.end());
        sub = full.select_rows(rows);
        ds = &sub;
        result.subsampled = true;
        result.sample_rows = rows;
    }

    BoundsOptions bopts{opts.continuous_floor, opts.aitken_cap};
    Transform tr;
    tr.bounds = admissible_bounds(*ds, bopts);
    tr.floor = opts.continuous_floor;
    for (const auto& v : ds->schema()) tr.continuous.push_back(v.kind == VariableKind::Continuous);

    auto objective = [&](const std::vector<double>& t) {
        BandwidthVector bw(tr.to_lambda(t), tr.bounds);
        PairSimilarity sim(ds->layout(), SimilarityConfig{kernels, bw});
        return sum_terms(terms_with(*ds, sim));
    };

    const int max_evals = opts.max_evals > 0 ? opts.max_evals : 500 * static_cast<int>(ds->p());
    auto starts = starting_points(*ds, tr.bounds, opts.restarts, opts.seed);
    StartResult best;
    bool have = false;
    for (const auto& start : starts) {
        auto r = nelder_mead(objective, tr.to_t(start), tr, max_evals, opts.tolerance);
        result.evaluations += r.evals;
        result.start_objectives.push_back(r.value);
        if (!have || r.value > best.value) {
            best = r;
            have = true;
        }
    }
    result.restarts = static_cast<int>(starts.size());
    if (best.value == kObjectiveSentinel)
        throw NumericalError("every start has a zero leave-one-out similarity; try larger starting bandwidths");
    result.bandwidths = BandwidthVector(tr.to_lambda(best.t), tr.bounds);
    result.objective = best.value;
    result.converged = best.converged;
    return result;
}

}  // namespace kdsum
