#include "kdsum/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>

#include "kdsum/baselines.hpp"
#include "kdsum/error.hpp"
#include "kdsum/evaluation.hpp"
#include "kdsum/rng.hpp"
#include "kdsum/similarity.hpp"

namespace kdsum {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Exceptions must not escape an OpenMP region; keep the first one and rethrow later.
class ErrorSlot {
public:
    template <class F>
    void run(F&& f) {
        try {
            f();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!err_) err_ = std::current_exception();
        }
    }
    void rethrow() {
        if (err_) std::rethrow_exception(err_);
    }

private:
    std::mutex mu_;
    std::exception_ptr err_;
};

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    double h = q * double(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

}  // namespace

std::string_view algo_name(Algo a) { return a == Algo::Hac ? "hac" : "kmeansdist"; }

Algo parse_algo(std::string_view text) {
    if (text == "hac") return Algo::Hac;
    if (text == "kmeansdist") return Algo::KMeansDist;
    throw ValidationError("unknown algorithm '" + std::string(text) + "'");
}

DistanceResult compute_distance(const TypedDataset& ds, const DistanceOptions& opts) {
    auto t0 = Clock::now();
    DistanceResult out;
    if (opts.metric == "kdsum") {
        BoundsOptions b{opts.optimizer.continuous_floor, opts.optimizer.aitken_cap};
        BandwidthVector bw;
        if (opts.bandwidths) {
            bw = validate_bandwidths(*opts.bandwidths, ds, b);
        } else {
            auto cv = select_bandwidths(ds, opts.kernels, opts.optimizer);
            bw = cv.bandwidths;
            out.cv = std::move(cv);
        }
        out.bandwidths = bw.values();
        out.matrix = build_matrix(ds, SimilarityConfig{opts.kernels, bw});
    } else {
        out.matrix = baseline_matrix(ds, parse_baseline(opts.metric), opts.gamma);
    }
    out.seconds = since(t0);
    return out;
}

Report evaluate(const std::vector<int>& truth, const std::vector<int>& pred) {
    auto ct = contingency(truth, pred);
    Report r;
    r.n = truth.size();
    r.k_true = ct.rows;
    r.k_pred = ct.cols;
    r.ca = clustering_accuracy(truth, pred);
    r.ari = ari(ct);
    return r;
}

std::vector<int> cluster_labels(const DissimilarityMatrix& dm, Algo algo, Linkage linkage, std::size_t k,
                                std::uint64_t seed) {
    if (algo == Algo::Hac) return cut(hac(dm, linkage), k);
    return kmeans_dist(dm, k, seed).labels;
}

PipelineResult run_pipeline(const TypedDataset& ds, const std::vector<int>& truth, const DistanceOptions& dopts,
                            Algo algo, const std::vector<Linkage>& linkages, std::size_t k, std::uint64_t seed) {
    if (truth.size() != ds.n()) throw ValidationError("label count differs from the row count");
    PipelineResult out;
    out.distance = compute_distance(ds, dopts);
    auto run_one = [&](const std::string& name, Linkage l) {
        auto t0 = Clock::now();
        auto pred = cluster_labels(out.distance.matrix, algo, l, k, seed);
        double secs = since(t0);
        out.methods.push_back({name, evaluate(truth, pred), secs});
    };
    if (algo == Algo::Hac) {
        if (linkages.empty()) throw ValidationError("no linkage selected");
        for (auto l : linkages) run_one("hac/" + std::string(linkage_name(l)), l);
    } else {
        run_one("kmeansdist", Linkage::Average);
    }
    for (std::size_t m = 1; m < out.methods.size(); ++m) {
        const auto& a = out.methods[m].report;
        const auto& b = out.methods[out.best].report;
        if (a.ca > b.ca || (a.ca == b.ca && a.ari > b.ari)) out.best = m;
    }
    return out;
}

std::size_t GridAxis::count() const {
    if (!(step > 0.0) || hi < lo) throw ValidationError("grid axis needs step > 0 and hi >= lo");
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double GridAxis::value(std::size_t i) const { return std::min(hi, lo + double(i) * step); }

GridAxis parse_axis(std::string_view text) {
    GridAxis a;
    std::string s(text);
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a.lo, &a.hi, &a.step) != 3)
        throw ValidationError("grid axis '" + s + "' must look like lo:hi:step");
    a.count();
    return a;
}

std::size_t grid_size(const std::vector<GridAxis>& axes) {
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.count();
    return axes.empty() ? 0 : total;
}

std::vector<double> grid_point(const std::vector<GridAxis>& axes, std::size_t index) {
    std::vector<double> out(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        std::size_t c = axes[k].count();
        out[k] = axes[k].value(index % c);
        index /= c;
    }
    return out;
}

std::vector<GridRow> run_gridsearch(const TypedDataset& ds, const std::vector<int>& truth,
                                    const std::vector<GridAxis>& axes, const GridOptions& opts) {
    if (axes.size() != ds.p())
        throw ValidationError("grid has " + std::to_string(axes.size()) + " axes but the data has " +
                              std::to_string(ds.p()) + " columns");
    if (truth.size() != ds.n()) throw ValidationError("label count differs from the row count");
    const std::size_t total = grid_size(axes);
    if (total > kLargeGrid && !opts.allow_large)
        throw ValidationError("grid has " + std::to_string(total) + " points; pass --allow-large to run it");
    for (std::size_t k = 0; k < ds.p(); ++k) {
        if (ds.schema()[k].kind == VariableKind::Continuous) continue;
        if (axes[k].lo < 0.0 || axes[k].value(axes[k].count() - 1) > 1.0)
            throw ValidationError("categorical grid axis for '" + ds.schema()[k].name + "' leaves [0, 1]");
    }
    std::vector<GridRow> rows(total);
    ErrorSlot err;
    const long long nt = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 4)
    for (long long g = 0; g < nt; ++g) {
        err.run([&] {
            auto lam = grid_point(axes, static_cast<std::size_t>(g));
            auto eff = lam;
            for (std::size_t k = 0; k < ds.continuous_count(); ++k) eff[k] = std::max(eff[k], opts.continuous_floor);
            auto bw = validate_bandwidths(eff, ds, BoundsOptions{opts.continuous_floor, false});
            auto dm = build_matrix(ds, SimilarityConfig{opts.kernels, bw});
            std::vector<int> pred;
            if (opts.algo == Algo::Hac) pred = cut(hac(dm, opts.linkage), opts.k);
            else pred = kmeans_dist(dm, opts.k, opts.seed, 100, opts.replicates).labels;
            auto r = evaluate(truth, pred);
            rows[static_cast<std::size_t>(g)] = {lam, r.ca, r.ari};
        });
    }
    err.rethrow();
    return rows;
}

std::vector<MonteCarloRow> run_montecarlo(const MonteCarloSpec& spec,
                                          const std::function<void(std::size_t, std::size_t)>& progress) {
    if (spec.reps < 1) throw ValidationError("reps must be positive");
    if (spec.generator != "sim" && spec.generator != "mixed")
        throw ValidationError("unknown generator '" + spec.generator + "'");
    std::vector<std::size_t> sizes = spec.sizes;
    if (sizes.empty()) sizes.push_back(spec.generator == "mixed" ? spec.mixed.n : 0);
    if (spec.generator == "sim") default_sim_sizes(spec.sim);

    struct Job {
        std::size_t size_index;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < sizes.size(); ++s)
        for (int r = 0; r < spec.reps; ++r) jobs.push_back({s, r});

    std::vector<std::vector<MonteCarloRow>> results(jobs.size());
    ErrorSlot err;
    std::mutex mu;
    std::size_t done = 0;
    const long long nj = static_cast<long long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long j = 0; j < nj; ++j) {
        err.run([&] {
            const auto& job = jobs[static_cast<std::size_t>(j)];
            std::uint64_t seed = derive_seed(derive_seed(spec.seed, job.size_index), static_cast<std::uint64_t>(job.rep));
            Sample sample;
            std::size_t size = sizes[job.size_index];
            if (spec.generator == "sim") {
                SimSpec ss;
                ss.sim = spec.sim;
                ss.seed = seed;
                sample = gen_sim(ss);
                size = sample.data.n();
            } else {
                MixedGenSpec ms = spec.mixed;
                ms.n = size;
                ms.seed = seed;
                sample = gen_mixed(ms);
            }
            DistanceOptions dopts = spec.distance;
            dopts.optimizer.seed = seed;
            auto pr = run_pipeline(sample.data, sample.labels, dopts, spec.algo, spec.linkages, spec.k, seed);
            auto& out = results[static_cast<std::size_t>(j)];
            for (const auto& m : pr.methods)
                out.push_back({size, job.rep, seed, m.method, m.report.ca, m.report.ari, pr.distance.seconds + m.seconds});
        });
        if (progress) {
            std::lock_guard<std::mutex> lock(mu);
            progress(++done, jobs.size());
        }
    }
    err.rethrow();
    std::vector<MonteCarloRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<MonteCarloRow>& rows) {
    std::vector<std::pair<std::size_t, std::string>> order;
    std::map<std::pair<std::size_t, std::string>, std::vector<const MonteCarloRow*>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.size, r.method);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        std::vector<double> ca, ar, secs;
        for (const auto* r : groups[key]) {
            ca.push_back(r->ca);
            ar.push_back(r->ari);
            secs.push_back(r->seconds);
        }
        SummaryRow s;
        s.size = key.first;
        s.method = key.second;
        s.reps = ca.size();
        s.mean_ca = mean(ca);
        s.median_ca = quantile(ca, 0.5);
        s.q05_ca = quantile(ca, 0.05);
        s.q95_ca = quantile(ca, 0.95);
        s.mean_ari = mean(ar);
        s.median_ari = quantile(ar, 0.5);
        s.q05_ari = quantile(ar, 0.05);
        s.q95_ari = quantile(ar, 0.95);
        s.mean_seconds = mean(secs);
        out.push_back(s);
    }
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace kdsum
