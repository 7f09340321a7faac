#include "kdsum/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdsum/error.hpp"

namespace kdsum {

std::string_view baseline_name(BaselineKind k) {
    switch (k) {
    case BaselineKind::Gower: return "gower";
    case BaselineKind::Huang: return "huang";
    case BaselineKind::Podani: return "podani";
    case BaselineKind::Wishart: return "wishart";
    }
    return "?";
}

BaselineKind parse_baseline(std::string_view text) {
    if (text == "gower") return BaselineKind::Gower;
    if (text == "huang") return BaselineKind::Huang;
    if (text == "podani") return BaselineKind::Podani;
    if (text == "wishart") return BaselineKind::Wishart;
    throw ValidationError("unknown metric '" + std::string(text) + "'");
}

ColumnStats column_stats(const TypedDataset& ds) {
    ColumnStats st;
    const std::size_t n = ds.n();
    for (std::size_t k = 0; k < ds.continuous_count(); ++k) {
        if (n == 0) {
            st.range.push_back(0.0);
            st.sd.push_back(0.0);
            continue;
        }
        double lo = ds.at(0, k), hi = lo, mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, ds.at(i, k));
            hi = std::max(hi, ds.at(i, k));
            mean += ds.at(i, k);
        }
        mean /= double(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (ds.at(i, k) - mean) * (ds.at(i, k) - mean);
        st.range.push_back(hi - lo);
        st.sd.push_back(n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0);
    }
    return st;
}

double huang_gamma(const TypedDataset& ds) {
    if (ds.continuous_count() == 0)
        throw ValidationError("huang weight is the mean continuous variance; with no continuous columns pass --gamma");
    auto st = column_stats(ds);
    double s = 0.0;
    for (double sd : st.sd) s += sd * sd;
    return s / double(st.sd.size());
}

namespace {

void check_rows(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout) {
    if (a.size() != layout.p() || b.size() != layout.p()) throw ValidationError("row length does not match the layout");
}

std::size_t mismatches(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout) {
    std::size_t m = 0;
    for (std::size_t k = layout.pc; k < layout.p(); ++k) m += a[k] != b[k];
    return m;
}

double scaled_root(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout,
                   std::span<const double> div) {
    double s = 0.0;
    for (std::size_t k = 0; k < layout.pc; ++k) {
        if (!(div[k] > 0.0)) continue;
        double t = (a[k] - b[k]) / div[k];
        s += t * t;
    }
    s += double(mismatches(a, b, layout));
    return std::sqrt(s);
}

}  // namespace

double gower_distance(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout,
                      std::span<const double> ranges) {
    check_rows(a, b, layout);
    if (layout.p() == 0) return 0.0;
    double sim = 0.0;
    for (std::size_t k = 0; k < layout.pc; ++k)
        sim += ranges[k] > 0.0 ? 1.0 - std::abs(a[k] - b[k]) / ranges[k] : 1.0;
    sim += double(layout.pu + layout.po - mismatches(a, b, layout));
    double d = 1.0 - sim / double(layout.p());
    return std::clamp(d, 0.0, 1.0);
}

double huang_distance(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout, double gamma) {
    check_rows(a, b, layout);
    double s = 0.0;
    for (std::size_t k = 0; k < layout.pc; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s + gamma * double(mismatches(a, b, layout));
}

double podani_distance(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout,
                       std::span<const double> ranges) {
    check_rows(a, b, layout);
    return scaled_root(a, b, layout, ranges);
}

double wishart_distance(std::span<const double> a, std::span<const double> b, const ColumnLayout& layout,
                        std::span<const double> sds) {
    check_rows(a, b, layout);
    return scaled_root(a, b, layout, sds);
}

DissimilarityMatrix baseline_matrix(const TypedDataset& ds, BaselineKind kind, std::optional<double> gamma) {
    const std::size_t n = ds.n();
    auto st = column_stats(ds);
    double g = 0.0;
    if (kind == BaselineKind::Huang) {
        g = gamma ? *gamma : huang_gamma(ds);
        if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("huang weight must be a nonnegative number");
    }
    std::vector<double> d(n * n, 0.0);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long ii = 0; ii < nn; ++ii) {
        std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.0;
            switch (kind) {
            case BaselineKind::Gower: v = gower_distance(ds.row(i), ds.row(j), ds.layout(), st.range); break;
            case BaselineKind::Huang: v = huang_distance(ds.row(i), ds.row(j), ds.layout(), g); break;
            case BaselineKind::Podani: v = podani_distance(ds.row(i), ds.row(j), ds.layout(), st.range); break;
            case BaselineKind::Wishart: v = wishart_distance(ds.row(i), ds.row(j), ds.layout(), st.sd); break;
            }
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return DissimilarityMatrix(n, std::move(d));
}

}  // namespace kdsum
