#include "kdsum/bandwidths.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "kdsum/error.hpp"

namespace kdsum {

bool Interval::contains(double x) const {
    if (std::isnan(x)) return false;
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    if (hi_open ? !(x < hi) : !(x <= hi)) return false;
    return true;
}

std::string Interval::describe() const {
    auto num = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    return std::string(lo_open ? "(" : "[") + num(lo) + ", " + num(hi) + (hi_open ? ")" : "]");
}

std::vector<Interval> admissible_bounds(const TypedDataset& ds, const BoundsOptions& opts) {
    std::vector<Interval> out;
    out.reserve(ds.p());
    for (const auto& v : ds.schema()) {
        switch (v.kind) {
        case VariableKind::Continuous:
            out.push_back({opts.continuous_floor, std::numeric_limits<double>::infinity(), false, true});
            break;
        case VariableKind::Unordered: {
            double hi = opts.aitken_cap ? double(v.levels - 1) / v.levels : 1.0;
            out.push_back({0.0, hi, false, false});
            break;
        }
        case VariableKind::Ordered: out.push_back({0.0, 1.0, false, false}); break;
        }
    }
    return out;
}

BandwidthVector::BandwidthVector(std::vector<double> values, std::vector<Interval> bounds)
    : values_(std::move(values)), bounds_(std::move(bounds)) {
    if (values_.size() != bounds_.size()) throw ValidationError("bandwidth and bound lengths differ");
}

BandwidthVector validate_bandwidths(const std::vector<double>& values, const TypedDataset& ds,
                                    const BoundsOptions& opts) {
    if (values.size() != ds.p())
        throw ValidationError("expected " + std::to_string(ds.p()) + " bandwidths, got " +
                              std::to_string(values.size()));
    auto bounds = admissible_bounds(ds, opts);
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!bounds[k].contains(values[k])) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.17g", values[k]);
            throw ValidationError("bandwidth " + std::string(buf) + " for " +
                                  std::string(kind_name(ds.schema()[k].kind)) + " variable '" + ds.schema()[k].name +
                                  "' outside " + bounds[k].describe());
        }
    }
    return BandwidthVector(values, std::move(bounds));
}

}  // namespace kdsum
