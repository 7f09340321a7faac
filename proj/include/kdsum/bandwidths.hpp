#pragma once

#include <string>
#include <vector>

#include "kdsum/dataset.hpp"

namespace kdsum {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double x) const;
    std::string describe() const;
};

struct BoundsOptions {
    double continuous_floor = 1e-12;
    bool aitken_cap = false;  // unordered upper bound (g-1)/g instead of 1
};

std::vector<Interval> admissible_bounds(const TypedDataset& ds, const BoundsOptions& opts = {});

class BandwidthVector {
public:
    BandwidthVector() = default;
    BandwidthVector(std::vector<double> values, std::vector<Interval> bounds);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<Interval>& bounds() const { return bounds_; }

private:
    std::vector<double> values_;
    std::vector<Interval> bounds_;
};

// Throws ValidationError naming the first offending variable and its interval.
BandwidthVector validate_bandwidths(const std::vector<double>& values, const TypedDataset& ds,
                                    const BoundsOptions& opts = {});

}  // namespace kdsum
