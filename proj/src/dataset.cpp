#include "kdsum/dataset.hpp"

#include <cmath>
#include <string>

#include "kdsum/error.hpp"

namespace kdsum {

std::string_view kind_name(VariableKind kind) {
    switch (kind) {
    case VariableKind::Continuous: return "continuous";
    case VariableKind::Unordered: return "unordered";
    case VariableKind::Ordered: return "ordered";
    }
    return "?";
}

VariableKind parse_kind(std::string_view text) {
    if (text == "continuous" || text == "c") return VariableKind::Continuous;
    if (text == "unordered" || text == "u") return VariableKind::Unordered;
    if (text == "ordered" || text == "o") return VariableKind::Ordered;
    throw ValidationError("unknown variable kind '" + std::string(text) + "'");
}

TypedDataset::TypedDataset(std::vector<VariableSchema> schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    const std::size_t p = schema_.size();
    if (p == 0) {
        if (!values_.empty()) throw ValidationError("dataset has values but no columns");
        return;
    }
    if (values_.size() % p != 0) throw ValidationError("value count is not a multiple of the column count");
    n_ = values_.size() / p;

    int stage = 0;
    for (const auto& v : schema_) {
        int s = static_cast<int>(v.kind);
        if (s < stage)
            throw ValidationError("columns must be ordered continuous, unordered, ordered (column '" + v.name + "')");
        stage = s;
        switch (v.kind) {
        case VariableKind::Continuous: ++layout_.pc; break;
        case VariableKind::Unordered: ++layout_.pu; break;
        case VariableKind::Ordered: ++layout_.po; break;
        }
        if (v.kind != VariableKind::Continuous) {
            if (v.levels < 2) throw ValidationError("categorical column '" + v.name + "' needs at least 2 levels");
            if (v.labels.size() > static_cast<std::size_t>(v.levels))
                throw ValidationError("column '" + v.name + "': more labels than levels");
        }
    }

    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
            double x = values_[i * p + k];
            const auto& v = schema_[k];
            if (!std::isfinite(x))
                throw ValidationError("row " + std::to_string(i) + ", column '" + v.name + "': non-finite value");
            if (v.kind == VariableKind::Continuous) continue;
            if (x != std::floor(x) || x < 0 || x >= v.levels)
                throw ValidationError("row " + std::to_string(i) + ", column '" + v.name + "': code " +
                                      std::to_string(x) + " outside [0, " + std::to_string(v.levels) + ")");
        }
    }
}

TypedDataset TypedDataset::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * p());
    for (std::size_t r : rows) {
        if (r >= n_) throw ValidationError("row index out of range");
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return TypedDataset(schema_, std::move(out));
}

}  // namespace kdsum
