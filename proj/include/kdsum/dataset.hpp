#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdsum {

enum class VariableKind { Continuous, Unordered, Ordered };

std::string_view kind_name(VariableKind kind);
// Accepts "continuous"/"unordered"/"ordered" and the one-letter forms c/u/o.
VariableKind parse_kind(std::string_view text);

struct VariableSchema {
    std::string name;
    VariableKind kind = VariableKind::Continuous;
    int levels = 0;                   // categorical only
    std::vector<std::string> labels;  // code -> label; may be shorter than levels

    bool operator==(const VariableSchema&) const = default;
};

struct ColumnLayout {
    std::size_t pc = 0;
    std::size_t pu = 0;
    std::size_t po = 0;

    std::size_t p() const { return pc + pu + po; }
    bool operator==(const ColumnLayout&) const = default;
};

// Row-major n x p matrix. Columns are continuous, then unordered, then ordered;
// categorical cells hold integer codes stored as doubles.
class TypedDataset {
public:
    TypedDataset() = default;
    TypedDataset(std::vector<VariableSchema> schema, std::vector<double> values);

    std::size_t n() const { return n_; }
    std::size_t p() const { return schema_.size(); }
    const ColumnLayout& layout() const { return layout_; }
    std::size_t continuous_count() const { return layout_.pc; }
    std::size_t unordered_count() const { return layout_.pu; }
    std::size_t ordered_count() const { return layout_.po; }

    const std::vector<VariableSchema>& schema() const { return schema_; }
    const std::vector<double>& values() const { return values_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * p(), p()}; }
    double at(std::size_t i, std::size_t k) const { return values_[i * p() + k]; }

    TypedDataset select_rows(std::span<const std::size_t> rows) const;

    bool operator==(const TypedDataset&) const = default;

private:
    std::vector<VariableSchema> schema_;
    std::vector<double> values_;
    ColumnLayout layout_;
    std::size_t n_ = 0;
};

}  // namespace kdsum
