#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kdsum/dataset.hpp"
#include "kdsum/matrix.hpp"

namespace kdsum {

struct CsvRecord {
    std::vector<std::string> cells;
    std::size_t line = 0;  // 1-based line where the record starts
};

// RFC 4180: quoted fields, doubled quotes, embedded newlines, CRLF or LF.
std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source = "<csv>");

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Schema is a JSON array of records or one record per line:
//   {"name": "x1", "kind": "continuous"}
//   {"name": "colour", "kind": "unordered", "levels": ["blue", "red"]}
//   {"name": "grade", "kind": "ordered", "levels": ["low", "mid", "high"]}
// "levels" may also be an integer count for unordered variables.
std::vector<VariableSchema> parse_schema(std::string_view text, const std::string& source = "<schema>");
std::string format_schema(const TypedDataset& ds);

bool is_missing_token(std::string_view cell);

TypedDataset ingest_text(std::string_view csv, std::string_view schema, const std::string& csv_source = "<csv>",
                         const std::string& schema_source = "<schema>");
TypedDataset ingest_csv(const std::string& path, const std::string& schema_path);

// Header + rows in dataset column order; categorical cells written as their labels.
std::string format_csv(const TypedDataset& ds);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);
std::string format_g12(double x);

// Lower triangle including the diagonal: "i,j,d" with d at 12 significant digits.
void write_matrix(std::ostream& os, const DissimilarityMatrix& dm);
DissimilarityMatrix parse_matrix(std::string_view text, const std::string& source = "<matrix>");

void write_labels(std::ostream& os, const std::vector<int>& labels);
std::vector<int> parse_labels(std::string_view text, const std::string& source = "<labels>");

}  // namespace kdsum
