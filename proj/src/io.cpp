#include "kdsum/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kdsum/error.hpp"

namespace kdsum {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

bool parse_int(std::string_view s, long long& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}

// Numeric order when every label is an integer, byte order otherwise.
void natural_sort(std::vector<std::string>& labels) {
    bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
        long long v;
        return parse_int(s, v);
    });
    if (numeric) {
        std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
            long long x = 0, y = 0;
            parse_int(a, x);
            parse_int(b, y);
            return x < y;
        });
    } else {
        std::sort(labels.begin(), labels.end());
    }
}

std::string quote_cell(const std::string& s) {
    bool needs = s.find_first_of(",\"\r\n") != std::string::npos ||
                 (!s.empty() && (s.front() == ' ' || s.back() == ' ' || s.front() == '\t'));
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

VariableSchema schema_from_json(const nlohmann::json& rec, const std::string& at) {
    if (!rec.is_object()) throw ValidationError(at + "schema record must be an object");
    VariableSchema v;
    if (!rec.contains("name") || !rec["name"].is_string()) throw ValidationError(at + "schema record needs a string 'name'");
    v.name = rec["name"].get<std::string>();
    if (!rec.contains("kind") || !rec["kind"].is_string()) throw ValidationError(at + "column '" + v.name + "' needs a 'kind'");
    try {
        v.kind = parse_kind(rec["kind"].get<std::string>());
    } catch (const ValidationError& e) {
        throw ValidationError(at + e.what());
    }
    if (rec.contains("levels")) {
        const auto& lv = rec["levels"];
        if (v.kind == VariableKind::Continuous) throw ValidationError(at + "continuous column '" + v.name + "' cannot have levels");
        if (lv.is_number_integer()) {
            v.levels = lv.get<int>();
        } else if (lv.is_array()) {
            for (const auto& item : lv) {
                if (item.is_string()) v.labels.push_back(item.get<std::string>());
                else if (item.is_number_integer()) v.labels.push_back(std::to_string(item.get<long long>()));
                else throw ValidationError(at + "level labels of '" + v.name + "' must be strings or integers");
            }
            std::set<std::string> uniq(v.labels.begin(), v.labels.end());
            if (uniq.size() != v.labels.size()) throw ValidationError(at + "duplicate level labels in '" + v.name + "'");
            v.levels = static_cast<int>(v.labels.size());
        } else {
            throw ValidationError(at + "'levels' of '" + v.name + "' must be a count or a label list");
        }
        if (v.levels < 2) throw ValidationError(at + "categorical column '" + v.name + "' needs at least 2 levels");
    }
    if (v.kind == VariableKind::Ordered && v.labels.empty())
        throw ValidationError(at + "ordered column '" + v.name + "' must list its levels in rank order");
    return v;
}

}  // namespace

std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source) {
    std::vector<CsvRecord> out;
    std::size_t i = 0, line = 1;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
    const std::size_t n = text.size();
    while (i < n) {
        CsvRecord rec;
        rec.line = line;
        std::string cell;
        bool done = false;
        while (!done) {
            cell.clear();
            if (i < n && text[i] == '"') {
                std::size_t open_line = line;
                ++i;
                for (;;) {
                    if (i >= n) throw ValidationError(where(source, open_line) + "unterminated quoted field");
                    char c = text[i++];
                    if (c == '"') {
                        if (i < n && text[i] == '"') {
                            cell += '"';
                            ++i;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line;
                        cell += c;
                    }
                }
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                    throw ValidationError(where(source, line) + "unexpected character after closing quote");
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') cell += text[i++];
            }
            rec.cells.push_back(cell);
            if (i >= n) {
                done = true;
            } else if (text[i] == ',') {
                ++i;
            } else {
                if (text[i] == '\r') ++i;
                if (i < n && text[i] == '\n') ++i;
                ++line;
                done = true;
            }
        }
        bool blank = rec.cells.size() == 1 && trim(rec.cells[0]).empty();
        if (!blank) out.push_back(std::move(rec));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
}

std::vector<VariableSchema> parse_schema(std::string_view text, const std::string& source) {
    std::vector<VariableSchema> out;
    auto body = trim(text);
    if (body.empty()) throw ValidationError(source + ": empty schema");
    if (body.front() == '[') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(source + ": " + e.what());
        }
        for (std::size_t r = 0; r < doc.size(); ++r)
            out.push_back(schema_from_json(doc[r], source + ": record " + std::to_string(r + 1) + ": "));
    } else {
        std::size_t line = 0, pos = 0;
        while (pos <= text.size()) {
            auto nl = text.find('\n', pos);
            auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line;
            auto t = trim(raw);
            if (!t.empty() && t.front() != '#') {
                nlohmann::json rec;
                try {
                    rec = nlohmann::json::parse(t);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ValidationError(where(source, line) + e.what());
                }
                out.push_back(schema_from_json(rec, where(source, line)));
            }
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
    }
    std::set<std::string> names;
    for (const auto& v : out)
        if (!names.insert(v.name).second) throw ValidationError(source + ": duplicate column '" + v.name + "'");
    return out;
}

std::string format_schema(const TypedDataset& ds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : ds.schema()) {
        nlohmann::json rec = {{"name", v.name}, {"kind", std::string(kind_name(v.kind))}};
        if (v.kind != VariableKind::Continuous) {
            if (v.labels.size() == static_cast<std::size_t>(v.levels)) rec["levels"] = v.labels;
            else rec["levels"] = v.levels;
        }
        arr.push_back(rec);
    }
    std::string out;
    for (const auto& rec : arr) out += rec.dump() + "\n";
    return out;
}

bool is_missing_token(std::string_view cell) {
    auto t = trim(cell);
    return t.empty() || t == "NA" || t == "NaN";
}

TypedDataset ingest_text(std::string_view csv, std::string_view schema_text, const std::string& csv_source,
                         const std::string& schema_source) {
    auto decl = parse_schema(schema_text, schema_source);
    auto records = parse_csv(csv, csv_source);
    if (records.empty()) throw ValidationError(csv_source + ": missing header row");

    const auto& header = records.front().cells;
    std::map<std::string, std::size_t> col_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string name(trim(header[c]));
        if (!col_of.emplace(name, c).second) throw ValidationError(where(csv_source, 1) + "duplicate header '" + name + "'");
    }
    for (const auto& v : decl)
        if (!col_of.count(v.name)) throw ValidationError(schema_source + ": unknown column '" + v.name + "' (not in CSV header)");
    if (decl.size() != header.size()) {
        std::set<std::string> declared;
        for (const auto& v : decl) declared.insert(v.name);
        for (const auto& [name, c] : col_of)
            if (!declared.count(name)) throw ValidationError(schema_source + ": CSV column '" + name + "' has no schema entry");
    }

    // Kind order, schema order within a kind.
    std::vector<std::size_t> order;
    for (auto kind : {VariableKind::Continuous, VariableKind::Unordered, VariableKind::Ordered})
        for (std::size_t s = 0; s < decl.size(); ++s)
            if (decl[s].kind == kind) order.push_back(s);

    const std::size_t p = order.size();
    std::vector<std::vector<std::string>> raw;
    std::vector<std::size_t> lines;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.cells.size() != header.size())
            throw ValidationError(where(csv_source, rec.line) + "expected " + std::to_string(header.size()) +
                                  " fields, found " + std::to_string(rec.cells.size()));
        std::vector<std::string> row(p);
        bool missing = false;
        for (std::size_t k = 0; k < p; ++k) {
            const auto& cell = rec.cells[col_of[decl[order[k]].name]];
            if (is_missing_token(cell)) {
                missing = true;
                break;
            }
            row[k] = cell;
        }
        if (missing) continue;
        raw.push_back(std::move(row));
        lines.push_back(rec.line);
    }

    std::vector<VariableSchema> schema;
    std::vector<std::map<std::string, int>> codes(p);
    for (std::size_t k = 0; k < p; ++k) {
        VariableSchema v = decl[order[k]];
        if (v.kind == VariableKind::Unordered) {
            std::vector<std::string> labels = v.labels;
            if (labels.empty()) {
                std::set<std::string> seen;
                for (const auto& row : raw) seen.insert(std::string(trim(row[k])));
                labels.assign(seen.begin(), seen.end());
                if (v.levels == 0) v.levels = std::max<int>(2, static_cast<int>(labels.size()));
                if (labels.size() > static_cast<std::size_t>(v.levels))
                    throw ValidationError(csv_source + ": column '" + v.name + "' has " + std::to_string(labels.size()) +
                                          " distinct labels but declares " + std::to_string(v.levels) + " levels");
            }
            natural_sort(labels);
            v.labels = labels;
        }
        for (std::size_t c = 0; c < v.labels.size(); ++c) codes[k][v.labels[c]] = static_cast<int>(c);
        schema.push_back(std::move(v));
    }

    std::vector<double> values;
    values.reserve(raw.size() * p);
    for (std::size_t r = 0; r < raw.size(); ++r) {
        for (std::size_t k = 0; k < p; ++k) {
            const auto& v = schema[k];
            if (v.kind == VariableKind::Continuous) {
                double x;
                if (!parse_real(raw[r][k], x))
                    throw ValidationError(where(csv_source, lines[r]) + "non-numeric value '" + raw[r][k] +
                                          "' in continuous column '" + v.name + "'");
                values.push_back(x);
            } else {
                auto it = codes[k].find(std::string(trim(raw[r][k])));
                if (it == codes[k].end())
                    throw ValidationError(where(csv_source, lines[r]) + "value '" + raw[r][k] +
                                          "' is not a declared level of column '" + v.name + "'");
                values.push_back(it->second);
            }
        }
    }
    return TypedDataset(std::move(schema), std::move(values));
}

TypedDataset ingest_csv(const std::string& path, const std::string& schema_path) {
    return ingest_text(read_file(path), read_file(schema_path), path, schema_path);
}

std::string format_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string format_csv(const TypedDataset& ds) {
    std::string out;
    for (std::size_t k = 0; k < ds.p(); ++k) {
        if (k) out += ',';
        out += quote_cell(ds.schema()[k].name);
    }
    out += '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t k = 0; k < ds.p(); ++k) {
            if (k) out += ',';
            const auto& v = ds.schema()[k];
            double x = ds.at(i, k);
            if (v.kind == VariableKind::Continuous) {
                out += format_double(x);
            } else {
                auto code = static_cast<std::size_t>(x);
                out += code < v.labels.size() ? quote_cell(v.labels[code]) : std::to_string(code);
            }
        }
        out += '\n';
    }
    return out;
}

void write_matrix(std::ostream& os, const DissimilarityMatrix& dm) {
    os << "i,j,d\n";
    for (std::size_t i = 0; i < dm.n(); ++i)
        for (std::size_t j = 0; j <= i; ++j) os << i << ',' << j << ',' << format_g12(dm(i, j)) << '\n';
}

DissimilarityMatrix parse_matrix(std::string_view text, const std::string& source) {
    auto recs = parse_csv(text, source);
    struct Entry {
        std::size_t i, j;
        double d;
    };
    std::vector<Entry> entries;
    std::size_t n = 0;
    for (const auto& rec : recs) {
        if (rec.cells.size() != 3) throw ValidationError(where(source, rec.line) + "expected i,j,d");
        long long i, j;
        double d;
        if (!parse_int(rec.cells[0], i) || !parse_int(rec.cells[1], j)) {
            if (&rec == &recs.front()) continue;  // header
            throw ValidationError(where(source, rec.line) + "bad index");
        }
        if (!parse_real(rec.cells[2], d)) throw ValidationError(where(source, rec.line) + "bad distance '" + rec.cells[2] + "'");
        if (i < 0 || j < 0) throw ValidationError(where(source, rec.line) + "negative index");
        if (j > i) std::swap(i, j);
        entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), d});
        n = std::max(n, static_cast<std::size_t>(i) + 1);
    }
    std::vector<double> full(n * n, 0.0);
    std::vector<char> seen(n * n, 0);
    for (const auto& e : entries) {
        if (seen[e.i * n + e.j]) throw ValidationError(source + ": duplicate entry (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
        seen[e.i * n + e.j] = 1;
        full[e.i * n + e.j] = e.d;
        full[e.j * n + e.i] = e.d;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!seen[i * n + j]) throw ValidationError(source + ": missing entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return DissimilarityMatrix(n, std::move(full));
}

void write_labels(std::ostream& os, const std::vector<int>& labels) {
    os << "label\n";
    for (int l : labels) os << l << '\n';
}

std::vector<int> parse_labels(std::string_view text, const std::string& source) {
    std::vector<int> out;
    auto recs = parse_csv(text, source);
    for (const auto& rec : recs) {
        long long v;
        const auto& cell = rec.cells.back();
        if (!parse_int(cell, v)) {
            if (&rec == &recs.front()) continue;
            throw ValidationError(where(source, rec.line) + "label '" + cell + "' is not an integer");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace kdsum
