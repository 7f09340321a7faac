#include <gtest/gtest.h>

#include <sstream>

#include "kdsum/error.hpp"
#include "kdsum/io.hpp"
#include "kdsum/rng.hpp"
#include "oracles.hpp"

using namespace kdsum;

namespace {

const char* kToyCsv = "x_cont,x_unord,x_ord\n1.5,1,3\n1.5,1,3\n1.5,0,0\n0,1,0\n0,0,3\n";
const char* kToySchema =
    "{\"name\": \"x_cont\", \"kind\": \"continuous\"}\n"
    "{\"name\": \"x_unord\", \"kind\": \"unordered\", \"levels\": [\"0\", \"1\"]}\n"
    "{\"name\": \"x_ord\", \"kind\": \"ordered\", \"levels\": [\"0\", \"1\", \"2\", \"3\"]}\n";

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Csv, QuotedFieldsAndNewlines) {
    auto recs = parse_csv("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\n\"multi\nline\",2\n");
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[1].cells[0], "x,1");
    EXPECT_EQ(recs[1].cells[1], "say \"hi\"");
    EXPECT_EQ(recs[2].cells[0], "multi\nline");
    EXPECT_EQ(recs[2].line, 3u);
}

TEST(Csv, EmptyTrailingFieldAndBlankLines) {
    auto recs = parse_csv("a,b\n1,\n\n2,3");
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[1].cells.size(), 2u);
    EXPECT_EQ(recs[1].cells[1], "");
    EXPECT_EQ(recs[2].line, 4u);
}

TEST(Csv, UnterminatedQuote) { EXPECT_THROW(parse_csv("a\n\"open\n"), ValidationError); }

TEST(Ingest, DropsRowsWithMissingValues) {
    const char* csv = "x,g\n1.0,a\nNA,b\n2.0,b\n";
    const char* schema = "{\"name\":\"x\",\"kind\":\"c\"}\n{\"name\":\"g\",\"kind\":\"u\",\"levels\":2}\n";
    auto ds = ingest_text(csv, schema);
    EXPECT_EQ(ds.n(), 2u);
    EXPECT_EQ(ds.continuous_count(), 1u);
    EXPECT_EQ(ds.unordered_count(), 1u);
    EXPECT_EQ(ds.at(1, 1), 1.0);
}

TEST(Ingest, EmptyAndNaNTokensAreMissing) {
    const char* csv = "x,g\n1.0,\nNaN,b\n2.0,b\n";
    const char* schema = "{\"name\":\"x\",\"kind\":\"c\"}\n{\"name\":\"g\",\"kind\":\"u\",\"levels\":2}\n";
    EXPECT_EQ(ingest_text(csv, schema).n(), 1u);
}

TEST(Ingest, ToyMatrix) {
    auto ds = ingest_text(kToyCsv, kToySchema);
    EXPECT_EQ(ds.n(), 5u);
    EXPECT_EQ(ds.layout(), (ColumnLayout{1, 1, 1}));
    EXPECT_EQ(ds.schema()[0].name, "x_cont");
    EXPECT_EQ(ds.schema()[2].name, "x_ord");
    std::vector<double> expect{1.5, 1, 3, 1.5, 1, 3, 1.5, 0, 0, 0, 1, 0, 0, 0, 3};
    EXPECT_EQ(ds.values(), expect);
}

TEST(Ingest, ColumnOrderDoesNotMatter) {
    const char* csv = "x_unord,x_cont,x_ord\n1,1.5,3\n1,1.5,3\n0,1.5,0\n1,0,0\n0,0,3\n";
    EXPECT_EQ(ingest_text(csv, kToySchema), ingest_text(kToyCsv, kToySchema));
}

TEST(Ingest, SchemaAsJsonArray) {
    const char* schema = R"([{"name":"x_cont","kind":"continuous"},
        {"name":"x_unord","kind":"unordered","levels":2},
        {"name":"x_ord","kind":"ordered","levels":["0","1","2","3"]}])";
    EXPECT_EQ(ingest_text(kToyCsv, schema).values(), ingest_text(kToyCsv, kToySchema).values());
}

TEST(Ingest, UnorderedCodesFollowSortedLabels) {
    const char* csv = "g\nzeta\nalpha\nmid\nalpha\n";
    auto ds = ingest_text(csv, "{\"name\":\"g\",\"kind\":\"unordered\",\"levels\":3}");
    EXPECT_EQ(ds.values(), (std::vector<double>{2, 0, 1, 0}));
    // integer labels sort numerically
    auto nums = ingest_text("g\n10\n9\n1\n", "{\"name\":\"g\",\"kind\":\"unordered\",\"levels\":[\"10\",\"9\",\"1\"]}");
    EXPECT_EQ(nums.values(), (std::vector<double>{2, 1, 0}));
}

TEST(Ingest, OrderedCodesFollowDeclaredRank) {
    auto ds = ingest_text("g\nhigh\nlow\nmid\n",
                          "{\"name\":\"g\",\"kind\":\"ordered\",\"levels\":[\"low\",\"mid\",\"high\"]}");
    EXPECT_EQ(ds.values(), (std::vector<double>{2, 0, 1}));
}

TEST(Ingest, OrderedNeedsLabels) {
    EXPECT_THROW(ingest_text("g\n1\n", "{\"name\":\"g\",\"kind\":\"ordered\",\"levels\":3}"), ValidationError);
}

TEST(Ingest, UnknownSchemaColumn) {
    auto msg = what_of([] { ingest_text("a\n1\n", "{\"name\":\"b\",\"kind\":\"c\"}", "d.csv", "s.json"); });
    EXPECT_NE(msg.find("unknown column 'b'"), std::string::npos);
}

TEST(Ingest, NonNumericContinuousNamesLine) {
    auto msg = what_of([] { ingest_text("a\n1\nfoo\n", "{\"name\":\"a\",\"kind\":\"c\"}", "d.csv", "s.json"); });
    EXPECT_NE(msg.find("d.csv:3:"), std::string::npos);
    EXPECT_NE(msg.find("non-numeric"), std::string::npos);
}

TEST(Ingest, UndeclaredLevel) {
    auto msg = what_of([] {
        ingest_text("g\nred\nblue\n", "{\"name\":\"g\",\"kind\":\"u\",\"levels\":[\"red\",\"green\"]}", "d.csv", "s.json");
    });
    EXPECT_NE(msg.find("d.csv:3:"), std::string::npos);
}

TEST(Ingest, TooManyDistinctLabels) {
    EXPECT_THROW(ingest_text("g\na\nb\nc\n", "{\"name\":\"g\",\"kind\":\"u\",\"levels\":2}"), ValidationError);
}

TEST(Ingest, RaggedRow) {
    auto msg = what_of([] { ingest_text("a,b\n1,2\n3\n", "[{\"name\":\"a\",\"kind\":\"c\"},{\"name\":\"b\",\"kind\":\"c\"}]", "d.csv"); });
    EXPECT_NE(msg.find("d.csv:3:"), std::string::npos);
}

TEST(Ingest, BadSchemaLine) {
    auto msg = what_of([] { ingest_text("a\n1\n", "{\"name\":\"a\",\"kind\":\"c\"}\n{broken\n", "d.csv", "s.json"); });
    EXPECT_NE(msg.find("s.json:2:"), std::string::npos);
}

TEST(Ingest, CanonicalRoundTripIsExact) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto ds = oracle::random_mixed(rng, 1 + rng.below(20), rng.below(3), rng.below(3), rng.below(3));
        if (ds.p() == 0) continue;
        // give every categorical column explicit labels so the schema is self-contained
        std::vector<VariableSchema> schema = ds.schema();
        for (auto& v : schema) {
            if (v.kind == VariableKind::Continuous) continue;
            v.labels.clear();
            for (int l = 0; l < v.levels; ++l) v.labels.push_back("L" + std::to_string(l));
        }
        // L0..L9 sort in code order, so unordered codes survive the trip
        TypedDataset labelled(schema, ds.values());
        auto again = ingest_text(format_csv(labelled), format_schema(labelled));
        EXPECT_EQ(again, labelled);
        // and a second pass is a fixed point
        EXPECT_EQ(format_csv(again), format_csv(labelled));
    }
}

TEST(Ingest, RoundTripKeepsAwkwardLabels) {
    std::vector<VariableSchema> schema{{"x, y", VariableKind::Continuous, 0, {}},
                                       {"g", VariableKind::Unordered, 2, {"a \"b\"", "c,d"}}};
    TypedDataset ds(schema, {0.1, 0, 1e-300, 1, -2.5e10, 0});
    EXPECT_EQ(ingest_text(format_csv(ds), format_schema(ds)), ds);
}

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.5), "1.5");
    double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(x)), x);
    EXPECT_EQ(format_g12(81.78845608028654), "81.7884560803");
}

TEST(MatrixIo, LowerTriangleRoundTrip) {
    DissimilarityMatrix dm(3, {0, 1.25, 2, 1.25, 0, 3.5, 2, 3.5, 0});
    std::ostringstream os;
    write_matrix(os, dm);
    EXPECT_EQ(os.str(), "i,j,d\n0,0,0\n1,0,1.25\n1,1,0\n2,0,2\n2,1,3.5\n2,2,0\n");
    EXPECT_EQ(parse_matrix(os.str()), dm);
}

TEST(MatrixIo, MissingEntry) { EXPECT_THROW(parse_matrix("i,j,d\n0,0,0\n1,1,0\n"), ValidationError); }

TEST(LabelsIo, RoundTrip) {
    std::vector<int> labels{0, 2, 1, 1};
    std::ostringstream os;
    write_labels(os, labels);
    EXPECT_EQ(parse_labels(os.str()), labels);
    EXPECT_THROW(parse_labels("label\n1\nx\n"), ValidationError);
}
