// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>
#include <sstream>

#include "llrecall/error.hpp"
#include "llrecall/report.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

const SweepReport& fixture_sweep() {
    static const SweepReport r = [] {
        const auto& f = testing::fixture_data();
        return run_sweep(f.lessons, f.queries, f.gold, ParameterGrid::paper());
    }();
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(split_csv_line(line));
    return rows;
}

// Parses "### <FAMILY>: <title>" HSD tables under "## Tukey HSD (<metric>)".
std::map<std::string, std::string> markdown_letters(const std::string& md) {
    const std::map<std::string, std::string> titles{{"Preprocessing steps", "pipeline"},
                                                    {"Similarity", "similarity"},
                                                    {"Term weight", "weight"},
                                                    {"Number of topics", "topics"}};
    std::map<std::string, std::string> out;
    std::istringstream in(md);
    std::string line, metric, table;
    while (std::getline(in, line)) {
        if (line.rfind("## ", 0) == 0) {
            metric = line.find("Tukey HSD (Top-20)") != std::string::npos ? "top20"
                     : line.find("Tukey HSD (MAP)") != std::string::npos ? "map"
                                                                          : "";
            table.clear();
        } else if (!metric.empty() && line.rfind("### ", 0) == 0) {
            const auto colon = line.find(": ");
            std::string fam = line.substr(4, colon - 4);
            for (auto& ch : fam) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            table = fam + "," + titles.at(line.substr(colon + 2)) + "," + metric;
        } else if (!table.empty() && line.rfind("| ", 0) == 0 && line.find("| Group") == std::string::npos) {
            const auto cells = csv_rows([&] {
                std::string s = line.substr(2, line.size() - 4);
                for (std::size_t p; (p = s.find(" | ")) != std::string::npos;) s.replace(p, 3, ",");
                return s;
            }())[0];
            out[table + "," + cells[2]] = cells[0];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("describe") {
    const std::vector<double> five{3, 1, 5, 2, 4};
    const auto d = describe(five);
    CHECK(d.min == 1);
    CHECK(d.q1 == 2);
    CHECK(d.mean == 3);
    CHECK(d.median == 3);
    CHECK(d.q3 == 4);
    CHECK(d.max == 5);
    const std::vector<double> four{1, 2, 3, 4};
    const auto e = describe(four);
    CHECK(e.q1 == 1.5);
    CHECK(e.median == 2.5);
    CHECK(e.q3 == 3.5);
    const std::vector<double> one{7};
    CHECK(describe(one).q1 == 7);
    CHECK_THROWS_AS(describe(std::vector<double>{}), ValidationError);
}

TEST_CASE("csv fields") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const auto cells = split_csv_line(csv_field("a,b") + "," + csv_field("q\"x") + ",,z");
    CHECK(cells == std::vector<std::string>{"a,b", "q\"x", "", "z"});
}

TEST_CASE("family ranking") {
    const auto& r = fixture_sweep();
    for (auto fam : {ModelKind::vsm, ModelKind::lsi, ModelKind::lda}) {
        const auto ranked = rank_family(r, fam, Metric::map);
        CHECK(ranked.size() == (fam == ModelKind::vsm ? 24u : fam == ModelKind::lsi ? 48u : 16u));
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            CHECK(ranked[i].rank == i + 1);
            CHECK(ranked[i].value == r.find(ranked[i].config_id).eval->map);
            if (i > 0) {
                CHECK(ranked[i - 1].value >= ranked[i].value);
                if (ranked[i - 1].value == ranked[i].value) CHECK(ranked[i - 1].config_id < ranked[i].config_id);
            }
        }
    }
    CHECK(parameter_summary(ClassifierConfig::make_lsi({.stem = true}, WeightScheme::tf_idf, 128)) ==
          "stemming+tf-idf+cosine+128 topics");
    CHECK(parameter_summary(ClassifierConfig::make_lda({}, 32)) == "none+32 topics");
}

TEST_CASE("sweep directory round trip") {
    const auto& r = fixture_sweep();
    testing::TempDir a("sweep-a"), b("sweep-b");
    write_sweep(r, a.path(), true);
    const auto back = load_sweep(a.path());
    REQUIRE(back.results.size() == r.results.size());
    CHECK(back.metadata.corpus_hash == r.metadata.corpus_hash);
    CHECK(back.metadata.limit == r.metadata.limit);
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        CHECK(back.results[i].config == r.results[i].config);
        CHECK(back.results[i].eval->map == r.results[i].eval->map);
        CHECK(back.results[i].eval->top_k == r.results[i].eval->top_k);
        CHECK(back.results[i].rankings == r.results[i].rankings);
        CHECK(back.results[i].warnings == r.results[i].warnings);
        REQUIRE(back.results[i].eval->per_query.size() == r.results[i].eval->per_query.size());
        for (std::size_t q = 0; q < r.results[i].eval->per_query.size(); ++q)
            CHECK(back.results[i].eval->per_query[q].avp == r.results[i].eval->per_query[q].avp);
    }
    // Writing the reloaded sweep reproduces the files byte for byte.
    write_sweep(back, b.path(), true);
    for (const auto& name : {"sweep_report.csv", "sweep_queries.csv", "sweep_rankings.csv", "sweep_errors.csv",
                             "sweep_meta.json"})
        CHECK(testing::read_text(a.path() / name) == testing::read_text(b.path() / name));
    // And the report and rankings equal the oracle run's inputs.
    CHECK(testing::read_text(a.path() / "sweep_report.csv") ==
          testing::read_text(testing::source_path("tests/golden/sweep/sweep_report.csv")));
    CHECK(testing::read_text(a.path() / "sweep_rankings.csv") ==
          testing::read_text(testing::source_path("tests/golden/sweep/sweep_rankings.csv")));

    CHECK_THROWS_AS(load_sweep(a.path() / "missing"), IoError);
}

TEST_CASE("markdown carries the oracle letter groups and three comparisons per family") {
    const auto md = render_markdown(fixture_sweep());
    const auto letters = markdown_letters(md);
    std::size_t checked = 0;
    for (const auto& row : csv_rows(testing::read_text(testing::source_path("tests/golden/sweep_hsd.csv")))) {
        if (row[0] == "family") continue;
        const auto key = row[0] + "," + row[1] + "," + row[2] + "," + row[3];
        CAPTURE(key);
        REQUIRE(letters.contains(key));
        CHECK(letters.at(key) == row[4]);
        ++checked;
    }
    CHECK(checked == letters.size());
    CHECK(checked == 56);

    for (const std::string metric : {"Top-20", "MAP"}) {
        const auto start = md.find("## Top performer comparisons (" + metric + ")");
        REQUIRE(start != std::string::npos);
        const auto section = md.substr(start, md.find("\n## ", start + 1) - start);
        for (const std::string cmp : {"| stemming vs none |", "| stopping vs none |", "| stemming+stopping vs none |"}) {
            std::size_t count = 0;
            for (auto p = section.find(cmp); p != std::string::npos; p = section.find(cmp, p + 1)) ++count;
            CHECK(count == 3);
        }
    }
    CHECK(md.find("## Descriptive statistics") != std::string::npos);
}

TEST_CASE("csv report files") {
    testing::TempDir dir("report");
    const auto files = emit_report(fixture_sweep(), ReportFormat::csv, dir.path());
    CHECK(files.size() == 3 + 16 + 6);
    const auto lsi = csv_rows(testing::read_text(dir.path() / hsd_file_name(ModelKind::lsi, Parameter::topics, Metric::map)));
    CHECK(lsi[0] == std::vector<std::string>{"group", "mean", "value"});
    CHECK(lsi.size() == 5);
    const auto wil = csv_rows(testing::read_text(dir.path() / wilcoxon_file_name(ModelKind::vsm, Metric::top_k)));
    CHECK(wil.size() == 4);
    CHECK(wilcoxon_file_name(ModelKind::vsm, Metric::top_k) == "wilcoxon_vsm_top20.csv");
    CHECK(parse_report_format("markdown") == ReportFormat::markdown);
    CHECK_THROWS_AS(parse_report_format("html"), ConfigError);
}
