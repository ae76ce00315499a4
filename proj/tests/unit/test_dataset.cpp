#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "effortnn/config_file.hpp"
#include "effortnn/dataset.hpp"
#include "effortnn/encoding.hpp"
#include "effortnn/error.hpp"
#include "effortnn/synthetic.hpp"
#include "effortnn/table_io.hpp"

using namespace effortnn;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(EFFORTNN_TEST_DATA) + "/" + name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> ids(const std::vector<ProjectRecord>& rs) {
    std::vector<std::string> out;
    for (const auto& r : rs) out.push_back(r.project_id);
    return out;
}

std::vector<ProjectRecord> fixture40() {
    const auto map = load_column_map(std::string(EFFORTNN_TEST_DATA) + "/fixture40_mapping.toml");
    return parse_project_table(slurp("fixture40.csv"), map);
}

ProjectRecord rec(std::string id, double afp, double effort, int year, std::string platform = "PC",
                  std::string lang = "3GL", std::string res = "1") {
    ProjectRecord r;
    r.project_id = std::move(id);
    r.data_quality = "A";
    r.count_approach = "IFPUG";
    r.development_type = "New Development";
    r.afp = afp;
    r.normalised_effort = effort;
    r.project_year = year;
    r.development_platform = std::move(platform);
    r.language_type = std::move(lang);
    r.resource_level = std::move(res);
    return r;
}

}  // namespace

TEST_CASE("delimited parser handles quotes, BOM, CRLF and tabs") {
    const auto t = parse_delimited("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, y\",\"he said \"\"hi\"\"\"\r\n\r\n2,,3\r\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x, y");
    CHECK(t.rows[0][2] == "he said \"hi\"");
    CHECK(t.rows[1][1].empty());
    const auto tabs = parse_delimited("a\tb\n1\t2,5\n");
    CHECK(tabs.delimiter == '\t');
    CHECK(tabs.rows[0][1] == "2,5");
    CHECK(parse_delimited(write_delimited(t)).rows == t.rows);
}

TEST_CASE("column letters and header names both resolve") {
    const std::string csv = "Id,Quality,Size,Effort\nP1,A,10,50\nP2,B,,7\n";
    ColumnMap map{{{"project_id", "A"}, {"data_quality", "Quality"}, {"afp", "C"}, {"normalised_effort", "Effort"}}};
    const auto rs = parse_project_table(csv, map);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].project_id == "P1");
    CHECK(*rs[0].afp == 10.0);
    CHECK_FALSE(rs[1].afp.has_value());
    CHECK(rs[0].productivity().value() == doctest::Approx(5.0));

    CHECK_THROWS_AS(parse_project_table(csv, ColumnMap{{{"afp", "Missing Column"}}}), ConfigError);
    CHECK_THROWS_AS(parse_project_table(csv, ColumnMap{{{"nonsense", "A"}}}), ConfigError);
    CHECK_THROWS_AS(parse_project_table("", map), EmptyInputError);
    try {
        parse_project_table(csv, ColumnMap{{{"afp", "ZZ"}}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ZZ") != std::string::npos);
    }
}

TEST_CASE("unmapped columns land in extras and canonical CSV round-trips") {
    auto rs = fixture40();
    REQUIRE(rs.size() == 40);
    CHECK(rs[0].extras.at("Organisation Type") == "Banking, Finance");
    std::vector<ProjectRecord> plain = rs;
    for (auto& r : plain) r.extras.clear();
    const auto back = parse_project_table(records_to_csv(plain), ColumnMap::canonical());
    CHECK(back == plain);
}

TEST_CASE("filter trace on the 40-row fixture matches the hand count") {
    const auto rs = fixture40();
    const auto result = filter_projects(rs, FilterSpec{});
    const StepTrace expected{{"data_quality", 35},
                             {"count_approach", 30},
                             {"attribute_selection", 30},
                             {"missing_data", 25},
                             {"development_type", 20}};
    CHECK(result.trace == expected);
    for (const auto& r : result.records) CHECK(r.project_id[0] == 'P');
}

TEST_CASE("filter trace on the 20-row canonical fixture") {
    const auto rs = parse_project_table(slurp("fixture20.csv"), ColumnMap::canonical());
    const auto result = filter_projects(rs, FilterSpec{});
    std::vector<std::size_t> counts;
    for (const auto& s : result.trace) counts.push_back(s.count);
    CHECK(counts == std::vector<std::size_t>{15, 15, 15, 12, 12});
}

TEST_CASE("filter spec validation and wildcards") {
    FilterSpec bad;
    bad.accepted_quality.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    FilterSpec unknown;
    unknown.required_fields.push_back("colour");
    CHECK_THROWS_AS(unknown.validate(), ConfigError);

    const auto rs = fixture40();
    FilterSpec any = FilterSpec::accept_all();
    CHECK(filter_projects(rs, any).records.size() == 40);
    FilterSpec lower;
    lower.accepted_quality = {"a", "b"};
    lower.accepted_development_type = "  new development ";
    CHECK(filter_projects(rs, lower).records.size() == 20);
}

TEST_CASE("bands and chronological splits on the fixture") {
    const auto filtered = filter_projects(fixture40(), FilterSpec{}).records;
    const auto bands = band_by_productivity(filtered);
    REQUIRE(bands.size() == 5);
    std::vector<std::size_t> sizes;
    for (const auto& b : bands) sizes.push_back(b.records.size());
    CHECK(sizes == std::vector<std::size_t>{6, 5, 3, 2, 4});
    // Edge values go to the upper band.
    const auto has = [](const Dataset& d, const std::string& id) {
        const auto v = ids(d.records);
        return std::find(v.begin(), v.end(), id) != v.end();
    };
    CHECK(has(bands[0], "P105"));  // 4.9
    CHECK(has(bands[1], "P201"));  // 5.0
    CHECK(has(bands[2], "P301"));  // 10.0
    CHECK(has(bands[3], "P401"));  // 15.0
    CHECK(has(bands[3], "P402"));  // 19.99
    CHECK(has(bands[4], "P501"));  // 20.0
    for (const auto& b : bands) {
        for (const auto& r : b.records) CHECK(b.band.contains(*r.productivity()));
    }

    const auto s1 = chronological_split(bands[0]);
    CHECK(ids(s1.train) == std::vector<std::string>{"P104", "P102", "P106", "P101"});
    CHECK(ids(s1.test) == std::vector<std::string>{"P105", "P103"});
    const auto s5 = chronological_split(bands[4]);
    CHECK(ids(s5.train) == std::vector<std::string>{"P502", "P503", "P504"});  // year tie keeps file order
    CHECK(ids(s5.test) == std::vector<std::string>{"P501"});

    std::vector<std::pair<std::size_t, std::size_t>> splits;
    for (const auto& b : bands) {
        const auto s = chronological_split(b);
        splits.emplace_back(s.train.size(), s.test.size());
        CHECK(s.train.size() + s.test.size() == b.records.size());
    }
    CHECK(splits == std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}, {4, 1}, {2, 1}, {1, 1}, {3, 1}});
}

TEST_CASE("band and split errors") {
    std::vector<ProjectRecord> rs{rec("X", 10, 30, 2000)};
    rs[0].normalised_effort.reset();
    CHECK_THROWS_AS(band_by_productivity(rs), DomainError);
    CHECK_THROWS_AS(band_by_productivity(std::vector<ProjectRecord>{rec("Y", 10, 30, 2000)},
                                         std::vector<double>{5.0, 10.0}),
                    DomainError);
    CHECK_THROWS_AS(band_by_productivity(std::vector<ProjectRecord>{}, std::vector<double>{5.0, 1.0}), DomainError);

    Dataset one{"D", {}, {rec("A", 1, 1, 2000)}};
    CHECK_THROWS_AS(chronological_split(one), TooSmallError);
    Dataset no_year{"D", {}, {rec("A", 1, 1, 2000), rec("B", 1, 1, 2001)}};
    no_year.records[1].project_year.reset();
    CHECK_THROWS_AS(chronological_split(no_year), DomainError);
    CHECK_THROWS_AS(chronological_split(Dataset{"D", {}, {rec("A", 1, 1, 1), rec("B", 1, 1, 2)}}, 1.0), DomainError);
    CHECK(train_size_for(288, 0.7) == 202);
    CHECK(train_size_for(260, 0.7) == 182);
    CHECK(train_size_for(138, 0.7) == 97);
    CHECK(train_size_for(101, 0.7) == 71);
    CHECK(train_size_for(164, 0.7) == 115);
}

TEST_CASE("encoding layout, one-hot sums and round trip") {
    std::vector<ProjectRecord> train{rec("A", 100, 500, 2000, "PC", "3GL", "1"), rec("B", 300, 900, 2001, "MF", "4GL", "2"),
                                     rec("C", 200, 700, 2002, "PC", "4GL", "1")};
    Split split{"D", train, {rec("T", 150, 600, 2003, "MR", "3GL", "2")}, 0.7};
    const auto enc = encode_features(split);
    const auto& schema = enc.train.schema;
    CHECK(schema.width() == 1 + 2 + 2 + 2);
    CHECK(schema.fields() == std::vector<std::string>{"afp", "development_platform", "language_type", "resource_level"});
    CHECK(schema.size_scaler.center == doctest::Approx(200.0));
    CHECK(schema.size_scaler.scale == doctest::Approx(100.0));
    for (const auto& b : schema.blocks()) {
        if (b.field == "afp") continue;
        for (Eigen::Index i = 0; i < enc.train.rows(); ++i) {
            CHECK(enc.train.features.row(i).segment(b.start, b.width).sum() == 1.0);
        }
    }
    for (Eigen::Index i = 0; i < enc.train.rows(); ++i) {
        const Eigen::RowVectorXd row = enc.train.features.row(i);
        const auto d = schema.decode({row.data(), static_cast<std::size_t>(row.size())});
        CHECK(d.afp == doctest::Approx(*train[static_cast<std::size_t>(i)].afp));
        CHECK(*d.categories[0].second == train[static_cast<std::size_t>(i)].development_platform);
    }
    // Unseen platform on the test side: zero block plus a warning.
    CHECK(enc.test.features.row(0).segment(1, 2).sum() == 0.0);
    CHECK_FALSE(enc.warnings.empty());

    Split empty_test{"D", train, {}, 0.7};
    CHECK_THROWS_AS(encode_features(empty_test), TooSmallError);

    std::vector<std::string> warnings;
    std::vector<ProjectRecord> same{rec("A", 5, 5, 1), rec("B", 5, 5, 2)};
    const auto flat = fit_encoding(same, &warnings);
    CHECK(flat.size_scaler.scale == 1.0);
    CHECK(warnings.size() == 1);
}

TEST_CASE("synthetic generator") {
    SyntheticSpec spec;
    spec.n_projects = 100;
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    CHECK(a == b);
    CHECK(a.size() == 100);
    spec.seed = 43;
    CHECK(generate_synthetic(spec) != a);

    CHECK(apportion(100, {0.30, 0.27, 0.15, 0.10, 0.18}) == std::vector<std::size_t>{30, 27, 15, 10, 18});
    CHECK(apportion(7, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == std::vector<std::size_t>{3, 2, 2});
    const auto counts = apportion(951, {0.30, 0.27, 0.15, 0.10, 0.18});
    CHECK(std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 951);

    SyntheticSpec noiseless;
    const auto rs = generate_synthetic(noiseless);
    const auto bands = band_by_productivity(filter_projects(rs, FilterSpec{}).records);
    const auto expected = apportion(noiseless.n_projects, noiseless.band_weights);
    for (std::size_t i = 0; i < bands.size(); ++i) CHECK(bands[i].records.size() == expected[i]);

    nlohmann::json j = noiseless;
    CHECK(j.get<SyntheticSpec>().band_weights == noiseless.band_weights);
    SyntheticSpec bad;
    bad.size_dispersion = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("toml subset") {
    const auto j = parse_toml(R"(
# comment
name = "x"   # trailing
count = 1_000
ratio = 0.25
flag = true
list = [1, 2,
        3]
"quoted key" = 'lit\eral'
[table.inner]
edge = -1.5e3
)");
    CHECK(j["name"] == "x");
    CHECK(j["count"] == 1000);
    CHECK(j["ratio"] == 0.25);
    CHECK(j["flag"] == true);
    CHECK(j["list"].size() == 3);
    CHECK(j["quoted key"] == "lit\\eral");
    CHECK(j["table"]["inner"]["edge"] == -1500.0);
    CHECK_THROWS_AS(parse_toml("a = \n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("[[x]]\n"), ConfigError);

    const auto map = load_column_map(std::string(EFFORTNN_SOURCE_DIR) + "/config/isbsg_r11_mapping.toml");
    CHECK(map.entries.size() == 10);
    CHECK_THROWS_AS(load_column_map("/definitely/not/here.toml"), ConfigError);
}
