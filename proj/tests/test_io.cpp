#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "besselsg/experiments.hpp"
#include "besselsg/io.hpp"

using namespace besselsg;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("besselsg_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST(Csv, RoundTripIsExact) {
    CsvTable t{{"x", "value"}, {{0.1, 1.0 / 3.0}, {1e-300, -2.5e17}}};
    std::stringstream ss;
    write_csv(ss, t);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(back.rows[i][j], t.rows[i][j]);
}

TEST(Csv, CommentsBlankLinesAndErrors) {
    std::stringstream ok("# note\n\n1,2\n3,4\n");
    const auto t = read_csv(ok);
    EXPECT_TRUE(t.header.empty());
    EXPECT_EQ(t.rows.size(), 2u);

    std::stringstream ragged("a,b\n1,2\n3\n");
    try {
        read_csv(ragged, "f.csv");
        FAIL() << "ragged row accepted";
    } catch (const invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos);
    }
    std::stringstream text("a,b\n1,x\n");
    EXPECT_THROW(read_csv(text), invalid_argument);
}

TEST(Csv, GridFunctionFileWithJump) {
    const auto dir = scratch_dir("gf");
    const auto path = dir / "step.csv";
    std::ofstream(path) << "node,value\n1,2\n2,2\n2,-1\n3,-1\n";
    const MeasureContext ctx(1.0);
    const auto f = read_grid_function(ctx, path, Extension::zero, Extension::zero);
    EXPECT_DOUBLE_EQ(f(1.5), 2.0);
    EXPECT_DOUBLE_EQ(f(2.5), -1.0);
    EXPECT_DOUBLE_EQ(f(4.0), 0.0);
    EXPECT_THROW(read_grid_function(ctx, dir / "missing.csv"), invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST(Points, Specs) {
    const auto lg = parse_points("log:1:100:3");
    ASSERT_EQ(lg.size(), 3u);
    EXPECT_DOUBLE_EQ(lg[1], 10.0);
    const auto li = parse_points("linear:0.5:1.5:5");
    EXPECT_DOUBLE_EQ(li[2], 1.0);
    EXPECT_EQ(parse_points("0.5, 2,3").size(), 3u);
    EXPECT_THROW(parse_points("log:0:1:3"), invalid_argument);
    EXPECT_THROW(parse_points("log:1:2:2.5"), invalid_argument);
    EXPECT_THROW(parse_points("a,b"), invalid_argument);
    EXPECT_EQ(parse_extension("log-linear"), Extension::log_linear);
    EXPECT_THROW(parse_extension("linear"), invalid_argument);
}

TEST(Config, ParsesEveryField) {
    const auto c = parse_run_config(R"({
        "lambda": [0.5, 2],
        "kind": "heat",
        "rho": 4,
        "time_grid": {"t_max": 32, "slots": 8, "refine": 2},
        "tolerances": {"kernel": 1e-9, "apply": 1e-8},
        "experiments": ["cz"],
        "seed": 7,
        "output_dir": "out",
        "workers": 2,
        "write_files": false
    })");
    EXPECT_EQ(c.lambdas, (std::vector<double>{0.5, 2.0}));
    EXPECT_EQ(c.kind, SemigroupKind::heat);
    EXPECT_EQ(c.rho, 4.0);
    ASSERT_TRUE(c.time_grid.has_value());
    EXPECT_EQ(c.time_grid->slots, 8);
    EXPECT_EQ(c.kernel_tolerance, 1e-9);
    EXPECT_EQ(c.apply_tolerance, 1e-8);
    EXPECT_EQ(c.experiments, std::vector<std::string>{"cz"});
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.output_dir, std::filesystem::path("out"));
    EXPECT_EQ(c.workers, 2);
    EXPECT_FALSE(c.write_files);

    const auto single = parse_run_config(R"({"lambda": 1.5})");
    EXPECT_EQ(single.lambdas, std::vector<double>{1.5});
}

TEST(Config, ErrorsNameTheField) {
    auto field_of = [](const std::string& text) {
        try {
            parse_run_config(text);
        } catch (const config_error& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of(R"({"lamda": 1})"), "lamda");
    EXPECT_EQ(field_of(R"({"lambda": -1})"), "lambda");
    EXPECT_EQ(field_of(R"({"lambda": [1, "x"]})"), "lambda[1]");
    EXPECT_EQ(field_of(R"({"rho": 2})"), "rho");
    EXPECT_EQ(field_of(R"({"kind": "wave"})"), "kind");
    EXPECT_EQ(field_of(R"({"time_grid": {"refine": 1}})"), "time_grid.refine");
    EXPECT_EQ(field_of(R"({"time_grid": {"size": 1}})"), "time_grid.size");
    EXPECT_EQ(field_of(R"({"tolerances": {"apply": 0}})"), "tolerances.apply");
    EXPECT_EQ(field_of(R"({"workers": 0})"), "workers");
    EXPECT_EQ(field_of("[1]"), "<document>");
    try {
        parse_run_config("{\n\"seed\": 1,\n oops\n}");
        FAIL() << "malformed document accepted";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Suite, SelectionAndUnknownNames) {
    EXPECT_EQ(select_experiments({}).size(), 15u);
    EXPECT_EQ(select_experiments({"all"}).size(), 15u);
    const auto two = select_experiments({"cz", "bmo"});
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0]->criterion, 13);
    try {
        select_experiments({"nope"});
        FAIL() << "unknown experiment accepted";
    } catch (const invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("sine-integral"), std::string::npos);
    }
}

TEST(Suite, WritesSummaryAndCsv) {
    const auto dir = scratch_dir("suite");
    RunConfig cfg;
    cfg.experiments = {"sine-integral"};
    cfg.output_dir = dir;
    const auto reports = run_suite(cfg);
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_TRUE(reports[0].passed) << reports[0].error;
    ASSERT_TRUE(std::filesystem::exists(dir / "summary.json"));
    ASSERT_TRUE(std::filesystem::exists(dir / "sine-integral.csv"));
    std::ifstream is(dir / "summary.json");
    const auto j = nlohmann::json::parse(is);
    EXPECT_EQ(j["experiments"][0]["name"], "sine-integral");
    EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(json_number(std::nan("")), "nan");
    std::filesystem::remove_all(dir);
}
