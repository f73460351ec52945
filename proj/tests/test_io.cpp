#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mfrac/io.hpp"
#include "mfrac/mrm.hpp"

using namespace mfrac;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "mfrac_io_test";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MFRAC_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const auto cfg = parse_config_text(
        R"({"process":"cascade","family":"lognormal","lambda2":0.1,"n":10,"chi":0.5,"q":[2]})");
    CHECK(cfg.exp.process == Process::Cascade);
    CHECK(cfg.exp.n == 10);
    CHECK(cfg.exp.T == 1.0);
    CHECK(cfg.exp.R == 200);
    CHECK(cfg.exp.oversample == 3);
    CHECK(cfg.exp.depth_extra == 12);
    CHECK(MixedGrid::make(cfg.exp.T, cfg.exp.n, cfg.exp.chi).L == 32);
}

TEST_CASE("config rejection names the violated inequality") {
    try {
        parse_config_text(R"({"process":"cascade","family":"lognormal","lambda2":0.1,
                              "n":10,"chi":0.5,"q":[3],"theorem":"cascade-clt"})");
        FAIL("expected rejection");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("q_chi") != std::string::npos);
        CHECK(msg.find("5.477") != std::string::npos);
    }
}

TEST_CASE("config parse errors") {
    CHECK_THROWS_AS(parse_config_text(R"({"process":"cascade","n":4,"q":[1]})"), ParseError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ParseError);
    CHECK_THROWS_AS(parse_config_text(R"({"process":"waves","family":"lognormal","n":4,"q":1})"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"process":"mrm","family":"lognormal","lambda2":0.1,"n":6,"q":[1.5],"experiment":"rate"})"),
        ValidationError); // rate needs n_list
}

TEST_CASE("realization CSV round-trips exactly") {
    const auto dir = scratch_dir();
    const auto grid = MixedGrid::make(1.0, 6, 0.5);
    const auto mrm = sample_mrm(ScalingModel::log_normal(0.3), grid, 3, 99);
    const auto path = (dir / "mrm.csv").string();
    write_realization_csv(path, mrm.data);
    const auto back = read_realization_csv(path);
    CHECK(back.grid.L == grid.L);
    CHECK(back.level == 6);
    CHECK(back.kind == SeriesKind::Measure);
    REQUIRE(back.values.size() == mrm.data.values.size());
    for (std::size_t i = 0; i < back.values.size(); ++i)
        CHECK(back.values[i] == mrm.data.values[i]);

    const auto t0 = structure_function(mrm.data, {1.0, 2.0}, {5, 6});
    const auto t1 = structure_function(back, {1.0, 2.0}, {5, 6});
    for (int m : {5, 6})
        for (double q : {1.0, 2.0})
            CHECK(std::abs(t0.at(m, q) - t1.at(m, q)) <= 1e-12 * t0.at(m, q));
}

TEST_CASE("series ingestion shapes") {
    const auto dir = scratch_dir();
    auto make_series = [&](int count, bool levels) {
        std::string text = "x\n";
        for (int i = 0; i < count; ++i)
            text += std::to_string(0.1 * i) + "\n";
        const auto p = dir / (levels ? "lv.csv" : "inc.csv");
        write_file(p, text);
        return p.string();
    };
    const auto inc = ingest_series(make_series(1024, false), SeriesFormat::Increments, 1);
    CHECK(inc.level == 10);
    CHECK(inc.grid.L == 1);

    const auto lv = ingest_series(make_series(1025, true), SeriesFormat::Levels, 1);
    CHECK(lv.level == 10);
    CHECK(lv.values.size() == 1024);

    const auto multi = ingest_series(make_series(32 * 64, false), SeriesFormat::Increments, 32);
    CHECK(multi.grid.L == 32);
    CHECK(multi.level == 6);

    CHECK_THROWS_AS(ingest_series(make_series(1000, false), SeriesFormat::Increments, 1),
                    ShapeError);
    const auto badp = dir / "bad.csv";
    write_file(badp, "x\n1.0\nabc\n");
    CHECK_THROWS_AS(ingest_series(badp.string(), SeriesFormat::Increments, 1), NonNumeric);
    const auto nohdr = dir / "nohdr.csv";
    write_file(nohdr, "y\n1.0\n2.0\n");
    CHECK_THROWS_AS(ingest_series(nohdr.string(), SeriesFormat::Increments, 1), ShapeError);
}

TEST_CASE("cli: simulate is deterministic, estimate closes the loop") {
    const auto dir = scratch_dir();
    const auto cfg = dir / "casc.json";
    write_file(cfg, R"({"process":"cascade","family":"lognormal","lambda2":0.1,
                        "n":8,"chi":0.5,"q":[2],"depth_extra":6,"seed":7})");
    const auto out1 = dir / "r1.csv";
    const auto out2 = dir / "r2.csv";
    REQUIRE(run_cli("--out " + out1.string() + " simulate -c " + cfg.string()) == 0);
    REQUIRE(run_cli("--out " + out2.string() + " simulate -c " + cfg.string()) == 0);
    CHECK(read_file(out1) == read_file(out2));

    const auto est = dir / "est.json";
    REQUIRE(run_cli("--out " + est.string() + " estimate --in " + out1.string() +
                    " --q 1,2 --method ratio") == 0);
    const auto j = nlohmann::json::parse(read_file(est));
    CHECK(j["zeta_tilde"][0].get<double>() == 1.0); // mass conservation, exact
    CHECK(j["zeta_tilde"][1].get<double>() > 1.5);
    CHECK(j["stderr"].size() == 2);
}

TEST_CASE("cli: verify emits a populated report and report renders it") {
    const auto dir = scratch_dir();
    const auto cfg = dir / "verify.json";
    write_file(cfg, R"({"process":"mrm","family":"lognormal","lambda2":0.05,"n":6,"chi":0.5,
                        "q":[1.5],"R":60,"seed":3,"experiment":"clt"})");
    const auto out = dir / "report.json";
    REQUIRE(run_cli("--out " + out.string() + " verify -c " + cfg.string()) == 0);
    const auto j = nlohmann::json::parse(read_file(out));
    CHECK(j["per_q"][0]["zeta_tilde"].contains("ks_pvalue"));
    CHECK(j["per_q"][0].contains("rate_exponent"));
    CHECK(j["samples_tilde"][0].size() == 60);
    REQUIRE(run_cli("report --in " + out.string() + " --data-dir " + (dir / "dat").string()) ==
            0);
    CHECK(fs::exists(dir / "dat" / "summary.dat"));
}

TEST_CASE("cli: exit codes follow the contract") {
    const auto dir = scratch_dir();
    // usage error
    CHECK(run_cli("frobnicate") == 1);
    // validation error (2q >= q_chi)
    const auto bad = dir / "bad.json";
    write_file(bad, R"({"process":"cascade","family":"lognormal","lambda2":0.1,
                        "n":8,"chi":0.5,"q":[3],"experiment":"clt"})");
    CHECK(run_cli("--out /dev/null verify -c " + bad.string()) == 2);
    // runtime error (missing input file)
    CHECK(run_cli("estimate --in " + (dir / "missing.csv").string()) == 3);
}
