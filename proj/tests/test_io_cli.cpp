#include "fdlab/demo.hpp"
#include "fdlab/error.hpp"
#include "fdlab/io.hpp"
#include "fdlab/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fdlab;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "fdlab_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CliRun {
    int status;
    std::string err;
};

CliRun run_cli(const std::string& args, const fs::path& dir)
{
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + FDLAB_CLI + "\" " + args + " 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WEXITSTATUS(raw), read_file(err)};
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

nlohmann::json fde_config(double m)
{
    return {{"name", "fde-test"},
            {"experiment", "fde"},
            {"profile", {{"kind", "euclidean"}, {"n", 3}}},
            {"parameters",
             {{"m", m},
              {"dt", 0.05},
              {"t_end", 0.5},
              {"datum", {{"kind", "constant"}, {"value", 2.5}}},
              {"R", 1.5},
              {"cells", 30},
              {"boundary", 2.5},
              {"format", "both"}}},
            {"output_dir", "out"}};
}

}  // namespace

TEST_CASE("CSV round trip is byte exact")
{
    const CsvTable t{{"r", "u"}, {{0.0, 1.0 / 3.0}, {1e-300, -2.5e17}, {0.1, 6.02214076e23}}};
    const std::string text = format_csv(t);
    CHECK(format_csv(parse_csv(text)) == text);
    CHECK(parse_csv(text).rows[0][1] == 1.0 / 3.0);
    CHECK_THROWS(parse_csv("a,b\n1,2\n3\n"));
    CHECK_THROWS(parse_csv("a,b\n1,zz\n"));
}

TEST_CASE("binary trajectory round trip")
{
    const GridPtr g = share(RadialGrid::uniform(1.0, 10));
    SpaceTimeField f{g, {0.0, 0.25}, {}};
    for (double t : f.times) {
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = t + (*g)[i] / 3.0;
        f.states.emplace_back(g, v);
    }
    const std::string bytes = encode_trajectory(f);
    CHECK(bytes.substr(0, 8) == "FDLTRAJ1");
    const SpaceTimeField back = decode_trajectory(bytes);
    CHECK(back.times == f.times);
    REQUIRE(back.grid->size() == g->size());
    for (std::size_t k = 0; k < f.times.size(); ++k)
        CHECK(std::ranges::equal(back.states[k].values(), f.states[k].values()));
    CHECK(encode_trajectory(back) == bytes);
    CHECK_THROWS(decode_trajectory(bytes.substr(0, bytes.size() - 3)));
    CHECK_THROWS(decode_trajectory("NOTATRAJ" + bytes.substr(8)));
}

TEST_CASE("sha256 of a known string")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("scenario parsing")
{
    const Scenario s = parse_scenario(fde_config(0.5).dump(), "/tmp/base");
    CHECK(s.experiment == "fde");
    CHECK(s.output_dir == fs::path("/tmp/base/out"));

    nlohmann::json bad = fde_config(0.5);
    bad["profile"]["q"] = 3;
    CHECK_THROWS_AS(parse_scenario(bad.dump()), ValidationError);
    bad = fde_config(0.5);
    bad["experiment"] = "nope";
    CHECK_THROWS_AS(parse_scenario(bad.dump()), ValidationError);
    bad = fde_config(0.5);
    bad["parameters"]["unknown_key"] = 1;
    CHECK_THROWS_AS(run_scenario(parse_scenario(bad.dump())), ValidationError);
    CHECK_THROWS_AS(parse_scenario("{not json"), ValidationError);
}

TEST_CASE("cli: classify on euclidean space")
{
    const fs::path dir = scratch("classify");
    const CliRun r =
        run_cli("classify --config \"" FDLAB_SCENARIOS "/classify_euclidean.json\" --out \"" + (dir / "a").string() + "\"",
                dir);
    REQUIRE(r.status == 0);
    const auto report = nlohmann::json::parse(read_file(dir / "a" / "completeness.json"));
    CHECK(report["verdict"] == "complete");

    const auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest.json"));
    CHECK(manifest["scenario"]["experiment"] == "classify");
    for (const auto& f : manifest["files"]) {
        const std::string bytes = read_file(dir / "a" / f["name"].get<std::string>());
        CHECK(f["sha256"] == sha256_hex(bytes));
        CHECK(f["bytes"] == bytes.size());
        if (fs::path(f["name"].get<std::string>()).extension() == ".csv")
            CHECK(format_csv(parse_csv(bytes)) == bytes);
    }

    // a rerun reproduces every checksum
    REQUIRE(run_cli("run --config \"" FDLAB_SCENARIOS "/classify_euclidean.json\" --out \"" + (dir / "b").string() + "\"",
                    dir)
                .status == 0);
    CHECK(read_file(dir / "a" / "manifest.json") == read_file(dir / "b" / "manifest.json"));
}

TEST_CASE("cli: constant data with matching boundary stay constant")
{
    const fs::path dir = scratch("fde_constant");
    const fs::path cfg = write_config(dir, fde_config(0.5));
    const CliRun r = run_cli("fde --config \"" + cfg.string() + "\"", dir);
    REQUIRE(r.status == 0);
    const CsvTable t = parse_csv(read_file(dir / "out" / "trajectory.csv"));
    REQUIRE(t.header == std::vector<std::string>{"t", "r", "u"});
    CHECK(format_csv(t) == read_file(dir / "out" / "trajectory.csv"));
    CHECK(t.rows.size() == 11u * 31u);
    for (const auto& row : t.rows)
        CHECK(row[2] == Approx(2.5).epsilon(1e-12));
    const SpaceTimeField bin = decode_trajectory(read_file(dir / "out" / "trajectory.bin"));
    CHECK(bin.times.size() == 11);
    CHECK(bin.states.back().max() == Approx(2.5).epsilon(1e-12));
}

TEST_CASE("cli: malformed config exits 2 naming the key and its range")
{
    const fs::path dir = scratch("bad_m");
    const fs::path cfg = write_config(dir, fde_config(1.2));
    const CliRun r = run_cli("fde --config \"" + cfg.string() + "\"", dir);
    CHECK(r.status == 2);
    CHECK(r.err.find("parameters.m:") != std::string::npos);
    CHECK(r.err.find("(0,1)") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("cli: other exit codes")
{
    const fs::path dir = scratch("codes");
    CHECK(run_cli("fde --config \"" + (dir / "missing.json").string() + "\"", dir).status == 1);
    // subcommand and experiment disagree
    const fs::path cfg = write_config(dir, fde_config(0.5));
    const CliRun r = run_cli("classify --config \"" + cfg.string() + "\"", dir);
    CHECK(r.status == 2);
    CHECK(r.err.find("experiment") != std::string::npos);
    CHECK(run_cli("", dir).status == 2);
}

TEST_CASE("fde scenario picks a mobility floor when data touch zero")
{
    const fs::path dir = scratch("delta_default");
    nlohmann::json j = fde_config(0.5);
    j["parameters"]["datum"] = {{"kind", "tent"}, {"height", 2.0}, {"radius", 1.0}};
    j["parameters"]["boundary"] = 0.0;
    j["parameters"]["format"] = "csv";
    run_scenario(parse_scenario(j.dump(), dir));
    const auto report = nlohmann::json::parse(read_file(dir / "out" / "fde.json"));
    CHECK(report["delta"].get<double>() == Approx(2e-8));

    j["parameters"]["delta"] = 0.0;
    CHECK_THROWS_AS(parse_scenario(j.dump(), dir), ValidationError);
}

TEST_CASE("zero boundary keeps zero data at zero")
{
    DemoOptions opt;
    opt.cell_size = 0.1;
    opt.dt = 0.05;
    opt.boundary = 0.0;
    const DemoResult res = demo_nonuniqueness(Profile::euclidean(3), Profile::power_exponential(3, 3.0), 0.5,
                                              {2.0, 4.0}, 0.5, opt);
    for (const DemoRow& row : res.rows) {
        CHECK(row.u_complete == 0.0);
        CHECK(row.u_incomplete == 0.0);
    }
}
