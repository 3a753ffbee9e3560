#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <sys/wait.h>

#include <json.hpp>

#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const char* exe = std::getenv("PLATESCREEN_CLI");
    REQUIRE(exe);
    const std::string cmd = std::string(exe) + " " + args + " 2>&1";
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

}  // namespace

TEST_CASE("info and usage errors") {
    CHECK(run("info").code == 0);
    CHECK(run("no-such-command").code != 0);
    CHECK(run("assay acqtime --nw -3 --nz 1 --nl 1").code != 0);
}

TEST_CASE("acquisition time") {
    const auto r = run("assay acqtime --nw 96 --nz 3 --nl 2 --tm1 1 --tm2 0.5 --tm3 0.1");
    REQUIRE(r.code == 0);
    // 96*3*2*1 + 95*2*0.5 + 1*0.1
    CHECK(json::parse(r.out)["seconds"].get<double>() == doctest::Approx(671.1));
}

TEST_CASE("assay metrics from csv") {
    testutil::TempDir dir("cli_metrics");
    std::ofstream(dir.path / "m.csv") << "group,value\npos,95\npos,100\npos,105\nneg,5\nneg,10\nneg,15\n";
    const auto r = run("assay metrics --csv " + (dir.path / "m.csv").string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("0.666") != std::string::npos);
}

TEST_CASE("synthetic plate through segmentation and features") {
    testutil::TempDir dir("cli_flow");
    const auto d = dir.path.string();
    REQUIRE(run("synth plate --out " + d + " --seed 4 --frames 6 --labels").code == 0);
    const auto proj = (dir.path / "project.json").string();
    REQUIRE(fs::exists(proj));
    REQUIRE(run("segment --project " + proj).code == 0);
    REQUIRE(run("features --project " + proj).code == 0);
    json j;
    std::ifstream(proj) >> j;
    CHECK(j["wells"].size() == 96);
    CHECK(j["wells"][0].contains("features"));

    const auto bad = run("train --project " + proj + " --endpoint nonsense");
    CHECK(bad.code != 0);
    CHECK(bad.out.find("error:") != std::string::npos);
}

TEST_CASE("missing project is reported") {
    const auto r = run("segment --project /nonexistent/p.json");
    CHECK(r.code == 1);
    CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("scripted sequence through pmr") {
    testutil::TempDir dir("cli_pmr");
    const auto d = dir.path.string();
    REQUIRE(run("synth sequence --out " + d + " --well W --frames 1000 --eggs 4 --drift 1 --respond")
                .code == 0);
    json truth;
    std::ifstream(dir.path / "W_truth.json") >> truth;
    CHECK(truth["eggs"].size() == 4);
    CHECK(truth["events"].size() == 8);
    REQUIRE(run("pmr --dir " + d + " --well W --out " + d + "/pmr").code == 0);
    json s;
    std::ifstream(dir.path / "pmr" / "summary.json") >> s;
    CHECK(s["eggs"] == 4);
    CHECK(s["coiling_events"] == 4);
    CHECK(s["swimming_events"] == 4);
    CHECK(fs::exists(dir.path / "pmr" / "heatmap.csv"));
}
