#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "platescreen/error.hpp"
#include "platescreen/pipeline.hpp"
#include "platescreen/service.hpp"
#include "test_util.hpp"

// after Eigen: httplib pulls in system headers whose macros clash with it
#include <httplib.h>

using namespace platescreen;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Fixture {
    testutil::TempDir dir{"service"};
    fs::path project;
    std::unique_ptr<service::Service> svc;
    std::unique_ptr<httplib::Client> cli;

    explicit Fixture(bool labels = false) {
        pipeline::PlateScript s;
        s.rows = 2;
        s.cols = 3;
        s.n_frames = 6;
        s.doses = {0.5, 2.0};
        Project p = pipeline::synth_plate(s, dir.path, labels);
        project = dir.path / "project.json";
        p.save(project);
        fs::create_directories(dir.path / "ui");
        std::ofstream(dir.path / "ui" / "index.html") << "<html>ui</html>";
        service::ServiceOptions o;
        o.project_path = project;
        o.static_dir = dir.path / "ui";
        svc = std::make_unique<service::Service>(o);
        const int port = svc->start("127.0.0.1", 0);
        cli = std::make_unique<httplib::Client>("127.0.0.1", port);
    }
    ~Fixture() { svc->stop(); }

    json get_json(const std::string& path, int expect = 200) {
        auto r = cli->Get(path);
        REQUIRE(r);
        CHECK(r->status == expect);
        return r->body.empty() ? json() : json::parse(r->body);
    }
    json post_json(const std::string& path, const json& body, int expect) {
        auto r = cli->Post(path, body.dump(), "application/json");
        REQUIRE(r);
        CHECK(r->status == expect);
        return json::parse(r->body);
    }
};

}  // namespace

TEST_CASE("well listing and filters") {
    Fixture f;
    const auto all = f.get_json("/api/wells");
    REQUIRE(all.size() == 6);
    CHECK(all[0]["id"] == "P1-A01");
    CHECK(all[0]["labeled"] == false);
    CHECK(all[0]["unlabeled"].size() == 3);
    CHECK(f.get_json("/api/wells?filter=coagulation=unknown").size() == 6);
    CHECK(f.get_json("/api/wells?filter=coagulation=yes").empty());
    CHECK(f.get_json("/api/wells?filter=colour=red", 400)["factor"] == "colour");
    CHECK(f.get_json("/api/wells?filter=oops", 400).contains("error"));

    CHECK(f.get_json("/api/wells/P1-A02")["well_id"] == "P1-A02");
    CHECK(f.get_json("/api/wells/Z9", 404)["id"] == "Z9");
    CHECK(f.get_json("/api/schema")["plan"].contains("coagulation"));
}

TEST_CASE("frames with and without overlay") {
    Fixture f;
    auto r = f.cli->Get("/api/wells/P1-A01/frame/0");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "image/png");
    CHECK(r->body.substr(1, 3) == "PNG");

    r = f.cli->Get("/api/wells/P1-A01/frame/0?overlay=segmentation");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->has_header("X-Circle-Count"));

    CHECK(f.cli->Get("/api/wells/P1-A01/frame/99")->status == 404);
    CHECK(f.cli->Get("/api/wells/P1-A01/frame/x")->status == 404);
    CHECK(f.cli->Get("/api/wells/P1-A01/frame/0?overlay=zebra")->status == 400);
    CHECK(f.cli->Get("/api/wells/P1-A01/frame/0?overlay=segmentation&radius=9:3")->status ==
          400);
}

TEST_CASE("labels persist and update the queue") {
    Fixture f;
    const auto q1 = f.get_json("/api/label-queue?strategy=sequential&endpoint=coagulation");
    CHECK(q1["id"] == "P1-A01");
    const auto rec =
        f.post_json("/api/wells/P1-A01/label", {{"endpoint", "coagulation"}, {"class", "yes"}}, 200);
    CHECK(rec["factors"]["plan"]["coagulation"] == "yes");
    CHECK(Project::load(f.project).find("P1-A01")->factors.label("coagulation") == "yes");
    CHECK(f.svc->snapshot()->find("P1-A01")->factors.label("coagulation") == "yes");
    CHECK(f.get_json("/api/label-queue?strategy=sequential&endpoint=coagulation")["id"] ==
          "P1-A02");

    f.post_json("/api/wells/P1-A01/label", {{"endpoint", "coagulation"}, {"class", "blue"}}, 422);
    f.post_json("/api/wells/P1-A01/label", {{"endpoint", "colour"}, {"class", "yes"}}, 422);
    f.post_json("/api/wells/Q1/label", {{"endpoint", "coagulation"}, {"class", "yes"}}, 404);
    f.post_json("/api/wells/P1-A01/label", {{"endpoint", 3}}, 400);
    auto bad = f.cli->Post("/api/wells/P1-A01/label", "{nope", "application/json");
    CHECK(bad->status == 400);

    // random order is reproducible for a seed
    const auto a = f.get_json("/api/label-queue?strategy=random&seed=5");
    const auto b = f.get_json("/api/label-queue?strategy=random&seed=5");
    CHECK(a == b);
    f.get_json("/api/label-queue?strategy=shuffle", 400);
    f.get_json("/api/label-queue?endpoint=colour", 400);
}

TEST_CASE("queue drains to 204") {
    Fixture f;
    for (int i = 0; i < 6; ++i) {
        const auto q = f.get_json("/api/label-queue?strategy=sequential&endpoint=heartbeat");
        f.post_json("/api/wells/" + q["id"].get<std::string>() + "/label",
                    {{"endpoint", "heartbeat"}, {"class", "yes"}}, 200);
    }
    auto r = f.cli->Get("/api/label-queue?endpoint=heartbeat");
    CHECK(r->status == 204);
}

TEST_CASE("training reports missing labels") {
    Fixture f;
    const auto e = f.post_json("/api/train", {{"endpoint", "coagulation"}}, 409);
    CHECK(e.contains("class_counts"));
    f.post_json("/api/train", {{"endpoint", "colour"}}, 400);
    f.post_json("/api/train", {{"nothing", 1}}, 400);
}

TEST_CASE("static bundle is served") {
    Fixture f;
    auto r = f.cli->Get("/index.html");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body == "<html>ui</html>");
}

TEST_CASE("port resolution") {
    ::unsetenv("PLATESCREEN_PORT");
    CHECK(service::resolve_port(std::nullopt) == 8080);
    ::setenv("PLATESCREEN_PORT", "9123", 1);
    CHECK(service::resolve_port(std::nullopt) == 9123);
    CHECK(service::resolve_port(7000) == 7000);
    ::setenv("PLATESCREEN_PORT", "junk", 1);
    CHECK(service::resolve_port(std::nullopt, 81) == 81);
    ::unsetenv("PLATESCREEN_PORT");
}

TEST_CASE("missing project fails at construction") {
    service::ServiceOptions o;
    o.project_path = "/nonexistent/project.json";
    CHECK_THROWS_AS(service::Service{o}, IoError);
}
