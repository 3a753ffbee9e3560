#include "platescreen/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "platescreen/error.hpp"
#include "platescreen/layout.hpp"
#include "platescreen/png_io.hpp"
#include "platescreen/raster.hpp"

namespace platescreen::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg,
                json extra = json::object()) {
    extra["error"] = msg;
    send_json(res, status, extra);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::optional<int> parse_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

json well_summary(const Project& p, const WellRecord& w) {
    json labels = json::object();
    json unlabeled = json::array();
    for (const auto& [f, classes] : p.schema.plan) {
        const auto lab = w.factors.label(f);
        labels[f] = lab;
        if (lab == kUnknownLabel) unlabeled.push_back(f);
    }
    return {{"id", w.well_id},
            {"factors",
             {{"plan", w.factors.plan},
              {"disturbance", w.factors.disturbance},
              {"plan_params", w.factors.plan_params}}},
            {"validity", w.validity},
            {"labels", labels},
            {"unlabeled", unlabeled},
            {"labeled", unlabeled.empty()}};
}

}  // namespace

struct Service::Impl {
    ServiceOptions opt;
    fs::path base;
    httplib::Server server;
    std::thread thread;
    std::mutex writer;
    std::shared_ptr<const Project> current;
    mutable std::mutex snap_mutex;  // guards the pointer swap only

    std::shared_ptr<const Project> snap() const {
        std::lock_guard lk(snap_mutex);
        return current;
    }
    void publish(Project p) {
        p.save(opt.project_path);
        auto next = std::make_shared<const Project>(std::move(p));
        std::lock_guard lk(snap_mutex);
        current = std::move(next);
    }

    void routes();
    void get_wells(const httplib::Request& req, httplib::Response& res);
    void get_frame(const httplib::Request& req, httplib::Response& res);
    void post_label(const httplib::Request& req, httplib::Response& res);
    void get_queue(const httplib::Request& req, httplib::Response& res);
    void post_train(const httplib::Request& req, httplib::Response& res);
};

void Service::Impl::routes() {
    server.Get("/api/wells", [this](const auto& q, auto& r) { get_wells(q, r); });
    server.Get(R"(/api/wells/([^/]+))", [this](const httplib::Request& q, httplib::Response& r) {
        const auto p = snap();
        const auto* w = p->find(q.matches[1].str());
        if (!w) return send_error(r, 404, "unknown well", {{"id", q.matches[1].str()}});
        send_json(r, 200, well_to_json(*w));
    });
    server.Get(R"(/api/wells/([^/]+)/frame/([^/]+))",
               [this](const auto& q, auto& r) { get_frame(q, r); });
    server.Post(R"(/api/wells/([^/]+)/label)", [this](const auto& q, auto& r) { post_label(q, r); });
    server.Get("/api/label-queue", [this](const auto& q, auto& r) { get_queue(q, r); });
    server.Post("/api/train", [this](const auto& q, auto& r) { post_train(q, r); });
    server.Get("/api/schema", [this](const httplib::Request&, httplib::Response& r) {
        const auto p = snap();
        send_json(r, 200, {{"plan", p->schema.plan}, {"disturbance", p->schema.disturbance}});
    });
    if (!opt.static_dir.empty()) server.set_mount_point("/", opt.static_dir.string());
}

void Service::Impl::get_wells(const httplib::Request& req, httplib::Response& res) {
    const auto p = snap();
    std::vector<std::pair<std::string, std::string>> terms;
    for (const auto& t : split(req.get_param_value("filter"), ',')) {
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            return send_error(res, 400, "filter terms must be factor=value", {{"term", t}});
        const std::string f = t.substr(0, eq);
        if (!p->schema.has(f)) return send_error(res, 400, "unknown factor", {{"factor", f}});
        terms.emplace_back(f, t.substr(eq + 1));
    }
    json out = json::array();
    for (const auto& w : p->wells) {
        bool ok = true;
        for (const auto& [f, v] : terms)
            if (w.factors.label(f) != v) ok = false;
        if (ok) out.push_back(well_summary(*p, w));
    }
    send_json(res, 200, out);
}

void Service::Impl::get_frame(const httplib::Request& req, httplib::Response& res) {
    const auto p = snap();
    const auto* w = p->find(req.matches[1].str());
    if (!w) return send_error(res, 404, "unknown well", {{"id", req.matches[1].str()}});
    const auto k = parse_int(req.matches[2].str());
    if (!k || *k < 0) return send_error(res, 404, "unknown frame", {{"frame", req.matches[2].str()}});
    const LayoutTemplate layout(pipeline::layout_of(*p));
    const fs::path file = base / w->image_ref / layout.format({w->well_id, *k, 0, 0});
    if (!fs::exists(file)) return send_error(res, 404, "unknown frame", {{"frame", *k}});

    const std::string overlay = req.has_param("overlay") ? req.get_param_value("overlay") : "none";
    if (overlay == "none") {
        const auto bytes = png::read_bytes(file);
        res.status = 200;
        res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        return;
    }
    if (overlay != "segmentation")
        return send_error(res, 400, "overlay must be none or segmentation");

    segment::HoughParams hp;
    if (req.has_param("radius")) {
        const auto parts = split(req.get_param_value("radius"), ':');
        const auto lo = parts.size() == 2 ? parse_int(parts[0]) : std::nullopt;
        const auto hi = parts.size() == 2 ? parse_int(parts[1]) : std::nullopt;
        if (!lo || !hi || *lo < 1 || *lo > *hi)
            return send_error(res, 400, "radius must be min:max with 1 <= min <= max");
        hp.r_min = *lo;
        hp.r_max = *hi;
    }
    if (req.has_param("threshold")) {
        try {
            hp.accum_threshold = std::stod(req.get_param_value("threshold"));
        } catch (const std::exception&) {
            return send_error(res, 400, "threshold must be a number");
        }
    }
    auto planes = png::read(file);
    GrayImage gray;
    if (planes.size() == 3) {
        gray = preprocess::to_gray(ImageStream(std::move(planes), 1, 1, 3)).at(0);
    } else {
        gray = std::move(planes.front());
    }
    const auto hits = segment::detect_eggs_hough(gray, hp);
    const auto bytes = png::encode(raster::overlay_circles(gray, hits));
    res.status = 200;
    res.set_header("X-Circle-Count", std::to_string(hits.size()));
    res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
}

void Service::Impl::post_label(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::exception&) {
        return send_error(res, 400, "body must be JSON");
    }
    if (!body.is_object() || !body.contains("endpoint") || !body.contains("class") ||
        !body["endpoint"].is_string() || !body["class"].is_string())
        return send_error(res, 400, "body needs string fields endpoint and class");
    const std::string id = req.matches[1].str();
    std::lock_guard lk(writer);
    Project p = *snap();
    if (!p.find(id)) return send_error(res, 404, "unknown well", {{"id", id}});
    try {
        p.set_label(id, body["endpoint"].get<std::string>(), body["class"].get<std::string>());
    } catch (const SchemaError& e) {
        return send_error(res, 422, e.what(),
                          {{"endpoint", body["endpoint"]}, {"class", body["class"]}});
    }
    const json rec = well_to_json(*p.find(id));
    publish(std::move(p));
    send_json(res, 200, rec);
}

void Service::Impl::get_queue(const httplib::Request& req, httplib::Response& res) {
    const auto p = snap();
    const std::string strategy =
        req.has_param("strategy") ? req.get_param_value("strategy") : "random";
    if (strategy != "random" && strategy != "sequential")
        return send_error(res, 400, "strategy must be random or sequential");
    std::uint64_t seed = 0;
    if (req.has_param("seed")) {
        try {
            seed = std::stoull(req.get_param_value("seed"));
        } catch (const std::exception&) {
            return send_error(res, 400, "seed must be an unsigned integer");
        }
    }
    const std::string endpoint = req.get_param_value("endpoint");
    if (!endpoint.empty() && !p->schema.is_plan(endpoint))
        return send_error(res, 400, "unknown endpoint", {{"endpoint", endpoint}});

    std::vector<std::string> ids;
    for (const auto& w : p->wells) ids.push_back(w.well_id);
    std::sort(ids.begin(), ids.end());
    // the order depends only on the seed and the id set, so repeated calls
    // walk the same sequence as labels arrive
    if (strategy == "random") {
        std::mt19937_64 rng(seed);
        std::shuffle(ids.begin(), ids.end(), rng);
    }
    for (const auto& id : ids) {
        const auto* w = p->find(id);
        bool unlabeled = false;
        if (!endpoint.empty()) {
            unlabeled = w->factors.label(endpoint) == kUnknownLabel;
        } else {
            for (const auto& [f, c] : p->schema.plan)
                if (w->factors.label(f) == kUnknownLabel) unlabeled = true;
        }
        if (unlabeled) return send_json(res, 200, {{"id", id}});
    }
    res.status = 204;
}

void Service::Impl::post_train(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::exception&) {
        return send_error(res, 400, "body must be JSON");
    }
    if (!body.is_object() || !body.contains("endpoint") || !body["endpoint"].is_string())
        return send_error(res, 400, "body needs a string field endpoint");
    pipeline::TrainOptions topt = opt.train;
    if (body.contains("features")) {
        if (!body["features"].is_array()) return send_error(res, 400, "features must be a list");
        topt.features = body["features"].get<std::vector<std::string>>();
    }
    const std::string endpoint = body["endpoint"].get<std::string>();
    std::lock_guard lk(writer);
    Project p = *snap();
    if (!p.schema.is_plan(endpoint))
        return send_error(res, 400, "unknown endpoint", {{"endpoint", endpoint}});
    try {
        const auto tr = pipeline::train_endpoint(p, endpoint, topt);
        publish(std::move(p));
        send_json(res, 200, tr.to_json());
    } catch (const InsufficientLabelsError& e) {
        send_error(res, 409, e.what(), {{"class_counts", e.counts()}});
    } catch (const Error& e) {
        send_error(res, 422, e.what());
    }
}

Service::Service(ServiceOptions opt) : impl_(std::make_unique<Impl>()) {
    impl_->opt = std::move(opt);
    impl_->base = impl_->opt.project_path.parent_path();
    impl_->current = std::make_shared<const Project>(Project::load(impl_->opt.project_path));
    impl_->routes();
}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::run(const std::string& host, int port) {
    if (!impl_->server.listen(host, port))
        throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::shared_ptr<const Project> Service::snapshot() const { return impl_->snap(); }

int resolve_port(std::optional<int> cli_port, int fallback) {
    if (cli_port) return *cli_port;
    if (const char* env = std::getenv("PLATESCREEN_PORT")) {
        if (const auto v = parse_int(env); v && *v > 0 && *v < 65536) return *v;
    }
    return fallback;
}

}  // namespace platescreen::service
