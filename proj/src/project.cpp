#include "platescreen/project.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <set>

#include <unistd.h>

#include "platescreen/error.hpp"

namespace platescreen {

using nlohmann::json;

std::string tool_version() { return "platescreen 1.0.0"; }

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const std::vector<std::string>& FactorSchema::classes(const std::string& f) const {
    static const std::vector<std::string> none;
    if (auto it = plan.find(f); it != plan.end()) return it->second;
    if (auto it = disturbance.find(f); it != disturbance.end()) return it->second;
    return none;
}

bool FactorSchema::allows(const std::string& factor, const std::string& label) const {
    if (!has(factor)) return false;
    if (label == kUnknownLabel) return true;
    const auto& c = classes(factor);
    return std::find(c.begin(), c.end(), label) != c.end();
}

std::string FactorAssignment::label(const std::string& factor) const {
    if (auto it = plan.find(factor); it != plan.end()) return it->second;
    if (auto it = disturbance.find(factor); it != disturbance.end()) return it->second;
    return kUnknownLabel;
}

WellRecord* Project::find(const std::string& well_id) {
    for (auto& w : wells)
        if (w.well_id == well_id) return &w;
    return nullptr;
}

const WellRecord* Project::find(const std::string& well_id) const {
    return const_cast<Project*>(this)->find(well_id);
}

void Project::validate() const {
    std::set<std::string> seen;
    for (const auto& w : wells) {
        if (!seen.insert(w.well_id).second) throw SchemaError("duplicate well id " + w.well_id);
        for (const auto& [f, l] : w.factors.plan)
            if (!schema.empty() && !(schema.is_plan(f) && schema.allows(f, l)))
                throw SchemaError(w.well_id + ": plan factor " + f + "=" + l + " not declared");
        for (const auto& [f, l] : w.factors.disturbance)
            if (!schema.empty() && !(schema.is_disturbance(f) && schema.allows(f, l)))
                throw SchemaError(w.well_id + ": disturbance factor " + f + "=" + l +
                                  " not declared");
        for (const auto& [endpoint, p] : w.predictions)
            if (!classifiers.count(endpoint))
                throw SchemaError(w.well_id + ": prediction for untrained endpoint " + endpoint);
    }
}

void Project::set_label(const std::string& well_id, const std::string& factor,
                        const std::string& label) {
    WellRecord* w = find(well_id);
    if (!w) throw SchemaError("unknown well " + well_id);
    if (!schema.is_plan(factor)) throw SchemaError("unknown endpoint " + factor);
    if (!schema.allows(factor, label))
        throw SchemaError("class '" + label + "' not declared for " + factor);
    w->factors.plan[factor] = label;
}

namespace {

json features_to_json(const FeatureVector& fv) {
    json values = json::array();
    for (double v : fv.values) values.push_back(is_gap(v) ? json(nullptr) : json(v));
    return {{"names", fv.names}, {"values", values}};
}

FeatureVector features_from_json(const json& j) {
    FeatureVector fv;
    fv.names = j.at("names").get<std::vector<std::string>>();
    for (const auto& v : j.at("values")) fv.values.push_back(v.is_null() ? kGap : v.get<double>());
    if (fv.names.size() != fv.values.size())
        throw SchemaError("feature names and values differ in length");
    return fv;
}

json provenance_summary(const Provenance& p, std::size_t n_wells) {
    return {{"tool_version", p.tool_version},
            {"created", p.created},
            {"parameters", p.parameters},
            {"n_wells", n_wells}};
}

}  // namespace

json well_to_json(const WellRecord& w) {
    json jw;
    jw["well_id"] = w.well_id;
    jw["image_ref"] = w.image_ref;
    jw["factors"] = {{"plan", w.factors.plan},
                     {"disturbance", w.factors.disturbance},
                     {"plan_params", w.factors.plan_params},
                     {"disturbance_params", w.factors.disturbance_params}};
    if (w.features) jw["features"] = features_to_json(*w.features);
    json preds = json::object();
    for (const auto& [e, p] : w.predictions) preds[e] = {{"label", p.label}, {"score", p.score}};
    jw["predictions"] = preds;
    jw["validity"] = w.validity;
    return jw;
}

json Project::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["factor_schema"] = {{"plan", schema.plan}, {"disturbance", schema.disturbance}};
    json ws = json::array();
    for (const auto& w : wells) ws.push_back(well_to_json(w));
    j["wells"] = ws;
    json cls = json::object();
    for (const auto& [e, c] : classifiers) cls[e] = {{"version", c.version}, {"model", c.model}};
    j["classifiers"] = cls;
    j["provenance"] = {{"tool_version", provenance.tool_version},
                       {"created", provenance.created},
                       {"parameters", provenance.parameters},
                       {"parents", provenance.parents}};
    return j;
}

Project Project::from_json(const json& j) {
    if (!j.contains("schema_version")) throw SchemaError("project lacks schema_version");
    const int v = j.at("schema_version").get<int>();
    if (v != kSchemaVersion)
        throw SchemaError("unsupported project schema_version " + std::to_string(v));
    Project p;
    try {
        if (j.contains("factor_schema")) {
            const auto& fs = j.at("factor_schema");
            p.schema.plan = fs.value("plan", json::object())
                                .get<std::map<std::string, std::vector<std::string>>>();
            p.schema.disturbance = fs.value("disturbance", json::object())
                                       .get<std::map<std::string, std::vector<std::string>>>();
        }
        const json wells = j.value("wells", json::array());
        for (const auto& jw : wells) {
            WellRecord w;
            w.well_id = jw.at("well_id").get<std::string>();
            w.image_ref = jw.value("image_ref", "");
            if (jw.contains("factors")) {
                const auto& f = jw.at("factors");
                w.factors.plan =
                    f.value("plan", json::object()).get<std::map<std::string, std::string>>();
                w.factors.disturbance = f.value("disturbance", json::object())
                                            .get<std::map<std::string, std::string>>();
                w.factors.plan_params =
                    f.value("plan_params", json::object()).get<std::map<std::string, double>>();
                w.factors.disturbance_params = f.value("disturbance_params", json::object())
                                                   .get<std::map<std::string, double>>();
            }
            if (jw.contains("features")) w.features = features_from_json(jw.at("features"));
            const json preds = jw.value("predictions", json::object());
            for (const auto& [e, jp] : preds.items())
                w.predictions[e] = {jp.at("label").get<std::string>(), jp.at("score").get<double>()};
            w.validity = jw.value("validity", std::vector<std::string>{});
            p.wells.push_back(std::move(w));
        }
        const json cls = j.value("classifiers", json::object());
        for (const auto& [e, jc] : cls.items())
            p.classifiers[e] = {jc.value("version", 1), jc.at("model")};
        if (j.contains("provenance")) {
            const auto& jp = j.at("provenance");
            p.provenance.tool_version = jp.value("tool_version", "");
            p.provenance.created = jp.value("created", "");
            p.provenance.parameters = jp.value("parameters", json::object());
            p.provenance.parents = jp.value("parents", json::array());
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed project: ") + e.what());
    }
    p.validate();
    return p;
}

Project Project::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open project " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

void Project::save(const std::filesystem::path& path) const {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp.string());
        f << to_json().dump(1) << '\n';
        f.flush();
        if (!f) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
    }
}

Project merge_projects(const Project& a, const Project& b) {
    if (!a.schema.empty() && !b.schema.empty() && !(a.schema == b.schema))
        throw SchemaError("factor declarations differ between projects");

    std::set<std::string> ids;
    for (const auto& w : a.wells) ids.insert(w.well_id);
    std::vector<std::string> clash;
    for (const auto& w : b.wells)
        if (ids.count(w.well_id)) clash.push_back(w.well_id);
    if (!clash.empty()) {
        std::string msg = "well ids present in both projects:";
        for (const auto& id : clash) msg += " " + id;
        throw MergeConflictError(msg, clash);
    }

    Project out;
    out.schema = a.schema.empty() ? b.schema : a.schema;
    out.wells = a.wells;
    out.wells.insert(out.wells.end(), b.wells.begin(), b.wells.end());
    out.classifiers = b.classifiers;
    for (const auto& [e, c] : a.classifiers) out.classifiers[e] = c;
    out.provenance.tool_version = tool_version();
    out.provenance.created = std::max(a.provenance.created, b.provenance.created);
    out.provenance.parameters =
        a.provenance.parameters.empty() ? b.provenance.parameters : a.provenance.parameters;
    out.provenance.parents = json::array({provenance_summary(a.provenance, a.wells.size()),
                                          provenance_summary(b.provenance, b.wells.size())});
    return out;
}

}  // namespace platescreen
