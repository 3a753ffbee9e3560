#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "platescreen/feature_vector.hpp"

namespace platescreen {

inline constexpr int kSchemaVersion = 1;
inline const std::string kUnknownLabel = "unknown";

/// Declared class sets of plan factors (Y) and disturbance factors (Z).
struct FactorSchema {
    std::map<std::string, std::vector<std::string>> plan;
    std::map<std::string, std::vector<std::string>> disturbance;

    bool empty() const noexcept { return plan.empty() && disturbance.empty(); }
    bool is_plan(const std::string& f) const { return plan.count(f) > 0; }
    bool is_disturbance(const std::string& f) const { return disturbance.count(f) > 0; }
    bool has(const std::string& f) const { return is_plan(f) || is_disturbance(f); }
    // Class set of a factor; empty when undeclared.
    const std::vector<std::string>& classes(const std::string& f) const;
    bool allows(const std::string& factor, const std::string& label) const;

    friend bool operator==(const FactorSchema&, const FactorSchema&) = default;
};

struct FactorAssignment {
    std::map<std::string, std::string> plan;
    std::map<std::string, std::string> disturbance;
    std::map<std::string, double> plan_params;
    std::map<std::string, double> disturbance_params;

    // Label of a plan or disturbance factor; "unknown" when unset.
    std::string label(const std::string& factor) const;

    friend bool operator==(const FactorAssignment&, const FactorAssignment&) = default;
};

struct Prediction {
    std::string label;
    double score = 0.0;
    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct WellRecord {
    std::string well_id;
    std::string image_ref;  // relative to the project file's directory
    FactorAssignment factors;
    std::optional<FeatureVector> features;
    std::map<std::string, Prediction> predictions;
    std::vector<std::string> validity;  // identifiers of failed checks

    bool valid() const noexcept { return validity.empty(); }
};

struct ClassifierRecord {
    int version = 1;
    nlohmann::json model;  // serialized model, see mlselect
};

struct Provenance {
    std::string tool_version;
    std::string created;  // only timestamp in the project; excluded from report bodies
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json parents = nlohmann::json::array();
};

class Project {
public:
    FactorSchema schema;
    std::vector<WellRecord> wells;
    std::map<std::string, ClassifierRecord> classifiers;
    Provenance provenance;

    WellRecord* find(const std::string& well_id);
    const WellRecord* find(const std::string& well_id) const;

    // Throws SchemaError on duplicate ids, labels outside the declared class
    // sets, or predictions without a trained classifier.
    void validate() const;

    // Sets a plan-factor label; throws SchemaError on unknown factor/class.
    void set_label(const std::string& well_id, const std::string& factor,
                   const std::string& label);

    nlohmann::json to_json() const;
    static Project from_json(const nlohmann::json& j);

    static Project load(const std::filesystem::path& path);
    // Atomic: writes a sibling temp file and renames it over the target.
    void save(const std::filesystem::path& path) const;
};

std::string tool_version();
// Current UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

nlohmann::json well_to_json(const WellRecord& w);

// Union of wells. Colliding ids raise MergeConflictError, differing factor
// schemas raise SchemaError; an empty project is the identity element.
Project merge_projects(const Project& a, const Project& b);

}  // namespace platescreen
