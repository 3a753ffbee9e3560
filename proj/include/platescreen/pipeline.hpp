#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "platescreen/assay.hpp"
#include "platescreen/features.hpp"
#include "platescreen/mlselect.hpp"
#include "platescreen/pmr.hpp"
#include "platescreen/preprocess.hpp"
#include "platescreen/project.hpp"
#include "platescreen/segment.hpp"

namespace platescreen::pipeline {

namespace fs = std::filesystem;

// Endpoint factors of the embryo test and the labels the cascade emits.
inline const char* kCoagulation = "coagulation";
inline const char* kMovement = "movement";
inline const char* kHeartbeat = "heartbeat";
inline const char* kCascade = "cascade";
inline const char* kConcentration = "concentration";

FactorSchema fet_schema();

// "P1-C07" -> plate "P1", row 2, column 6. Ids without a plate prefix are
// accepted; nullopt if the id has no row letter / column number.
struct WellPosition {
    std::string plate;
    int row = 0;
    int col = 0;
};
std::optional<WellPosition> parse_well_id(const std::string& id);
std::string well_id(const std::string& plate, int row, int col);

// --- synthetic plate ----------------------------------------------------------------

struct PlateScript {
    std::string plate = "P1";
    int rows = 8;
    int cols = 12;
    int size = 120;
    int n_frames = 12;
    double frame_rate_hz = 1.0;
    std::vector<double> doses{0.5, 0.7, 0.9, 1.0, 1.1, 1.3, 1.6, 2.0};  // per row
    double ec50 = 1.1;
    double hill = 4.0;
    double p_no_movement = 0.25;   // among non-coagulated wells
    double p_no_heartbeat = 0.25;  // among moving wells
    double noise_sigma = 3.0;
    std::uint64_t seed = 1;
};

struct WellTruth {
    std::string well_id;
    double dose = 0.0;
    bool coagulated = false;
    bool movement = false;
    bool heartbeat = false;
    std::string outcome;  // cascade label
};

// Renders every well into dir/images and returns a project linking them.
// With labels, the plan factors carry the planted truth.
Project synth_plate(const PlateScript& s, const fs::path& dir, bool with_labels,
                    std::vector<WellTruth>* truth = nullptr);

// --- plate processing ------------------------------------------------------------------

struct ProcessParams {
    segment::HoughParams hough;
    segment::TrackParams track;
    features::MotionParams motion;
    features::InstantParams instant;
};

ImageStream load_well(const Project& p, const WellRecord& w, const fs::path& base);
std::string layout_of(const Project& p);

// Circle of the most confident detection on frame 0, stored as seg_cx,
// seg_cy, seg_r; wells without a detection get validity "no_egg".
void segment_project(Project& p, const fs::path& base, const ProcessParams& params = {});

// x1..x8 on the masked first frame plus aggregated x9..x17 over tracked crops.
FeatureVector well_features(const ImageStream& gray, const segment::CircleHit& egg,
                            const ProcessParams& params = {});
void extract_features(Project& p, const fs::path& base, const ProcessParams& params = {});

struct TrainOptions {
    int folds = 5;
    std::uint64_t seed = 7;
    ml::BayesOptions bayes;
    // Restrict candidates; empty means every non-segmentation feature.
    std::vector<std::string> features;
};

struct EndpointTraining {
    std::string endpoint;
    ml::RelevanceTable relevance;  // single features
    ml::RelevanceTable pairs;      // anchor pairs
    std::vector<std::string> selected;
    ml::CvResult cv;
    std::map<std::string, int> class_counts;
    int model_version = 1;
    nlohmann::json to_json() const;
};

// Builds the labelled dataset of one endpoint. Wells whose earlier cascade
// stage is positive are excluded from later stages.
ml::Dataset endpoint_dataset(const Project& p, const std::string& endpoint,
                             const std::vector<std::string>& candidates = {},
                             std::vector<std::string>* well_ids = nullptr);

// Throws InsufficientLabelsError unless two classes have >= folds samples.
EndpointTraining train_endpoint(Project& p, const std::string& endpoint,
                                const TrainOptions& opt = {});

// Trains all three endpoints and stores the assembled cascade.
std::vector<EndpointTraining> train_cascade(Project& p, const TrainOptions& opt = {});

ml::CascadeModel cascade_of(const Project& p);

struct ClassifySummary {
    std::map<std::string, int> counts;  // per outcome label
    ml::CascadeCounters counters;
    int skipped = 0;                    // invalid wells or missing features
};

ClassifySummary classify_project(Project& p);

// Fraction of wells per dose whose cascade outcome (or label when
// use_labels) is coagulated.
struct DoseSeries {
    std::vector<double> dose;
    std::vector<double> fraction;
    std::vector<int> n;
};
DoseSeries coagulation_by_dose(const Project& p, bool use_labels = false);

// --- PMR ------------------------------------------------------------------------------

struct PmrParams {
    segment::HoughParams hough;
    segment::TrackParams track;
    features::MovementParams movement;
    preprocess::DropRule drop = preprocess::pmr_drop_rule();
    double smooth_sigma = 0.0;     // 0 disables the Gaussian pre-filter
    int stimulus_frame = 249;      // onset of the first light stimulus
    int baseline_begin = 3;
    double peak_k = 5.0;
    double extent_k = 2.0;
};

struct PmrEgg {
    segment::TrackedEgg track;
    std::vector<double> index;  // per original frame
    pmr::Thresholds thresholds;
    std::vector<pmr::PmrEvent> events;
    pmr::PmrPhases phases{};
};

struct PmrWell {
    std::vector<PmrEgg> eggs;
    int n_frames = 0;  // original frame count
};

PmrWell run_pmr_well(const ImageStream& raw, const PmrParams& params = {});

}  // namespace platescreen::pipeline
