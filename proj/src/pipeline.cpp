#include "platescreen/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>
#include <set>

#include "platescreen/error.hpp"
#include "platescreen/layout.hpp"
#include "platescreen/synthgen.hpp"

namespace platescreen::pipeline {

namespace {

const std::vector<std::string> kYesNo{"yes", "no"};

struct StageDef {
    const char* endpoint;
    const char* positive;
    const char* outcome;
};
const StageDef kStages[] = {{kCoagulation, "yes", "coagulated"},
                            {kMovement, "no", "no-movement"},
                            {kHeartbeat, "no", "no-heartbeat"}};

bool is_segmentation_feature(const std::string& n) { return n.rfind("seg_", 0) == 0; }

std::optional<segment::CircleHit> stored_circle(const WellRecord& w) {
    if (!w.features) return std::nullopt;
    const auto cx = w.features->get("seg_cx"), cy = w.features->get("seg_cy"),
               r = w.features->get("seg_r");
    if (!cx || !cy || !r) return std::nullopt;
    segment::CircleHit h;
    h.cx = *cx;
    h.cy = *cy;
    h.r = static_cast<int>(*r);
    return h;
}

void add_validity(WellRecord& w, const std::string& id) {
    if (std::find(w.validity.begin(), w.validity.end(), id) == w.validity.end())
        w.validity.push_back(id);
}

}  // namespace

FactorSchema fet_schema() {
    FactorSchema s;
    s.plan[kCoagulation] = kYesNo;
    s.plan[kMovement] = kYesNo;
    s.plan[kHeartbeat] = kYesNo;
    s.disturbance["microscope"] = {"1", "2"};
    return s;
}

std::optional<WellPosition> parse_well_id(const std::string& id) {
    static const std::regex re(R"(^(?:(.*)-)?([A-Za-z])(\d{1,2})$)");
    std::smatch m;
    if (!std::regex_match(id, m, re)) return std::nullopt;
    WellPosition p;
    p.plate = m[1].str();
    p.row = std::toupper(static_cast<unsigned char>(m[2].str()[0])) - 'A';
    p.col = std::stoi(m[3].str()) - 1;
    if (p.col < 0) return std::nullopt;
    return p;
}

std::string well_id(const std::string& plate, int row, int col) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d", 'A' + row, col + 1);
    return plate.empty() ? std::string(buf) : plate + "-" + buf;
}

// --- synthetic plate ----------------------------------------------------------------

Project synth_plate(const PlateScript& s, const fs::path& dir, bool with_labels,
                    std::vector<WellTruth>* truth) {
    if (static_cast<int>(s.doses.size()) < s.rows)
        throw InvalidArgumentError("one dose per plate row required");
    if (s.n_frames < 6) throw InvalidArgumentError("plate wells need at least 6 frames");
    const LayoutTemplate layout(kDefaultLayout);
    fs::create_directories(dir / "images");

    Project p;
    p.schema = fet_schema();
    p.provenance.tool_version = tool_version();
    p.provenance.created = utc_timestamp();
    p.provenance.parameters = {{"layout", kDefaultLayout},
                               {"frame_rate_hz", s.frame_rate_hz},
                               {"synth",
                                {{"plate", s.plate},
                                 {"seed", s.seed},
                                 {"ec50", s.ec50},
                                 {"hill", s.hill},
                                 {"noise_sigma", s.noise_sigma}}}};

    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int row = 0; row < s.rows; ++row)
        for (int col = 0; col < s.cols; ++col) {
            WellTruth t;
            t.well_id = well_id(s.plate, row, col);
            t.dose = s.doses[static_cast<std::size_t>(row)];
            const double p_coag = 1.0 / (1.0 + std::pow(s.ec50 / t.dose, s.hill));
            t.coagulated = u01(rng) < p_coag;
            t.movement = !t.coagulated && u01(rng) >= s.p_no_movement;
            t.heartbeat = !t.coagulated && (!t.movement || u01(rng) >= s.p_no_heartbeat);
            t.outcome = t.coagulated ? "coagulated"
                        : !t.movement ? "no-movement"
                        : !t.heartbeat ? "no-heartbeat"
                                       : ml::kDeveloped;

            synth::SynthScript sc;
            sc.width = sc.height = s.size;
            sc.n_frames = s.n_frames;
            sc.frame_rate_hz = s.frame_rate_hz;
            sc.noise_sigma = s.noise_sigma;
            sc.seed = s.seed * 1000003ULL + static_cast<std::uint64_t>(row * s.cols + col);
            synth::EggSpec egg;
            std::uniform_int_distribution<int> jitter(-3, 3), radius(22, 28);
            egg.cx = s.size / 2 + jitter(rng);
            egg.cy = s.size / 2 + jitter(rng);
            egg.radius = radius(rng);
            egg.orientation = u01(rng) * 2.0 * M_PI;
            egg.appearance = t.coagulated ? synth::Appearance::coagulated : synth::Appearance::developed;
            egg.heartbeat = t.heartbeat;
            sc.eggs.push_back(egg);
            if (t.movement) {
                std::uniform_int_distribution<int> start(1, s.n_frames - 5);
                synth::EventSpec ev;
                ev.egg = 0;
                ev.kind = synth::EventKind::coiling;
                ev.start_frame = start(rng);
                ev.duration_frames = 3;
                sc.events.push_back(ev);
            }
            const auto rendered = synth::render_sequence(sc);
            save_stream(dir / "images", t.well_id, layout, rendered.stream);

            WellRecord w;
            w.well_id = t.well_id;
            w.image_ref = "images";
            w.factors.plan_params[kConcentration] = t.dose;
            w.factors.disturbance["microscope"] = col < s.cols / 2 ? "1" : "2";
            if (with_labels) {
                w.factors.plan[kCoagulation] = t.coagulated ? "yes" : "no";
                w.factors.plan[kMovement] = t.movement ? "yes" : "no";
                w.factors.plan[kHeartbeat] = t.heartbeat ? "yes" : "no";
            }
            p.wells.push_back(std::move(w));
            if (truth) truth->push_back(t);
        }
    return p;
}

// --- plate processing ------------------------------------------------------------------

std::string layout_of(const Project& p) {
    return p.provenance.parameters.value("layout", std::string(kDefaultLayout));
}

ImageStream load_well(const Project& p, const WellRecord& w, const fs::path& base) {
    const double rate = p.provenance.parameters.value("frame_rate_hz", 1.0);
    ImageStream s = load_stream(base / w.image_ref, w.well_id, LayoutTemplate(layout_of(p)), rate);
    if (s.n_channels() == 3) s = preprocess::to_gray(s);
    if (s.n_planes() > 1) s = preprocess::sharpest_planes(s);
    return s;
}

namespace {

void segment_well(const Project& p, WellRecord& w, const fs::path& base,
                  const ProcessParams& params) {
    const ImageStream s = load_well(p, w, base);
    const auto hits = segment::detect_eggs_hough(s.at(0), params.hough);
    FeatureVector fv;
    if (w.features)
        for (std::size_t i = 0; i < w.features->size(); ++i)
            if (!is_segmentation_feature(w.features->names[i]))
                fv.add(w.features->names[i], w.features->values[i]);
    w.validity.erase(std::remove(w.validity.begin(), w.validity.end(), "no_egg"),
                     w.validity.end());
    if (hits.empty()) {
        add_validity(w, "no_egg");
    } else {
        const auto best = std::max_element(
            hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
        fv.add("seg_cx", best->cx);
        fv.add("seg_cy", best->cy);
        fv.add("seg_r", best->r);
    }
    w.features = fv;
}

}  // namespace

void segment_project(Project& p, const fs::path& base, const ProcessParams& params) {
    for (auto& w : p.wells) segment_well(p, w, base, params);
}

FeatureVector well_features(const ImageStream& gray, const segment::CircleHit& egg,
                            const ProcessParams& params) {
    const auto tracks = segment::track_eggs(gray, {egg}, params.track);
    const auto& t = tracks.front();
    const int r = t.radius, side = 2 * r + 1;
    std::vector<GrayImage> crops;
    for (int k = 0; k < gray.n_frames(); ++k) {
        const GrayImage c = crop_clamped(gray.at(k), t.cx[k] - r, t.cy[k] - r, side, side);
        crops.push_back(segment::roi_mask_circle(c, r, r, r));
    }
    FeatureVector fv = features::instantaneous_features(crops.front(), params.instant);
    fv.append(features::aggregate_motion(crops, params.motion));
    return fv;
}

void extract_features(Project& p, const fs::path& base, const ProcessParams& params) {
    for (auto& w : p.wells) {
        auto circle = stored_circle(w);
        if (!circle) {
            const bool no_egg = std::find(w.validity.begin(), w.validity.end(), "no_egg") !=
                                w.validity.end();
            if (no_egg) continue;
            segment_well(p, w, base, params);
            circle = stored_circle(w);
            if (!circle) continue;
        }
        const ImageStream s = load_well(p, w, base);
        FeatureVector fv;
        fv.add("seg_cx", circle->cx);
        fv.add("seg_cy", circle->cy);
        fv.add("seg_r", circle->r);
        fv.append(well_features(s, *circle, params));
        w.features = std::move(fv);
    }
}

// --- training ------------------------------------------------------------------------

nlohmann::json EndpointTraining::to_json() const {
    return {{"endpoint", endpoint},
            {"relevance", relevance.to_json()},
            {"pairs", pairs.to_json()},
            {"selected", selected},
            {"cv",
             {{"mean_error", cv.mean_error},
              {"std_error", cv.std_error},
              {"fold_errors", cv.fold_errors}}},
            {"class_counts", class_counts},
            {"model_version", model_version}};
}

ml::Dataset endpoint_dataset(const Project& p, const std::string& endpoint,
                             const std::vector<std::string>& candidates,
                             std::vector<std::string>* well_ids) {
    if (!p.schema.is_plan(endpoint)) throw SchemaError("unknown endpoint '" + endpoint + "'");
    ml::Dataset d;
    d.class_names = p.schema.classes(endpoint);

    std::vector<const WellRecord*> rows;
    for (const auto& w : p.wells) {
        if (!w.valid() || !w.features) continue;
        const std::string lab = w.factors.label(endpoint);
        const auto it = std::find(d.class_names.begin(), d.class_names.end(), lab);
        if (it == d.class_names.end()) continue;
        // later cascade stages only see wells that passed the earlier ones
        bool excluded = false;
        for (const auto& st : kStages) {
            if (endpoint == st.endpoint) break;
            if (w.factors.label(st.endpoint) == st.positive) excluded = true;
        }
        if (excluded) continue;
        rows.push_back(&w);
        if (well_ids) well_ids->push_back(w.well_id);
        d.y.push_back(static_cast<int>(it - d.class_names.begin()));
    }

    std::vector<std::string> names = candidates;
    if (names.empty() && !rows.empty())
        for (const auto& n : rows.front()->features->names)
            if (!is_segmentation_feature(n)) names.push_back(n);
    for (const auto& n : names) {
        bool usable = true;
        for (const auto* w : rows)
            if (!w->features->get(n) || !std::isfinite(*w->features->get(n))) {
                usable = false;
                break;
            }
        if (usable) d.feature_names.push_back(n);
    }
    d.X.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(d.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d.feature_names.size(); ++j)
            d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                *rows[i]->features->get(d.feature_names[j]);
    return d;
}

EndpointTraining train_endpoint(Project& p, const std::string& endpoint, const TrainOptions& opt) {
    const ml::Dataset d = endpoint_dataset(p, endpoint, opt.features);
    EndpointTraining tr;
    tr.endpoint = endpoint;
    const auto counts = ml::class_counts(d.y, d.n_classes());
    int enough = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        tr.class_counts[d.class_names[c]] = counts[c];
        if (counts[c] >= opt.folds) ++enough;
    }
    bool short_class = false;
    for (int c : counts)
        if (c > 0 && c < opt.folds) short_class = true;
    if (enough < 2 || short_class)
        throw InsufficientLabelsError("endpoint '" + endpoint + "' needs two classes with at least " +
                                          std::to_string(opt.folds) + " labels each",
                                      tr.class_counts);
    if (d.feature_names.empty())
        throw InsufficientLabelsError("no usable features for '" + endpoint + "'", tr.class_counts);

    tr.relevance = ml::anova_relevance(d);
    const int anchor = d.column(tr.relevance.rows.front().features.front());
    tr.selected = {d.feature_names[static_cast<std::size_t>(anchor)]};
    if (d.X.cols() >= 2) {
        tr.pairs = ml::manova_pair_search(d, anchor);
        if (!tr.pairs.rows.empty() &&
            tr.pairs.rows.front().score > tr.relevance.rows.front().score + 1e-9)
            tr.selected = tr.pairs.rows.front().features;
    }
    std::vector<int> cols;
    for (const auto& n : tr.selected) cols.push_back(d.column(n));
    const ml::Dataset ds = d.select(cols);
    tr.cv = ml::cross_validate(ds, opt.folds, opt.seed, ml::bayes_trainer(opt.bayes));
    const ml::BayesModel model = ml::train_bayes(ds, opt.bayes);

    auto& rec = p.classifiers[endpoint];
    tr.model_version = rec.model.is_null() ? 1 : rec.version + 1;
    rec.version = tr.model_version;
    rec.model = model.to_json();
    rec.model["training"] = tr.to_json();
    return tr;
}

ml::CascadeModel cascade_of(const Project& p) {
    ml::CascadeModel m;
    for (const auto& st : kStages) {
        const auto it = p.classifiers.find(st.endpoint);
        if (it == p.classifiers.end()) continue;
        m.stages.push_back(
            {st.endpoint, st.positive, st.outcome, ml::BayesModel::from_json(it->second.model)});
    }
    return m;
}

std::vector<EndpointTraining> train_cascade(Project& p, const TrainOptions& opt) {
    std::vector<EndpointTraining> out;
    for (const auto& st : kStages) out.push_back(train_endpoint(p, st.endpoint, opt));
    auto& rec = p.classifiers[kCascade];
    rec.version = rec.model.is_null() ? 1 : rec.version + 1;
    rec.model = cascade_of(p).to_json();
    return out;
}

ClassifySummary classify_project(Project& p) {
    const ml::CascadeModel m = cascade_of(p);
    if (m.stages.empty()) throw NoDataError("project has no trained endpoint classifiers");
    const bool have_cascade = p.classifiers.count(kCascade) > 0;
    ClassifySummary sum;
    for (const char* label : {"coagulated", "no-movement", "no-heartbeat", ml::kDeveloped})
        sum.counts[label] = 0;
    for (auto& w : p.wells) {
        w.predictions.clear();
        if (!w.valid() || !w.features) {
            ++sum.skipped;
            continue;
        }
        std::vector<ml::StageOutcome> trace;
        std::string label;
        try {
            label = ml::cascade_classify(*w.features, m, &sum.counters, &trace);
        } catch (const IncompleteFeaturesError&) {
            ++sum.skipped;
            continue;
        }
        for (const auto& t : trace) w.predictions[t.endpoint] = {t.class_name, t.score};
        if (have_cascade) w.predictions[kCascade] = {label, trace.back().score};
        ++sum.counts[label];
    }
    return sum;
}

DoseSeries coagulation_by_dose(const Project& p, bool use_labels) {
    std::map<double, std::pair<int, int>> by;  // dose -> (coagulated, total)
    for (const auto& w : p.wells) {
        const auto it = w.factors.plan_params.find(kConcentration);
        if (it == w.factors.plan_params.end()) continue;
        std::string lab;
        if (use_labels) {
            lab = w.factors.label(kCoagulation);
            if (lab == kUnknownLabel) continue;
            lab = lab == "yes" ? "coagulated" : "other";
        } else {
            const auto pr = w.predictions.find(kCascade);
            if (pr == w.predictions.end()) continue;
            lab = pr->second.label;
        }
        auto& e = by[it->second];
        if (lab == "coagulated") ++e.first;
        ++e.second;
    }
    DoseSeries s;
    for (const auto& [dose, c] : by) {
        s.dose.push_back(dose);
        s.fraction.push_back(static_cast<double>(c.first) / c.second);
        s.n.push_back(c.second);
    }
    return s;
}

// --- PMR ------------------------------------------------------------------------------

PmrWell run_pmr_well(const ImageStream& raw, const PmrParams& params) {
    ImageStream s = raw.n_channels() == 3 ? preprocess::to_gray(raw) : raw;
    if (s.n_planes() > 1) s = preprocess::sharpest_planes(s);
    PmrWell out;
    out.n_frames = s.n_frames();
    s = preprocess::drop_frames(s, params.drop);
    if (params.smooth_sigma > 0) s = preprocess::smooth_stream(s, params.smooth_sigma);
    const auto hits = segment::detect_eggs_hough(s.at(0), params.hough);
    const auto tracks = segment::track_eggs(s, hits, params.track);
    const double rate = s.frame_rate_hz();
    const int cmax = pmr::coiling_max_frames(rate);
    int next_stimulus = INT_MAX;
    for (const auto& [a, b] : params.drop)
        if (a > params.stimulus_frame) next_stimulus = std::min(next_stimulus, a);
    for (const auto& t : tracks) {
        PmrEgg e;
        e.track = t;
        e.index = features::movement_index(t, s, params.movement);
        e.index.resize(static_cast<std::size_t>(out.n_frames), kGap);
        try {
            e.thresholds = pmr::baseline_thresholds(e.index, params.baseline_begin,
                                                    params.stimulus_frame, params.peak_k,
                                                    params.extent_k);
            e.events = pmr::classify_events(e.index, t.egg_id, e.thresholds, cmax);
        } catch (const NoDataError&) {
            // no usable baseline: egg lost before the stimulus
        }
        e.phases = pmr::phase_durations(e.events, params.stimulus_frame, rate, next_stimulus);
        out.eggs.push_back(std::move(e));
    }
    return out;
}

}  // namespace platescreen::pipeline
