// platescreen command-line front end.
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "platescreen/assay.hpp"
#include "platescreen/error.hpp"
#include "platescreen/kernels.hpp"
#include "platescreen/layout.hpp"
#include "platescreen/pipeline.hpp"
#include "platescreen/pmr.hpp"
#include "platescreen/report.hpp"
#include "platescreen/service.hpp"
#include "platescreen/synthgen.hpp"

namespace fs = std::filesystem;
using namespace platescreen;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

bool is_number(const std::string& s) {
    try {
        std::size_t pos = 0;
        std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

// Drops a header row when its first cell is not numeric.
std::vector<std::vector<std::string>> data_rows(const fs::path& path) {
    auto rows = read_csv(path);
    if (!rows.empty() && !rows.front().empty() && !is_number(rows.front().back())) rows.erase(rows.begin());
    return rows;
}

void write_file(const fs::path& p, const std::string& s) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << s;
}

fs::path base_of(const fs::path& project) {
    return project.has_parent_path() ? project.parent_path() : fs::path(".");
}

segment::HoughParams hough_from(const std::string& radius, double threshold) {
    segment::HoughParams hp;
    const auto colon = radius.find(':');
    if (colon == std::string::npos) throw InvalidArgumentError("radius must be min:max");
    hp.r_min = std::stoi(radius.substr(0, colon));
    hp.r_max = std::stoi(radius.substr(colon + 1));
    if (hp.r_min < 1 || hp.r_min > hp.r_max) throw InvalidArgumentError("bad radius range");
    hp.accum_threshold = threshold;
    return hp;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Well-plate image analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    // synth
    auto* synth = app.add_subcommand("synth", "Render synthetic data");
    synth->require_subcommand(1);
    auto* synth_plate = synth->add_subcommand("plate", "96-well embryo-test plate with a project file");
    fs::path sp_out;
    pipeline::PlateScript ps;
    bool sp_labels = false;
    synth_plate->add_option("--out", sp_out, "output directory")->required();
    synth_plate->add_option("--seed", ps.seed);
    synth_plate->add_option("--plate", ps.plate);
    synth_plate->add_option("--frames", ps.n_frames);
    synth_plate->add_option("--noise", ps.noise_sigma);
    synth_plate->add_flag("--labels", sp_labels, "store the planted labels");

    auto* synth_seq = synth->add_subcommand("sequence", "Multi-egg sequence of one well");
    fs::path ss_out;
    std::string ss_well = "W1";
    synth::SynthScript ss;
    ss.n_frames = 1000;
    ss.n_eggs = 8;
    ss.noise_sigma = 5.0;
    bool ss_stimuli = false;
    synth_seq->add_option("--out", ss_out)->required();
    synth_seq->add_option("--well", ss_well);
    synth_seq->add_option("--frames", ss.n_frames);
    synth_seq->add_option("--eggs", ss.n_eggs);
    synth_seq->add_option("--size", ss.width);
    synth_seq->add_option("--drift", ss.drift_px_per_frame);
    synth_seq->add_option("--noise", ss.noise_sigma);
    synth_seq->add_option("--rate", ss.frame_rate_hz);
    synth_seq->add_option("--seed", ss.seed);
    synth_seq->add_flag("--stimuli", ss_stimuli, "bright frames 249..299 and 649..699");
    bool ss_respond = false;
    synth_seq->add_flag("--respond", ss_respond,
                        "every egg coils, then swims, after the first stimulus");

    // plate processing
    fs::path project;
    auto* seg = app.add_subcommand("segment", "Detect the egg of every well");
    std::string radius = "20:30";
    double threshold = segment::HoughParams{}.accum_threshold;
    seg->add_option("--project", project)->required();
    seg->add_option("--radius", radius, "min:max");
    seg->add_option("--threshold", threshold, "accumulator threshold");

    auto* feat = app.add_subcommand("features", "Extract x1..x17 per well");
    feat->add_option("--project", project)->required();
    feat->add_option("--radius", radius, "min:max");
    feat->add_option("--threshold", threshold);

    auto* train = app.add_subcommand("train", "Select features and train classifiers");
    std::string endpoint = "all";
    pipeline::TrainOptions topt;
    bool uniform_prior = false;
    train->add_option("--project", project)->required();
    train->add_option("--endpoint", endpoint, "coagulation, movement, heartbeat or all");
    train->add_option("--folds", topt.folds);
    train->add_option("--seed", topt.seed);
    train->add_option("--features", topt.features, "restrict candidate features");
    train->add_flag("--uniform-prior", uniform_prior);

    auto* classify = app.add_subcommand("classify", "Apply the endpoint cascade");
    classify->add_option("--project", project)->required();

    auto* select = app.add_subcommand("select-features", "ANOVA and MANOVA relevance tables");
    select->add_option("--project", project)->required();
    select->add_option("--endpoint", endpoint)->required();

    auto* wrap = app.add_subcommand("normalize-wrapper", "Disturbance-aware feature correction");
    std::string disturbance = "microscope";
    ml::WrapperOptions wopt;
    wrap->add_option("--project", project)->required();
    wrap->add_option("--endpoint", endpoint)->required();
    wrap->add_option("--disturbance", disturbance);
    wrap->add_option("--alpha", wopt.alpha);
    wrap->add_option("--iterations", wopt.iterations);
    wrap->add_option("--restarts", wopt.restarts);
    wrap->add_option("--features", topt.features);

    // assay
    auto* assay_cmd = app.add_subcommand("assay", "Assay statistics");
    assay_cmd->require_subcommand(1);
    auto* ec50 = assay_cmd->add_subcommand("ec50", "Fit a dose-response curve (csv: conc,effect)");
    fs::path csv;
    std::string scale = "auto";
    ec50->add_option("--csv", csv)->required();
    ec50->add_option("--scale", scale)->check(CLI::IsMember({"auto", "fraction", "percent"}));
    auto* metrics = assay_cmd->add_subcommand("metrics", "CV, SNR, SHV, SF, Z', MSR (csv: group,value)");
    bool strict = false;
    std::optional<double> sigma_d;
    metrics->add_option("--csv", csv)->required();
    metrics->add_flag("--strict", strict, "take sigma from the mean-extremal groups");
    metrics->add_option("--sigma-d", sigma_d);
    auto* acq = assay_cmd->add_subcommand("acqtime", "Acquisition time of a plate");
    int n_w = 96, n_z = 3, n_l = 1;
    double t1 = 0.2, t2 = 1.2, t3 = 4.0;
    acq->add_option("--nw", n_w);
    acq->add_option("--nz", n_z);
    acq->add_option("--nl", n_l);
    acq->add_option("--tm1", t1);
    acq->add_option("--tm2", t2);
    acq->add_option("--tm3", t3);

    auto* rep = app.add_subcommand("report", "Render the HTML report");
    fs::path out;
    fs::path heatmap_csv;
    rep->add_option("--project", project)->required();
    rep->add_option("--out", out)->required();
    rep->add_option("--heatmap", heatmap_csv, "eggs x frames movement CSV");

    auto* serve = app.add_subcommand("serve", "HTTP API for labelling and tuning");
    std::optional<int> port;
    std::string host = "127.0.0.1";
    fs::path static_dir;
    serve->add_option("--project", project)->required();
    serve->add_option("--port", port);
    serve->add_option("--host", host);
    serve->add_option("--static", static_dir);

    auto* merge = app.add_subcommand("merge", "Merge project files");
    std::vector<fs::path> inputs;
    merge->add_option("inputs", inputs)->required()->expected(2, -1);
    merge->add_option("--out", out)->required();

    auto* pmr_cmd = app.add_subcommand("pmr", "Photomotor-response analysis of one well");
    fs::path dir;
    std::string well, layout = kDefaultLayout;
    double rate = pmr::kReferenceRate;
    pipeline::PmrParams pp;
    pmr_cmd->add_option("--dir", dir)->required();
    pmr_cmd->add_option("--well", well)->required();
    pmr_cmd->add_option("--layout", layout);
    pmr_cmd->add_option("--rate", rate);
    pmr_cmd->add_option("--radius", radius);
    pmr_cmd->add_option("--threshold", threshold);
    pmr_cmd->add_option("--smooth", pp.smooth_sigma);
    pmr_cmd->add_option("--out", out)->required();

    auto* fet = app.add_subcommand("fet", "End-to-end run on a synthetic plate");
    fet->add_option("--out", out)->required();
    fet->add_option("--seed", ps.seed);

    auto* info = app.add_subcommand("info", "Show the active SIMD kernel set");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_plate->parsed()) {
            auto p = pipeline::synth_plate(ps, sp_out, sp_labels);
            p.save(sp_out / "project.json");
            std::cout << "wrote " << p.wells.size() << " wells to " << (sp_out / "project.json") << "\n";
        } else if (synth_seq->parsed()) {
            ss.height = ss.width;
            if (ss_stimuli || ss_respond) ss.stimulus_windows = {{249, 299}, {649, 699}};
            if (ss_respond) {
                if (ss.n_frames < 700) throw InvalidArgumentError("--respond needs 700 frames");
                std::mt19937_64 rng(ss.seed ^ 0x5eedULL);
                std::uniform_int_distribution<int> lag(0, 12), gap(15, 60), swim(50, 150);
                for (int i = 0; i < ss.n_eggs; ++i) {
                    const int c0 = 302 + lag(rng);
                    const int s0 = c0 + 20 + gap(rng);
                    ss.events.push_back({i, c0, 20, synth::EventKind::coiling, 0.0});
                    ss.events.push_back({i, s0, swim(rng), synth::EventKind::swimming, 0.0});
                }
            }
            const auto r = synth::render_sequence(ss);
            save_stream(ss_out, ss_well, LayoutTemplate(kDefaultLayout), r.stream);
            json truth = json::array();
            for (const auto& e : r.truth.eggs)
                truth.push_back({{"radius", e.radius}, {"cx0", e.cx.front()}, {"cy0", e.cy.front()}});
            json ev = json::array();
            for (const auto& e : r.truth.events)
                ev.push_back({{"egg", e.egg},
                              {"kind", synth::to_string(e.kind)},
                              {"start", e.start_frame},
                              {"end", e.end_frame}});
            write_file(ss_out / (ss_well + "_truth.json"),
                       json{{"eggs", truth}, {"events", ev}}.dump(2));
            std::cout << "wrote " << r.stream.n_frames() << " frames\n";
        } else if (seg->parsed() || feat->parsed()) {
            auto p = Project::load(project);
            pipeline::ProcessParams pp2;
            pp2.hough = hough_from(radius, threshold);
            if (seg->parsed())
                pipeline::segment_project(p, base_of(project), pp2);
            else
                pipeline::extract_features(p, base_of(project), pp2);
            p.save(project);
            int invalid = 0;
            for (const auto& w : p.wells) invalid += w.valid() ? 0 : 1;
            std::cout << p.wells.size() << " wells, " << invalid << " invalid\n";
        } else if (train->parsed()) {
            auto p = Project::load(project);
            topt.bayes.uniform_prior = uniform_prior;
            json out_j = json::array();
            if (endpoint == "all") {
                for (const auto& t : pipeline::train_cascade(p, topt)) out_j.push_back(t.to_json());
            } else {
                out_j.push_back(pipeline::train_endpoint(p, endpoint, topt).to_json());
            }
            p.save(project);
            std::cout << out_j.dump(2) << "\n";
        } else if (classify->parsed()) {
            auto p = Project::load(project);
            const auto s = pipeline::classify_project(p);
            p.save(project);
            json j = {{"counts", s.counts},
                      {"stage_evaluations", s.counters.evaluated},
                      {"skipped", s.skipped}};
            std::cout << j.dump(2) << "\n";
        } else if (select->parsed()) {
            const auto p = Project::load(project);
            const auto d = pipeline::endpoint_dataset(p, endpoint);
            const auto single = ml::anova_relevance(d);
            const auto pairs =
                ml::manova_pair_search(d, d.column(single.rows.front().features.front()));
            std::cout << json{{"anova", single.to_json()}, {"manova", pairs.to_json()}}.dump(2) << "\n";
        } else if (wrap->parsed()) {
            auto p = Project::load(project);
            std::vector<std::string> ids;
            const auto d = pipeline::endpoint_dataset(p, endpoint, topt.features, &ids);
            const auto& classes = p.schema.classes(disturbance);
            if (classes.empty()) throw SchemaError("unknown disturbance factor '" + disturbance + "'");
            std::vector<int> z;
            for (const auto& id : ids) {
                const auto lab = p.find(id)->factors.label(disturbance);
                const auto it = std::find(classes.begin(), classes.end(), lab);
                if (it == classes.end()) throw SchemaError("well " + id + " lacks a " + disturbance + " label");
                z.push_back(static_cast<int>(it - classes.begin()));
            }
            const auto r = ml::wrapper_normalize(d, z, static_cast<int>(classes.size()), wopt);
            json j = {{"features", d.feature_names},
                      {"correction", r.correction.to_json()},
                      {"objective", {{"before", r.objective_before}, {"after", r.objective_after}}},
                      {"xi_y", {{"before", r.xi_y_before}, {"after", r.xi_y_after}}},
                      {"xi_z", {{"before", r.xi_z_before}, {"after", r.xi_z_after}, {"target", r.xi_z_target}}},
                      {"evaluations", r.evaluations},
                      {"rejected", r.rejected}};
            p.provenance.parameters["wrapper"] = j;
            p.save(project);
            std::cout << j.dump(2) << "\n";
        } else if (ec50->parsed()) {
            std::vector<double> conc, eff;
            for (const auto& row : data_rows(csv)) {
                if (row.size() < 2) throw InvalidArgumentError("expected conc,effect rows");
                conc.push_back(std::stod(row[0]));
                eff.push_back(std::stod(row[1]));
            }
            assay::FitOptions fo;
            fo.scale = scale == "percent"    ? assay::EffectScale::percent
                       : scale == "fraction" ? assay::EffectScale::fraction
                                             : assay::EffectScale::automatic;
            const auto fit = assay::fit_dose_response(conc, eff, fo);
            std::cout << fit.to_json().dump(2) << "\n";
            return fit.converged ? 0 : 2;
        } else if (metrics->parsed()) {
            std::map<std::string, std::vector<double>> groups;
            std::vector<std::string> order;
            for (const auto& row : data_rows(csv)) {
                if (row.size() < 2) throw InvalidArgumentError("expected group,value rows");
                if (!groups.count(row[0])) order.push_back(row[0]);
                groups[row[0]].push_back(std::stod(row[1]));
            }
            std::vector<std::vector<double>> g;
            for (const auto& name : order) g.push_back(groups[name]);
            const auto m = assay::validation_metrics(g, {strict, sigma_d});
            json j = m.to_json();
            j["group_names"] = order;
            std::cout << j.dump(2) << "\n";
        } else if (acq->parsed()) {
            const double t = assay::estimate_acquisition_time(n_w, n_z, n_l, t1, t2, t3);
            std::cout << json{{"seconds", t}, {"minutes", t / 60.0}}.dump(2) << "\n";
        } else if (rep->parsed()) {
            const auto p = Project::load(project);
            report::ReportOptions ro;
            if (!heatmap_csv.empty()) {
                for (const auto& row : read_csv(heatmap_csv)) {
                    std::vector<double> r;
                    for (const auto& c : row) r.push_back(c.empty() ? std::nan("") : std::stod(c));
                    ro.heatmap.push_back(std::move(r));
                }
            }
            const auto s = report::render_report(p, base_of(project), out, ro);
            std::cout << "wrote " << s.files.size() << " files to " << out << "\n";
        } else if (serve->parsed()) {
            service::ServiceOptions so;
            so.project_path = project;
            so.static_dir = static_dir;
            service::Service svc(so);
            const int p = service::resolve_port(port);
            std::cout << "serving " << project << " on http://" << host << ":" << p << "\n" << std::flush;
            svc.run(host, p);
        } else if (merge->parsed()) {
            Project acc = Project::load(inputs.front());
            for (std::size_t i = 1; i < inputs.size(); ++i)
                acc = merge_projects(acc, Project::load(inputs[i]));
            acc.save(out);
            std::cout << acc.wells.size() << " wells\n";
        } else if (pmr_cmd->parsed()) {
            pp.hough = hough_from(radius, threshold);
            const auto stream = load_stream(dir, well, LayoutTemplate(layout), rate);
            const auto res = pipeline::run_pmr_well(stream, pp);
            std::vector<pmr::PmrEvent> events;
            std::vector<std::vector<double>> rows;
            json phases = json::array();
            auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
            for (const auto& e : res.eggs) {
                events.insert(events.end(), e.events.begin(), e.events.end());
                rows.push_back(e.index);
                phases.push_back({{"egg_id", e.track.egg_id},
                                  {"valid", e.track.valid},
                                  {"reaction_s", num(e.phases.reaction_s)},
                                  {"excitation1_s", num(e.phases.excitation1_s)},
                                  {"excitation2_s", num(e.phases.excitation2_s)}});
            }
            fs::create_directories(out);
            write_file(out / "events.csv", pmr::events_csv(events));
            if (!res.eggs.empty())
                write_file(out / "curves.csv",
                           pmr::curves_csv(pmr::event_probability_curves(
                               events, static_cast<int>(res.eggs.size()), res.n_frames)));
            write_file(out / "heatmap.csv", pmr::heatmap_csv(rows));
            const auto c = pmr::count_events(events);
            json j = {{"eggs", res.eggs.size()},
                      {"coiling_events", c.coiling_events},
                      {"swimming_events", c.swimming_events},
                      {"coiling_frames", c.coiling_frames},
                      {"swimming_frames", c.swimming_frames},
                      {"phases", phases}};
            write_file(out / "summary.json", j.dump(2));
            std::cout << j.dump(2) << "\n";
        } else if (fet->parsed()) {
            const fs::path proj = out / "project.json";
            auto p = pipeline::synth_plate(ps, out, true);
            pipeline::segment_project(p, out);
            pipeline::extract_features(p, out);
            const auto tr = pipeline::train_cascade(p);
            const auto s = pipeline::classify_project(p);
            p.save(proj);
            report::render_report(p, out, out / "report");
            json j = {{"project", proj.string()}, {"counts", s.counts}, {"skipped", s.skipped}};
            for (const auto& t : tr)
                j["cv"][t.endpoint] = {{"mean_error", t.cv.mean_error}, {"selected", t.selected}};
            std::cout << j.dump(2) << "\n";
        } else if (info->parsed()) {
            std::cout << "kernels: " << kernels::isa_name(kernels::active().isa) << "\n";
        }
    } catch (const InsufficientLabelsError& e) {
        std::cerr << "error: " << e.what() << " " << json(e.counts()).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
