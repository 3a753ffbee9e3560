#include "platescreen/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "platescreen/assay.hpp"
#include "platescreen/error.hpp"
#include "platescreen/pipeline.hpp"
#include "platescreen/png_io.hpp"
#include "platescreen/raster.hpp"

namespace platescreen::report {

namespace {

const std::vector<std::string> kOutcomeOrder{"coagulated", "no-movement", "no-heartbeat",
                                             "developed"};

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string num(double v, int prec = 4) {
    if (!std::isfinite(v)) return "n/a";
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

void write_text(const fs::path& path, const std::string& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << s;
}

GrayImage placeholder(int size) {
    GrayImage g(size, size, 200);
    for (int i = 0; i < size; ++i) {
        g(i, i) = 90;
        g(size - 1 - i, i) = 90;
    }
    return g;
}

std::optional<GrayImage> well_crop(const Project& p, const WellRecord& w, const fs::path& base,
                                   int size) {
    if (!w.features) return std::nullopt;
    const auto cx = w.features->get("seg_cx"), cy = w.features->get("seg_cy"),
               r = w.features->get("seg_r");
    if (!cx || !cy || !r) return std::nullopt;
    try {
        const ImageStream s = pipeline::load_well(p, w, base);
        const int half = static_cast<int>(*r) + 4;
        const GrayImage c =
            crop_clamped(s.at(0), static_cast<int>(std::lround(*cx)) - half,
                         static_cast<int>(std::lround(*cy)) - half, 2 * half + 1, 2 * half + 1);
        return raster::resize(c, size, size);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

Montage plate_overlay(std::vector<Tile> tiles, int tile_size) {
    Montage m;
    if (tiles.empty()) return m;
    const int pad = 4, cell = tile_size + 2 * pad;

    std::map<std::string, int> plate_rows;  // rows used per plate
    int cols = 12;
    std::vector<std::optional<pipeline::WellPosition>> pos;
    for (const auto& t : tiles) {
        pos.push_back(pipeline::parse_well_id(t.well_id));
        if (pos.back()) {
            plate_rows[pos.back()->plate] = std::max(plate_rows[pos.back()->plate], pos.back()->row + 1);
            cols = std::max(cols, pos.back()->col + 1);
        }
    }
    std::map<std::string, int> plate_offset;
    int total_rows = 0;
    for (const auto& [plate, rows] : plate_rows) {
        plate_offset[plate] = total_rows;
        total_rows += rows;
    }
    std::vector<std::size_t> idx(tiles.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (!pos[a] || !pos[b]) return pos[a].has_value() && !pos[b].has_value();
        return std::tuple(pos[a]->plate, pos[a]->row, pos[a]->col) <
               std::tuple(pos[b]->plate, pos[b]->row, pos[b]->col);
    });
    const int loose = static_cast<int>(std::count(pos.begin(), pos.end(), std::nullopt));
    total_rows += (loose + cols - 1) / cols;

    m.image = RgbImage(cols * cell, total_rows * cell, raster::kWhite);
    int next_loose = 0;
    for (std::size_t i : idx) {
        int gr, gc;
        if (pos[i]) {
            gr = plate_offset[pos[i]->plate] + pos[i]->row;
            gc = pos[i]->col;
        } else {
            gr = total_rows - (loose + cols - 1) / cols + next_loose / cols;
            gc = next_loose % cols;
            ++next_loose;
        }
        const Rect r{gc * cell, gr * cell, cell, cell};
        const GrayImage g = tiles[i].crop ? raster::resize(*tiles[i].crop, tile_size, tile_size)
                                          : placeholder(tile_size);
        raster::blit(m.image, raster::to_rgb(g), r.x + pad, r.y + pad);
        if (tiles[i].outlined) {
            raster::draw_rect(m.image, {r.x + 1, r.y + 1, cell - 2, cell - 2}, raster::kRed, 2, 4);
            ++m.outlined;
        }
        m.order.push_back(tiles[i].well_id);
        m.rects.push_back(r);
    }
    return m;
}

std::string ClassHistogram::csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "dose,n";
    for (const auto& c : classes) os << ',' << c;
    os << '\n';
    for (std::size_t i = 0; i < dose.size(); ++i) {
        os << dose[i] << ',' << n[i];
        for (double f : fractions[i]) os << ',' << f;
        os << '\n';
    }
    return os.str();
}

ClassHistogram class_histogram(const Project& p, const std::string& endpoint) {
    std::map<double, std::map<std::string, int>> by;
    std::set<std::string> seen;
    for (const auto& w : p.wells) {
        const auto d = w.factors.plan_params.find(pipeline::kConcentration);
        const auto pr = w.predictions.find(endpoint);
        if (d == w.factors.plan_params.end() || pr == w.predictions.end()) continue;
        ++by[d->second][pr->second.label];
        seen.insert(pr->second.label);
    }
    ClassHistogram h;
    for (const auto& c : kOutcomeOrder)
        if (seen.count(c)) h.classes.push_back(c);
    for (const auto& c : seen)
        if (std::find(h.classes.begin(), h.classes.end(), c) == h.classes.end())
            h.classes.push_back(c);
    for (const auto& [dose, counts] : by) {
        int n = 0;
        for (const auto& kv : counts) n += kv.second;
        std::vector<double> f;
        for (const auto& c : h.classes) {
            const auto it = counts.find(c);
            f.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second) / n);
        }
        h.dose.push_back(dose);
        h.n.push_back(n);
        h.fractions.push_back(std::move(f));
    }
    return h;
}

ReportSummary render_report(const Project& p, const fs::path& base, const fs::path& out,
                            const ReportOptions& opt) {
    fs::create_directories(out / "assets");
    ReportSummary sum;
    std::ostringstream html;
    auto section = [&](const std::string& id, const std::string& title) {
        if (!sum.sections.empty()) html << "</section>\n";
        html << "<section id=\"" << id << "\">\n<h2>" << esc(title) << "</h2>\n";
        sum.sections.push_back(id);
    };
    auto asset_png = [&](const std::string& name, const RgbImage& img) {
        const std::string rel = "assets/" + name;
        png::write(out / rel, img);
        sum.files.push_back(rel);
        return rel;
    };
    auto appendix = [&](const std::string& name, const std::string& text) {
        write_text(out / name, text);
        sum.files.push_back(name);
        return name;
    };

    html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" << esc(opt.title)
         << "</title>\n<style>body{font-family:sans-serif;margin:2em}table{border-collapse:"
            "collapse}td,th{border:1px solid #999;padding:2px 6px}</style></head><body>\n<h1>"
         << esc(opt.title) << "</h1>\n";

    // 1. plate overlay
    section("overlay", "Plate overlay");
    std::vector<Tile> tiles;
    for (const auto& w : p.wells) {
        Tile t;
        t.well_id = w.well_id;
        t.crop = well_crop(p, w, base, opt.tile_size);
        const auto pr = w.predictions.find(pipeline::kCascade);
        const auto pc = w.predictions.find(pipeline::kCoagulation);
        t.outlined = (pr != w.predictions.end() && pr->second.label == "coagulated") ||
                     (pr == w.predictions.end() && pc != w.predictions.end() &&
                      pc->second.label == "yes");
        tiles.push_back(std::move(t));
    }
    const Montage mont = plate_overlay(tiles, opt.tile_size);
    if (mont.order.empty()) {
        html << "<p class=\"empty\">No wells.</p>\n";
    } else {
        html << "<img src=\"" << asset_png("overlay.png", mont.image)
             << "\" alt=\"plate overlay\">\n<p>" << mont.outlined
             << " wells outlined (dashed) as coagulated.</p>\n";
    }

    // 2. result tables
    section("tables", "Classification results");
    std::map<std::string, int> counts;
    int n_pred = 0;
    std::ostringstream wells_csv;
    wells_csv << "well_id,concentration,valid,prediction,score\n";
    for (const auto& w : p.wells) {
        const auto pr = w.predictions.find(pipeline::kCascade);
        const auto d = w.factors.plan_params.find(pipeline::kConcentration);
        wells_csv << w.well_id << ','
                  << (d == w.factors.plan_params.end() ? std::string() : num(d->second, 10)) << ','
                  << (w.valid() ? 1 : 0) << ','
                  << (pr == w.predictions.end() ? std::string() : pr->second.label) << ','
                  << (pr == w.predictions.end() ? std::string() : num(pr->second.score, 10))
                  << '\n';
        if (pr != w.predictions.end()) {
            ++counts[pr->second.label];
            ++n_pred;
        }
    }
    if (n_pred == 0) {
        html << "<p class=\"empty\">No predictions.</p>\n";
    } else {
        html << "<table class=\"counts\"><tr><th>class</th><th>wells</th></tr>\n";
        for (const auto& [label, c] : counts)
            html << "<tr><td>" << esc(label) << "</td><td>" << c << "</td></tr>\n";
        html << "</table>\n";
    }
    html << "<p><a href=\"" << appendix("wells.csv", wells_csv.str()) << "\">wells.csv</a></p>\n";

    // 3. class histogram over dose
    section("histogram", "Class fractions per concentration");
    const ClassHistogram hist = class_histogram(p);
    if (hist.dose.empty()) {
        html << "<p class=\"empty\">No dose information.</p>\n";
    } else {
        const std::vector<Rgb> colors{raster::kRed, {240, 160, 30}, {150, 80, 200}, raster::kGreen};
        std::vector<Rgb> cls_colors;
        for (const auto& c : hist.classes) {
            const auto it = std::find(kOutcomeOrder.begin(), kOutcomeOrder.end(), c);
            cls_colors.push_back(it == kOutcomeOrder.end() ? raster::kGray
                                                           : colors[it - kOutcomeOrder.begin()]);
        }
        html << "<img src=\"" << asset_png("histogram.png", raster::stacked_bars(hist.fractions, cls_colors))
             << "\" alt=\"class histogram\">\n<table class=\"histogram\"><tr><th>dose</th><th>n</th>";
        for (const auto& c : hist.classes) html << "<th>" << esc(c) << "</th>";
        html << "</tr>\n";
        for (std::size_t i = 0; i < hist.dose.size(); ++i) {
            html << "<tr><td>" << num(hist.dose[i]) << "</td><td>" << hist.n[i] << "</td>";
            for (double f : hist.fractions[i]) html << "<td>" << num(f, 3) << "</td>";
            html << "</tr>\n";
        }
        html << "</table>\n";
    }
    appendix("histogram.csv", hist.csv());

    // 4. dose-response regression
    section("regression", "Dose-response regression");
    const auto series = pipeline::coagulation_by_dose(p);
    std::ostringstream fit_csv;
    fit_csv << "dose,fraction,n\n";
    for (std::size_t i = 0; i < series.dose.size(); ++i)
        fit_csv << num(series.dose[i], 10) << ',' << num(series.fraction[i], 10) << ','
                << series.n[i] << '\n';
    appendix("dose_response.csv", fit_csv.str());
    bool fitted = false;
    if (series.dose.size() >= 4) {
        try {
            const auto fit = assay::fit_dose_response(series.dose, series.fraction);
            raster::Series pts{series.dose, series.fraction, raster::kBlack, false, true};
            raster::Series curve;
            curve.color = raster::kBlue;
            const double lo = series.dose.front(), hi = series.dose.back();
            for (int i = 0; i <= 100; ++i) {
                const double z = lo * std::pow(hi / lo, i / 100.0);
                curve.x.push_back(z);
                curve.y.push_back(fit.evaluate(z));
            }
            raster::PlotOptions po;
            po.log_x = true;
            po.y_min = 0.0;
            po.y_max = 1.0;
            if (fit.converged) po.marker_x = fit.ec;
            html << "<img src=\"" << asset_png("regression.png", raster::plot({curve, pts}, po))
                 << "\" alt=\"dose response\">\n<table class=\"fit\">"
                 << "<tr><th>EC50</th><td>" << num(fit.ec) << "</td></tr>"
                 << "<tr><th>d</th><td>" << num(fit.d) << "</td></tr>"
                 << "<tr><th>p_min</th><td>" << num(fit.p_min) << "</td></tr>"
                 << "<tr><th>p_max</th><td>" << num(fit.p_max) << "</td></tr>"
                 << "<tr><th>converged</th><td>" << (fit.converged ? "yes" : "no")
                 << "</td></tr></table>\n";
            appendix("dose_response_fit.json", fit.to_json().dump(2));
            fitted = true;
        } catch (const Error& e) {
            html << "<p class=\"empty\">Regression failed: " << esc(e.what()) << "</p>\n";
            fitted = true;
        }
    }
    if (!fitted) html << "<p class=\"empty\">Fewer than four concentrations.</p>\n";

    // 5. feature-space scatter of the first cascade stage
    section("scatter", "Feature space");
    std::vector<std::string> feats;
    if (const auto it = p.classifiers.find(pipeline::kCoagulation); it != p.classifiers.end())
        feats = it->second.model.value("features", std::vector<std::string>{});
    if (feats.empty()) {
        html << "<p class=\"empty\">No trained classifier.</p>\n";
    } else {
        std::map<std::string, raster::Series> by;
        const std::string fy = feats.size() > 1 ? feats[1] : feats[0];
        std::ostringstream sc_csv;
        sc_csv << "well_id," << feats[0] << ',' << fy << ",prediction\n";
        for (const auto& w : p.wells) {
            const auto pr = w.predictions.find(pipeline::kCascade);
            if (!w.features || pr == w.predictions.end()) continue;
            const auto a = w.features->get(feats[0]), b = w.features->get(fy);
            if (!a || !b) continue;
            auto& s = by[pr->second.label];
            s.line = false;
            s.points = true;
            s.color = pr->second.label == "coagulated" ? raster::kRed
                      : pr->second.label == "developed" ? raster::kGreen
                                                        : raster::kBlue;
            s.x.push_back(*a);
            s.y.push_back(feats.size() > 1 ? *b : 0.0);
            sc_csv << w.well_id << ',' << num(*a, 10) << ',' << num(*b, 10) << ','
                   << pr->second.label << '\n';
        }
        std::vector<raster::Series> ss;
        for (auto& kv : by) ss.push_back(kv.second);
        html << "<img src=\"" << asset_png("scatter.png", raster::plot(ss))
             << "\" alt=\"feature scatter\">\n<p>x: " << esc(feats[0]) << ", y: " << esc(fy)
             << "</p>\n";
        appendix("scatter.csv", sc_csv.str());
    }

    if (!opt.heatmap.empty()) {
        section("heatmap", "Movement index heatmap");
        html << "<img src=\"" << asset_png("heatmap.png", raster::heatmap(opt.heatmap, 1, 2))
             << "\" alt=\"movement heatmap\">\n<p>" << opt.heatmap.size()
             << " eggs; blue: no movement, red: strong movement.</p>\n";
    }

    // 6. metadata
    section("metadata", "Metadata");
    html << "<table class=\"meta\"><tr><th>tool</th><td>" << esc(tool_version()) << "</td></tr>"
         << "<tr><th>project tool</th><td>" << esc(p.provenance.tool_version) << "</td></tr>"
         << "<tr><th>wells</th><td>" << p.wells.size() << "</td></tr>"
         << "<tr><th>classifiers</th><td>";
    bool first = true;
    for (const auto& [name, rec] : p.classifiers) {
        html << (first ? "" : ", ") << esc(name) << " v" << rec.version;
        first = false;
    }
    html << "</td></tr></table>\n<pre class=\"parameters\">" << esc(p.provenance.parameters.dump(2))
         << "</pre>\n<p class=\"timestamp\">created: " << esc(p.provenance.created) << "</p>\n";
    html << "</section>\n</body></html>\n";

    write_text(out / "index.html", html.str());
    sum.files.insert(sum.files.begin(), "index.html");
    return sum;
}

}  // namespace platescreen::report
