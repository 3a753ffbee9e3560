#include <algorithm>
#include <cmath>

#include "platescreen/assay.hpp"
#include "platescreen/error.hpp"

namespace platescreen::assay {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

GroupStats group_stats(const std::vector<double>& v) {
    GroupStats g;
    g.n = v.size();
    if (v.empty()) return g;
    double s = 0;
    for (double x : v) s += x;
    g.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double q = 0;
        for (double x : v) q += (x - g.mean) * (x - g.mean);
        g.sd = std::sqrt(q / static_cast<double>(v.size() - 1));
    }
    return g;
}

double msr(double sigma_d) { return std::pow(10.0, 2.0 * sigma_d); }

ValidationMetrics validation_metrics(const std::vector<std::vector<double>>& groups,
                                     const MetricsOptions& opt) {
    if (groups.empty()) throw InvalidArgumentError("no groups given");
    std::vector<GroupStats> st;
    for (const auto& g : groups) {
        if (g.size() < 2) throw InvalidArgumentError("every group needs at least two samples");
        for (double x : g)
            if (!std::isfinite(x)) throw InvalidArgumentError("non-finite sample");
        st.push_back(group_stats(g));
    }
    ValidationMetrics m;
    for (const auto& s : st) {
        if (s.mean != 0.0)
            m.cv.push_back(s.sd / s.mean * 100.0);
        else
            m.cv.push_back(std::nullopt);
    }
    // first index wins ties
    for (std::size_t i = 1; i < st.size(); ++i) {
        if (st[i].mean > st[m.group_mu_max].mean) m.group_mu_max = i;
        if (st[i].mean < st[m.group_mu_min].mean) m.group_mu_min = i;
        if (st[i].sd > st[m.group_sd_max].sd) m.group_sd_max = i;
        if (st[i].sd < st[m.group_sd_min].sd) m.group_sd_min = i;
    }
    if (opt.strict) {
        m.group_sd_max = m.group_mu_max;
        m.group_sd_min = m.group_mu_min;
    }
    const double mu_max = st[m.group_mu_max].mean, mu_min = st[m.group_mu_min].mean;
    const double sd_max = st[m.group_sd_max].sd, sd_min = st[m.group_sd_min].sd;
    const double span = mu_max - mu_min;
    if (sd_min != 0.0) m.snr = span / sd_min;
    if (mu_min != 0.0) m.shv = mu_max / mu_min;
    if (sd_max != 0.0) m.sf = (span - 3.0 * (sd_max + sd_min)) / sd_max;
    if (span != 0.0) m.zprime = 1.0 - 3.0 * (sd_max + sd_min) / std::abs(span);
    if (opt.sigma_d) m.msr = msr(*opt.sigma_d);
    return m;
}

nlohmann::json ValidationMetrics::to_json() const {
    nlohmann::json cvs = nlohmann::json::array();
    for (const auto& c : cv) cvs.push_back(opt_json(c));
    return {{"CV", cvs},          {"SNR", opt_json(snr)},
            {"SHV", opt_json(shv)}, {"SF", opt_json(sf)},
            {"Zprime", opt_json(zprime)}, {"MSR", opt_json(msr)},
            {"groups",
             {{"mu_max", group_mu_max},
              {"mu_min", group_mu_min},
              {"sd_max", group_sd_max},
              {"sd_min", group_sd_min}}}};
}

double estimate_acquisition_time(int n_w, int n_z, int n_l, double t_m1, double t_m2,
                                 double t_m3) {
    if (n_w < 1 || n_z < 1 || n_l < 1) throw InvalidArgumentError("counts must be >= 1");
    if (t_m1 < 0 || t_m2 < 0 || t_m3 < 0) throw InvalidArgumentError("times must be >= 0");
    return static_cast<double>(n_w) * n_z * n_l * t_m1 +
           static_cast<double>(n_w - 1) * n_l * t_m2 + static_cast<double>(n_l - 1) * t_m3;
}

}  // namespace platescreen::assay
