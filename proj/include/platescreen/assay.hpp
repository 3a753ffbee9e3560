#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace platescreen::assay {

struct GroupStats {
    double mean = 0.0;
    double sd = 0.0;  // sample (N-1)
    std::size_t n = 0;
};

GroupStats group_stats(const std::vector<double>& v);

// A metric is nullopt when its division precondition fails.
struct ValidationMetrics {
    std::vector<std::optional<double>> cv;  // per group, percent
    std::optional<double> snr, shv, sf, zprime, msr;
    std::size_t group_mu_max = 0, group_mu_min = 0;
    std::size_t group_sd_max = 0, group_sd_min = 0;
    nlohmann::json to_json() const;
};

struct MetricsOptions {
    // Pair sigma with the mean-extremal groups instead of taking the
    // largest/smallest spread over all groups.
    bool strict = false;
    std::optional<double> sigma_d;  // for MSR
};

// Throws InvalidArgumentError unless every group has >= 2 samples.
ValidationMetrics validation_metrics(const std::vector<std::vector<double>>& groups,
                                     const MetricsOptions& opt = {});

double msr(double sigma_d);

// --- dose response ----------------------------------------------------------------

// y = p_min + (p_max - p_min) / (1 + (z / ec)^(-d)); with p_min < p_max a
// positive d rises with concentration and a negative d falls.
struct DoseResponseFit {
    double p_min = 0.0;
    double p_max = 0.0;
    double ec = 0.0;
    double d = 0.0;
    double residual_sse = 0.0;
    bool converged = false;
    int iterations = 0;
    // Approximate covariance of (p_min, p_max, ln ec, d); empty when the
    // fit has no residual degrees of freedom.
    std::optional<Eigen::Matrix4d> covariance;
    // SSE after every accepted step, starting with the initial guess.
    std::vector<double> sse_trace;

    double evaluate(double conc) const;
    nlohmann::json to_json() const;
};

struct DoseResponseInit {
    double p_min, p_max, ec, d;
};

enum class EffectScale { automatic, fraction, percent };

struct FitOptions {
    int max_iter = 200;
    double rel_tol = 1e-10;
    EffectScale scale = EffectScale::automatic;
    std::optional<DoseResponseInit> init;
};

// Throws InvalidArgumentError for non-positive concentrations or fewer than
// four distinct doses. Flat data returns converged == false.
DoseResponseFit fit_dose_response(const std::vector<double>& conc,
                                  const std::vector<double>& effect,
                                  const FitOptions& opt = {});

// --- throughput ----------------------------------------------------------------------

// n_w wells, n_z images per well, n_l plate repetitions. t_m1 is charged per
// image, t_m2 per well-to-well move within a pass and t_m3 per extra pass.
double estimate_acquisition_time(int n_w, int n_z, int n_l, double t_m1, double t_m2,
                                 double t_m3);

}  // namespace platescreen::assay
