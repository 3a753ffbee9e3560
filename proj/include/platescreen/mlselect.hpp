#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "platescreen/feature_vector.hpp"

namespace platescreen::ml {

// Labelled sample matrix: rows are wells, columns features; labels are class
// indices into class_names.
struct Dataset {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    int n_classes() const { return static_cast<int>(class_names.size()); }
    Dataset select(const std::vector<int>& columns) const;
    Dataset rows(const std::vector<int>& idx) const;
    int column(const std::string& name) const;  // -1 if absent
};

std::vector<int> class_counts(const std::vector<int>& y, int n_classes);

// --- relevance -----------------------------------------------------------------

struct RelevanceRow {
    std::vector<std::string> features;
    double score = 0.0;
};

struct RelevanceTable {
    std::vector<RelevanceRow> rows;  // descending score, ties by feature names
    std::vector<std::string> diagnostics;
    nlohmann::json to_json() const;
};

// Between-class / total sum of squares; 0 for a constant feature.
double eta_squared(const Eigen::VectorXd& x, const std::vector<int>& y, int n_classes);

// 1 - Wilks' lambda, computed in the subspace spanned by the total scatter
// so that redundant columns add nothing. Throws NumericalError when the
// reduced within-class scatter is singular.
double wilks_relevance(const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes);

// Throws DegenerateLabelsError with fewer than two classes of two samples.
RelevanceTable anova_relevance(const Dataset& d);
RelevanceTable manova_pair_search(const Dataset& d, int anchor);

// --- Bayes -------------------------------------------------------------------------

struct BayesOptions {
    double delta_scale = 1e-6;  // delta = scale * trace(S_c) / s
    bool uniform_prior = false;
};

class BayesModel {
public:
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<Eigen::VectorXd> mean;
    std::vector<Eigen::MatrixXd> cov;  // regularized
    std::vector<double> prior;

    // Recomputes Cholesky factors; throws NumericalError if not PD.
    void finalize();

    std::vector<double> discriminants(const Eigen::VectorXd& x) const;
    int predict(const Eigen::VectorXd& x) const;
    // Softmax probability of the predicted class.
    double score(const Eigen::VectorXd& x) const;

    // Pulls the model's features out of a named vector; nullopt if any is
    // missing or invalid.
    std::optional<Eigen::VectorXd> extract(const FeatureVector& fv) const;

    nlohmann::json to_json() const;
    static BayesModel from_json(const nlohmann::json& j);

private:
    std::vector<Eigen::MatrixXd> chol_;  // lower factors
    std::vector<double> logdet_;
};

BayesModel train_bayes(const Dataset& d, const BayesOptions& opt = {});

// --- cross-validation ----------------------------------------------------------------

struct CvResult {
    double mean_error = 0.0;
    double std_error = 0.0;  // sample std over folds
    std::vector<double> fold_errors;
};

// Fold index per sample. Classes with fewer than k samples raise
// StratificationError unless k equals the sample count (leave-one-out).
std::vector<int> stratified_folds(const std::vector<int>& y, int n_classes, int k,
                                  std::uint64_t seed);

using Trainer = std::function<std::function<int(const Eigen::VectorXd&)>(const Dataset&)>;
Trainer bayes_trainer(const BayesOptions& opt = {});

CvResult cross_validate(const Dataset& d, int k, std::uint64_t seed, const Trainer& trainer);
CvResult cross_validate(const Dataset& d, int k, std::uint64_t seed);

// --- cascade ------------------------------------------------------------------------

struct CascadeStage {
    std::string endpoint;        // plan factor, e.g. "coagulation"
    std::string positive_class;  // model class that ends the cascade
    std::string outcome;         // label emitted when it fires
    BayesModel model;
};

struct CascadeModel {
    std::vector<CascadeStage> stages;
    nlohmann::json to_json() const;
    static CascadeModel from_json(const nlohmann::json& j);
};

struct CascadeCounters {
    std::vector<long> evaluated;  // per stage
    long classified = 0;
};

inline const char* kDeveloped = "developed";

struct StageOutcome {
    std::string endpoint;
    std::string class_name;
    double score = 0.0;
};

// Throws IncompleteFeaturesError naming the stage whose features are missing.
// `trace` receives one entry per evaluated stage.
std::string cascade_classify(const FeatureVector& fv, const CascadeModel& m,
                             CascadeCounters* counters = nullptr,
                             std::vector<StageOutcome>* trace = nullptr);

// --- wrapper normalization --------------------------------------------------------

struct WrapperOptions {
    double alpha = 0.8;
    int folds = 5;
    std::uint64_t seed = 7;
    int iterations = 200;
    int restarts = 5;
    BayesOptions bayes;
};

// Per disturbance class (class 0 is the reference) and feature: x' = gain * x
// + offset, in standardized feature coordinates.
struct WrapperCorrection {
    std::vector<double> center;  // standardization applied before correction
    std::vector<double> scale;
    std::vector<std::vector<double>> gain;    // [class][feature]
    std::vector<std::vector<double>> offset;  // [class][feature]

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X, const std::vector<int>& z) const;
    nlohmann::json to_json() const;
};

struct WrapperResult {
    WrapperCorrection correction;
    double objective_before = 0.0;
    double objective_after = 0.0;
    double xi_y_before = 0.0, xi_y_after = 0.0;
    double xi_z_before = 0.0, xi_z_after = 0.0;
    double xi_z_target = 0.0;
    long evaluations = 0;
    long rejected = 0;  // non-finite objective values
};

// y: plan labels (classes of d.class_names); z: disturbance class indices in
// [0, n_dist). Throws InvalidArgumentError for alpha outside [0.5, 1].
WrapperResult wrapper_normalize(const Dataset& d, const std::vector<int>& z, int n_dist,
                                const WrapperOptions& opt = {});

// Objective of a given correction; exposed for tests.
double wrapper_objective(const Dataset& d, const std::vector<int>& z, int n_dist,
                         const WrapperCorrection& c, const WrapperOptions& opt,
                         double* xi_y = nullptr, double* xi_z = nullptr);

WrapperCorrection identity_correction(const Dataset& d, int n_dist);

// Derivative-free downhill simplex. Non-finite values count as +inf.
struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    long evaluations = 0;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          int max_iter);

}  // namespace platescreen::ml
