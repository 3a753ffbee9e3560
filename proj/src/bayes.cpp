#include <algorithm>
#include <cmath>
#include <limits>

#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

namespace {

constexpr int kModelVersion = 1;

double condition_of(const Eigen::MatrixXd& S) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

BayesModel train_bayes(const Dataset& d, const BayesOptions& opt) {
    const int K = d.n_classes();
    const auto s = d.X.cols();
    if (K < 1 || s < 1) throw InvalidArgumentError("empty training set");
    if (!d.X.allFinite()) throw InvalidArgumentError("training features must be finite");
    const auto counts = class_counts(d.y, K);
    const auto n = static_cast<double>(d.y.size());

    BayesModel m;
    m.feature_names = d.feature_names;
    m.class_names = d.class_names;
    for (int c = 0; c < K; ++c) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(s);
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(s, s);
        const int nc = counts[static_cast<std::size_t>(c)];
        if (nc > 0) {
            for (std::size_t i = 0; i < d.y.size(); ++i)
                if (d.y[i] == c) mu += d.X.row(static_cast<Eigen::Index>(i)).transpose();
            mu /= nc;
            for (std::size_t i = 0; i < d.y.size(); ++i)
                if (d.y[i] == c) {
                    const Eigen::VectorXd r = d.X.row(static_cast<Eigen::Index>(i)).transpose() - mu;
                    S += r * r.transpose();
                }
            if (nc > 1) S /= (nc - 1);
        }
        double delta = opt.delta_scale * S.trace() / static_cast<double>(s);
        if (!(delta > 0.0)) delta = opt.delta_scale;
        S.diagonal().array() += delta;
        m.mean.push_back(std::move(mu));
        m.cov.push_back(std::move(S));
        if (opt.uniform_prior)
            m.prior.push_back(nc > 0 ? 1.0 : 0.0);
        else
            m.prior.push_back(nc / n);
    }
    if (opt.uniform_prior) {
        double tot = 0;
        for (double p : m.prior) tot += p;
        for (double& p : m.prior) p /= tot;
    }
    m.finalize();
    return m;
}

void BayesModel::finalize() {
    chol_.clear();
    logdet_.clear();
    for (std::size_t c = 0; c < cov.size(); ++c) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov[c]);
        if (llt.info() != Eigen::Success)
            throw NumericalError("class covariance is not positive definite (class " +
                                     (c < class_names.size() ? class_names[c] : std::to_string(c)) +
                                     ")",
                                 condition_of(cov[c]));
        Eigen::MatrixXd L = llt.matrixL();
        double ld = 0.0;
        for (Eigen::Index i = 0; i < L.rows(); ++i) ld += 2.0 * std::log(L(i, i));
        chol_.push_back(std::move(L));
        logdet_.push_back(ld);
    }
}

std::vector<double> BayesModel::discriminants(const Eigen::VectorXd& x) const {
    std::vector<double> g(mean.size());
    for (std::size_t c = 0; c < mean.size(); ++c) {
        if (prior[c] <= 0.0) {
            g[c] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const Eigen::VectorXd z =
            chol_[c].triangularView<Eigen::Lower>().solve(x - mean[c]);
        g[c] = -0.5 * z.squaredNorm() - 0.5 * logdet_[c] + std::log(prior[c]);
    }
    return g;
}

int BayesModel::predict(const Eigen::VectorXd& x) const {
    const auto g = discriminants(x);
    int best = 0;
    for (std::size_t c = 1; c < g.size(); ++c)
        if (g[c] > g[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    return best;
}

double BayesModel::score(const Eigen::VectorXd& x) const {
    const auto g = discriminants(x);
    const int best = predict(x);
    const double top = g[static_cast<std::size_t>(best)];
    double z = 0.0;
    for (double v : g) z += std::exp(v - top);
    return 1.0 / z;
}

std::optional<Eigen::VectorXd> BayesModel::extract(const FeatureVector& fv) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(feature_names.size()));
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        const auto v = fv.get(feature_names[j]);
        if (!v) return std::nullopt;
        x[static_cast<Eigen::Index>(j)] = *v;
    }
    return x;
}

nlohmann::json BayesModel::to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t c = 0; c < mean.size(); ++c) {
        std::vector<double> mu(mean[c].data(), mean[c].data() + mean[c].size());
        std::vector<std::vector<double>> S;
        for (Eigen::Index i = 0; i < cov[c].rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < cov[c].cols(); ++j) row.push_back(cov[c](i, j));
            S.push_back(std::move(row));
        }
        classes.push_back({{"name", class_names.at(c)}, {"mean", mu}, {"cov", S}, {"prior", prior[c]}});
    }
    return {{"type", "bayes"},
            {"schema_version", kModelVersion},
            {"features", feature_names},
            {"classes", classes}};
}

BayesModel BayesModel::from_json(const nlohmann::json& j) {
    if (j.value("type", "") != "bayes") throw SchemaError("not a Bayes model");
    if (j.value("schema_version", 0) != kModelVersion) throw SchemaError("unsupported model version");
    BayesModel m;
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    const auto s = static_cast<Eigen::Index>(m.feature_names.size());
    for (const auto& c : j.at("classes")) {
        m.class_names.push_back(c.at("name").get<std::string>());
        const auto mu = c.at("mean").get<std::vector<double>>();
        const auto S = c.at("cov").get<std::vector<std::vector<double>>>();
        if (static_cast<Eigen::Index>(mu.size()) != s || static_cast<Eigen::Index>(S.size()) != s)
            throw SchemaError("model dimensions do not match its feature list");
        Eigen::VectorXd v(s);
        Eigen::MatrixXd M(s, s);
        for (Eigen::Index i = 0; i < s; ++i) {
            v[i] = mu[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(S[static_cast<std::size_t>(i)].size()) != s)
                throw SchemaError("covariance is not square");
            for (Eigen::Index k = 0; k < s; ++k)
                M(i, k) = S[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        m.mean.push_back(v);
        m.cov.push_back(M);
        m.prior.push_back(c.at("prior").get<double>());
    }
    m.finalize();
    return m;
}

}  // namespace platescreen::ml
