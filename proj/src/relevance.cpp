#include <algorithm>
#include <cmath>
#include <limits>

#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

namespace {

void require_two_classes(const std::vector<int>& y, int n_classes) {
    const auto counts = class_counts(y, n_classes);
    int populated = 0;
    for (int c : counts) {
        if (c == 1) throw DegenerateLabelsError("every class needs at least two samples");
        if (c >= 2) ++populated;
    }
    if (populated < 2) throw DegenerateLabelsError("relevance needs at least two classes");
}

void require_finite(const Eigen::MatrixXd& X) {
    if (!X.allFinite()) throw InvalidArgumentError("feature matrix contains non-finite values");
}

// Total and within-class scatter of the columns of X.
void scatter(const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes,
             Eigen::MatrixXd& T, Eigen::MatrixXd& W) {
    const Eigen::RowVectorXd mu = X.colwise().mean();
    const Eigen::MatrixXd Xc = X.rowwise() - mu;
    T = Xc.transpose() * Xc;
    W = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    for (int c = 0; c < n_classes; ++c) {
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == c) idx.push_back(static_cast<Eigen::Index>(i));
        if (idx.empty()) continue;
        Eigen::MatrixXd Xk(static_cast<Eigen::Index>(idx.size()), X.cols());
        for (std::size_t i = 0; i < idx.size(); ++i)
            Xk.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
        const Eigen::RowVectorXd mk = Xk.colwise().mean();
        const Eigen::MatrixXd Dk = Xk.rowwise() - mk;
        W += Dk.transpose() * Dk;
    }
}

void sort_rows(RelevanceTable& t) {
    std::stable_sort(t.rows.begin(), t.rows.end(), [](const RelevanceRow& a, const RelevanceRow& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.features < b.features;
    });
}

}  // namespace

double eta_squared(const Eigen::VectorXd& x, const std::vector<int>& y, int n_classes) {
    const double mu = x.mean();
    double ss_tot = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) ss_tot += (x[i] - mu) * (x[i] - mu);
    if (!(ss_tot > 0.0)) return 0.0;
    std::vector<double> sum(static_cast<std::size_t>(n_classes), 0.0);
    std::vector<int> n(static_cast<std::size_t>(n_classes), 0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sum[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] += x[i];
        ++n[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
    }
    double ss_b = 0.0;
    for (int c = 0; c < n_classes; ++c) {
        if (n[c] == 0) continue;
        const double m = sum[c] / n[c];
        ss_b += n[c] * (m - mu) * (m - mu);
    }
    return std::clamp(ss_b / ss_tot, 0.0, 1.0);
}

double wilks_relevance(const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes) {
    Eigen::MatrixXd T, W;
    scatter(X, y, n_classes, T, W);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (!(top > 0.0)) return 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > 1e-10 * top) keep.push_back(i);
    Eigen::MatrixXd V(X.cols(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        V.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    const Eigen::MatrixXd Tr = V.transpose() * T * V;
    const Eigen::MatrixXd Wr = V.transpose() * W * V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ew(Wr);
    const double wmin = ew.eigenvalues().minCoeff();
    const double wmax = ew.eigenvalues().maxCoeff();
    if (!(wmin > 1e-12 * Tr.trace()))
        throw NumericalError("within-class scatter is singular",
                             wmin > 0 ? wmax / wmin : std::numeric_limits<double>::infinity());
    const double lambda = std::exp(std::log(Wr.determinant()) - std::log(Tr.determinant()));
    return std::clamp(1.0 - lambda, 0.0, 1.0);
}

RelevanceTable anova_relevance(const Dataset& d) {
    require_two_classes(d.y, d.n_classes());
    require_finite(d.X);
    RelevanceTable t;
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        RelevanceRow r;
        r.features = {d.feature_names.at(static_cast<std::size_t>(j))};
        r.score = eta_squared(d.X.col(j), d.y, d.n_classes());
        t.rows.push_back(std::move(r));
    }
    sort_rows(t);
    return t;
}

RelevanceTable manova_pair_search(const Dataset& d, int anchor) {
    if (d.X.cols() < 2) throw InvalidArgumentError("pair search needs at least two features");
    if (anchor < 0 || anchor >= d.X.cols()) throw InvalidArgumentError("anchor out of range");
    require_two_classes(d.y, d.n_classes());
    require_finite(d.X);
    RelevanceTable t;
    const auto& names = d.feature_names;
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        if (j == anchor) continue;
        Eigen::MatrixXd P(d.X.rows(), 2);
        P.col(0) = d.X.col(anchor);
        P.col(1) = d.X.col(j);
        RelevanceRow r;
        r.features = {names.at(static_cast<std::size_t>(anchor)),
                      names.at(static_cast<std::size_t>(j))};
        try {
            r.score = wilks_relevance(P, d.y, d.n_classes());
        } catch (const NumericalError& e) {
            t.diagnostics.push_back("skipped " + r.features[0] + "+" + r.features[1] + ": " +
                                    e.what());
            continue;
        }
        t.rows.push_back(std::move(r));
    }
    sort_rows(t);
    return t;
}

}  // namespace platescreen::ml
