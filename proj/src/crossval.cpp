#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

std::vector<int> stratified_folds(const std::vector<int>& y, int n_classes, int k,
                                  std::uint64_t seed) {
    const int n = static_cast<int>(y.size());
    if (k < 2) throw InvalidArgumentError("cross-validation needs k >= 2");
    if (k > n) throw StratificationError("more folds than samples");
    std::mt19937_64 rng(seed);
    std::vector<int> fold(static_cast<std::size_t>(n), 0);

    if (k == n) {
        // leave-one-out: stratification is moot
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < n; ++i) fold[static_cast<std::size_t>(perm[i])] = i;
        return fold;
    }

    const auto counts = class_counts(y, n_classes);
    for (int c = 0; c < n_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0 && counts[static_cast<std::size_t>(c)] < k)
            throw StratificationError("class '" + std::to_string(c) + "' has " +
                                      std::to_string(counts[static_cast<std::size_t>(c)]) +
                                      " samples, fewer than " + std::to_string(k) + " folds");
    int next = 0;  // round-robin continues across classes to balance fold sizes
    for (int c = 0; c < n_classes; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (y[static_cast<std::size_t>(i)] == c) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i : idx) {
            fold[static_cast<std::size_t>(i)] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

Trainer bayes_trainer(const BayesOptions& opt) {
    return [opt](const Dataset& train) -> std::function<int(const Eigen::VectorXd&)> {
        auto model = std::make_shared<BayesModel>(train_bayes(train, opt));
        return [model](const Eigen::VectorXd& x) { return model->predict(x); };
    };
}

CvResult cross_validate(const Dataset& d, int k, std::uint64_t seed, const Trainer& trainer) {
    const auto fold = stratified_folds(d.y, d.n_classes(), k, seed);
    CvResult r;
    for (int f = 0; f < k; ++f) {
        std::vector<int> tr, te;
        for (std::size_t i = 0; i < fold.size(); ++i)
            (fold[i] == f ? te : tr).push_back(static_cast<int>(i));
        const auto predict = trainer(d.rows(tr));
        int wrong = 0;
        for (int i : te)
            if (predict(d.X.row(i).transpose()) != d.y[static_cast<std::size_t>(i)]) ++wrong;
        r.fold_errors.push_back(static_cast<double>(wrong) / static_cast<double>(te.size()));
    }
    double s = 0;
    for (double e : r.fold_errors) s += e;
    r.mean_error = s / k;
    double v = 0;
    for (double e : r.fold_errors) v += (e - r.mean_error) * (e - r.mean_error);
    r.std_error = std::sqrt(v / (k - 1));
    return r;
}

CvResult cross_validate(const Dataset& d, int k, std::uint64_t seed) {
    return cross_validate(d, k, seed, bayes_trainer());
}

}  // namespace platescreen::ml
