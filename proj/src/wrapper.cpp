#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "platescreen/error.hpp"
#include "platescreen/mlselect.hpp"

namespace platescreen::ml {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          int max_iter) {
    const std::size_t n = x0.size();
    SimplexResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    for (int it = 0; it < max_iter && n > 0; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t d = 0; d < n; ++d) c[d] += pts[i][d] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = c[d] + t * (pts[worst][d] - c[d]);
            return p;
        };
        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < val[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = std::move(xe);
                val[worst] = fe;
            } else {
                pts[worst] = std::move(xr);
                val[worst] = fr;
            }
        } else if (fr < val[second]) {
            pts[worst] = std::move(xr);
            val[worst] = fr;
        } else {
            const bool outside = fr < val[worst];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : val[worst])) {
                pts[worst] = std::move(xc);
                val[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    val[i] = eval(pts[i]);
                }
            }
        }
    }
    const auto b = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
    res.x = pts[b];
    res.f = val[b];
    return res;
}

Eigen::MatrixXd WrapperCorrection::apply(const Eigen::MatrixXd& X, const std::vector<int>& z) const {
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const auto c = static_cast<std::size_t>(z[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double s = (X(i, j) - center[jj]) / scale[jj];
            out(i, j) = gain.at(c)[jj] * s + offset.at(c)[jj];
        }
    }
    return out;
}

nlohmann::json WrapperCorrection::to_json() const {
    return {{"center", center}, {"scale", scale}, {"gain", gain}, {"offset", offset}};
}

WrapperCorrection identity_correction(const Dataset& d, int n_dist) {
    const auto s = static_cast<std::size_t>(d.X.cols());
    WrapperCorrection c;
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        const double mu = d.X.col(j).mean();
        const double var = (d.X.col(j).array() - mu).square().sum() /
                           std::max<double>(1.0, static_cast<double>(d.X.rows() - 1));
        c.center.push_back(mu);
        c.scale.push_back(var > 0 ? std::sqrt(var) : 1.0);
    }
    c.gain.assign(static_cast<std::size_t>(n_dist), std::vector<double>(s, 1.0));
    c.offset.assign(static_cast<std::size_t>(n_dist), std::vector<double>(s, 0.0));
    return c;
}

double wrapper_objective(const Dataset& d, const std::vector<int>& z, int n_dist,
                         const WrapperCorrection& c, const WrapperOptions& opt, double* xi_y,
                         double* xi_z) {
    Dataset dy = d;
    dy.X = c.apply(d.X, z);
    double xy, xz = 0.0;
    try {
        xy = 1.0 - cross_validate(dy, opt.folds, opt.seed, bayes_trainer(opt.bayes)).mean_error;
        if (opt.alpha < 1.0 || xi_z) {
            Dataset dz = dy;
            dz.y = z;
            dz.class_names.clear();
            for (int k = 0; k < n_dist; ++k) dz.class_names.push_back("z" + std::to_string(k));
            xz = 1.0 - cross_validate(dz, opt.folds, opt.seed, bayes_trainer(opt.bayes)).mean_error;
        }
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
    if (xi_y) *xi_y = xy;
    if (xi_z) *xi_z = xz;
    const double target = 1.0 / n_dist;
    return opt.alpha * std::abs(xy - 1.0) + (1.0 - opt.alpha) * std::abs(xz - target);
}

WrapperResult wrapper_normalize(const Dataset& d, const std::vector<int>& z, int n_dist,
                                const WrapperOptions& opt) {
    if (!(opt.alpha >= 0.5 && opt.alpha <= 1.0))
        throw InvalidArgumentError("alpha must lie in [0.5, 1]");
    if (n_dist < 2) throw InvalidArgumentError("need at least two disturbance classes");
    if (z.size() != d.y.size()) throw DimensionError("disturbance labels do not match samples");
    class_counts(z, n_dist);

    const auto s = static_cast<std::size_t>(d.X.cols());
    const WrapperCorrection base = identity_correction(d, n_dist);
    auto unpack = [&](const std::vector<double>& p) {
        WrapperCorrection c = base;
        std::size_t k = 0;
        for (std::size_t cls = 1; cls < static_cast<std::size_t>(n_dist); ++cls)
            for (std::size_t j = 0; j < s; ++j) {
                c.gain[cls][j] = p[k++];
                c.offset[cls][j] = p[k++];
            }
        return c;
    };

    WrapperResult r;
    r.xi_z_target = 1.0 / n_dist;
    long rejected = 0;
    auto objective = [&](const std::vector<double>& p) {
        const double v = wrapper_objective(d, z, n_dist, unpack(p), opt);
        if (!std::isfinite(v)) ++rejected;
        return v;
    };

    std::vector<double> x;
    std::vector<double> step;
    for (int cls = 1; cls < n_dist; ++cls)
        for (std::size_t j = 0; j < s; ++j) {
            x.push_back(1.0);
            x.push_back(0.0);
            step.push_back(0.25);
            step.push_back(0.5);
        }
    r.objective_before = wrapper_objective(d, z, n_dist, base, opt, &r.xi_y_before, &r.xi_z_before);
    double best = r.objective_before;
    std::vector<double> best_x = x;
    static constexpr double kStepScale[] = {1.0, 0.5, 2.0, 0.25, 1.0};
    for (int rs = 0; rs < opt.restarts; ++rs) {
        std::vector<double> st = step;
        for (double& v : st) v *= kStepScale[rs % 5];
        const auto sr = nelder_mead(objective, best_x, st, opt.iterations);
        r.evaluations += sr.evaluations;
        if (sr.f < best) {
            best = sr.f;
            best_x = sr.x;
        }
    }
    r.correction = unpack(best_x);
    r.objective_after =
        wrapper_objective(d, z, n_dist, r.correction, opt, &r.xi_y_after, &r.xi_z_after);
    r.rejected = rejected;
    return r;
}

}  // namespace platescreen::ml
