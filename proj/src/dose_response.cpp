#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "platescreen/assay.hpp"
#include "platescreen/error.hpp"

namespace platescreen::assay {

namespace {

using Vec4 = Eigen::Vector4d;  // p_min, p_max, ln ec, d

double logistic(double u) {
    if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double model(const Vec4& t, double x) { return t[0] + (t[1] - t[0]) * logistic(t[3] * (x - t[2])); }

double sse_of(const Vec4& t, const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - model(t, x[i]);
        s += r * r;
    }
    return s;
}

Eigen::MatrixXd jacobian(const Vec4& t, const std::vector<double>& x) {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(x.size()), 4);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = logistic(t[3] * (x[i] - t[2]));
        const double ds = (t[1] - t[0]) * s * (1.0 - s);
        const auto r = static_cast<Eigen::Index>(i);
        J(r, 0) = 1.0 - s;
        J(r, 1) = s;
        J(r, 2) = -t[3] * ds;
        J(r, 3) = (x[i] - t[2]) * ds;
    }
    return J;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double DoseResponseFit::evaluate(double conc) const {
    return p_min + (p_max - p_min) * logistic(d * (std::log(conc) - std::log(ec)));
}

nlohmann::json DoseResponseFit::to_json() const {
    nlohmann::json j = {{"p_min", p_min},         {"p_max", p_max},
                        {"ec", ec},               {"d", d},
                        {"residual_sse", residual_sse}, {"converged", converged},
                        {"iterations", iterations}};
    if (covariance) {
        std::vector<std::vector<double>> c(4, std::vector<double>(4));
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) c[i][k] = (*covariance)(i, k);
        j["covariance"] = c;
        j["covariance_params"] = {"p_min", "p_max", "ln_ec", "d"};
        j["covariance_approximate"] = true;
    }
    return j;
}

DoseResponseFit fit_dose_response(const std::vector<double>& conc,
                                  const std::vector<double>& effect, const FitOptions& opt) {
    if (conc.size() != effect.size()) throw DimensionError("conc and effect lengths differ");
    std::set<double> distinct;
    for (double c : conc) {
        if (!(c > 0.0) || !std::isfinite(c))
            throw InvalidArgumentError("concentrations must be positive");
        distinct.insert(c);
    }
    if (distinct.size() < 4) throw InvalidArgumentError("need at least four distinct doses");
    for (double e : effect)
        if (!std::isfinite(e)) throw InvalidArgumentError("effect values must be finite");

    std::vector<double> y = effect;
    const double ymax = *std::max_element(y.begin(), y.end());
    const double ymin = *std::min_element(y.begin(), y.end());
    const bool percent = opt.scale == EffectScale::percent ||
                         (opt.scale == EffectScale::automatic && ymax > 1.0);
    if (percent)
        for (double& v : y) v /= 100.0;

    std::vector<double> x;
    for (double c : conc) x.push_back(std::log(c));

    Vec4 t;
    if (opt.init) {
        t << opt.init->p_min, opt.init->p_max, std::log(opt.init->ec), opt.init->d;
        if (percent) {
            t[0] /= 100.0;
            t[1] /= 100.0;
        }
    } else {
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        double cov = 0;
        for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx) * (y[i] - my);
        const double scale = percent ? 100.0 : 1.0;
        t << ymin / scale, ymax / scale, median(x), cov >= 0 ? 1.0 : -1.0;
    }

    DoseResponseFit fit;
    double sse = sse_of(t, x, y);
    fit.sse_trace.push_back(sse);
    const double span = (ymax - ymin) / (percent ? 100.0 : 1.0);
    const bool flat = !(span > 1e-12 * std::max(1.0, std::abs(ymax)));

    if (!flat) {
        double lambda = 1e-3;
        for (int it = 0; it < opt.max_iter; ++it) {
            fit.iterations = it + 1;
            const Eigen::MatrixXd J = jacobian(t, x);
            Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
            for (std::size_t i = 0; i < x.size(); ++i)
                r[static_cast<Eigen::Index>(i)] = y[i] - model(t, x[i]);
            const Eigen::Matrix4d A = J.transpose() * J;
            const Vec4 g = J.transpose() * r;
            bool accepted = false;
            while (lambda < 1e16) {
                Eigen::Matrix4d M = A;
                for (int k = 0; k < 4; ++k) M(k, k) += lambda * std::max(A(k, k), 1e-12);
                const Vec4 step = M.ldlt().solve(g);
                const Vec4 cand = t + step;
                const double s_new = step.allFinite() ? sse_of(cand, x, y) : HUGE_VAL;
                if (s_new <= sse) {
                    const double rel = sse > 0 ? (sse - s_new) / sse : 0.0;
                    t = cand;
                    sse = s_new;
                    fit.sse_trace.push_back(sse);
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = true;
                    if (rel < opt.rel_tol) fit.converged = true;
                    break;
                }
                lambda *= 10.0;
            }
            // no damping level improves the fit: stationary point
            if (!accepted) fit.converged = true;
            if (fit.converged || sse == 0.0) {
                fit.converged = true;
                break;
            }
        }
        if (!std::isfinite(t[2]) || std::abs(t[1] - t[0]) < 1e-12) fit.converged = false;
    }

    if (t[1] < t[0]) {
        std::swap(t[0], t[1]);
        t[3] = -t[3];
    }
    fit.p_min = t[0];
    fit.p_max = t[1];
    fit.ec = std::exp(t[2]);
    fit.d = t[3];
    fit.residual_sse = sse;
    if (x.size() > 4 && !flat) {
        const Eigen::MatrixXd J = jacobian(t, x);
        const Eigen::Matrix4d A = J.transpose() * J;
        Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        if (lu.isInvertible())
            fit.covariance = (sse / static_cast<double>(x.size() - 4)) * lu.inverse();
    }
    return fit;
}

}  // namespace platescreen::assay
