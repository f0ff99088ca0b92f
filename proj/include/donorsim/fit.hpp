#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "donorsim/types.hpp"

namespace donorsim {

enum class DecayModel { none, gaussian, exponential, stretched };

inline std::string to_string(DecayModel m) {
    switch (m) {
        case DecayModel::none: return "none";
        case DecayModel::gaussian: return "gaussian";
        case DecayModel::exponential: return "exponential";
        case DecayModel::stretched: return "stretched";
    }
    return "?";
}

inline DecayModel decay_model_from_string(const std::string& s) {
    if (s == "none") return DecayModel::none;
    if (s == "gaussian") return DecayModel::gaussian;
    if (s == "exponential") return DecayModel::exponential;
    if (s == "stretched") return DecayModel::stretched;
    throw InvalidArgument("unknown fit model '" + s + "'");
}

/// Minimum of f on [lo, hi]: coarse scan followed by Brent refinement around
/// the best grid point. Returns {x, f(x)}.
inline std::pair<double, double> minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                                 int grid = 64) {
    require(hi > lo && grid >= 2, "minimize_scalar: empty interval");
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / (grid - 1);
    for (int k = 0; k < grid; ++k) {
        const double v = f(lo + k * h);
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }
    const double a = lo + std::max(0, best - 1) * h;
    const double b = lo + std::min(grid - 1, best + 1) * h;
    const auto r = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits / 2);
    if (r.second <= best_val) return r;
    return {lo + best * h, best_val};
}

struct DecayFit {
    double T = 0.0;          // decay time, same unit as t
    double amplitude = 0.0;
    double exponent = 0.0;   // 2 gaussian, 1 exponential, fitted for stretched
    double rss = 0.0;
};

/// Least-squares fit of y = a * exp(-(t/T)^p) * carrier(t). The amplitude
/// enters linearly and is solved in closed form; T is searched in log space.
inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, DecayModel model,
                          const std::function<double(double)>& carrier = {}) {
    require(t.size() == y.size() && t.size() >= 2, "fit_decay: need at least two points");
    require(model != DecayModel::none, "fit_decay: no model selected");
    double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
    for (double v : t)
        if (v > 0.0) {
            t_min = std::min(t_min, v);
            t_max = std::max(t_max, v);
        }
    require(t_max > 0.0, "fit_decay: no positive times");

    std::vector<double> c(t.size(), 1.0);
    if (carrier)
        for (std::size_t k = 0; k < t.size(); ++k) c[k] = carrier(t[k]);

    auto solve = [&](double logT, double p, double* amp) {
        const double T = std::exp(logT);
        double gy = 0.0, gg = 0.0;
        std::vector<double> g(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) {
            g[k] = std::exp(-std::pow(t[k] / T, p)) * c[k];
            gy += g[k] * y[k];
            gg += g[k] * g[k];
        }
        const double a = gg > 0.0 ? gy / gg : 0.0;
        double rss = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) rss += std::pow(y[k] - a * g[k], 2);
        if (amp) *amp = a;
        return rss;
    };

    const double lo = std::log(t_min) - std::log(100.0);
    const double hi = std::log(t_max) + std::log(1000.0);
    auto fit_for = [&](double p) {
        const auto r = minimize_scalar([&](double lt) { return solve(lt, p, nullptr); }, lo, hi, 200);
        DecayFit f;
        f.T = std::exp(r.first);
        f.exponent = p;
        f.rss = solve(r.first, p, &f.amplitude);
        return f;
    };

    switch (model) {
        case DecayModel::gaussian: return fit_for(2.0);
        case DecayModel::exponential: return fit_for(1.0);
        case DecayModel::stretched: {
            const auto r = minimize_scalar([&](double p) { return fit_for(p).rss; }, 0.5, 4.0, 15);
            return fit_for(r.first);
        }
        case DecayModel::none: break;
    }
    return {};
}

struct SinusoidFit {
    double frequency = 0.0;
    double offset = 0.0;
    double amplitude = 0.0;  // of the cosine-plus-sine combination
    double rss = 0.0;
};

/// Fits y = c0 + c1 cos(2 pi f t) + c2 sin(2 pi f t) with f searched in
/// (0, f_max]; the linear coefficients are solved by least squares per trial f.
inline SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y, double f_max) {
    require(t.size() == y.size() && t.size() >= 4, "fit_sinusoid: need at least four points");
    require(f_max > 0.0, "fit_sinusoid: f_max must be > 0");
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd Y(n);
    for (Eigen::Index k = 0; k < n; ++k) Y(k) = y[k];
    auto solve = [&](double f, Eigen::Vector3d* coef) {
        Eigen::MatrixXd X(n, 3);
        for (Eigen::Index k = 0; k < n; ++k) {
            X(k, 0) = 1.0;
            X(k, 1) = std::cos(kTwoPi * f * t[k]);
            X(k, 2) = std::sin(kTwoPi * f * t[k]);
        }
        const Eigen::Vector3d b = X.colPivHouseholderQr().solve(Y);
        if (coef) *coef = b;
        return (X * b - Y).squaredNorm();
    };
    double span = 0.0;
    for (double v : t) span = std::max(span, v);
    const int grid = std::max(64, static_cast<int>(std::ceil(8.0 * f_max * std::max(span, 1e-300))) + 1);
    const auto r = minimize_scalar([&](double f) { return solve(f, nullptr); }, f_max * 1e-6, f_max, grid);
    Eigen::Vector3d b;
    SinusoidFit out;
    out.frequency = r.first;
    out.rss = solve(r.first, &b);
    out.offset = b(0);
    out.amplitude = std::hypot(b(1), b(2));
    return out;
}

}  // namespace donorsim
