#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "donorsim/types.hpp"

namespace donorsim {

/// All rates are ordinary frequencies in MHz; amplitudes decay as exp(-2 pi (rate/2) t).
struct CavityParams {
    double f_c = 7400.0;     // MHz
    double kappa = 7.4e-3;   // total photon decay rate, MHz
    double kappa_int = 0.0;  // intrinsic part; the coupling port gets kappa - kappa_int

    static CavityParams from_Q(double f_c, double Q, double kappa_int = 0.0) {
        require(std::isfinite(Q) && Q > 0.0, "Q must be > 0");
        return {f_c, f_c / Q, kappa_int};
    }
    void validate() const {
        require(std::isfinite(f_c) && f_c > 0.0, "cavity frequency must be > 0");
        require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");
        require(kappa_int >= 0.0 && kappa_int <= kappa, "kappa_int must lie in [0, kappa]");
    }
    double Q() const { return f_c / kappa; }
    double kappa_ext() const { return kappa - kappa_int; }
};

enum class LineShape { gaussian, lorentzian };

inline std::string to_string(LineShape s) { return s == LineShape::gaussian ? "gaussian" : "lorentzian"; }

inline LineShape line_shape_from_string(const std::string& s) {
    if (s == "gaussian") return LineShape::gaussian;
    if (s == "lorentzian") return LineShape::lorentzian;
    throw InvalidArgument("unknown line shape '" + s + "' (expected gaussian or lorentzian)");
}

/// Gamma is the half width at half maximum of the spin line.
struct EnsembleParams {
    double N = 0.0;
    double g0 = 0.0;     // MHz
    double Gamma = 0.0;  // MHz
    LineShape shape = LineShape::gaussian;
    double detuning = 0.0;  // line centre minus cavity, MHz

    void validate() const {
        require(std::isfinite(N) && N >= 0.0, "N must be >= 0");
        require(std::isfinite(g0) && g0 >= 0.0, "g0 must be >= 0");
        require(std::isfinite(Gamma) && Gamma >= 0.0, "Gamma must be >= 0");
        require(std::isfinite(detuning), "detuning must be finite");
    }
    double g_ens() const { return std::sqrt(N) * g0; }
};

struct Cooperativity {
    double C = 0.0;
    double g_ens = 0.0;  // MHz
};

/// C = N g0^2 / (kappa Gamma).
inline Cooperativity cooperativity(const CavityParams& cav, const EnsembleParams& ens) {
    cav.validate();
    ens.validate();
    require(ens.Gamma > 0.0, "cooperativity needs Gamma > 0");
    return {ens.N * ens.g0 * ens.g0 / (cav.kappa * ens.Gamma), ens.g_ens()};
}

/// Smallest integer N with C >= 1.
inline double spins_for_unit_cooperativity(double g0, double kappa, double Gamma) {
    require(g0 > 0.0 && kappa > 0.0 && Gamma > 0.0, "g0, kappa and Gamma must be > 0");
    return std::ceil(kappa * Gamma / (g0 * g0) - 1e-12);
}

/// Gamma_P = g^2 kappa / (delta^2 + kappa^2 / 4).
inline double purcell_rate(double g, double kappa, double delta) {
    require(std::isfinite(g) && std::isfinite(delta), "g and delta must be finite");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");
    return g * g * kappa / (delta * delta + 0.25 * kappa * kappa);
}

/// Normal-mode frequencies of the cavity and the bright spin mode (lower, upper), MHz.
inline std::array<double, 2> vacuum_rabi_modes(const CavityParams& cav, const EnsembleParams& ens) {
    cav.validate();
    ens.validate();
    const double fs = cav.f_c + ens.detuning, mean = 0.5 * (cav.f_c + fs);
    const double half = std::hypot(0.5 * ens.detuning, ens.g_ens());
    return {mean - half, mean + half};
}

inline double vacuum_rabi_splitting(const CavityParams& cav, const EnsembleParams& ens) {
    const auto m = vacuum_rabi_modes(cav, ens);
    return m[1] - m[0];
}

// ---------------------------------------------------------------------------
// Linear storage

struct SpinGroup {
    double detuning = 0.0;  // MHz from the cavity
    double weight = 0.0;    // fraction of N
};

/// M groups on a uniform grid over +-span_hwhm * Gamma around the line centre,
/// weighted by the line shape at the group centres (midpoint rule) and
/// renormalised to unit total weight. Gamma = 0 gives one group.
inline std::vector<SpinGroup> discretize_line(const EnsembleParams& ens, int M = 201, double span_hwhm = 8.0) {
    ens.validate();
    require(M >= 1, "M must be >= 1");
    require(span_hwhm > 0.0, "span must be > 0");
    if (ens.Gamma == 0.0 || M == 1) return {{ens.detuning, 1.0}};
    std::vector<SpinGroup> g(M);
    const double width = 2.0 * span_hwhm * ens.Gamma, step = width / M;
    const double sigma = ens.Gamma / std::sqrt(2.0 * std::log(2.0));
    double total = 0.0;
    for (int k = 0; k < M; ++k) {
        const double x = -0.5 * width + (k + 0.5) * step;
        const double w = ens.shape == LineShape::gaussian ? std::exp(-0.5 * x * x / (sigma * sigma))
                                                          : 1.0 / (1.0 + (x / ens.Gamma) * (x / ens.Gamma));
        g[k] = {ens.detuning + x, w};
        total += w;
    }
    for (auto& s : g) s.weight /= total;
    return g;
}

enum class PulseShape { gaussian, square };

inline std::string to_string(PulseShape s) { return s == PulseShape::gaussian ? "gaussian" : "square"; }

inline PulseShape pulse_shape_from_string(const std::string& s) {
    if (s == "gaussian") return PulseShape::gaussian;
    if (s == "square") return PulseShape::square;
    throw InvalidArgument("unknown pulse shape '" + s + "' (expected gaussian or square)");
}

/// Resonant input pulse a_in(t) with unit energy, integral |a_in|^2 dt = 1.
/// Gaussian: intensity FWHM = duration, centred at 3 * duration, simulated to 6 * duration.
/// Square: on over [0, duration].
struct InputPulse {
    PulseShape shape = PulseShape::gaussian;
    double duration = 100.0;  // us
    double detuning = 0.0;    // carrier minus cavity, MHz

    void validate() const {
        require(std::isfinite(duration) && duration > 0.0, "pulse duration must be > 0");
        require(std::isfinite(detuning), "pulse detuning must be finite");
    }
    double end_time() const { return shape == PulseShape::gaussian ? 6.0 * duration : duration; }
    cplx amplitude(double t) const {
        double a = 0.0;
        if (shape == PulseShape::gaussian) {
            const double s = duration / (2.0 * std::sqrt(std::log(2.0)));  // |a|^2 has FWHM = duration
            const double x = t - 3.0 * duration;
            a = std::pow(kPi * s * s, -0.25) * std::exp(-0.5 * x * x / (s * s));
        } else {
            a = (t >= 0.0 && t <= duration) ? 1.0 / std::sqrt(duration) : 0.0;
        }
        return a * std::exp(-kI * (kTwoPi * detuning * t));
    }
};

struct StorageOptions {
    int M = 201;
    double span_hwhm = 8.0;
    double gamma_h = 0.0;   // homogeneous spin decay (energy), MHz
    double dt = 0.0;        // 0 = automatic
    int trace_every = 0;    // record every n-th step; 0 = about 400 samples
};

struct StorageResult {
    double absorbed_fraction = 0.0;  // sum |b_j|^2 at pulse end
    double reflected = 0.0;
    double cavity_residual = 0.0;
    double intrinsic_loss = 0.0;     // cavity internal loss plus homogeneous spin decay
    double input_energy = 0.0;       // delivered up to the pulse end
    double budget_error = 0.0;       // |sum of parts - input|
    std::vector<double> times;
    std::vector<double> cavity_energy;
    std::vector<double> spin_energy;
    std::vector<double> output_power;
};

/// Linear coupled-mode model, frame at the cavity frequency:
///   da/dt  = -pi kappa a - i 2 pi sum_j g_j b_j + sqrt(2 pi kappa_ext) a_in
///   db_j/dt = -(i 2 pi delta_j + pi gamma_h) b_j - i 2 pi g_j a
///   a_out  = a_in - sqrt(2 pi kappa_ext) a
/// with g_j = g0 sqrt(N w_j). Fixed-step RK4; the energy integrals are carried in the state.
inline StorageResult photon_storage_sim(const CavityParams& cav, const EnsembleParams& ens, const InputPulse& pulse,
                                        const StorageOptions& opt = {}) {
    cav.validate();
    ens.validate();
    pulse.validate();
    require(opt.gamma_h >= 0.0, "gamma_h must be >= 0");
    const auto groups = discretize_line(ens, opt.M, opt.span_hwhm);
    const int M = static_cast<int>(groups.size());
    std::vector<double> g(M), delta(M);
    double max_rate = cav.kappa + opt.gamma_h + ens.g_ens() + std::abs(pulse.detuning) + 1.0 / pulse.duration;
    for (int j = 0; j < M; ++j) {
        g[j] = ens.g0 * std::sqrt(ens.N * groups[j].weight);
        delta[j] = groups[j].detuning;
        max_rate = std::max(max_rate, std::abs(delta[j]));
    }
    const double T = pulse.end_time();
    if (M > 1) {
        // a uniform grid of groups rephases after 1 / spacing
        const double spacing = std::abs(groups[1].detuning - groups[0].detuning);
        if (1.0 / spacing <= T)
            throw NumericalError("spin groups rephase at t = " + std::to_string(1.0 / spacing) +
                                 " us, before the pulse ends at " + std::to_string(T) + " us; raise M");
    }
    const double dt_target = opt.dt > 0.0 ? opt.dt : 0.02 / max_rate;
    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt_target)));
    const double h = T / steps;
    const double ke = std::sqrt(kTwoPi * cav.kappa_ext());

    // y = [a, b_1..b_M, E_in, E_out, E_int]
    const int n = M + 4;
    auto rhs = [&](double t, const Vector& y) {
        Vector d(n);
        const cplx ain = pulse.amplitude(t);
        const cplx a = y(0);
        cplx da = -kPi * cav.kappa * a + ke * ain;
        double spin_loss = 0.0;
        for (int j = 0; j < M; ++j) {
            const cplx b = y(1 + j);
            da += -kI * (kTwoPi * g[j]) * b;
            d(1 + j) = -(kI * (kTwoPi * delta[j]) + kPi * opt.gamma_h) * b - kI * (kTwoPi * g[j]) * a;
            spin_loss += std::norm(b);
        }
        d(0) = da;
        d(M + 1) = std::norm(ain);
        d(M + 2) = std::norm(ain - ke * a);
        d(M + 3) = kTwoPi * cav.kappa_int * std::norm(a) + kTwoPi * opt.gamma_h * spin_loss;
        return d;
    };
    auto spin_energy = [&](const Vector& y) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += std::norm(y(1 + j));
        return s;
    };

    StorageResult res;
    const int every = opt.trace_every > 0 ? opt.trace_every : std::max(1, steps / 400);
    auto record = [&](double t, const Vector& y) {
        res.times.push_back(t);
        res.cavity_energy.push_back(std::norm(y(0)));
        res.spin_energy.push_back(spin_energy(y));
        res.output_power.push_back(std::norm(pulse.amplitude(t) - ke * y(0)));
    };
    Vector y = Vector::Zero(n);
    record(0.0, y);
    for (int k = 0; k < steps; ++k) {
        const double t = k * h;
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % every == 0 || k + 1 == steps) record(t + h, y);
    }
    if (!y.allFinite()) throw NumericalError("storage integration diverged");
    res.absorbed_fraction = spin_energy(y);
    res.cavity_residual = std::norm(y(0));
    res.input_energy = y(M + 1).real();
    res.reflected = y(M + 2).real();
    res.intrinsic_loss = y(M + 3).real();
    res.budget_error =
        std::abs(res.absorbed_fraction + res.reflected + res.cavity_residual + res.intrinsic_loss - res.input_energy);
    return res;
}

/// g_ens for impedance matching to a Markovian spin bath: g_ens^2 = kappa_ext Gamma_eff / 4,
/// with Gamma_eff = 2 Gamma the full width of a Lorentzian line.
inline double matched_g_ens(const CavityParams& cav, double Gamma) {
    cav.validate();
    require(Gamma > 0.0, "Gamma must be > 0");
    return std::sqrt(cav.kappa_ext() * 2.0 * Gamma / 4.0);
}

}  // namespace donorsim
