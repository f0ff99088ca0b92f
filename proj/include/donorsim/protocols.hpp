#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "donorsim/dynamics.hpp"
#include "donorsim/fit.hpp"
#include "donorsim/noise.hpp"

namespace donorsim {

struct CoherenceResult {
    std::vector<double> times;       // us
    std::vector<double> signal;
    std::vector<double> signal_err;  // standard error of the mean (0 when exact)
    DecayModel fit_model = DecayModel::none;
    std::optional<double> fitted_T;  // us
    std::optional<double> fit_exponent;
    std::optional<double> frequency;  // fitted oscillation frequency, MHz
    std::optional<double> contrast;
    std::optional<double> linewidth;  // MHz
};

/// 1/e time of the Gaussian Ramsey envelope for quasi-static noise of std sigma (MHz).
inline double t2star_from_sigma(double sigma) {
    require(sigma > 0.0, "sigma must be > 0");
    return std::sqrt(2.0) / (kTwoPi * sigma);
}
inline double sigma_from_t2star(double t2star) {
    require(t2star > 0.0, "T2* must be > 0");
    return std::sqrt(2.0) / (kTwoPi * t2star);
}
/// Inhomogeneous linewidth ln 2 / (pi T2*), MHz for T2* in us.
inline double inhomogeneous_linewidth(double t2star) {
    require(t2star > 0.0, "T2* must be > 0");
    return std::log(2.0) / (kPi * t2star);
}

// ---------------------------------------------------------------------------
// Rabi

/// Driven system for a Rabi experiment. The signal is <observable>.
struct RabiSystem {
    HermitianOperator H0;
    HermitianOperator drive;  // per unit amplitude
    std::optional<HermitianOperator> frame_operator;
    QuantumState initial;
    HermitianOperator observable;
    Frame frame = Frame::rotating;
    double dt_max = 1e-3;
    /// The rotating frame turns at drive_frequency / frame_harmonic (2 for a Delta m = 2 line).
    int frame_harmonic = 1;
};

/// Bare electron at field B0: H0 = gamma_e B0 Sz, drive gamma_e Sx (amplitude
/// in tesla), signal = spin-down population starting from spin up.
inline RabiSystem electron_rabi_system(double B0, double gamma_e = 28000.0) {
    const auto s = spin_operators(0.5);
    Matrix down = Matrix::Zero(2, 2);
    down(1, 1) = 1.0;
    return {HermitianOperator(gamma_e * B0 * s.z), HermitianOperator(gamma_e * s.x), HermitianOperator(s.z),
            QuantumState::basis(2, 0), HermitianOperator(down)};
}

inline CoherenceResult simulate_rabi(const RabiSystem& sys, double drive_frequency, double amplitude,
                                     std::vector<double> t_grid) {
    require(!t_grid.empty(), "simulate_rabi: empty time grid");
    require(amplitude >= 0.0, "simulate_rabi: amplitude must be >= 0");
    std::sort(t_grid.begin(), t_grid.end());
    require(t_grid.front() >= 0.0, "simulate_rabi: times must be >= 0");

    PulseSequence seq;
    double prev = 0.0;
    for (double t : t_grid) {
        seq.add(PulseSegment::drive(SegmentKind::mw_drive, t - prev, drive_frequency, amplitude, 0.0, sys.drive));
        prev = t;
    }
    PropagationOptions opt;
    opt.frame = sys.frame;
    opt.dt_max = sys.dt_max;
    opt.frame_operator = sys.frame_operator;
    require(sys.frame_harmonic >= 1, "simulate_rabi: frame_harmonic must be >= 1");
    opt.frame_frequency = drive_frequency / sys.frame_harmonic;
    const Trajectory traj = propagate_unitary(sys.H0, seq, sys.initial, opt);

    CoherenceResult res;
    // the trajectory skips zero-length segments; map recorded times back to the grid
    std::size_t j = 0;
    for (double t : t_grid) {
        while (j + 1 < traj.times.size() && traj.times[j + 1] <= t + 1e-12) ++j;
        res.times.push_back(t);
        res.signal.push_back(traj.states[j].expectation(sys.observable));
        res.signal_err.push_back(0.0);
    }
    const auto [lo, hi] = std::minmax_element(res.signal.begin(), res.signal.end());
    if (res.times.size() >= 4 && *hi - *lo > 1e-9) {
        double min_dt = res.times.back();
        for (std::size_t k = 1; k < res.times.size(); ++k)
            if (res.times[k] > res.times[k - 1]) min_dt = std::min(min_dt, res.times[k] - res.times[k - 1]);
        const auto fit = fit_sinusoid(res.times, res.signal, 0.5 / min_dt);
        res.frequency = fit.frequency;
        res.contrast = 2.0 * fit.amplitude;
    } else {
        res.frequency = 0.0;
        res.contrast = *hi - *lo;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Ramsey and CPMG on an effective qubit

namespace detail {
inline void require_classical(const NoiseModel& noise) {
    noise.validate();
    require(noise.kind != NoiseKind::lindblad_dephasing,
            "invalid noise kind for this protocol: lindblad_dephasing has no classical detuning");
}

struct MeanAndError {
    std::vector<double> mean, err;
};

/// Averages per-sample rows (sample k from stream(seed, k)) in index order.
template <class Sample>
MeanAndError ensemble_mean(std::size_t n_samples, std::size_t n_points, std::uint64_t seed, Sample&& sample) {
    std::vector<std::vector<double>> rows(n_samples);
    parallel_for(n_samples, [&](std::size_t k) {
        auto rng = stream(seed, k);
        rows[k] = sample(rng);
    });
    MeanAndError out{std::vector<double>(n_points, 0.0), std::vector<double>(n_points, 0.0)};
    const double n = static_cast<double>(n_samples);
    for (std::size_t p = 0; p < n_points; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < n_samples; ++k) s += rows[k][p];
        const double m = s / n;
        double q = 0.0;
        for (std::size_t k = 0; k < n_samples; ++k) q += (rows[k][p] - m) * (rows[k][p] - m);
        out.mean[p] = m;
        out.err[p] = n_samples > 1 ? std::sqrt(q / (n - 1.0) / n) : 0.0;
    }
    return out;
}
}  // namespace detail

struct EnsembleOptions {
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    DecayModel fit_model = DecayModel::gaussian;
};

/// Ramsey fringes with instantaneous pi/2 pulses: signal(t) = <cos(2 pi detuning t + phi(t))>
/// where phi is the phase accumulated from the detuning noise.
inline CoherenceResult simulate_ramsey(double detuning, const NoiseModel& noise, std::vector<double> t_grid,
                                       const EnsembleOptions& opt = {}) {
    detail::require_classical(noise);
    require(!t_grid.empty(), "simulate_ramsey: empty time grid");
    require(opt.n_samples >= 1, "n_samples must be >= 1");
    std::sort(t_grid.begin(), t_grid.end());
    require(t_grid.front() >= 0.0, "simulate_ramsey: times must be >= 0");
    const double horizon = t_grid.back();
    const std::size_t n = noise.kind == NoiseKind::none ? 1 : opt.n_samples;

    const auto stats = detail::ensemble_mean(n, t_grid.size(), opt.seed, [&](std::mt19937_64& rng) {
        const NoiseRealization real(noise, rng, horizon);
        std::vector<double> row(t_grid.size());
        double acc = 0.0, prev = 0.0;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            acc += real.integral(prev, t_grid[k]);
            prev = t_grid[k];
            row[k] = std::cos(kTwoPi * (detuning * t_grid[k] + acc));
        }
        return row;
    });

    CoherenceResult res;
    res.times = t_grid;
    res.signal = stats.mean;
    res.signal_err = stats.err;
    if (opt.fit_model != DecayModel::none && noise.kind != NoiseKind::none && t_grid.size() >= 3) {
        const auto fit = fit_decay(t_grid, stats.mean, opt.fit_model,
                                   [detuning](double t) { return std::cos(kTwoPi * detuning * t); });
        res.fit_model = opt.fit_model;
        res.fitted_T = fit.T;
        res.fit_exponent = fit.exponent;
        res.linewidth = inhomogeneous_linewidth(fit.T);
    }
    res.frequency = detuning;
    return res;
}

/// Pi-pulse times of CPMG-n with spacing tau: (j - 1/2) tau, j = 1..n; total n tau.
inline std::vector<double> cpmg_flip_times(int n_pulses, double tau) {
    require(n_pulses >= 0, "n_pulses must be >= 0");
    require(tau > 0.0 && std::isfinite(tau), "tau must be > 0");
    std::vector<double> flips;
    for (int j = 1; j <= n_pulses; ++j) flips.push_back((j - 0.5) * tau);
    return flips;
}

/// CPMG coherence versus total time n * tau for each tau in `taus`.
inline CoherenceResult simulate_cpmg(int n_pulses, std::vector<double> taus, const NoiseModel& noise,
                                     const EnsembleOptions& opt = {}) {
    detail::require_classical(noise);
    require(n_pulses >= 1, "n_pulses must be >= 1");
    require(!taus.empty(), "simulate_cpmg: no tau values");
    require(opt.n_samples >= 1, "n_samples must be >= 1");
    std::sort(taus.begin(), taus.end());
    for (double tau : taus) require(tau > 0.0 && std::isfinite(tau), "tau must be > 0");
    const double horizon = n_pulses * taus.back();
    const double step = taus.front() / 20.0;
    const std::size_t n = noise.kind == NoiseKind::none ? 1 : opt.n_samples;

    const auto stats = detail::ensemble_mean(n, taus.size(), opt.seed, [&](std::mt19937_64& rng) {
        const NoiseRealization real(noise, rng, horizon, step);
        std::vector<double> row(taus.size());
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double T = n_pulses * taus[k];
            row[k] = std::cos(kTwoPi * real.switched_integral(cpmg_flip_times(n_pulses, taus[k]), T));
        }
        return row;
    });

    std::vector<double> times;
    for (double tau : taus) times.push_back(n_pulses * tau);
    CoherenceResult res;
    res.times = times;
    res.signal = stats.mean;
    res.signal_err = stats.err;
    if (opt.fit_model != DecayModel::none && noise.kind != NoiseKind::none && times.size() >= 3) {
        const auto fit = fit_decay(times, stats.mean, opt.fit_model);
        res.fit_model = opt.fit_model;
        res.fitted_T = fit.T;
        res.fit_exponent = fit.exponent;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Filter functions

/// |Y(nu)|^2 with Y(nu) = int_0^T y(t) e^{i 2 pi nu t} dt for the switching
/// function y = +-1 flipping at each entry of `flips`.
inline double switching_spectrum(const std::vector<double>& flips, double T, double nu) {
    cplx Y = 0.0;
    double sign = 1.0, start = 0.0;
    auto piece = [&](double a, double b) {
        const double w = b - a;
        const double x = kPi * nu * w;
        const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        Y += sign * w * sinc * std::exp(kI * (kPi * nu * (a + b)));
    };
    for (double f : flips) {
        if (f >= T) break;
        piece(start, f);
        sign = -sign;
        start = f;
    }
    piece(start, T);
    return std::norm(Y);
}

/// W = exp(-chi), chi = 2 pi^2 int_0^inf S(nu) |Y(nu)|^2 dnu, with S linear
/// between table points and zero outside the table.
inline double coherence_from_psd(const std::vector<PsdPoint>& psd, const std::vector<double>& flips, double T) {
    NoiseModel::validate_psd(psd);
    require(T >= 0.0 && std::isfinite(T), "coherence_from_psd: time must be >= 0");
    if (T == 0.0) return 1.0;
    static constexpr std::array<double, 4> node{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                0.8611363115940526};
    static constexpr std::array<double, 4> weight{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                  0.3478548451374538};
    const double width = 1.0 / (8.0 * T);
    double chi = 0.0;
    for (std::size_t k = 1; k < psd.size(); ++k) {
        const double a = psd[k - 1].frequency, b = psd[k].frequency;
        const double sa = psd[k - 1].density, sb = psd[k].density;
        if (sa == 0.0 && sb == 0.0) continue;
        const auto m = static_cast<std::size_t>(std::ceil((b - a) / width));
        const double h = (b - a) / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double c = a + (j + 0.5) * h;
            for (int q = 0; q < 4; ++q) {
                const double nu = c + 0.5 * h * node[q];
                const double s = sa + (sb - sa) * (nu - a) / (b - a);
                chi += 0.5 * h * weight[q] * s * switching_spectrum(flips, T, nu);
            }
        }
    }
    chi *= 2.0 * kPi * kPi;
    if (!std::isfinite(chi)) throw NumericalError("coherence_from_psd: filter integral diverged");
    return std::exp(-chi);
}

inline double coherence_from_psd(const std::vector<PsdPoint>& psd, int n_pulses, double T) {
    require(n_pulses >= 0, "n_pulses must be >= 0");
    if (n_pulses == 0) return coherence_from_psd(psd, std::vector<double>{}, T);
    return coherence_from_psd(psd, cpmg_flip_times(n_pulses, T / n_pulses), T);
}

}  // namespace donorsim
