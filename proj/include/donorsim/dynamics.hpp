#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "donorsim/linalg.hpp"
#include "donorsim/noise.hpp"
#include "donorsim/parallel.hpp"
#include "donorsim/pulse.hpp"
#include "donorsim/random.hpp"
#include "donorsim/spin.hpp"
#include "donorsim/state.hpp"

namespace donorsim {

enum class Frame { lab, rotating };

inline std::string to_string(Frame f) { return f == Frame::lab ? "lab" : "rotating"; }

struct PropagationOptions {
    Frame frame = Frame::rotating;
    double dt_max = 1e-3;  // us
    /// Operator F generating the rotating frame exp(+i 2 pi nu_F F t) and
    /// carrying quasi-static detuning noise delta * F. Defaults to Sz for a
    /// two-level system; required otherwise whenever it is needed.
    std::optional<HermitianOperator> frame_operator;
    /// nu_F; defaults to the frequency of the first drive segment.
    std::optional<double> frame_frequency;
    /// Static detuning delta (MHz) added as delta * F.
    double detuning = 0.0;
    /// Record the state after every integration step, not only at segment ends.
    bool record_steps = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<QuantumState> states;

    const QuantumState& final_state() const { return states.back(); }
};

namespace detail {

/// H(t) = static + sum_k (terms[k].op e^{i 2 pi Omega_k t}), Hermitian in total.
struct OscillatingTerm {
    double frequency;  // Omega, MHz
    Matrix op;
};

struct SegmentHamiltonian {
    Matrix static_part;
    std::vector<OscillatingTerm> terms;
    double max_frequency = 0.0;

    Matrix at(double t) const {
        Matrix h = static_part;
        for (const auto& term : terms) h += term.op * std::exp(kI * (kTwoPi * term.frequency * t));
        return h;
    }
    bool constant() const { return terms.empty(); }
};

/// Builds the per-segment Hamiltonians in the working basis. In the rotating
/// frame the working basis is the eigenbasis of F.
class HamiltonianPlan {
public:
    HamiltonianPlan(const HermitianOperator& H0, const PulseSequence& seq, const PropagationOptions& opt)
        : opt_(opt) {
        const Eigen::Index d = H0.dim();
        require(opt.dt_max > 0.0 && std::isfinite(opt.dt_max), "dt_max must be > 0");
        for (const auto& s : seq.segments())
            if (s.drive_operator) require(s.drive_operator->dim() == d, "drive operator dimension differs from H0");

        const bool need_frame = opt.frame == Frame::rotating || opt.detuning != 0.0;
        Matrix F;
        if (opt.frame_operator) {
            require(opt.frame_operator->dim() == d, "frame operator dimension differs from H0");
            F = opt.frame_operator->matrix();
        } else if (need_frame) {
            require(d == 2, "a frame operator must be supplied for systems with more than two levels");
            F = spin_operators(0.5).z;
        } else {
            F = Matrix::Zero(d, d);
        }

        if (opt.frame == Frame::lab) {
            basis_ = Matrix::Identity(d, d);
            Matrix h0 = H0.matrix() + opt.detuning * F;
            for (const auto& s : seq.segments()) {
                SegmentHamiltonian sh{h0, {}, 0.0};
                if (s.is_drive()) {
                    require(opt.dt_max <= 1.0 / s.frequency || s.frequency == 0.0,
                            "dt_max exceeds the shortest drive period in the lab frame");
                    const Matrix half = (0.5 * s.amplitude) * s.drive_operator->matrix();
                    if (s.frequency == 0.0) {
                        sh.static_part += (s.amplitude * std::cos(s.phase)) * s.drive_operator->matrix();
                    } else {
                        sh.terms.push_back({s.frequency, std::exp(kI * s.phase) * half});
                        sh.terms.push_back({-s.frequency, std::exp(-kI * s.phase) * half});
                        sh.max_frequency = s.frequency;
                    }
                }
                segments_.push_back(std::move(sh));
            }
            return;
        }

        // Rotating frame: R(t) = exp(+i 2 pi nu_F F t), H -> R H R^+ - nu_F F.
        F = 0.5 * (F + F.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(F);
        basis_ = es.eigenvectors();
        const RealVector m = es.eigenvalues();
        const double nuF = opt.frame_frequency.value_or(seq.first_drive_frequency().value_or(0.0));
        const Matrix h0 = basis_.adjoint() * H0.matrix() * basis_;
        Matrix secular = Matrix::Zero(d, d);
        constexpr double same_m = 1e-9;
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                if (std::abs(m(i) - m(j)) < same_m) secular(i, j) = h0(i, j);
        Matrix frame_shift = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) frame_shift(i, i) = (opt.detuning - nuF) * m(i);
        const Matrix base = secular + frame_shift;

        for (const auto& s : seq.segments()) {
            SegmentHamiltonian sh{base, {}, 0.0};
            if (s.is_drive()) {
                const Matrix D = basis_.adjoint() * s.drive_operator->matrix() * basis_;
                const double f = s.frequency;
                const double keep = 0.5 * f;
                const double tol = 1e-9 * std::max(1.0, f);
                std::vector<OscillatingTerm> raw;
                for (Eigen::Index i = 0; i < d; ++i) {
                    for (Eigen::Index j = 0; j < d; ++j) {
                        if (D(i, j) == cplx(0.0)) continue;
                        const double base_freq = nuF * (m(i) - m(j));
                        // cos(2 pi f t + phi) = (e^{i(2 pi f t + phi)} + e^{-i(2 pi f t + phi)}) / 2
                        for (int sign : {+1, -1}) {
                            const double omega = base_freq + sign * f;
                            if (std::abs(omega) > keep + tol) continue;
                            const cplx c = 0.5 * s.amplitude * D(i, j) * std::exp(kI * (sign * s.phase));
                            if (std::abs(omega) <= tol) {
                                sh.static_part(i, j) += c;
                            } else {
                                Matrix op = Matrix::Zero(d, d);
                                op(i, j) = c;
                                raw.push_back({omega, op});
                            }
                        }
                    }
                }
                for (auto& term : raw) {
                    bool merged = false;
                    for (auto& t : sh.terms)
                        if (std::abs(t.frequency - term.frequency) <= tol) {
                            t.op += term.op;
                            merged = true;
                            break;
                        }
                    if (!merged) sh.terms.push_back(std::move(term));
                }
                for (const auto& t : sh.terms) sh.max_frequency = std::max(sh.max_frequency, std::abs(t.frequency));
            }
            segments_.push_back(std::move(sh));
        }
    }

    const Matrix& basis() const { return basis_; }
    const std::vector<SegmentHamiltonian>& segments() const { return segments_; }

private:
    PropagationOptions opt_;
    Matrix basis_;
    std::vector<SegmentHamiltonian> segments_;
};

inline int step_count(double duration, double dt_max) {
    if (duration <= 0.0) return 0;
    return std::max(1, static_cast<int>(std::ceil(duration / dt_max - 1e-12)));
}

}  // namespace detail

/// Unitary evolution of `state` (pure or mixed) through `seq`. The returned
/// trajectory starts at t = 0 and holds the state at every segment end (and
/// every step when record_steps is set). Rotating-frame states are reported
/// in the original basis, in the rotating frame.
inline Trajectory propagate_unitary(const HermitianOperator& H0, const PulseSequence& seq, const QuantumState& state,
                                    const PropagationOptions& opt = {}) {
    require(state.dim() == H0.dim(), "state dimension differs from H0");
    const detail::HamiltonianPlan plan(H0, seq, opt);
    const Matrix& V = plan.basis();
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(state);

    const bool pure = state.is_pure();
    Vector psi;
    Matrix rho;
    if (pure) psi = V.adjoint() * state.vector();
    else rho = V.adjoint() * state.density() * V;

    auto record = [&](double t) {
        traj.times.push_back(t);
        if (pure) traj.states.push_back(QuantumState::unchecked_pure(V * psi));
        else traj.states.push_back(QuantumState::unchecked_mixed(V * rho * V.adjoint()));
    };
    auto apply = [&](const Matrix& U) {
        if (pure) psi = U * psi;
        else rho = U * rho * U.adjoint();
    };

    double t = 0.0;
    for (std::size_t k = 0; k < seq.segments().size(); ++k) {
        const auto& seg = seq.segments()[k];
        const auto& sh = plan.segments()[k];
        if (seg.duration == 0.0) continue;
        if (sh.constant()) {
            if (opt.record_steps) {
                const int n = detail::step_count(seg.duration, opt.dt_max);
                const double h = seg.duration / n;
                const Matrix U = propagator(sh.static_part, h);
                for (int s = 0; s < n; ++s) {
                    apply(U);
                    record(t + (s + 1) * h);
                }
            } else {
                apply(propagator(sh.static_part, seg.duration));
                record(t + seg.duration);
            }
        } else {
            const int n = detail::step_count(seg.duration, opt.dt_max);
            const double h = seg.duration / n;
            for (int s = 0; s < n; ++s) {
                const double t0 = t + s * h;
                const Matrix a1 = (-kI * kTwoPi) * sh.at(t0 + h * (0.5 - kMagnusNodeOffset));
                const Matrix a2 = (-kI * kTwoPi) * sh.at(t0 + h * (0.5 + kMagnusNodeOffset));
                apply(exp_antihermitian(magnus4_exponent(a1, a2, h)));
                if (opt.record_steps) record(t0 + h);
            }
            if (!opt.record_steps) record(t + seg.duration);
        }
        t += seg.duration;
    }
    return traj;
}

/// Lindblad evolution with dephasing noise. With rate r and jump L the
/// dissipator is r (L rho L^+ - {L^+ L, rho}/2). For a qubit L defaults to
/// sigma_z / sqrt(2), so coherences decay as exp(-r t); larger systems must
/// supply L.
inline Trajectory propagate_lindblad(const HermitianOperator& H0, const PulseSequence& seq, const QuantumState& state,
                                     const NoiseModel& noise, const PropagationOptions& opt = {}) {
    require(noise.kind == NoiseKind::lindblad_dephasing || noise.kind == NoiseKind::none,
            "propagate_lindblad needs lindblad_dephasing noise");
    noise.validate();
    require(state.dim() == H0.dim(), "state dimension differs from H0");
    const detail::HamiltonianPlan plan(H0, seq, opt);
    const Matrix& V = plan.basis();
    const Eigen::Index d = H0.dim();

    std::vector<JumpOperator> jumps;
    if (noise.kind == NoiseKind::lindblad_dephasing && noise.rate > 0.0) {
        Matrix L;
        if (noise.jump_operator) {
            require(noise.jump_operator->dim() == d, "jump operator dimension differs from H0");
            L = noise.jump_operator->matrix();
        } else {
            require(d == 2, "a jump operator must be supplied for systems with more than two levels");
            L = std::sqrt(2.0) * spin_operators(0.5).z;
        }
        jumps.push_back({noise.rate, V.adjoint() * L * V});
    }

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    Vector r = vec(V.adjoint() * state.to_density() * V);
    auto record = [&](double t) {
        Matrix rho = V * unvec(r, d) * V.adjoint();
        rho = 0.5 * (rho + rho.adjoint()).eval();
        traj.times.push_back(t);
        traj.states.push_back(QuantumState::unchecked_mixed(std::move(rho)));
    };

    double t = 0.0;
    for (std::size_t k = 0; k < seq.segments().size(); ++k) {
        const auto& seg = seq.segments()[k];
        const auto& sh = plan.segments()[k];
        if (seg.duration == 0.0) continue;
        const int n = (sh.constant() && !opt.record_steps) ? 1 : detail::step_count(seg.duration, opt.dt_max);
        const double h = seg.duration / n;
        if (sh.constant()) {
            const Matrix P = expm(liouvillian(sh.static_part, jumps) * h);
            for (int s = 0; s < n; ++s) {
                r = P * r;
                if (opt.record_steps) record(t + (s + 1) * h);
            }
        } else {
            for (int s = 0; s < n; ++s) {
                const double t0 = t + s * h;
                const Matrix l1 = liouvillian(sh.at(t0 + h * (0.5 - kMagnusNodeOffset)), jumps);
                const Matrix l2 = liouvillian(sh.at(t0 + h * (0.5 + kMagnusNodeOffset)), jumps);
                r = expm(magnus4_exponent(l1, l2, h)) * r;
                if (opt.record_steps) record(t0 + h);
            }
        }
        if (!opt.record_steps) record(t + seg.duration);
        t += seg.duration;
    }
    return traj;
}

/// Means and standard errors of observables over an ensemble, one entry per
/// recorded trajectory time.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<std::vector<double>> mean;       // [observable][time]
    std::vector<std::vector<double>> std_error;  // [observable][time]
    std::size_t n_samples = 0;
};

/// Averages observables over quasi-static detunings delta ~ N(0, sigma^2)
/// entering as delta * F. Sample k draws from stream(seed, k), so results are
/// independent of the thread count.
inline EnsembleResult run_sequence_ensemble(const HermitianOperator& H0, const PulseSequence& seq,
                                            const QuantumState& state, const NoiseModel& noise,
                                            const std::vector<HermitianOperator>& observables, std::size_t n_samples,
                                            std::uint64_t seed, const PropagationOptions& opt = {}) {
    require(n_samples >= 1, "n_samples must be >= 1");
    require(noise.kind == NoiseKind::quasi_static_gaussian || noise.kind == NoiseKind::none,
            "run_sequence_ensemble needs quasi_static_gaussian noise");
    noise.validate();
    for (const auto& o : observables) require(o.dim() == H0.dim(), "observable dimension differs from H0");

    std::vector<std::vector<std::vector<double>>> per_sample(n_samples);
    std::vector<double> times;
    parallel_for(n_samples, [&](std::size_t k) {
        auto rng = stream(seed, k);
        std::normal_distribution<double> normal(0.0, 1.0);
        PropagationOptions o = opt;
        o.detuning = opt.detuning + (noise.kind == NoiseKind::none ? 0.0 : noise.sigma * normal(rng));
        const Trajectory traj = propagate_unitary(H0, seq, state, o);
        auto& out = per_sample[k];
        out.resize(observables.size());
        for (std::size_t j = 0; j < observables.size(); ++j)
            for (const auto& s : traj.states) out[j].push_back(s.expectation(observables[j]));
        if (k == 0) times = traj.times;
    });

    EnsembleResult res;
    res.times = times;
    res.n_samples = n_samples;
    const std::size_t nt = times.size();
    res.mean.assign(observables.size(), std::vector<double>(nt, 0.0));
    res.std_error.assign(observables.size(), std::vector<double>(nt, 0.0));
    for (std::size_t j = 0; j < observables.size(); ++j) {
        for (std::size_t t = 0; t < nt; ++t) {
            double sum = 0.0, sq = 0.0;
            for (std::size_t k = 0; k < n_samples; ++k) sum += per_sample[k][j][t];
            const double mean = sum / static_cast<double>(n_samples);
            for (std::size_t k = 0; k < n_samples; ++k) sq += std::pow(per_sample[k][j][t] - mean, 2);
            res.mean[j][t] = mean;
            res.std_error[j][t] =
                n_samples > 1 ? std::sqrt(sq / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples)) : 0.0;
        }
    }
    return res;
}

}  // namespace donorsim
