#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "donorsim/dynamics.hpp"
#include "donorsim/fit.hpp"
#include "donorsim/hamiltonian.hpp"
#include "donorsim/linalg.hpp"
#include "donorsim/spectrum.hpp"

namespace donorsim {

// ---------------------------------------------------------------------------
// Two exchange-coupled donors

struct TwoDonorParams {
    DonorSpecies species1 = donor_lookup("31P");
    DonorSpecies species2 = donor_lookup("31P");
    std::optional<double> A1, A2;  // site-specific hyperfine, MHz
    double J = 0.0;                // exchange, MHz
    double B0 = 0.0;               // T
    double gamma_e = kGammaElectron;

    double a1() const { return A1.value_or(species1.A); }
    double a2() const { return A2.value_or(species2.A); }

    void validate() const {
        require(std::isfinite(J) && J >= 0.0, "J must be >= 0");
        require(std::isfinite(B0) && B0 >= 0.0, "B0 must be a finite non-negative field");
        require(std::isfinite(a1()) && std::isfinite(a2()), "hyperfine couplings must be finite");
    }
};

/// Factor order: electron 1, electron 2, nucleus 1, nucleus 2.
inline SpinSystem two_donor_system(const TwoDonorParams& p) {
    return SpinSystem({{FactorKind::electron, Spin::from_twice(1)},
                       {FactorKind::electron, Spin::from_twice(1)},
                       {FactorKind::nucleus, p.species1.I},
                       {FactorKind::nucleus, p.species2.I}});
}

inline HermitianOperator two_donor_hamiltonian(const TwoDonorParams& p) {
    p.validate();
    const SpinSystem sys = two_donor_system(p);
    const auto S1 = sys.lifted(0), S2 = sys.lifted(1), I1 = sys.lifted(2), I2 = sys.lifted(3);
    Matrix h = p.gamma_e * p.B0 * (S1.z + S2.z) - p.B0 * (p.species1.gamma_n * I1.z + p.species2.gamma_n * I2.z) +
               p.a1() * dot(S1, I1) + p.a2() * dot(S2, I2) + p.J * dot(S1, S2);
    return HermitianOperator(h);
}

/// ESR drive gamma_e (S1x + S2x), MHz/T.
inline HermitianOperator two_donor_esr_drive(const TwoDonorParams& p) {
    const SpinSystem sys = two_donor_system(p);
    return HermitianOperator(p.gamma_e * (sys.lifted(0).x + sys.lifted(1).x));
}

/// S1z + S2z + I1z + I2z; commutes with the static Hamiltonian.
inline HermitianOperator two_donor_total_m(const TwoDonorParams& p) {
    const SpinSystem sys = two_donor_system(p);
    return HermitianOperator(sys.lifted(0).z + sys.lifted(1).z + sys.lifted(2).z + sys.lifted(3).z);
}

namespace detail {

/// Eigenvectors of H + pin, with energies <v|H|v>. A small `pin` operator
/// selects a basis inside (near-)degenerate manifolds without moving the
/// energies to first order. For a donor pair it suppresses the electron-mediated
/// nuclear flip-flop mixing (tens of Hz at tesla fields), so that eigenvectors
/// carry definite nuclear labels.
inline EigenSystem pinned_eigensystem(const HermitianOperator& H, const Matrix& pin) {
    EigenSystem es = diagonalize(HermitianOperator(H.matrix() + pin));
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        es.values(k) = (es.vectors.col(k).adjoint() * H.matrix() * es.vectors.col(k))(0, 0).real();
    return es;
}

/// lambda (I1z + sqrt2 I2z) + 1e-7 lambda S1z: separates every product state.
inline Matrix two_donor_pin(const SpinSystem& sys, double lambda) {
    return lambda * (sys.lifted(2).z + std::sqrt(2.0) * sys.lifted(3).z + 1e-7 * sys.lifted(0).z);
}

inline int sign_of(double v) { return v >= 0.0 ? +1 : -1; }

}  // namespace detail

/// One ESR line of the two-donor spectrum with its conditional structure.
struct CrotLine {
    SpectrumLine line;
    bool conditional = false;
    int target = -1;        // electron that flips (0 or 1), -1 when both electrons share the line
    int control_state = 0;  // +1 / -1: the other electron up / down
    std::array<int, 2> nuclear{0, 0};  // sign of <Iz> of nucleus 1 and 2
};

struct CrotSpectrumOptions {
    /// Lines closer than this (MHz) are reported as one line; negative disables merging.
    double merge_tolerance = 0.01;
    /// Minimum |<f| S1x + S2x |i>|^2 for a line to be reported.
    double threshold = 1e-3;
    /// Strength (MHz) of the pinning term that keeps nuclear states definite.
    double nuclear_pinning = 1.0;
};

inline std::vector<CrotLine> crot_lines(const TwoDonorParams& p, const CrotSpectrumOptions& opt = {}) {
    require(opt.threshold >= 0.0 && opt.nuclear_pinning >= 0.0, "crot spectrum: invalid options");
    const HermitianOperator H = two_donor_hamiltonian(p);
    const SpinSystem sys = two_donor_system(p);
    const auto S1 = sys.lifted(0), S2 = sys.lifted(1), I1 = sys.lifted(2), I2 = sys.lifted(3);
    const EigenSystem es = detail::pinned_eigensystem(H, detail::two_donor_pin(sys, opt.nuclear_pinning));
    const Matrix V = es.vectors;
    const Matrix d = V.adjoint() * (S1.x + S2.x) * V;
    auto expect = [&](const Matrix& op, Eigen::Index k) { return (V.col(k).adjoint() * op * V.col(k))(0, 0).real(); };

    std::vector<CrotLine> lines;
    const Eigen::Index n = V.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index f = i + 1; f < n; ++f) {
            const double intensity = std::norm(d(f, i));
            if (intensity <= opt.threshold) continue;
            CrotLine c;
            c.line.frequency = std::abs(es.values(f) - es.values(i));
            c.line.intensity = intensity;
            c.line.i = static_cast<int>(i);
            c.line.f = static_cast<int>(f);
            c.line.delta_m = 1;
            const double d1 = expect(S1.z, f) - expect(S1.z, i);
            const double d2 = expect(S2.z, f) - expect(S2.z, i);
            c.nuclear = {detail::sign_of(expect(I1.z, i)), detail::sign_of(expect(I2.z, i))};
            // antiparallel nuclei detune the electrons by ~A, so each line flips one electron
            c.conditional = c.nuclear[0] != c.nuclear[1] || std::abs(std::abs(d1) - std::abs(d2)) > 0.5;
            const auto sgn = [](int s) { return s > 0 ? std::string("up") : std::string("down"); };
            const std::string nuc = "nuclei=" + sgn(c.nuclear[0]) + "," + sgn(c.nuclear[1]);
            if (c.conditional) {
                c.target = std::abs(d1) > std::abs(d2) ? 0 : 1;
                const Matrix& other = c.target == 0 ? S2.z : S1.z;
                c.control_state = detail::sign_of(expect(other, i));
                c.line.label = "conditional e" + std::to_string(c.target + 1) + " | e" +
                               std::to_string(2 - c.target) + "=" + sgn(c.control_state) + " " + nuc;
            } else {
                c.line.label = "unconditional " + nuc;
            }
            lines.push_back(c);
        }
    }
    std::sort(lines.begin(), lines.end(), [](const CrotLine& a, const CrotLine& b) {
        if (a.line.frequency != b.line.frequency) return a.line.frequency < b.line.frequency;
        return a.line.i < b.line.i;
    });
    std::vector<CrotLine> merged;
    for (const auto& c : lines) {
        if (!merged.empty() && c.line.frequency - merged.back().line.frequency <= opt.merge_tolerance) {
            CrotLine& last = merged.back();
            const double total = last.line.intensity + c.line.intensity;
            if (c.line.intensity > last.line.intensity * (1.0 + 1e-9)) {
                const double f0 = last.line.frequency;
                last = c;
                last.line.frequency = f0;
            }
            last.line.intensity = total;
        } else {
            merged.push_back(c);
        }
    }
    return merged;
}

inline std::vector<SpectrumLine> crot_spectrum(const TwoDonorParams& p, const CrotSpectrumOptions& opt = {}) {
    std::vector<SpectrumLine> out;
    for (const auto& c : crot_lines(p, opt)) out.push_back(c.line);
    return out;
}

/// Splittings of the two pairs of conditional lines (lower pair, upper pair).
inline std::array<double, 2> crot_pair_splittings(const std::vector<CrotLine>& lines) {
    std::vector<double> f;
    for (const auto& c : lines)
        if (c.conditional) f.push_back(c.line.frequency);
    require(f.size() == 4, "crot_pair_splittings: expected four conditional lines, found " + std::to_string(f.size()));
    std::sort(f.begin(), f.end());
    return {f[1] - f[0], f[3] - f[2]};
}

struct CrotGateResult {
    Matrix gate;    // 4x4 on |e1 e2>, basis order up-up, up-down, down-up, down-down
    Matrix target;  // ideal CROT
    double fidelity = 0.0;
    double drive_amplitude = 0.0;  // T
    double duration = 0.0;         // us
    CrotLine line;
};

namespace detail {

/// Best average gate fidelity of M against V over local Z phases applied
/// before and after the gate on each qubit.
inline double phase_corrected_fidelity(const Matrix& M, const Matrix& V) {
    auto local = [](double a, double b) {
        Matrix D = Matrix::Zero(4, 4);
        for (int k = 0; k < 4; ++k) {
            const double s1 = k < 2 ? 0.5 : -0.5, s2 = k % 2 == 0 ? 0.5 : -0.5;
            D(k, k) = std::exp(kI * (a * s1 + b * s2));
        }
        return D;
    };
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
    auto fid = [&](const std::array<double, 4>& y) {
        return average_gate_fidelity(local(y[2], y[3]) * M * local(y[0], y[1]), V);
    };
    double best = fid(x);
    for (int sweep = 0; sweep < 12; ++sweep) {
        for (int k = 0; k < 4; ++k) {
            auto y = x;
            const auto r = minimize_scalar(
                [&](double v) {
                    y[k] = v;
                    return -fid(y);
                },
                -kPi * 2.0, kPi * 2.0, 33);
            if (-r.second > best) {
                best = -r.second;
                x[k] = r.first;
            }
        }
    }
    return best;
}

}  // namespace detail

/// Ideal CROT: pi rotation about x (-i X) of `target` when the other electron is
/// in `control_state`, identity otherwise.
inline Matrix ideal_crot(int target, int control_state) {
    Matrix V = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) {
        const int s1 = k < 2 ? +1 : -1, s2 = k % 2 == 0 ? +1 : -1;
        const int control = target == 0 ? s2 : s1;
        if (control != control_state) {
            V(k, k) = 1.0;
        } else {
            const int partner = target == 0 ? (k + 2) % 4 : (k ^ 1);
            V(partner, k) = -kI;
        }
    }
    return V;
}

/// Resonant pulse on one conditional line of crot_lines(p), simulated with the
/// full two-donor Hamiltonian in the rotating frame of total M. Fidelity is
/// taken on the electron subspace of the line's nuclear configuration, in the
/// dressed basis, after local Z-phase correction. Default duration is a pi pulse.
inline CrotGateResult crot_gate(const TwoDonorParams& p, std::size_t target_line, double rabi_frequency,
                                std::optional<double> duration = std::nullopt,
                                const CrotSpectrumOptions& opt = {}) {
    require(rabi_frequency > 0.0 && std::isfinite(rabi_frequency), "rabi frequency must be > 0");
    const auto lines = crot_lines(p, opt);
    require(target_line < lines.size(), "target line not found: index " + std::to_string(target_line) + " of " +
                                            std::to_string(lines.size()) + " lines");
    const CrotLine& line = lines[target_line];
    require(line.conditional, "target line not found: line " + std::to_string(target_line) + " is not conditional");
    const double t = duration.value_or(0.5 / rabi_frequency);
    require(t >= 0.0 && std::isfinite(t), "duration must be >= 0");

    const HermitianOperator H = two_donor_hamiltonian(p);
    const SpinSystem sys = two_donor_system(p);
    const auto S1 = sys.lifted(0), S2 = sys.lifted(1), I1 = sys.lifted(2), I2 = sys.lifted(3);
    const EigenSystem es = detail::pinned_eigensystem(H, detail::two_donor_pin(sys, opt.nuclear_pinning));
    const HermitianOperator drive = two_donor_esr_drive(p);
    const double element = std::abs((es.vectors.col(line.line.f).adjoint() * drive.matrix() *
                                     es.vectors.col(line.line.i))(0, 0));
    require(element > 0.0, "target line has no drive matrix element");
    const double amplitude = rabi_frequency / element;

    // dressed computational basis: eigenvector closest to |s1 s2 n1 n2>
    const Eigen::Index d1 = p.species1.I.multiplicity(), d2 = p.species2.I.multiplicity();
    const Eigen::Index n1 = line.nuclear[0] > 0 ? 0 : d1 - 1;
    const Eigen::Index n2 = line.nuclear[1] > 0 ? 0 : d2 - 1;
    std::array<Vector, 4> basis;
    for (int k = 0; k < 4; ++k) {
        const Eigen::Index e = k;  // electron index: up-up, up-down, down-up, down-down
        const Eigen::Index idx = (e * d1 + n1) * d2 + n2;
        Eigen::Index best = 0;
        es.vectors.row(idx).cwiseAbs2().maxCoeff(&best);
        basis[k] = es.vectors.col(best);
    }

    PulseSequence seq;
    seq.add(PulseSegment::drive(SegmentKind::mw_drive, t, line.line.frequency, amplitude, 0.0, drive));
    PropagationOptions po;
    po.frame_operator = two_donor_total_m(p);
    po.frame_frequency = line.line.frequency;
    Matrix M(4, 4);
    for (int b = 0; b < 4; ++b) {
        const auto traj = propagate_unitary(H, seq, QuantumState::unchecked_pure(basis[b]), po);
        const Vector out = traj.final_state().vector();
        for (int a = 0; a < 4; ++a) M(a, b) = basis[a].dot(out);
    }
    CrotGateResult res;
    res.gate = M;
    res.target = ideal_crot(line.target, line.control_state);
    res.fidelity = detail::phase_corrected_fidelity(M, res.target);
    res.drive_amplitude = amplitude;
    res.duration = t;
    res.line = line;
    return res;
}

// ---------------------------------------------------------------------------
// Flip-flop qubit

struct FlipFlopParams {
    double A_eff = 117.53;  // MHz
    double B0 = 0.0;        // T
    double gamma_plus = kGammaElectron + 17.23;  // MHz/T, gamma_e + gamma_n
    std::optional<double> dA_dE_ac;              // MHz per V/m
    double r = 200.0;                            // nm
    double g_ref = 10.0;                         // MHz at r_ref
    double r_ref = 200.0;                        // nm

    void validate() const {
        require(std::isfinite(A_eff) && A_eff > 0.0, "A_eff must be > 0");
        require(std::isfinite(B0) && B0 >= 0.0, "B0 must be >= 0");
        require(std::isfinite(gamma_plus) && gamma_plus > 0.0, "gamma_plus must be > 0");
        require(r > 0.0 && r_ref > 0.0, "distances must be > 0");
    }
    /// Checks A_eff against the hyperfine coupling of the host species.
    void validate_for(const DonorSpecies& s) const {
        validate();
        require(A_eff <= s.A, "A_eff must not exceed the species hyperfine coupling");
    }
};

inline FlipFlopParams flipflop_params_for(const DonorSpecies& s, double B0) {
    FlipFlopParams p;
    p.A_eff = s.A;
    p.B0 = B0;
    p.gamma_plus = kGammaElectron + s.gamma_n;
    return p;
}

/// sqrt((gamma+ B0)^2 + A_eff^2), MHz.
inline double flipflop_splitting(const FlipFlopParams& p) {
    p.validate();
    return std::hypot(p.gamma_plus * p.B0, p.A_eff);
}

/// Eigenvalue gap of the single-donor Hamiltonian (A set to A_eff) restricted
/// to span{|up, -I>, |down, -I + 1>}, an invariant subspace of H.
inline double flipflop_subspace_gap(const DonorSpecies& species, double A_eff, double B0) {
    DonorSpecies s = species;
    s.A = A_eff;
    const Matrix H = build_static_hamiltonian(s, B0, true).matrix();
    const Eigen::Index dI = s.I.multiplicity();
    const std::array<Eigen::Index, 2> idx{dI - 1, dI + dI - 2};
    Matrix block(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) block(a, b) = H(idx[a], idx[b]);
    const EigenSystem es = diagonalize(HermitianOperator(block));
    return es.values(1) - es.values(0);
}

/// Electric dipole coupling g_ref (r_ref / r)^3, MHz.
inline double flipflop_dipole_coupling(double r, double g_ref = 10.0, double r_ref = 200.0) {
    require(r > 0.0 && std::isfinite(r), "r must be > 0");
    require(r_ref > 0.0, "r_ref must be > 0");
    return g_ref * std::pow(r_ref / r, 3);
}

struct EdsrResult {
    double rabi_frequency = 0.0;  // MHz
    double pi_time = 0.0;         // us, infinite when not driven
    double projection = 0.0;      // transverse fraction gamma+ B0 / eps_ff
    double splitting = 0.0;       // eps_ff, MHz
};

/// Modulating A by dA cos(2 pi eps_ff t) drives the flip-flop transition at
/// (dA / 2) * gamma+ B0 / eps_ff.
inline EdsrResult edsr_rabi(const FlipFlopParams& p, double E_ac) {
    p.validate();
    require(p.dA_dE_ac.has_value(), "missing sensitivity dA_dE_ac");
    require(std::isfinite(E_ac) && E_ac >= 0.0, "E_ac must be >= 0");
    EdsrResult r;
    r.splitting = flipflop_splitting(p);
    r.projection = p.gamma_plus * p.B0 / r.splitting;
    r.rabi_frequency = 0.5 * *p.dA_dE_ac * E_ac * r.projection;
    r.pi_time = r.rabi_frequency > 0.0 ? 0.5 / std::abs(r.rabi_frequency) : INFINITY;
    return r;
}

/// E_ac giving the requested pi time.
inline double edsr_field_for_pi_time(const FlipFlopParams& p, double pi_time) {
    require(pi_time > 0.0, "pi time must be > 0");
    const EdsrResult unit = edsr_rabi(p, 1.0);
    require(unit.rabi_frequency != 0.0, "flip-flop transition is not driven at these parameters");
    return 0.5 / pi_time / std::abs(unit.rabi_frequency);
}

struct ClockPoint {
    double E = 0.0;          // field at which d eps/dE = 0
    double splitting = 0.0;  // eps_ff there, MHz
    double second_derivative = 0.0;
    bool second_order = false;  // |d2 eps/dE2| below tolerance as well
};

/// Roots of d eps_ff / dE on [E_lo, E_hi] for a user-supplied A_eff(E).
/// A' and A'' are central differences with step h; eps derivatives follow by
/// the chain rule.
inline std::vector<ClockPoint> flipflop_clock_points(const std::function<double(double)>& A_of_E, double E_lo,
                                                     double E_hi, const FlipFlopParams& base, int grid = 400,
                                                     double second_order_tol = 1e-6, double h = 0.0) {
    require(E_hi > E_lo && grid >= 2, "clock points: empty field interval");
    if (h == 0.0) h = (E_hi - E_lo) * 1e-3;
    const double z = base.gamma_plus * base.B0;
    auto eps = [&](double E) { return std::hypot(z, A_of_E(E)); };
    auto a1 = [&](double E) { return (A_of_E(E + h) - A_of_E(E - h)) / (2.0 * h); };
    auto d1 = [&](double E) { return A_of_E(E) * a1(E) / eps(E); };
    auto d2 = [&](double E) {
        const double a = A_of_E(E), ap = a1(E), e = eps(E);
        const double app = (A_of_E(E + h) - 2.0 * a + A_of_E(E - h)) / (h * h);
        return (ap * ap + a * app) / e - std::pow(a * ap, 2) / (e * e * e);
    };
    std::vector<ClockPoint> out;
    const double step = (E_hi - E_lo) / grid;
    double prev_x = E_lo, prev = d1(E_lo);
    for (int k = 1; k <= grid; ++k) {
        const double x = E_lo + k * step;
        const double v = d1(x);
        double root = NAN;
        if (prev == 0.0) {
            root = prev_x;
        } else if (v != 0.0 && (prev < 0.0) != (v < 0.0)) {
            boost::uintmax_t iters = 100;
            const auto r = boost::math::tools::toms748_solve(d1, prev_x, x, prev, v,
                                                             boost::math::tools::eps_tolerance<double>(50), iters);
            root = 0.5 * (r.first + r.second);
        }
        if (std::isfinite(root)) {
            ClockPoint c;
            c.E = root;
            c.splitting = eps(root);
            c.second_derivative = d2(root);
            c.second_order = std::abs(c.second_derivative) <= second_order_tol;
            out.push_back(c);
        }
        prev_x = x;
        prev = v;
    }
    if (prev == 0.0 && (out.empty() || out.back().E != prev_x))
        out.push_back({prev_x, eps(prev_x), d2(prev_x), std::abs(d2(prev_x)) <= second_order_tol});
    return out;
}

// ---------------------------------------------------------------------------
// XY (flip-flop) two-qubit gates

/// H = (g/2)(XX + YY) on two qubits: off-diagonal element g between |01> and |10>.
inline HermitianOperator xy_hamiltonian(double g) {
    Matrix h = Matrix::Zero(4, 4);
    h(1, 2) = g;
    h(2, 1) = g;
    return HermitianOperator(h);
}

/// exp(-i theta) rotation in the {|01>, |10>} subspace with theta = 2 pi g t.
inline Matrix xy_unitary_closed_form(double g, double t) {
    const double th = kTwoPi * g * t;
    Matrix u = Matrix::Identity(4, 4);
    u(1, 1) = std::cos(th);
    u(2, 2) = std::cos(th);
    u(1, 2) = -kI * std::sin(th);
    u(2, 1) = -kI * std::sin(th);
    return u;
}

/// sqrt(iSWAP) in the convention of xy_hamiltonian: exp(-i pi/8 (XX + YY)).
inline Matrix sqrt_iswap() { return xy_unitary_closed_form(1.0, 1.0 / 8.0); }
inline Matrix iswap() { return xy_unitary_closed_form(1.0, 1.0 / 4.0); }

struct XyGateResult {
    Matrix unitary;   // present when dephasing_rate == 0
    Matrix superop;   // column-stacking superoperator
    double fidelity = 0.0;  // against sqrt(iSWAP)
};

/// Evolution under xy_hamiltonian(g) for time t, with optional pure dephasing
/// of each qubit (jump sigma_z / sqrt(2) at `dephasing_rate`, 1/us).
inline XyGateResult xy_gate(double g, double t, double dephasing_rate = 0.0) {
    require(g > 0.0 && std::isfinite(g), "g must be > 0");
    require(t >= 0.0 && std::isfinite(t), "t must be >= 0");
    require(dephasing_rate >= 0.0 && std::isfinite(dephasing_rate), "dephasing rate must be >= 0");
    const HermitianOperator H = xy_hamiltonian(g);
    XyGateResult r;
    if (dephasing_rate == 0.0) {
        r.unitary = propagator(H, t);
        r.superop = unitary_superoperator(r.unitary);
        r.fidelity = average_gate_fidelity(r.unitary, sqrt_iswap());
        return r;
    }
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 1.0 / std::sqrt(2.0);
    z(1, 1) = -1.0 / std::sqrt(2.0);
    const Matrix id2 = Matrix::Identity(2, 2);
    const std::vector<JumpOperator> jumps{{dephasing_rate, kron(z, id2)}, {dephasing_rate, kron(id2, z)}};
    r.superop = expm(liouvillian(H.matrix(), jumps) * cplx(t));
    r.fidelity = channel_fidelity(r.superop, sqrt_iswap());
    return r;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

}  // namespace donorsim
