#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "donorsim/linalg.hpp"
#include "donorsim/parallel.hpp"
#include "donorsim/spin.hpp"
#include "donorsim/state.hpp"

namespace donorsim {

using Vec3 = Eigen::Vector3d;

/// Periodically driven top H = c1 Lz + c2 Lx^2 + cd cos(2 pi nu t) Ly.
/// The quantum version reads c1 = gamma_n B0, c2 = Q, cd = gamma_n B1 with L -> I.
struct TopParams {
    double c1 = 1.0;   // MHz
    double c2 = 0.0;   // MHz per unit L^2
    double cd = 0.0;   // MHz
    double nu = 1.0;   // MHz
    double L_norm = 1.0;

    void validate() const {
        require(std::isfinite(c1) && std::isfinite(c2) && std::isfinite(cd), "top coefficients must be finite");
        require(std::isfinite(nu) && nu > 0.0, "drive frequency nu must be > 0");
        require(std::isfinite(L_norm) && L_norm > 0.0, "L_norm must be > 0");
    }
    double period() const { return 1.0 / nu; }
};

inline double top_energy(const TopParams& p, const Vec3& L, double t) {
    return p.c1 * L.z() + p.c2 * L.x() * L.x() + p.cd * std::cos(kTwoPi * p.nu * t) * L.y();
}

inline Vec3 top_gradient(const TopParams& p, const Vec3& L, double t) {
    return {2.0 * p.c2 * L.x(), p.cd * std::cos(kTwoPi * p.nu * t), p.c1};
}

/// dL/dt = 2 pi grad H x L.
inline Vec3 top_velocity(const TopParams& p, const Vec3& L, double t) {
    return kTwoPi * top_gradient(p, L, t).cross(L);
}

/// Unit vector at polar angle theta and azimuth phi.
inline Vec3 unit_vector(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

struct ClassicalTrajectory {
    std::vector<double> times;  // us, every step when the path is recorded
    std::vector<Vec3> path;     // L / L_norm
    std::vector<Vec3> strobe;   // L / L_norm at t = k / nu, k = 0..n_periods
};

namespace detail {
/// One RK4 step of length h followed by renormalisation to |L| = L_norm.
inline Vec3 top_rk4_step(const TopParams& p, const Vec3& L, double t, double h) {
    const Vec3 k1 = top_velocity(p, L, t);
    const Vec3 k2 = top_velocity(p, L + 0.5 * h * k1, t + 0.5 * h);
    const Vec3 k3 = top_velocity(p, L + 0.5 * h * k2, t + 0.5 * h);
    const Vec3 k4 = top_velocity(p, L + h * k3, t + h);
    const Vec3 next = L + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return next * (p.L_norm / next.norm());
}

inline Vec3 top_one_period(const TopParams& p, Vec3 L, int steps_per_period) {
    const double h = p.period() / steps_per_period;
    for (int s = 0; s < steps_per_period; ++s) L = top_rk4_step(p, L, s * h, h);
    return L;
}

inline void require_unit(const Vec3& L0) {
    require(L0.allFinite() && std::abs(L0.norm() - 1.0) <= 1e-9, "initial L must be a unit vector");
}
}  // namespace detail

/// Fixed-step RK4 trajectory from the unit vector L0 (scaled by L_norm).
/// Each period starts at a phase of zero, so the strobe points form the Poincare map.
inline ClassicalTrajectory classical_trajectory(const TopParams& p, const Vec3& L0, int n_periods, int steps_per_period,
                                                bool record_path = false) {
    p.validate();
    detail::require_unit(L0);
    require(steps_per_period > 0, "steps_per_period must be > 0");
    require(n_periods >= 0, "n_periods must be >= 0");
    const double T = p.period(), h = T / steps_per_period;
    ClassicalTrajectory out;
    Vec3 L = L0 * p.L_norm;
    out.strobe.push_back(L0);
    if (record_path) {
        out.times.push_back(0.0);
        out.path.push_back(L0);
    }
    for (int k = 0; k < n_periods; ++k) {
        for (int s = 0; s < steps_per_period; ++s) {
            L = detail::top_rk4_step(p, L, s * h, h);
            if (record_path) {
                out.times.push_back(k * T + (s + 1) * h);
                out.path.push_back(L / p.L_norm);
            }
        }
        out.strobe.push_back(L / p.L_norm);
    }
    return out;
}

struct LyapunovResult {
    double per_period = 0.0;  // mean log growth per drive period
    double rate = 0.0;        // 1/us
};

/// Largest Lyapunov exponent from a reference and a shadow trajectory whose
/// separation (tangent to the sphere, initial size d0) is renormalised every period.
inline LyapunovResult lyapunov_exponent(const TopParams& p, const Vec3& L0, int n_periods, int steps_per_period,
                                        double d0 = 1e-8) {
    p.validate();
    detail::require_unit(L0);
    require(n_periods > 0 && steps_per_period > 0, "n_periods and steps_per_period must be > 0");
    require(d0 > 0.0 && d0 < 1e-2, "d0 must lie in (0, 1e-2)");
    Vec3 L = L0 * p.L_norm;
    Vec3 axis = L0.cross(Vec3::UnitZ());
    if (axis.norm() < 1e-6) axis = L0.cross(Vec3::UnitX());
    Vec3 shadow = L + d0 * p.L_norm * axis.normalized();
    shadow *= p.L_norm / shadow.norm();
    double sum = 0.0;
    for (int k = 0; k < n_periods; ++k) {
        L = detail::top_one_period(p, L, steps_per_period);
        shadow = detail::top_one_period(p, shadow, steps_per_period);
        const Vec3 sep = shadow - L;
        const double d = sep.norm() / p.L_norm;
        if (!(d > 0.0) || !std::isfinite(d)) throw NumericalError("trajectory separation collapsed");
        sum += std::log(d / d0);
        shadow = L + (d0 / d) * sep;
        shadow *= p.L_norm / shadow.norm();
    }
    LyapunovResult r;
    r.per_period = sum / n_periods;
    r.rate = r.per_period * p.nu;
    return r;
}

// ---------------------------------------------------------------------------
// Quantum top

/// gamma_n B0 Iz + Q Ix^2 + gamma_n B1 cos(2 pi nu t) Iy with (c1, c2, cd) = (gamma_n B0, Q, gamma_n B1).
inline Matrix top_hamiltonian(const TopParams& p, Spin I, double t) {
    const SpinOperators s = spin_operators(I);
    return p.c1 * s.z + p.c2 * s.x * s.x + p.cd * std::cos(kTwoPi * p.nu * t) * s.y;
}

/// Spin-coherent state exp(-i phi Iz) exp(-i theta Iy) |m = I>, with <I> = I (sin th cos ph, sin th sin ph, cos th).
inline Vector spin_coherent_state(Spin I, double theta, double phi) {
    const SpinOperators s = spin_operators(I);
    Vector up = Vector::Zero(s.dim());
    up(0) = 1.0;
    const Matrix ry = exp_antihermitian((-kI * theta) * s.y);
    const Matrix rz = exp_antihermitian((-kI * phi) * s.z);
    return rz * (ry * up);
}

/// One-period unitary from fourth-order Magnus steps.
inline Matrix floquet_propagator(const TopParams& p, Spin I, int steps_per_period = 1024) {
    p.validate();
    require(steps_per_period > 0, "steps_per_period must be > 0");
    const double h = p.period() / steps_per_period;
    const Eigen::Index d = I.multiplicity();
    Matrix U = Matrix::Identity(d, d);
    for (int k = 0; k < steps_per_period; ++k) {
        const double t = k * h;
        const Matrix a1 = (-kI * kTwoPi) * top_hamiltonian(p, I, t + h * (0.5 - kMagnusNodeOffset));
        const Matrix a2 = (-kI * kTwoPi) * top_hamiltonian(p, I, t + h * (0.5 + kMagnusNodeOffset));
        U = exp_antihermitian(magnus4_exponent(a1, a2, h)) * U;
    }
    return U;
}

/// One-period channel (column-stacked superoperator) with Lindblad dephasing
/// rate * D[Iz], from fourth-order Magnus steps of the Liouvillian.
inline Matrix floquet_superoperator(const TopParams& p, Spin I, double dephasing_rate, int steps_per_period = 1024) {
    p.validate();
    require(std::isfinite(dephasing_rate) && dephasing_rate >= 0.0, "dephasing rate must be >= 0");
    require(steps_per_period > 0, "steps_per_period must be > 0");
    if (dephasing_rate == 0.0) return unitary_superoperator(floquet_propagator(p, I, steps_per_period));
    const double h = p.period() / steps_per_period;
    const std::vector<JumpOperator> jumps{{dephasing_rate, spin_operators(I).z}};
    const Eigen::Index d2 = I.multiplicity() * I.multiplicity();
    Matrix S = Matrix::Identity(d2, d2);
    for (int k = 0; k < steps_per_period; ++k) {
        const double t = k * h;
        const Matrix l1 = liouvillian(top_hamiltonian(p, I, t + h * (0.5 - kMagnusNodeOffset)), jumps);
        const Matrix l2 = liouvillian(top_hamiltonian(p, I, t + h * (0.5 + kMagnusNodeOffset)), jumps);
        S = expm(magnus4_exponent(l1, l2, h)) * S;
    }
    return S;
}

/// States at t = k / nu for k = 0..n_periods.
inline std::vector<QuantumState> quantum_stroboscopic(const TopParams& p, Spin I, const QuantumState& state0,
                                                      int n_periods, double dephasing_rate,
                                                      int steps_per_period = 1024) {
    require(state0.dim() == I.multiplicity(), "initial state dimension differs from 2I+1");
    require(n_periods >= 0, "n_periods must be >= 0");
    std::vector<QuantumState> out{state0};
    if (dephasing_rate == 0.0 && state0.is_pure()) {
        const Matrix U = floquet_propagator(p, I, steps_per_period);
        Vector psi = state0.vector();
        for (int k = 0; k < n_periods; ++k) {
            psi = U * psi;
            out.push_back(QuantumState::unchecked_pure(psi));
        }
        return out;
    }
    const Matrix S = floquet_superoperator(p, I, dephasing_rate, steps_per_period);
    Vector r = vec(state0.to_density());
    for (int k = 0; k < n_periods; ++k) {
        r = S * r;
        out.push_back(QuantumState::unchecked_mixed(unvec(r, I.multiplicity())));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Maps over spin-coherent initial states

struct SphereGrid {
    int n_theta = 12;
    int n_phi = 24;

    void validate() const { require(n_theta > 0 && n_phi > 0, "grid must be nonempty"); }
    std::size_t size() const { return static_cast<std::size_t>(n_theta) * n_phi; }
    /// Cell centres: theta in (0, pi), phi in (-pi, pi).
    double theta(int i) const { return kPi * (i + 0.5) / n_theta; }
    double phi(int j) const { return -kPi + kTwoPi * (j + 0.5) / n_phi; }
};

struct MapPoint {
    double theta = 0.0;
    double phi = 0.0;
    double value = 0.0;
};

/// tr(rho^2) after n_periods for each spin-coherent initial state of the grid.
inline std::vector<MapPoint> purity_map(const TopParams& p, Spin I, const SphereGrid& grid, int n_periods,
                                        double dephasing_rate, int steps_per_period = 1024) {
    grid.validate();
    require(n_periods >= 0, "n_periods must be >= 0");
    const Matrix S = floquet_superoperator(p, I, dephasing_rate, steps_per_period);
    Matrix Sn = Matrix::Identity(S.rows(), S.cols());
    for (int k = 0; k < n_periods; ++k) Sn = S * Sn;
    std::vector<MapPoint> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / grid.n_phi, j = static_cast<int>(idx) % grid.n_phi;
        const Vector psi = spin_coherent_state(I, grid.theta(i), grid.phi(j));
        const Matrix rho = unvec(Sn * vec(psi * psi.adjoint()), I.multiplicity());
        out[idx] = {grid.theta(i), grid.phi(j), (rho * rho).trace().real()};
    });
    return out;
}

/// Largest Lyapunov exponent (per period) for each grid point used as L0.
inline std::vector<MapPoint> lyapunov_map(const TopParams& p, const SphereGrid& grid, int n_periods,
                                          int steps_per_period) {
    grid.validate();
    std::vector<MapPoint> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / grid.n_phi, j = static_cast<int>(idx) % grid.n_phi;
        const double th = grid.theta(i), ph = grid.phi(j);
        out[idx] = {th, ph, lyapunov_exponent(p, unit_vector(th, ph), n_periods, steps_per_period).per_period};
    });
    return out;
}

struct RegionComparison {
    std::vector<MapPoint> purity;
    std::vector<MapPoint> lyapunov;  // per period
    double mean_chaotic = 0.0;
    double mean_regular = 0.0;
    int n_chaotic = 0;
    int n_regular = 0;
    /// 1 - mean_chaotic / mean_regular
    double relative_gap = 0.0;
};

/// Purity map split by the classical classification of each grid point
/// (Lyapunov exponent per period above `threshold` counts as chaotic). The
/// classical run uses |L| = I so the coefficients carry over unchanged.
inline RegionComparison chaos_region_comparison(const TopParams& p, Spin I, const SphereGrid& grid, int n_periods,
                                                double dephasing_rate, int steps_per_period, int lyapunov_periods,
                                                int lyapunov_steps, double threshold) {
    TopParams classical = p;
    classical.L_norm = I.value();
    RegionComparison r;
    r.lyapunov = lyapunov_map(classical, grid, lyapunov_periods, lyapunov_steps);
    r.purity = purity_map(p, I, grid, n_periods, dephasing_rate, steps_per_period);
    double sc = 0.0, sr = 0.0;
    for (std::size_t k = 0; k < r.purity.size(); ++k) {
        if (r.lyapunov[k].value > threshold) {
            sc += r.purity[k].value;
            ++r.n_chaotic;
        } else {
            sr += r.purity[k].value;
            ++r.n_regular;
        }
    }
    if (r.n_chaotic == 0 || r.n_regular == 0)
        throw NumericalError("purity comparison needs both chaotic and regular grid points");
    r.mean_chaotic = sc / r.n_chaotic;
    r.mean_regular = sr / r.n_regular;
    r.relative_gap = 1.0 - r.mean_chaotic / r.mean_regular;
    return r;
}

/// Mixed-phase-space defaults for I = 7/2 (123Sb): about 60% of the sphere is chaotic.
struct ChaosDefaults {
    TopParams top{1.0, 0.5 / 3.5, 0.25, 1.0, 3.5};
    int twice_I = 7;
    double dephasing_rate = 0.01;  // 1/us
    int n_periods = 20;
    int steps_per_period = 256;
    SphereGrid grid{10, 20};
    int lyapunov_periods = 200;
    int lyapunov_steps = 200;
    double lyapunov_threshold = 0.07;
    double chaotic_theta = 0.3, chaotic_phi = 0.0;
    double regular_theta = kPi - 0.3, regular_phi = 0.0;
};

}  // namespace donorsim
