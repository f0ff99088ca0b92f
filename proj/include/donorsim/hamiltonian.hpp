#pragma once

#include "donorsim/registry.hpp"
#include "donorsim/spin.hpp"

namespace donorsim {

/// Quadrupole term f_Q [3Iz^2 - I^2 + eta (Ix^2 - Iy^2)]. f_Q (MHz) absorbs
/// the Sternheimer factor, eQ V_zz / h and the 4I(2I-1) normalisation.
struct QuadrupoleParams {
    double f_Q = 0.0;
    double eta = 0.0;

    void validate() const {
        require(std::isfinite(f_Q), "quadrupole f_Q must be finite");
        require(eta >= 0.0 && eta <= 1.0, "quadrupole asymmetry eta must lie in [0, 1]");
    }
};

namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double boltzmann = 1.380649e-23;             // J/K
}  // namespace constants

/// f_Q in MHz from the quadrupole moment (1e-28 m^2), the principal EFG
/// component V_zz (V/m^2) and the Sternheimer factor.
inline double quadrupole_prefactor(double Q_1e28_m2, double V_zz, double sternheimer, Spin I) {
    require(I.twice() > 1, "quadrupole prefactor undefined for I = 1/2");
    const double i = I.value();
    const double hz = sternheimer * constants::elementary_charge * Q_1e28_m2 * 1e-28 * V_zz /
                      (4.0 * i * (2.0 * i - 1.0) * constants::planck);
    return hz * 1e-6;
}

inline HermitianOperator quadrupole_operator(const SpinOperators& I, const QuadrupoleParams& q) {
    const Matrix shape = 3.0 * I.z * I.z - I.sq + q.eta * (I.x * I.x - I.y * I.y);
    return HermitianOperator(q.f_Q * shape);
}

struct StaticHamiltonianOptions {
    double gamma_e = kGammaElectron;  // MHz/T
};

/// Static single-donor Hamiltonian in MHz.
///
/// neutral: (gamma_e Sz - gamma_n Iz) B0 + A S.I + H_Q on electron (x) nucleus
/// ionized: -gamma_n Iz B0 + H_Q on the nucleus alone
inline HermitianOperator build_static_hamiltonian(const DonorSpecies& species, double B0, bool neutral,
                                                  const QuadrupoleParams& quad = {},
                                                  const StaticHamiltonianOptions& opt = {}) {
    require(B0 >= 0.0 && std::isfinite(B0), "B0 must be a finite non-negative field");
    quad.validate();
    if (quad.f_Q != 0.0)
        require(species.I.twice() > 1, "quadrupole interaction requested for an I = 1/2 nucleus");

    if (!neutral) {
        const SpinOperators I = spin_operators(species.I);
        Matrix h = -species.gamma_n * B0 * I.z;
        if (quad.f_Q != 0.0) h += quadrupole_operator(I, quad).matrix();
        return HermitianOperator(h);
    }

    const SpinSystem sys = SpinSystem::donor(species.I);
    const SpinOperators S = sys.lifted(0);
    const SpinOperators I = sys.lifted(1);
    Matrix h = (opt.gamma_e * S.z - species.gamma_n * I.z) * B0 + species.A * dot(S, I);
    if (quad.f_Q != 0.0) h += quadrupole_operator(I, quad).matrix();
    return HermitianOperator(h);
}

/// Magnetic drive operator gamma_e Sx - gamma_n Ix (MHz/T) for a neutral donor,
/// or -gamma_n Ix for an ionized one. Multiply by B1 cos(2 pi f t).
inline HermitianOperator magnetic_drive_operator(const DonorSpecies& species, bool neutral,
                                                 const StaticHamiltonianOptions& opt = {}) {
    if (!neutral) return HermitianOperator(-species.gamma_n * spin_operators(species.I).x);
    const SpinSystem sys = SpinSystem::donor(species.I);
    return HermitianOperator(opt.gamma_e * sys.lifted(0).x - species.gamma_n * sys.lifted(1).x);
}

}  // namespace donorsim
