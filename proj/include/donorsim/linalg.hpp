#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "donorsim/spin.hpp"
#include "donorsim/types.hpp"

namespace donorsim {

/// exp(Omega) for anti-Hermitian Omega, via the Hermitian eigenproblem of -i Omega.
inline Matrix exp_antihermitian(const Matrix& omega) {
    Matrix g = (-kI) * omega;
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in exp_antihermitian");
    const Vector phases = (kI * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(-i 2 pi H t) for H in MHz and t in microseconds.
inline Matrix propagator(const Matrix& h, double t) { return exp_antihermitian((-kI * kTwoPi * t) * h); }
inline Matrix propagator(const HermitianOperator& h, double t) { return propagator(h.matrix(), t); }

inline Matrix expm(const Matrix& a) { return a.exp(); }

/// Gauss-Legendre nodes for the two-point fourth-order Magnus step.
inline constexpr double kMagnusNodeOffset = 0.28867513459481288225;  // sqrt(3)/6

/// Fourth-order Magnus exponent from the generator evaluated at
/// t + h(1/2 - sqrt(3)/6) and t + h(1/2 + sqrt(3)/6).
inline Matrix magnus4_exponent(const Matrix& a1, const Matrix& a2, double h) {
    constexpr double c = 0.14433756729740644113;  // sqrt(3)/12
    return (0.5 * h) * (a1 + a2) + (c * h * h) * (a2 * a1 - a1 * a2);
}

/// Column-stacking vectorisation: vec(A rho B) = (B^T (x) A) vec(rho).
inline Vector vec(const Matrix& rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

inline Matrix unvec(const Vector& v, Eigen::Index dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

struct JumpOperator {
    double rate = 0.0;  // 1/us
    Matrix op;
};

/// Superoperator for d rho/dt = -i 2 pi [H, rho] + sum_k rate_k (L rho L^+ - {L^+ L, rho}/2).
inline Matrix liouvillian(const Matrix& h, const std::vector<JumpOperator>& jumps) {
    const Eigen::Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    Matrix L = (-kI * kTwoPi) * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& j : jumps) {
        if (j.rate == 0.0) continue;
        const Matrix ldl = j.op.adjoint() * j.op;
        L += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
    }
    return L;
}

/// Average gate fidelity of an operator M (restricted to the computational
/// subspace, possibly non-unitary) against a unitary target V of dimension d.
inline double average_gate_fidelity(const Matrix& m, const Matrix& target) {
    const double d = static_cast<double>(target.rows());
    const cplx tr = (target.adjoint() * m).trace();
    return ((m * m.adjoint()).trace().real() + std::norm(tr)) / (d * (d + 1.0));
}

/// Superoperator (column-stacking) of the unitary channel rho -> U rho U^+.
inline Matrix unitary_superoperator(const Matrix& u) { return kron(u.conjugate(), u); }

/// Average gate fidelity of a channel given as a superoperator against a unitary target.
inline double channel_fidelity(const Matrix& superop, const Matrix& target) {
    const double d = static_cast<double>(target.rows());
    const Matrix st = unitary_superoperator(target);
    const double process = (st.adjoint() * superop).trace().real() / (d * d);
    return (d * process + 1.0) / (d + 1.0);
}

}  // namespace donorsim
