#pragma once

#include <variant>

#include "donorsim/types.hpp"

namespace donorsim {

/// Pure state vector or density matrix.
///
/// Invariants checked on construction: a pure state has unit norm (1e-9);
/// a density matrix has unit trace (1e-9), is Hermitian (1e-10) and has no
/// eigenvalue below -1e-10.
class QuantumState {
public:
    static constexpr double kNormTolerance = 1e-9;
    static constexpr double kPsdTolerance = 1e-10;

    QuantumState() = default;

    static QuantumState pure(Vector psi) {
        require(psi.size() > 0, "QuantumState: empty vector");
        require(std::abs(psi.norm() - 1.0) <= kNormTolerance, "QuantumState: state vector is not normalised");
        QuantumState s;
        s.data_ = std::move(psi);
        return s;
    }

    static QuantumState mixed(Matrix rho) {
        require(rho.rows() == rho.cols() && rho.rows() > 0, "QuantumState: density matrix must be square");
        require(std::abs(rho.trace() - cplx(1.0)) <= kNormTolerance, "QuantumState: trace must be 1");
        require(hermiticity_defect(rho) <= kPsdTolerance, "QuantumState: density matrix is not Hermitian");
        Matrix herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
        require(es.eigenvalues().minCoeff() >= -kPsdTolerance, "QuantumState: density matrix is not positive");
        QuantumState s;
        s.data_ = std::move(herm);
        return s;
    }

    /// Basis state |k> of a dim-dimensional space.
    static QuantumState basis(Eigen::Index dim, Eigen::Index k) {
        require(k >= 0 && k < dim, "QuantumState::basis: index out of range");
        Vector v = Vector::Zero(dim);
        v(k) = 1.0;
        return pure(std::move(v));
    }

    /// Wraps propagated data without re-checking; used by integrators whose
    /// own error control is tested separately.
    static QuantumState unchecked_pure(Vector psi) {
        QuantumState s;
        s.data_ = std::move(psi);
        return s;
    }
    static QuantumState unchecked_mixed(Matrix rho) {
        QuantumState s;
        s.data_ = std::move(rho);
        return s;
    }

    bool is_pure() const { return std::holds_alternative<Vector>(data_); }
    Eigen::Index dim() const { return is_pure() ? vector().size() : density().rows(); }

    const Vector& vector() const {
        require(is_pure(), "QuantumState: not a pure state");
        return std::get<Vector>(data_);
    }
    const Matrix& density() const {
        require(!is_pure(), "QuantumState: not a density matrix");
        return std::get<Matrix>(data_);
    }

    Matrix to_density() const {
        if (is_pure()) return vector() * vector().adjoint();
        return density();
    }

    double trace() const { return is_pure() ? vector().squaredNorm() : density().trace().real(); }

    double purity() const {
        if (is_pure()) return std::pow(vector().squaredNorm(), 2);
        const Matrix& r = density();
        return (r * r).trace().real();
    }

    double expectation(const Matrix& op) const {
        if (is_pure()) return (vector().adjoint() * op * vector())(0, 0).real();
        return (density() * op).trace().real();
    }
    double expectation(const HermitianOperator& op) const { return expectation(op.matrix()); }

    /// Probability of finding the system in the pure state `target`.
    double overlap_probability(const Vector& target) const {
        if (is_pure()) return std::norm(target.dot(vector()));
        return (target.adjoint() * density() * target)(0, 0).real();
    }

private:
    std::variant<Vector, Matrix> data_;
};

}  // namespace donorsim
