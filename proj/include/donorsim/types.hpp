#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace donorsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

/// Raised for invalid user input: bad parameters, inconsistent dimensions,
/// unknown names.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

/// Largest absolute entry of A - A^dagger.
inline double hermiticity_defect(const Matrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Dense Hermitian matrix. Hamiltonians are in MHz; spin operators are
/// dimensionless. Construction checks Hermiticity to 1e-12 per entry and then
/// symmetrizes so downstream eigensolvers see an exactly Hermitian matrix.
class HermitianOperator {
public:
    static constexpr double kTolerance = 1e-12;

    HermitianOperator() = default;

    explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
        require(m_.rows() == m_.cols(), "HermitianOperator: matrix must be square");
        const double scale = std::max(1.0, m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0);
        if (hermiticity_defect(m_) > kTolerance * scale)
            throw InvalidArgument("HermitianOperator: matrix is not Hermitian");
        m_ = 0.5 * (m_ + m_.adjoint()).eval();
    }

    static HermitianOperator zero(Eigen::Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }
    static HermitianOperator identity(Eigen::Index dim) {
        return HermitianOperator(Matrix::Identity(dim, dim));
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

    HermitianOperator operator+(const HermitianOperator& o) const {
        check_dims(o);
        return HermitianOperator(m_ + o.m_);
    }
    HermitianOperator operator-(const HermitianOperator& o) const {
        check_dims(o);
        return HermitianOperator(m_ - o.m_);
    }
    HermitianOperator& operator+=(const HermitianOperator& o) {
        check_dims(o);
        m_ += o.m_;
        return *this;
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& h) {
        return HermitianOperator(s * h.m_);
    }
    HermitianOperator operator*(double s) const { return HermitianOperator(s * m_); }

private:
    void check_dims(const HermitianOperator& o) const {
        require(dim() == o.dim(), "HermitianOperator: dimension mismatch");
    }
    Matrix m_;
};

/// Sorted eigenvalues and column eigenvectors of a Hermitian operator.
struct EigenSystem {
    RealVector values;
    Matrix vectors;
};

inline EigenSystem diagonalize(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace donorsim
