#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "donorsim/types.hpp"

namespace donorsim {

/// Spin quantum number stored as twice its value so that half-integers are exact.
class Spin {
public:
    constexpr Spin() = default;

    static constexpr Spin from_twice(int twice) {
        if (twice < 1) throw InvalidArgument("spin must be >= 1/2");
        Spin s;
        s.twice_ = twice;
        return s;
    }

    /// Accepts 0.5, 1, 1.5, ...; anything not a multiple of 1/2 is rejected.
    static Spin from_double(double value) {
        const double twice = 2.0 * value;
        if (!std::isfinite(value) || std::abs(twice - std::round(twice)) > 1e-12 || twice < 0.5)
            throw InvalidArgument("spin must be a positive multiple of 1/2, got " + std::to_string(value));
        return from_twice(static_cast<int>(std::lround(twice)));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr int multiplicity() const { return twice_ + 1; }
    constexpr double casimir() const { return value() * (value() + 1.0); }

    /// Magnetic quantum number of basis index k (k = 0 is m = +I).
    constexpr double m_of_index(int k) const { return value() - k; }

    /// Basis index of m; throws unless |m| <= I in integer steps from I.
    int index_of_m(double m) const {
        const double k = value() - m;
        if (std::abs(k - std::round(k)) > 1e-9 || k < -1e-9 || k > twice_ + 1e-9)
            throw InvalidArgument("invalid magnetic quantum number " + std::to_string(m) +
                                  " for spin " + to_string());
        return static_cast<int>(std::lround(k));
    }

    std::string to_string() const {
        return twice_ % 2 == 0 ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
    }

    friend constexpr bool operator==(Spin a, Spin b) { return a.twice_ == b.twice_; }

private:
    int twice_ = 1;
};

/// Angular-momentum matrices in the |m = I>, |I-1>, ..., |-I> basis.
struct SpinOperators {
    Spin spin;
    Matrix x, y, z;
    Matrix plus, minus;
    Matrix sq;  // I^2

    Eigen::Index dim() const { return z.rows(); }
    HermitianOperator hx() const { return HermitianOperator(x); }
    HermitianOperator hy() const { return HermitianOperator(y); }
    HermitianOperator hz() const { return HermitianOperator(z); }
};

inline SpinOperators spin_operators(Spin s) {
    const int d = s.multiplicity();
    const double j = s.value();
    SpinOperators ops{s, Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d),
                      Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (int k = 0; k < d; ++k) {
        const double m = s.m_of_index(k);
        ops.z(k, k) = m;
        if (k + 1 < d) {
            // <m|I+|m-1> = sqrt(j(j+1) - m(m-1))
            ops.plus(k, k + 1) = std::sqrt(j * (j + 1.0) - m * (m - 1.0));
        }
    }
    ops.minus = ops.plus.adjoint();
    ops.x = 0.5 * (ops.plus + ops.minus);
    ops.y = (-0.5 * kI) * (ops.plus - ops.minus);
    ops.sq = ops.x * ops.x + ops.y * ops.y + ops.z * ops.z;
    return ops;
}

inline SpinOperators spin_operators(double spin) { return spin_operators(Spin::from_double(spin)); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

enum class FactorKind { electron, nucleus };

struct SpinFactor {
    FactorKind kind;
    Spin spin;
    Eigen::Index dim() const { return spin.multiplicity(); }
};

/// Ordered tensor-product space. The factor order fixes the basis ordering:
/// electron before nucleus, donor 1 before donor 2.
class SpinSystem {
public:
    SpinSystem() = default;
    explicit SpinSystem(std::vector<SpinFactor> factors) : factors_(std::move(factors)) {
        require(!factors_.empty(), "SpinSystem needs at least one factor");
    }

    static SpinSystem donor(Spin nuclear_spin) {
        return SpinSystem({{FactorKind::electron, Spin::from_twice(1)}, {FactorKind::nucleus, nuclear_spin}});
    }

    const std::vector<SpinFactor>& factors() const { return factors_; }

    Eigen::Index dim() const {
        return std::accumulate(factors_.begin(), factors_.end(), Eigen::Index{1},
                               [](Eigen::Index acc, const SpinFactor& f) { return acc * f.dim(); });
    }

    /// Lifts an operator acting on one factor to the full space.
    Matrix embed(const Matrix& op, std::size_t factor) const {
        require(factor < factors_.size(), "SpinSystem::embed: factor index out of range");
        require(op.rows() == factors_[factor].dim() && op.cols() == op.rows(),
                "SpinSystem::embed: operator dimension does not match factor");
        Matrix out = Matrix::Identity(1, 1);
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            const Matrix& piece =
                k == factor ? op : Matrix(Matrix::Identity(factors_[k].dim(), factors_[k].dim()));
            out = kron(out, piece);
        }
        return out;
    }

    /// Spin operators of one factor, lifted to the full space.
    SpinOperators lifted(std::size_t factor) const {
        SpinOperators local = spin_operators(factors_.at(factor).spin);
        return {local.spin,         embed(local.x, factor),    embed(local.y, factor),
                embed(local.z, factor), embed(local.plus, factor), embed(local.minus, factor),
                embed(local.sq, factor)};
    }

private:
    std::vector<SpinFactor> factors_;
};

/// S1.S2 for two lifted spin operator sets.
inline Matrix dot(const SpinOperators& a, const SpinOperators& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

}  // namespace donorsim
