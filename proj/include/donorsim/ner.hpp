#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "donorsim/hamiltonian.hpp"
#include "donorsim/protocols.hpp"
#include "donorsim/spectrum.hpp"

namespace donorsim {

enum class QuadraticOp { IxIz_sym, IyIz_sym, IxIy_sym, Ix2_minus_Iy2, Ix2, Iy2, Iz2 };

inline std::string to_string(QuadraticOp op) {
    switch (op) {
        case QuadraticOp::IxIz_sym: return "IxIz";
        case QuadraticOp::IyIz_sym: return "IyIz";
        case QuadraticOp::IxIy_sym: return "IxIy";
        case QuadraticOp::Ix2_minus_Iy2: return "Ix2-Iy2";
        case QuadraticOp::Ix2: return "Ix2";
        case QuadraticOp::Iy2: return "Iy2";
        case QuadraticOp::Iz2: return "Iz2";
    }
    return "?";
}

inline QuadraticOp quadratic_op_from_string(const std::string& s) {
    for (auto op : {QuadraticOp::IxIz_sym, QuadraticOp::IyIz_sym, QuadraticOp::IxIy_sym, QuadraticOp::Ix2_minus_Iy2,
                    QuadraticOp::Ix2, QuadraticOp::Iy2, QuadraticOp::Iz2})
        if (to_string(op) == s) return op;
    throw InvalidArgument("unknown quadratic operator '" + s + "'");
}

/// IxIz_sym = IxIz + IzIx (likewise for the other mixed products);
/// Ix2_minus_Iy2 = Ix^2 - Iy^2 = (I+^2 + I-^2) / 2.
inline Matrix quadratic_operator(Spin I, QuadraticOp op) {
    const SpinOperators s = spin_operators(I);
    switch (op) {
        case QuadraticOp::IxIz_sym: return s.x * s.z + s.z * s.x;
        case QuadraticOp::IyIz_sym: return s.y * s.z + s.z * s.y;
        case QuadraticOp::IxIy_sym: return s.x * s.y + s.y * s.x;
        case QuadraticOp::Ix2_minus_Iy2: return s.x * s.x - s.y * s.y;
        case QuadraticOp::Ix2: return s.x * s.x;
        case QuadraticOp::Iy2: return s.y * s.y;
        case QuadraticOp::Iz2: return s.z * s.z;
    }
    return {};
}

/// |<m_to| op |m_from>|.
inline double ner_matrix_element(Spin I, double m_from, double m_to, QuadraticOp op) {
    const int a = I.index_of_m(m_from), b = I.index_of_m(m_to);
    return std::abs(quadratic_operator(I, op)(b, a));
}

/// "+5/2" style label for a magnetic quantum number.
inline std::string format_m(double m) {
    const long twice = std::lround(2.0 * m);
    std::string sign = twice > 0 ? "+" : (twice < 0 ? "-" : "");
    const long a = std::labs(twice);
    return sign + (a % 2 == 0 ? std::to_string(a / 2) : std::to_string(a) + "/2");
}

/// Electric drive: D = sum_ab T_ab (I_a I_b + I_b I_a) / 2 with a symmetric T (MHz).
struct NerDrive {
    Eigen::Matrix3d tensor = Eigen::Matrix3d::Zero();
    double frequency = 0.0;  // MHz

    static NerDrive ixiz(double strength, double frequency = 0.0) {
        NerDrive d;
        d.tensor(0, 2) = d.tensor(2, 0) = strength;
        d.frequency = frequency;
        return d;
    }
    /// strength * (Ix^2 - Iy^2): Delta m = +-2 only.
    static NerDrive quadratic_pm2(double strength, double frequency = 0.0) {
        NerDrive d;
        d.tensor(0, 0) = strength;
        d.tensor(1, 1) = -strength;
        d.frequency = frequency;
        return d;
    }

    void validate() const {
        require(tensor.allFinite(), "drive tensor must be finite");
        require((tensor - tensor.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, tensor.cwiseAbs().maxCoeff()),
                "drive tensor must be symmetric");
        require(std::isfinite(frequency) && frequency >= 0.0, "drive frequency must be >= 0");
    }

    Matrix op(Spin I) const {
        validate();
        const SpinOperators s = spin_operators(I);
        const std::array<const Matrix*, 3> c{&s.x, &s.y, &s.z};
        Matrix d = Matrix::Zero(s.dim(), s.dim());
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (tensor(a, b) != 0.0) d += 0.5 * tensor(a, b) * (*c[a] * *c[b] + *c[b] * *c[a]);
        return d;
    }
};

namespace detail {
inline HermitianOperator ionized_hamiltonian(Spin I, double gamma_n, double B0, double f_Q, double eta) {
    const SpinOperators s = spin_operators(I);
    Matrix h = -gamma_n * B0 * s.z;
    if (f_Q != 0.0 || eta != 0.0) h += quadrupole_operator(s, {f_Q, eta}).matrix();
    return HermitianOperator(h);
}

/// Spectrum lines of H under drive D with delta_m and "m_from<->m_to" labels from <Iz>;
/// lines weaker than rel_threshold * strongest are dropped.
inline std::vector<SpectrumLine> labelled_lines(Spin I, const HermitianOperator& H, const Matrix& D,
                                                double rel_threshold) {
    const SpinOperators s = spin_operators(I);
    SpectrumOptions opt;
    opt.m_operator = HermitianOperator(s.z);
    auto lines = transition_spectrum(H, HermitianOperator(D), 0.0, opt);
    double strongest = 0.0;
    for (const auto& l : lines) strongest = std::max(strongest, l.intensity);
    const EigenSystem es = diagonalize(H);
    std::vector<SpectrumLine> out;
    for (auto l : lines) {
        if (l.intensity <= rel_threshold * strongest) continue;
        auto m_of = [&](int k) {
            return (es.vectors.col(k).adjoint() * s.z * es.vectors.col(k))(0, 0).real();
        };
        const double mi = m_of(l.i), mf = m_of(l.f);
        l.label = format_m(std::round(2.0 * mi) / 2.0) + "<->" + format_m(std::round(2.0 * mf) / 2.0);
        out.push_back(l);
    }
    return out;
}
}  // namespace detail

/// Delta m = +-1 NMR lines of an ionized spin-I nucleus with quadrupole
/// coupling f_Q (3Iz^2 - I^2 + eta(Ix^2 - Iy^2)), by diagonalization. Intensities
/// are |<f|Ix|i>|^2. For eta = 0 line m <-> m-1 sits at gamma_n B0 - 3 f_Q (2m - 1).
inline std::vector<SpectrumLine> quadrupole_line_shifts(Spin I, double f_Q, double eta, double gamma_n, double B0) {
    require(I.twice() > 1, "quadrupole line shifts need I > 1/2");
    require(std::isfinite(f_Q) && std::isfinite(gamma_n) && std::isfinite(B0), "parameters must be finite");
    QuadrupoleParams{f_Q, eta}.validate();
    const HermitianOperator H = detail::ionized_hamiltonian(I, gamma_n, B0, f_Q, eta);
    auto lines = detail::labelled_lines(I, H, spin_operators(I).x, 1e-12);
    std::vector<SpectrumLine> out;
    for (const auto& l : lines)
        if (l.delta_m && std::abs(*l.delta_m) == 1) out.push_back(l);
    return out;
}

/// Adjacent Delta m = +-1 line spacing for eta = 0.
inline double quadrupole_splitting(double f_Q) { return 6.0 * std::abs(f_Q); }

struct NerSimOptions {
    double B0 = 1.4;                      // T
    double f_Q = 0.011;                   // MHz
    double eta = 0.0;
    std::optional<double> T2n_star;       // us; Ramsey trace when set
    std::optional<std::pair<double, double>> rabi_line;  // (m_from, m_to); strongest line when unset
    std::vector<double> rabi_times;       // us
    std::vector<double> ramsey_times;     // us
    EnsembleOptions ensemble{};
    double rel_threshold = 1e-9;
};

struct NerSimResult {
    std::vector<SpectrumLine> lines;
    double nu_Q = 0.0;  // adjacent line spacing, MHz
    std::optional<SpectrumLine> rabi_line;
    double predicted_rabi = 0.0;  // amplitude-free Rabi frequency |<f|D|i>|, MHz
    std::optional<CoherenceResult> rabi;
    std::optional<CoherenceResult> ramsey;
};

/// NER spectrum of an ionized donor under the electric drive `drive`, plus an
/// optional Rabi trace on one line (rotating frame, drive amplitude 1) and a
/// Ramsey trace with quasi-static noise giving the supplied T2n*.
inline NerSimResult ner_spectrum_sim(const DonorSpecies& species, const NerDrive& drive, const NerSimOptions& opt) {
    require(species.I.twice() > 1, "NER needs a nucleus with I > 1/2, got " + species.name);
    drive.validate();
    require(drive.tensor.cwiseAbs().maxCoeff() > 0.0, "zero drive: the drive tensor is identically zero");
    QuadrupoleParams{opt.f_Q, opt.eta}.validate();
    const Spin I = species.I;
    const HermitianOperator H = detail::ionized_hamiltonian(I, species.gamma_n, opt.B0, opt.f_Q, opt.eta);
    const Matrix D = drive.op(I);

    NerSimResult res;
    res.nu_Q = quadrupole_splitting(opt.f_Q);
    res.lines = detail::labelled_lines(I, H, D, opt.rel_threshold);

    if (!opt.rabi_times.empty()) {
        require(!res.lines.empty(), "drive couples no transitions");
        const EigenSystem es = diagonalize(H);
        const SpinOperators s = spin_operators(I);
        auto m_of = [&](int k) { return (es.vectors.col(k).adjoint() * s.z * es.vectors.col(k))(0, 0).real(); };
        const SpectrumLine* chosen = nullptr;
        if (opt.rabi_line) {
            for (const auto& l : res.lines) {
                const double a = m_of(l.i), b = m_of(l.f);
                const auto [mf, mt] = *opt.rabi_line;
                if ((std::abs(a - mf) < 0.25 && std::abs(b - mt) < 0.25) ||
                    (std::abs(a - mt) < 0.25 && std::abs(b - mf) < 0.25))
                    chosen = &l;
            }
            require(chosen != nullptr, "requested NER line " + format_m(opt.rabi_line->first) + "<->" +
                                           format_m(opt.rabi_line->second) + " is not driven");
        } else {
            chosen = &*std::max_element(res.lines.begin(), res.lines.end(),
                                        [](const SpectrumLine& a, const SpectrumLine& b) {
                                            return a.intensity < b.intensity;
                                        });
        }
        res.rabi_line = *chosen;
        res.predicted_rabi = std::sqrt(chosen->intensity);
        Matrix proj = Matrix::Zero(H.dim(), H.dim());
        proj += es.vectors.col(chosen->f) * es.vectors.col(chosen->f).adjoint();
        // frame generator oriented so that energy increases along it
        const double orient = species.gamma_n * opt.B0 >= 0.0 ? -1.0 : 1.0;
        RabiSystem sys{H, HermitianOperator(D), HermitianOperator(orient * s.z),
                       QuantumState::pure(es.vectors.col(chosen->i)), HermitianOperator(proj)};
        const int dm = chosen->delta_m ? std::abs(*chosen->delta_m) : 1;
        sys.frame_harmonic = std::max(1, dm);
        sys.dt_max = 0.05 / std::max(res.predicted_rabi, 1e-12);
        res.rabi = simulate_rabi(sys, chosen->frequency, 1.0, opt.rabi_times);
    }
    if (opt.T2n_star) {
        require(!opt.ramsey_times.empty(), "Ramsey trace requested without time points");
        res.ramsey = simulate_ramsey(0.0, NoiseModel::quasi_static(sigma_from_t2star(*opt.T2n_star)),
                                     opt.ramsey_times, opt.ensemble);
    }
    return res;
}

}  // namespace donorsim
