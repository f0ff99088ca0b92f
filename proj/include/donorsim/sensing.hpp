#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "donorsim/registry.hpp"

namespace donorsim {

enum class SensingMode { dc, ac };
enum class FieldRegime { low, high };

inline std::string to_string(SensingMode m) { return m == SensingMode::dc ? "dc" : "ac"; }
inline std::string to_string(FieldRegime r) { return r == FieldRegime::low ? "low" : "high"; }

inline SensingMode sensing_mode_from_string(const std::string& s) {
    if (s == "dc") return SensingMode::dc;
    if (s == "ac") return SensingMode::ac;
    throw InvalidArgument("unknown sensing mode '" + s + "' (expected dc or ac)");
}

inline FieldRegime field_regime_from_string(const std::string& s) {
    if (s == "low") return FieldRegime::low;
    if (s == "high") return FieldRegime::high;
    throw InvalidArgument("unknown field regime '" + s + "' (expected low or high)");
}

struct SensorSpec {
    double gamma = kGammaElectron;  // MHz/T
    double C_eff = 1.0;
    std::optional<double> T2_star;  // us
    std::optional<double> T2_cpmg;  // us

    void validate() const {
        require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
        require(C_eff > 0.0 && C_eff <= 1.0, "C_eff must lie in (0, 1]");
        require(!T2_star || (std::isfinite(*T2_star) && *T2_star > 0.0), "T2* must be > 0");
        require(!T2_cpmg || (std::isfinite(*T2_cpmg) && *T2_cpmg > 0.0), "T2_cpmg must be > 0");
    }
};

/// Sensor from a benchmark row ("e-", "31P", "31P+"). C_eff is 1 (ideal
/// readout) unless use_f_meas is set, in which case it is the row's F_meas.
inline SensorSpec sensor_from_benchmark(const std::string& system, bool use_f_meas = false) {
    const Benchmark& b = benchmark_lookup(system);
    SensorSpec s;
    s.gamma = system == "e-" ? kGammaElectron : donor_lookup("31P").gamma_n;
    s.C_eff = use_f_meas ? b.F_meas : 1.0;
    s.T2_star = b.T2_star_s * 1e6;
    s.T2_cpmg = b.T2_cpmg_s * 1e6;
    return s;
}

/// Field sensitivity in T/sqrt(Hz):
///   dc: 1 / (2 pi gamma C sqrt(T2*))
///   ac: 1 / (4 gamma sqrt(T2_cpmg))
inline double magnetic_sensitivity(const SensorSpec& spec, SensingMode mode) {
    spec.validate();
    const double gamma_hz = spec.gamma * 1e6;  // Hz/T
    if (mode == SensingMode::dc) {
        require(spec.T2_star.has_value(), "dc sensitivity needs T2*");
        return 1.0 / (kTwoPi * gamma_hz * spec.C_eff * std::sqrt(*spec.T2_star * 1e-6));
    }
    require(spec.T2_cpmg.has_value(), "ac sensitivity needs T2_cpmg");
    return 1.0 / (4.0 * gamma_hz * std::sqrt(*spec.T2_cpmg * 1e-6));
}

struct StrainShift {
    double dA = 0.0;   // MHz
    double dnu = 0.0;  // MHz
    bool linear_regime = true;  // |eps| < 1e-3
};

inline double dnu_dA(const DonorSpecies& d, FieldRegime regime) {
    const auto& v = regime == FieldRegime::low ? d.dnu_dA_low : d.dnu_dA_high;
    require(d.K.has_value() && v.has_value(), "no hyperfine strain data for " + d.name);
    return *v;
}

/// dA = K eps A and dnu = (dnu/dA) dA for hydrostatic strain eps.
inline StrainShift strain_shift(const DonorSpecies& d, double epsilon_hs, FieldRegime regime) {
    require(std::isfinite(epsilon_hs), "strain must be finite");
    const double slope = dnu_dA(d, regime);
    StrainShift s;
    s.dA = *d.K * epsilon_hs * d.A;
    s.dnu = slope * s.dA;
    s.linear_regime = std::abs(epsilon_hs) < 1e-3;
    return s;
}

/// Frequency shift per unit strain, MHz.
inline double strain_transduction(const DonorSpecies& d, FieldRegime regime) { return dnu_dA(d, regime) * *d.K * d.A; }

/// Smallest strain shifting the line by one linewidth (MHz).
inline double min_detectable_strain(const DonorSpecies& d, double linewidth, FieldRegime regime) {
    require(std::isfinite(linewidth) && linewidth >= 0.0, "linewidth must be >= 0");
    return linewidth / strain_transduction(d, regime);
}

/// Quadrupole channel with a user-supplied d(nu_Q)/d(eps) in MHz per unit strain.
inline double quadrupole_strain_shift(double dnuQ_deps, double epsilon) {
    require(std::isfinite(dnuQ_deps) && std::isfinite(epsilon), "parameters must be finite");
    return dnuQ_deps * epsilon;
}

inline double quadrupole_min_detectable_strain(double dnuQ_deps, double linewidth) {
    require(std::isfinite(dnuQ_deps) && dnuQ_deps != 0.0, "dnu_Q/deps must be nonzero");
    require(std::isfinite(linewidth) && linewidth >= 0.0, "linewidth must be >= 0");
    return linewidth / std::abs(dnuQ_deps);
}

}  // namespace donorsim
