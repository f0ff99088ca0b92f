#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "donorsim/parallel.hpp"
#include "donorsim/random.hpp"
#include "donorsim/registry.hpp"

namespace donorsim {

/// Mean e-h pairs from the ionization energy; `multiplier` scales the
/// ionization (e.g. bystander atoms of a molecular ion).
inline double eh_pair_signal(double ionization_keV, double w_pair_eV, double multiplier = 1.0) {
    require(std::isfinite(ionization_keV) && ionization_keV >= 0.0, "ionization energy must be >= 0");
    require(std::isfinite(w_pair_eV) && w_pair_eV > 0.0, "w_pair must be > 0");
    require(std::isfinite(multiplier) && multiplier >= 0.0, "ionization multiplier must be >= 0");
    return 1000.0 * ionization_keV * multiplier / w_pair_eV;
}

/// Least-squares w_pair (eV) for pairs = 1000 E_ion / w over the given rows.
/// The model is linear in 1/w, so the fit is closed form.
inline double fit_w_pair(const std::vector<IonSpec>& rows) {
    require(!rows.empty(), "fit needs at least one row");
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : rows) {
        const double x = 1000.0 * r.ionization_keV;
        sxy += x * r.eh_pairs;
        sxx += x * x;
    }
    require(sxy > 0.0, "fit needs positive ionization and pair counts");
    return sxx / sxy;
}

inline constexpr double kDefaultWPair = 3.67;  // eV

struct DetectorSpec {
    double w_pair = kDefaultWPair;                         // eV
    double threshold = 400.0 / kDefaultWPair;              // e-h pairs
    double noise_sigma = 400.0 / kDefaultWPair / 5.0;      // e-h pairs

    /// Threshold given in eV and read as a 5 sigma discrimination level.
    static DetectorSpec from_threshold_eV(double threshold_eV, double w_pair = kDefaultWPair) {
        require(std::isfinite(threshold_eV) && threshold_eV >= 0.0, "threshold must be >= 0");
        DetectorSpec d;
        d.w_pair = w_pair;
        d.threshold = threshold_eV / w_pair;
        d.noise_sigma = d.threshold / 5.0;
        return d;
    }
    void validate() const {
        require(std::isfinite(w_pair) && w_pair > 0.0, "w_pair must be > 0");
        require(std::isfinite(threshold) && threshold >= 0.0, "threshold must be >= 0");
        require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise sigma must be >= 0");
    }
};

struct DetectionResult {
    double detection_prob = 0.0;
    double detection_err = 0.0;  // binomial standard error
    double mean_signal = 0.0;    // e-h pairs
    std::vector<double> pulse_heights;  // e-h pairs, one per ion
};

/// Per ion: signal ~ N(mean, (spread mean)^2) plus detector noise N(0, sigma^2);
/// detected when the pulse height exceeds the threshold. Ion k uses stream(seed, k).
inline DetectionResult ion_detection_mc(const IonSpec& ion, const DetectorSpec& det, std::size_t n_ions,
                                        std::uint64_t seed, double signal_spread, double multiplier = 1.0) {
    det.validate();
    require(n_ions >= 1, "n_ions must be >= 1");
    require(std::isfinite(signal_spread) && signal_spread >= 0.0, "signal spread must be >= 0");
    require(ion.ionization_keV <= ion.energy_keV, "ionization energy exceeds the ion energy");
    DetectionResult r;
    r.mean_signal = eh_pair_signal(ion.ionization_keV, det.w_pair, multiplier);
    r.pulse_heights.resize(n_ions);
    std::vector<unsigned char> hit(n_ions);
    parallel_for(n_ions, [&](std::size_t k) {
        auto rng = stream(seed, k);
        std::normal_distribution<double> unit(0.0, 1.0);
        const double signal = r.mean_signal * (1.0 + signal_spread * unit(rng));
        const double h = signal + det.noise_sigma * unit(rng);
        r.pulse_heights[k] = h;
        hit[k] = h > det.threshold;
    });
    std::size_t hits = 0;
    for (auto h : hit) hits += h;
    const double p = static_cast<double>(hits) / n_ions;
    r.detection_prob = p;
    r.detection_err = std::sqrt(std::max(p * (1.0 - p), 1.0 / n_ions) / n_ions);
    return r;
}

/// Lateral placement sigma (nm): straggle, a uniform-disk aperture of diameter
/// d (sigma = d / 4) and stage jitter added in quadrature.
inline double placement_spread(double straggle_nm, double aperture_d_nm, double stage_sigma_nm) {
    require(straggle_nm >= 0.0 && aperture_d_nm >= 0.0 && stage_sigma_nm >= 0.0,
            "placement terms must be >= 0");
    const double a = 0.25 * aperture_d_nm;
    return std::sqrt(straggle_nm * straggle_nm + a * a + stage_sigma_nm * stage_sigma_nm);
}

inline double placement_spread(const IonSpec& ion, double aperture_d_nm, double stage_sigma_nm) {
    return placement_spread(ion.straggle_nm, aperture_d_nm, stage_sigma_nm);
}

struct YieldResult {
    double p_site_correct = 1.0;
    double p_all_correct = 1.0;
    double expected_exposures = 1.0;  // per site
};

/// Each site is exposed one ion at a time until a detection; an ion is missed
/// with probability f and stays in the site, so a site holds exactly one donor
/// only when its first ion was detected.
inline YieldResult array_yield(int n_sites, double f) {
    require(n_sites >= 1, "n_sites must be >= 1");
    require(std::isfinite(f) && f >= 0.0 && f < 1.0, "false-negative rate must lie in [0, 1)");
    YieldResult y;
    y.p_site_correct = 1.0 - f;
    y.p_all_correct = std::pow(1.0 - f, n_sites);
    y.expected_exposures = 1.0 / (1.0 - f);
    return y;
}

struct YieldMcResult {
    double p_all_correct = 0.0;
    double p_all_correct_err = 0.0;
    double mean_exposures = 0.0;  // per site; every exposure implants one ion
};

/// Monte Carlo of the counted-implant loop; array k uses stream(seed, k).
inline YieldMcResult array_yield_mc(int n_sites, double f, std::size_t n_arrays, std::uint64_t seed) {
    require(n_sites >= 1, "n_sites must be >= 1");
    require(std::isfinite(f) && f >= 0.0 && f < 1.0, "false-negative rate must lie in [0, 1)");
    require(n_arrays >= 1, "n_arrays must be >= 1");
    std::vector<unsigned char> ok(n_arrays);
    std::vector<double> exposures(n_arrays);
    parallel_for(n_arrays, [&](std::size_t k) {
        auto rng = stream(seed, k);
        std::bernoulli_distribution missed(f);
        bool all = true;
        long total = 0;
        for (int s = 0; s < n_sites; ++s) {
            int ions = 1;
            while (missed(rng)) ++ions;
            total += ions;
            all = all && ions == 1;
        }
        ok[k] = all;
        exposures[k] = static_cast<double>(total) / n_sites;
    });
    YieldMcResult r;
    double good = 0.0, ex = 0.0;
    for (std::size_t k = 0; k < n_arrays; ++k) {
        good += ok[k];
        ex += exposures[k];
    }
    r.p_all_correct = good / n_arrays;
    r.p_all_correct_err = std::sqrt(std::max(r.p_all_correct * (1.0 - r.p_all_correct), 1.0 / n_arrays) / n_arrays);
    r.mean_exposures = ex / n_arrays;
    return r;
}

}  // namespace donorsim
