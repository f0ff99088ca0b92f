#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "donorsim/hamiltonian.hpp"
#include "donorsim/parallel.hpp"
#include "donorsim/random.hpp"

namespace donorsim {

/// Spin-to-charge readout parameters. Energies are given as frequencies (MHz)
/// and converted with Planck's constant; rates in 1/us; times in us.
struct ReadoutParams {
    double E_Z = 0.0;             // Zeeman splitting
    double T_el = 0.1;            // electron temperature, K
    double gamma_out = 1.0;       // tunnel-out rate into empty reservoir states
    double gamma_in = 1.0;        // tunnel-in rate from filled reservoir states
    double bandwidth = 0.1;       // detector bandwidth, MHz; shortest detectable blip 1/bandwidth
    double window = 1000.0;       // readout window
    double fermi_offset = 0.0;    // E_F above the midpoint of mu_up and mu_down, MHz
    double F_e_up = 1.0;          // per-shot fidelities used by the QND layer
    double F_e_down = 1.0;

    void validate() const {
        require(std::isfinite(E_Z) && E_Z >= 0.0, "E_Z must be >= 0");
        require(std::isfinite(T_el) && T_el >= 0.0, "T_el must be >= 0");
        require(std::isfinite(gamma_out) && gamma_out >= 0.0, "gamma_out must be >= 0");
        require(std::isfinite(gamma_in) && gamma_in >= 0.0, "gamma_in must be >= 0");
        require(std::isfinite(bandwidth) && bandwidth > 0.0, "bandwidth must be > 0");
        require(std::isfinite(window) && window > 0.0, "readout window must be > 0");
        require(std::isfinite(fermi_offset), "fermi_offset must be finite");
        require(F_e_up >= 0.0 && F_e_up <= 1.0 && F_e_down >= 0.0 && F_e_down <= 1.0,
                "fidelities must lie in [0, 1]");
    }
};

/// Fermi occupation 1 / (1 + exp(E / kT)) for E given in MHz.
inline double fermi_occupation(double E_MHz, double T_el) {
    if (T_el == 0.0) return E_MHz < 0.0 ? 1.0 : (E_MHz > 0.0 ? 0.0 : 0.5);
    const double x = constants::planck * E_MHz * 1e6 / (constants::boltzmann * T_el);
    if (x > 700.0) return 0.0;
    if (x < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(x));
}

/// E_Z / (k_B T_el) for E_Z in MHz.
inline double zeeman_to_thermal_ratio(double E_Z, double T_el) {
    require(T_el > 0.0, "T_el must be > 0");
    return constants::planck * E_Z * 1e6 / (constants::boltzmann * T_el);
}

/// Rates of the three-state model: neutral up, neutral down, ionized.
struct ReadoutRates {
    double out_up, out_down;  // neutral -> ionized
    double in_up, in_down;    // ionized -> neutral
};

inline ReadoutRates readout_rates(const ReadoutParams& p) {
    const double mu_up = 0.5 * p.E_Z - p.fermi_offset;
    const double mu_down = -0.5 * p.E_Z - p.fermi_offset;
    const double f_up = fermi_occupation(mu_up, p.T_el);
    const double f_down = fermi_occupation(mu_down, p.T_el);
    return {p.gamma_out * (1.0 - f_up), p.gamma_out * (1.0 - f_down), p.gamma_in * f_up, p.gamma_in * f_down};
}

enum class SpinState { up, down };

inline std::string to_string(SpinState s) { return s == SpinState::up ? "up" : "down"; }

struct ReadoutShot {
    bool detected = false;  // a blip of at least 1/bandwidth inside the window
    SpinState final_spin = SpinState::down;
    bool ionized_at_end = false;
};

/// One readout trajectory by exact event sampling.
inline ReadoutShot simulate_readout_shot(const ReadoutRates& r, const ReadoutParams& p, SpinState initial,
                                         std::mt19937_64& rng) {
    std::exponential_distribution<double> unit(1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double min_blip = 1.0 / p.bandwidth;
    ReadoutShot shot;
    enum class S { up, down, ion } s = initial == SpinState::up ? S::up : S::down;
    double t = 0.0;
    double ionized_since = 0.0;
    while (true) {
        double rate = 0.0;
        switch (s) {
            case S::up: rate = r.out_up; break;
            case S::down: rate = r.out_down; break;
            case S::ion: rate = r.in_up + r.in_down; break;
        }
        // always draw so that every shot consumes the same number of variates per step
        const double wait = unit(rng);
        const double pick = uniform(rng);
        const double next = rate > 0.0 ? t + wait / rate : INFINITY;
        if (next >= p.window) {
            if (s == S::ion) {
                shot.ionized_at_end = true;
                if (p.window - ionized_since >= min_blip) shot.detected = true;
            }
            break;
        }
        t = next;
        if (s == S::ion) {
            if (t - ionized_since >= min_blip) shot.detected = true;
            s = pick * (r.in_up + r.in_down) < r.in_up ? S::up : S::down;
        } else {
            s = S::ion;
            ionized_since = t;
        }
    }
    shot.final_spin = s == S::up ? SpinState::up : SpinState::down;
    return shot;
}

struct ReadoutResult {
    double fidelity_up = 0.0;    // P(blip | up)
    double fidelity_down = 0.0;  // P(no blip | down)
    double visibility = 0.0;
    double fidelity_up_err = 0.0;
    double fidelity_down_err = 0.0;
    double click_fraction = 0.0;  // P(blip) for the requested initial spin
    /// The electron is reset to spin down at the end of every readout.
    SpinState post_state = SpinState::down;
    /// Fraction of shots whose electron would still be up (or ionized) at the
    /// end of the window without the reset step.
    double residual_up = 0.0;
    std::size_t n_shots = 0;
};

/// Monte Carlo spin-to-charge readout. Shot k replays stream(seed, k) for both
/// starting spins, so with E_Z = 0 the two statistics coincide exactly.
inline ReadoutResult spin_to_charge_readout(const ReadoutParams& p, SpinState initial, std::size_t n_shots,
                                            std::uint64_t seed) {
    p.validate();
    require(n_shots >= 1, "n_shots must be >= 1");
    const ReadoutRates r = readout_rates(p);
    std::vector<char> up_click(n_shots), down_click(n_shots), residual(n_shots);
    parallel_for(n_shots, [&](std::size_t k) {
        auto rng_up = stream(seed, k);
        auto rng_down = stream(seed, k);
        const auto a = simulate_readout_shot(r, p, SpinState::up, rng_up);
        const auto b = simulate_readout_shot(r, p, SpinState::down, rng_down);
        up_click[k] = a.detected;
        down_click[k] = b.detected;
        const auto& mine = initial == SpinState::up ? a : b;
        residual[k] = mine.final_spin == SpinState::up || mine.ionized_at_end;
    });
    std::size_t n_up = 0, n_down_clicks = 0, n_res = 0;
    for (std::size_t k = 0; k < n_shots; ++k) {
        n_up += up_click[k];
        n_down_clicks += down_click[k];
        n_res += residual[k];
    }
    const double n = static_cast<double>(n_shots);
    ReadoutResult res;
    res.n_shots = n_shots;
    res.fidelity_up = n_up / n;
    res.fidelity_down = 1.0 - n_down_clicks / n;
    res.visibility = res.fidelity_up + res.fidelity_down - 1.0;
    res.fidelity_up_err = std::sqrt(res.fidelity_up * (1.0 - res.fidelity_up) / n);
    res.fidelity_down_err = std::sqrt(res.fidelity_down * (1.0 - res.fidelity_down) / n);
    res.click_fraction = initial == SpinState::up ? res.fidelity_up : 1.0 - res.fidelity_down;
    res.residual_up = n_res / n;
    return res;
}

// ---------------------------------------------------------------------------
// Repetitive QND readout of the nuclear spin

enum class QndDecision { majority, threshold };

struct QndParams {
    double F_e_up = 0.92;    // P(read up | electron flipped up)
    double F_e_down = 0.92;  // P(read down | electron stayed down)
    double p_flip = 0.0;     // nuclear flip probability per cycle
    int n_cycles = 1;
    QndDecision decision = QndDecision::majority;
    int threshold = 1;       // up-count needed for the threshold rule

    void validate() const {
        require(n_cycles >= 1, "N must be >= 1");
        require(p_flip >= 0.0 && p_flip <= 1.0, "p_flip must lie in [0, 1]");
        require(F_e_up >= 0.0 && F_e_up <= 1.0 && F_e_down >= 0.0 && F_e_down <= 1.0,
                "F_e must lie in [0, 1]");
        if (decision == QndDecision::threshold)
            require(threshold >= 0 && threshold <= n_cycles + 1, "threshold must lie in [0, N+1]");
    }
};

/// True when k "up" outcomes out of N identify the resonant nuclear state.
/// Majority ties go to the off-resonant state.
inline bool qnd_decides_resonant(int k, const QndParams& p) {
    if (p.decision == QndDecision::threshold) return k >= p.threshold;
    return 2 * k > p.n_cycles;
}

struct QndResult {
    double fidelity = 0.0;  // mean of the two per-state fidelities
    double fidelity_err = 0.0;
    double fidelity_resonant = 0.0;
    double fidelity_off_resonant = 0.0;
    std::size_t n_trials = 0;
};

/// Each cycle: initialise the electron down, apply a pi pulse conditional on
/// the nuclear state (resonant nucleus -> electron up), read the electron.
/// The nucleus may flip with probability p_flip after every cycle.
inline QndResult qnd_nuclear_readout(const QndParams& p, std::size_t n_trials, std::uint64_t seed) {
    p.validate();
    require(n_trials >= 1, "n_trials must be >= 1");
    std::vector<char> ok_res(n_trials), ok_off(n_trials);
    parallel_for(n_trials, [&](std::size_t k) {
        for (int start = 0; start < 2; ++start) {
            auto rng = stream(seed, 2 * k + static_cast<std::uint64_t>(start));
            bool resonant = start == 0;
            int remaining = p.n_cycles;
            int ups = 0;
            while (remaining > 0) {
                int run = remaining;
                if (p.p_flip > 0.0) {
                    // cycles completed before the next flip
                    std::geometric_distribution<int> geo(p.p_flip);
                    run = std::min(remaining, geo(rng) + 1);
                }
                const double q = resonant ? p.F_e_up : 1.0 - p.F_e_down;
                std::binomial_distribution<int> bin(run, q);
                ups += bin(rng);
                remaining -= run;
                resonant = !resonant;
            }
            const bool says_resonant = qnd_decides_resonant(ups, p);
            (start == 0 ? ok_res : ok_off)[k] = start == 0 ? says_resonant : !says_resonant;
        }
    });
    std::size_t a = 0, b = 0;
    for (std::size_t k = 0; k < n_trials; ++k) {
        a += ok_res[k];
        b += ok_off[k];
    }
    const double n = static_cast<double>(n_trials);
    QndResult res;
    res.n_trials = n_trials;
    res.fidelity_resonant = a / n;
    res.fidelity_off_resonant = b / n;
    res.fidelity = 0.5 * (res.fidelity_resonant + res.fidelity_off_resonant);
    const double va = res.fidelity_resonant * (1.0 - res.fidelity_resonant) / n;
    const double vb = res.fidelity_off_resonant * (1.0 - res.fidelity_off_resonant) / n;
    res.fidelity_err = 0.5 * std::sqrt(va + vb);
    return res;
}

}  // namespace donorsim
