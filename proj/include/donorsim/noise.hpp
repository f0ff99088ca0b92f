#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "donorsim/types.hpp"

namespace donorsim {

enum class NoiseKind { none, quasi_static_gaussian, psd_table, lindblad_dephasing, ornstein_uhlenbeck, single_tone };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::quasi_static_gaussian: return "quasi_static_gaussian";
        case NoiseKind::psd_table: return "psd_table";
        case NoiseKind::lindblad_dephasing: return "lindblad_dephasing";
        case NoiseKind::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
        case NoiseKind::single_tone: return "single_tone";
    }
    return "?";
}

/// One-sided power spectral density sample: S(nu) in MHz^2/MHz of the
/// detuning delta(t) (MHz), normalised so that var(delta) = int_0^inf S dnu.
struct PsdPoint {
    double frequency = 0.0;
    double density = 0.0;
};

/// Classical detuning noise delta(t) entering as delta(t) * F, or Markovian
/// dephasing. sigma and tone amplitudes are in MHz, times in us.
struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;
    double correlation_time = 0.0;
    double tone_frequency = 0.0;
    double tone_amplitude = 0.0;
    std::vector<PsdPoint> psd;
    double rate = 0.0;
    std::optional<HermitianOperator> jump_operator;

    static NoiseModel none() { return {}; }
    static NoiseModel quasi_static(double sigma) {
        NoiseModel n;
        n.kind = NoiseKind::quasi_static_gaussian;
        n.sigma = sigma;
        n.validate();
        return n;
    }
    static NoiseModel psd_table(std::vector<PsdPoint> table) {
        NoiseModel n;
        n.kind = NoiseKind::psd_table;
        n.psd = std::move(table);
        n.validate();
        return n;
    }
    static NoiseModel lindblad(double rate, std::optional<HermitianOperator> op = std::nullopt) {
        NoiseModel n;
        n.kind = NoiseKind::lindblad_dephasing;
        n.rate = rate;
        n.jump_operator = std::move(op);
        n.validate();
        return n;
    }
    static NoiseModel ornstein_uhlenbeck(double sigma, double correlation_time) {
        NoiseModel n;
        n.kind = NoiseKind::ornstein_uhlenbeck;
        n.sigma = sigma;
        n.correlation_time = correlation_time;
        n.validate();
        return n;
    }
    static NoiseModel single_tone(double frequency, double amplitude) {
        NoiseModel n;
        n.kind = NoiseKind::single_tone;
        n.tone_frequency = frequency;
        n.tone_amplitude = amplitude;
        n.validate();
        return n;
    }

    void validate() const {
        switch (kind) {
            case NoiseKind::none: break;
            case NoiseKind::quasi_static_gaussian:
                require(std::isfinite(sigma) && sigma >= 0.0, "noise sigma must be >= 0");
                break;
            case NoiseKind::ornstein_uhlenbeck:
                require(std::isfinite(sigma) && sigma >= 0.0, "noise sigma must be >= 0");
                require(std::isfinite(correlation_time) && correlation_time > 0.0,
                        "noise correlation time must be > 0");
                break;
            case NoiseKind::single_tone:
                require(std::isfinite(tone_frequency) && tone_frequency >= 0.0, "tone frequency must be >= 0");
                require(std::isfinite(tone_amplitude) && tone_amplitude >= 0.0, "tone amplitude must be >= 0");
                break;
            case NoiseKind::psd_table: validate_psd(psd); break;
            case NoiseKind::lindblad_dephasing:
                require(std::isfinite(rate) && rate >= 0.0, "dephasing rate must be >= 0");
                break;
        }
    }

    static void validate_psd(const std::vector<PsdPoint>& table) {
        require(table.size() >= 2, "PSD table needs at least two points");
        for (std::size_t k = 0; k < table.size(); ++k) {
            require(std::isfinite(table[k].frequency) && std::isfinite(table[k].density),
                    "PSD table contains a non-finite value");
            require(table[k].frequency >= 0.0, "PSD frequencies must be >= 0");
            require(table[k].density >= 0.0, "PSD values must be >= 0");
            if (k) require(table[k].frequency > table[k - 1].frequency, "PSD frequencies must increase strictly");
        }
    }
};

/// Lorentzian one-sided PSD of an Ornstein-Uhlenbeck process.
inline double ou_psd(double sigma, double tau_c, double nu) {
    const double x = kTwoPi * nu * tau_c;
    return 4.0 * sigma * sigma * tau_c / (1.0 + x * x);
}

/// Tabulates the OU spectrum on a grid that resolves its knee.
inline std::vector<PsdPoint> ou_psd_table(double sigma, double tau_c, double nu_max, int points_per_decade = 200) {
    require(nu_max > 0.0 && tau_c > 0.0, "ou_psd_table: nu_max and tau_c must be > 0");
    std::vector<PsdPoint> table{{0.0, ou_psd(sigma, tau_c, 0.0)}};
    const double lo = std::log10(nu_max) - 8.0;
    const int n = static_cast<int>(8.0 * points_per_decade);
    for (int k = 0; k <= n; ++k) {
        const double nu = std::pow(10.0, lo + 8.0 * k / n);
        table.push_back({nu, ou_psd(sigma, tau_c, nu)});
    }
    return table;
}

/// Integral of the piecewise-linear PSD, i.e. the variance it represents.
inline double psd_variance(const std::vector<PsdPoint>& table) {
    double v = 0.0;
    for (std::size_t k = 1; k < table.size(); ++k)
        v += 0.5 * (table[k].density + table[k - 1].density) * (table[k].frequency - table[k - 1].frequency);
    return v;
}

namespace detail {
/// int_a^b cos(2 pi nu t + phi) dt
inline double cos_integral(double nu, double phi, double a, double b) {
    if (nu == 0.0) return (b - a) * std::cos(phi);
    const double w = kTwoPi * nu;
    // sin(x2) - sin(x1) = 2 cos((x1+x2)/2) sin((x2-x1)/2), stable for short pieces
    return 2.0 * std::cos(w * 0.5 * (a + b) + phi) * std::sin(0.5 * w * (b - a)) / w;
}
}  // namespace detail

/// One sampled realisation of a classical noise model, able to evaluate
/// int_0^T y(t) delta(t) dt for a switching function y = +-1 that flips sign at
/// each time in `flips`.
class NoiseRealization {
public:
    /// horizon: largest T that will be queried (needed for time-stepped kinds).
    NoiseRealization(const NoiseModel& model, std::mt19937_64& rng, double horizon, double max_step = 0.0)
        : kind_(model.kind) {
        model.validate();
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
        switch (kind_) {
            case NoiseKind::none: break;
            case NoiseKind::quasi_static_gaussian: offset_ = model.sigma * normal(rng); break;
            case NoiseKind::single_tone:
                tones_.push_back({model.tone_frequency, model.tone_amplitude, uniform(rng)});
                break;
            case NoiseKind::psd_table: {
                // Multitone synthesis: one tone per table interval at its midpoint
                // carrying that interval's variance.
                const auto& t = model.psd;
                for (std::size_t k = 1; k < t.size(); ++k) {
                    const double dnu = t[k].frequency - t[k - 1].frequency;
                    const double power = 0.5 * (t[k].density + t[k - 1].density) * dnu;
                    const double nu = 0.5 * (t[k].frequency + t[k - 1].frequency);
                    tones_.push_back({nu, std::sqrt(2.0 * power), uniform(rng)});
                }
                break;
            }
            case NoiseKind::ornstein_uhlenbeck: {
                require(horizon >= 0.0, "noise horizon must be >= 0");
                double h = model.correlation_time / 50.0;
                if (max_step > 0.0) h = std::min(h, max_step);
                const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / h)));
                step_ = horizon > 0.0 ? horizon / static_cast<double>(cells) : h;
                const std::size_t n = cells + 1;
                const double decay = std::exp(-step_ / model.correlation_time);
                const double kick = model.sigma * std::sqrt(1.0 - decay * decay);
                path_.resize(n + 1);
                path_[0] = model.sigma * normal(rng);
                for (std::size_t k = 1; k < path_.size(); ++k) path_[k] = decay * path_[k - 1] + kick * normal(rng);
                cumulative_.assign(path_.size(), 0.0);
                for (std::size_t k = 1; k < path_.size(); ++k)
                    cumulative_[k] = cumulative_[k - 1] + 0.5 * (path_[k - 1] + path_[k]) * step_;
                break;
            }
            case NoiseKind::lindblad_dephasing:
                throw InvalidArgument("Lindblad dephasing has no classical realisation");
        }
    }

    /// Detuning at time t (MHz).
    double value(double t) const {
        switch (kind_) {
            case NoiseKind::quasi_static_gaussian: return offset_;
            case NoiseKind::single_tone:
            case NoiseKind::psd_table: {
                double v = 0.0;
                for (const auto& tone : tones_) v += tone.amplitude * std::cos(kTwoPi * tone.frequency * t + tone.phase);
                return v;
            }
            case NoiseKind::ornstein_uhlenbeck: {
                const double x = t / step_;
                const auto k = std::min(static_cast<std::size_t>(x), path_.size() - 2);
                const double w = x - static_cast<double>(k);
                return (1.0 - w) * path_[k] + w * path_[k + 1];
            }
            default: return 0.0;
        }
    }

    /// int_a^b delta(t) dt
    double integral(double a, double b) const {
        switch (kind_) {
            case NoiseKind::quasi_static_gaussian: return offset_ * (b - a);
            case NoiseKind::single_tone:
            case NoiseKind::psd_table: {
                double v = 0.0;
                for (const auto& tone : tones_) v += tone.amplitude * detail::cos_integral(tone.frequency, tone.phase, a, b);
                return v;
            }
            case NoiseKind::ornstein_uhlenbeck: return antiderivative(b) - antiderivative(a);
            default: return 0.0;
        }
    }

    /// int_0^T y(t) delta(t) dt with y(0+) = +1 and a sign flip at each entry of flips.
    double switched_integral(const std::vector<double>& flips, double T) const {
        double acc = 0.0, sign = 1.0, start = 0.0;
        for (double f : flips) {
            if (f >= T) break;
            acc += sign * integral(start, f);
            sign = -sign;
            start = f;
        }
        return acc + sign * integral(start, T);
    }

private:
    // int_0^t of the piecewise-linear interpolant of the sampled OU path
    double antiderivative(double t) const {
        const double x = t / step_;
        const auto k = std::min(static_cast<std::size_t>(x), path_.size() - 2);
        const double w = x - static_cast<double>(k);
        return cumulative_[k] + step_ * (w * path_[k] + 0.5 * w * w * (path_[k + 1] - path_[k]));
    }

    struct Tone {
        double frequency, amplitude, phase;
    };
    NoiseKind kind_;
    double offset_ = 0.0;
    std::vector<Tone> tones_;
    std::vector<double> path_;
    std::vector<double> cumulative_;
    double step_ = 1.0;
};

}  // namespace donorsim
