#include <gtest/gtest.h>

#include "donorsim/protocols.hpp"
#include "oracles.hpp"

using namespace donorsim;

namespace {
std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}
}  // namespace

TEST(Rabi, ElectronFrequencyFromB1) {
    const auto sys = electron_rabi_system(1.0);
    const auto res = simulate_rabi(sys, 28000.0, 1e-4, linspace(0.0, 2.0, 121));
    ASSERT_TRUE(res.frequency);
    EXPECT_NEAR(*res.frequency, 1.4, 1e-4);
    EXPECT_NEAR(*res.contrast, 1.0, 1e-4);
}

TEST(Rabi, ZeroAmplitudeGivesFlatSignal) {
    const auto res = simulate_rabi(electron_rabi_system(1.0), 28000.0, 0.0, linspace(0.0, 1.0, 11));
    for (double v : res.signal) EXPECT_NEAR(v, 0.0, 1e-14);
    EXPECT_EQ(*res.frequency, 0.0);
}

TEST(Rabi, DetunedByRabiFrequencyOscillatesFasterWithHalfContrast) {
    const double f1 = 1.4;
    const auto res = simulate_rabi(electron_rabi_system(1.0), 28000.0 + f1, 1e-4, linspace(0.0, 2.0, 161));
    EXPECT_NEAR(*res.frequency, std::sqrt(2.0) * f1, 1e-4);
    EXPECT_NEAR(*res.contrast, 0.5, 1e-4);
    for (std::size_t k = 0; k < res.times.size(); ++k)
        EXPECT_NEAR(res.signal[k], oracle::rabi_flip(f1, f1, res.times[k]), 1e-8);
}

TEST(Rabi, LabFrameAgreesWithRotatingFrame) {
    auto sys = electron_rabi_system(0.001);  // 28 MHz carrier
    sys.frame = Frame::lab;
    sys.dt_max = 1.0 / (28.0 * 64.0);
    const auto lab = simulate_rabi(sys, 28.0, 2e-5, linspace(0.0, 3.0, 31));
    sys.frame = Frame::rotating;
    const auto rot = simulate_rabi(sys, 28.0, 2e-5, linspace(0.0, 3.0, 31));
    for (std::size_t k = 0; k < lab.signal.size(); ++k) EXPECT_NEAR(lab.signal[k], rot.signal[k], 2e-2);
}

TEST(Rabi, EmptyGridRejected) {
    EXPECT_THROW(simulate_rabi(electron_rabi_system(1.0), 28000.0, 1e-4, {}), InvalidArgument);
}

TEST(Ramsey, NoNoiseGivesUndampedFringes) {
    const auto res = simulate_ramsey(0.3, NoiseModel::none(), linspace(0.0, 20.0, 41));
    for (std::size_t k = 0; k < res.times.size(); ++k)
        EXPECT_NEAR(res.signal[k], std::cos(2 * oracle::pi * 0.3 * res.times[k]), 1e-12);
    EXPECT_FALSE(res.fitted_T);
}

TEST(Ramsey, RecoversElectronT2Star) {
    const double t2 = 270.0;  // us
    EnsembleOptions opt;
    opt.n_samples = 4000;
    opt.seed = 11;
    const auto res = simulate_ramsey(0.0, NoiseModel::quasi_static(sigma_from_t2star(t2)), linspace(0.0, 600.0, 61), opt);
    ASSERT_TRUE(res.fitted_T);
    EXPECT_NEAR(*res.fitted_T, t2, 0.05 * t2);
    EXPECT_NEAR(*res.linewidth, std::log(2.0) / (oracle::pi * *res.fitted_T), 1e-15);
}

TEST(Ramsey, LinewidthFormula) {
    EXPECT_NEAR(inhomogeneous_linewidth(270.0), 8.17e-4, 0.01e-4);
    EXPECT_NEAR(t2star_from_sigma(sigma_from_t2star(123.0)), 123.0, 1e-12);
}

TEST(Ramsey, EnvelopeWithinThreeStandardErrors) {
    const double sigma = 0.05;
    EnsembleOptions opt;
    opt.n_samples = 10000;
    opt.seed = 5;
    const auto res = simulate_ramsey(0.0, NoiseModel::quasi_static(sigma), linspace(0.0, 10.0, 21), opt);
    const double T2 = t2star_from_sigma(sigma);
    for (std::size_t k = 0; k < res.times.size(); ++k) {
        const double expected = std::exp(-std::pow(res.times[k] / T2, 2));
        EXPECT_NEAR(res.signal[k], expected, 3.0 * res.signal_err[k] + 1e-12) << res.times[k];
    }
}

TEST(Ramsey, DetunedFringesUnderNoiseFit) {
    EnsembleOptions opt;
    opt.n_samples = 4000;
    opt.seed = 8;
    const auto res = simulate_ramsey(0.2, NoiseModel::quasi_static(0.02), linspace(0.0, 30.0, 151), opt);
    EXPECT_NEAR(*res.fitted_T, t2star_from_sigma(0.02), 0.05 * t2star_from_sigma(0.02));
}

TEST(Ramsey, LindbladNoiseRejected) {
    EXPECT_THROW(simulate_ramsey(0.0, NoiseModel::lindblad(0.1), {1.0}), InvalidArgument);
}

TEST(Cpmg, HahnEchoRefocusesStaticNoise) {
    EnsembleOptions opt;
    opt.n_samples = 2000;
    opt.fit_model = DecayModel::none;
    const auto res = simulate_cpmg(1, linspace(1.0, 100.0, 10), NoiseModel::quasi_static(0.5), opt);
    for (double v : res.signal) EXPECT_GT(v, 0.999);
}

TEST(Cpmg, StaticNoiseIndependentOfPulseCount) {
    EnsembleOptions opt;
    opt.n_samples = 500;
    opt.fit_model = DecayModel::none;
    for (int n : {1, 2, 5, 16}) {
        const auto res = simulate_cpmg(n, {0.5, 3.0}, NoiseModel::quasi_static(0.7), opt);
        for (double v : res.signal) EXPECT_NEAR(v, 1.0, 1e-9);
    }
}

TEST(Cpmg, PassbandAtHalfInverseSpacing) {
    const int n = 32;
    const double tau = 1.0;
    const double step = 0.02 * 0.5 / tau;
    double best_nu = 0.0, lowest = 2.0;
    EnsembleOptions opt;
    opt.n_samples = 400;
    opt.fit_model = DecayModel::none;
    for (double nu = 0.3; nu <= 0.7 + 1e-12; nu += step) {
        const auto res = simulate_cpmg(n, {tau}, NoiseModel::single_tone(nu, 0.01), opt);
        if (res.signal[0] < lowest) {
            lowest = res.signal[0];
            best_nu = nu;
        }
    }
    EXPECT_NEAR(best_nu, 0.5 / tau, step + 1e-12);
}

TEST(Cpmg, MonteCarloMatchesFilterFunctionForOu) {
    const double sigma = 0.015, tau_c = 20.0;
    const int n = 4;
    EnsembleOptions opt;
    opt.n_samples = 10000;
    opt.seed = 99;
    opt.fit_model = DecayModel::none;
    const std::vector<double> taus{5.0, 10.0, 15.0, 20.0};
    const auto mc = simulate_cpmg(n, taus, NoiseModel::ornstein_uhlenbeck(sigma, tau_c), opt);
    const auto psd = ou_psd_table(sigma, tau_c, 50.0);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double w = coherence_from_psd(psd, n, n * taus[k]);
        EXPECT_NEAR(mc.signal[k], w, 0.05 * w) << "tau=" << taus[k];
    }
}

TEST(Cpmg, Errors) {
    EXPECT_THROW(simulate_cpmg(1, {0.0}, NoiseModel::quasi_static(0.1)), InvalidArgument);
    EXPECT_THROW(simulate_cpmg(0, {1.0}, NoiseModel::quasi_static(0.1)), InvalidArgument);
    EXPECT_THROW(simulate_cpmg(1, {1.0}, NoiseModel::lindblad(0.1)), InvalidArgument);
}

TEST(FilterFunction, ZeroPsdGivesUnitCoherence) {
    const std::vector<PsdPoint> zero{{0.0, 0.0}, {10.0, 0.0}};
    EXPECT_EQ(coherence_from_psd(zero, 8, 5.0), 1.0);
}

TEST(FilterFunction, WhiteNoiseDecayIsExponential) {
    // chi = 2 pi^2 S0 int_0^inf |Y|^2 = pi^2 S0 t for free evolution.
    const double S0 = 1e-3;
    const std::vector<PsdPoint> white{{0.0, S0}, {400.0, S0}};
    for (double t : {1.0, 2.0, 4.0}) {
        const double lnW = std::log(coherence_from_psd(white, 0, t));
        EXPECT_NEAR(lnW, -oracle::pi * oracle::pi * S0 * t, 0.01 * oracle::pi * oracle::pi * S0 * t);
    }
}

TEST(FilterFunction, QuasiStaticLimitIsRamseyGaussian) {
    const double sigma = 0.1, width = 1e-5;
    const std::vector<PsdPoint> spike{{0.0, 2.0 * sigma * sigma / width}, {width, 0.0}};
    for (double t : {1.0, 3.0, 5.0}) {
        const double expected = std::exp(-2.0 * oracle::pi * oracle::pi * sigma * sigma * t * t);
        EXPECT_NEAR(coherence_from_psd(spike, 0, t), expected, 1e-4);
    }
}

TEST(FilterFunction, BoundedAndMonotoneInPsdMass) {
    const auto base = ou_psd_table(0.05, 3.0, 20.0, 50);
    auto more = base;
    for (auto& p : more) p.density *= 1.5;
    for (int n : {0, 1, 4}) {
        for (double t : {0.5, 5.0, 20.0}) {
            const double a = coherence_from_psd(base, n, t);
            const double b = coherence_from_psd(more, n, t);
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
            EXPECT_LE(b, a + 1e-15);
        }
    }
}

TEST(FilterFunction, SpectrumPeaksAtPassband) {
    const int n = 16;
    const double tau = 2.0;
    const auto flips = cpmg_flip_times(n, tau);
    double best = 0.0, best_nu = 0.0;
    for (double nu = 0.01; nu < 1.0; nu += 0.0025) {
        const double v = switching_spectrum(flips, n * tau, nu);
        if (v > best) {
            best = v;
            best_nu = nu;
        }
    }
    EXPECT_NEAR(best_nu, 1.0 / (2.0 * tau), 0.0025);
}

TEST(FilterFunction, RejectsBadTables) {
    EXPECT_THROW(coherence_from_psd({{0.0, 1.0}}, 0, 1.0), InvalidArgument);
    EXPECT_THROW(coherence_from_psd({{0.0, 1.0}, {1.0, -1.0}}, 0, 1.0), InvalidArgument);
    EXPECT_THROW(coherence_from_psd({{1.0, 1.0}, {0.5, 1.0}}, 0, 1.0), InvalidArgument);
    EXPECT_THROW(coherence_from_psd({{0.0, 1.0}, {1.0, INFINITY}}, 0, 1.0), InvalidArgument);
}

TEST(Fit, DecayModelsRecoverParameters) {
    std::vector<double> t = linspace(0.0, 50.0, 60), g(60), e(60), s(60);
    for (int k = 0; k < 60; ++k) {
        g[k] = 0.9 * std::exp(-std::pow(t[k] / 17.0, 2));
        e[k] = 0.8 * std::exp(-t[k] / 9.0);
        s[k] = std::exp(-std::pow(t[k] / 21.0, 3.0));
    }
    EXPECT_NEAR(fit_decay(t, g, DecayModel::gaussian).T, 17.0, 1e-6);
    EXPECT_NEAR(fit_decay(t, e, DecayModel::exponential).T, 9.0, 1e-6);
    const auto st = fit_decay(t, s, DecayModel::stretched);
    EXPECT_NEAR(st.T, 21.0, 1e-3);
    EXPECT_NEAR(st.exponent, 3.0, 1e-3);
}
