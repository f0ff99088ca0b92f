#include <gtest/gtest.h>

#include "donorsim/implantation.hpp"
#include "oracles.hpp"

using namespace donorsim;

namespace {
// P(N(mean, s^2) > threshold)
double gaussian_tail(double mean, double s, double threshold) {
    if (s == 0.0) return mean > threshold ? 1.0 : 0.0;
    return 0.5 * std::erfc((threshold - mean) / (s * std::sqrt(2.0)));
}
}  // namespace

TEST(PairSignal, FittedPairEnergyReproducesTable) {
    const double w = fit_w_pair(ion_table());
    // brute-force least squares over a fine grid as a second route
    double best_w = 0.0, best = INFINITY;
    for (double t = 3.0; t < 4.5; t += 1e-5) {
        double r = 0.0;
        for (const auto& ion : ion_table()) r += std::pow(1000.0 * ion.ionization_keV / t - ion.eh_pairs, 2);
        if (r < best) best = r, best_w = t;
    }
    EXPECT_NEAR(w, best_w, 2e-5);
    EXPECT_NEAR(w, kDefaultWPair, 0.01);
    for (const auto& ion : ion_table())
        EXPECT_NEAR(eh_pair_signal(ion.ionization_keV, w) / ion.eh_pairs, 1.0, 0.03) << ion.species;
}

TEST(PairSignal, QuotedValues) {
    EXPECT_NEAR(eh_pair_signal(3.5, 3.67), 953.7, 0.1);
    // 400 eV / 3.67 eV = 108.99; the unrounded fit (3.666 eV) gives 109.1
    EXPECT_EQ(std::lround(eh_pair_signal(0.4, kDefaultWPair)), 109);
    const double thr = eh_pair_signal(0.4, fit_w_pair(ion_table()));
    EXPECT_GE(thr, 109.0);
    EXPECT_LE(thr, 110.0);
    EXPECT_EQ(eh_pair_signal(0.0, 3.67), 0.0);
    EXPECT_NEAR(eh_pair_signal(3.5, 3.67, 1.2), 1.2 * eh_pair_signal(3.5, 3.67), 1e-12);
    EXPECT_THROW(eh_pair_signal(-1.0, 3.67), InvalidArgument);
    EXPECT_THROW(eh_pair_signal(1.0, 0.0), InvalidArgument);
}

TEST(Detection, ThresholdAtMeanGivesHalf) {
    IonSpec ion = ion_lookup("31P");
    DetectorSpec det;
    det.threshold = eh_pair_signal(ion.ionization_keV, det.w_pair);
    det.noise_sigma = 20.0;
    const auto r = ion_detection_mc(ion, det, 200000, 5, 0.0);
    EXPECT_NEAR(r.detection_prob, 0.5, 3.0 * r.detection_err);
}

TEST(Detection, MatchesGaussianTail) {
    for (double spread : {0.0, 0.1, 0.5}) {
        for (double thr : {110.0, 600.0, 900.0}) {
            IonSpec ion = ion_lookup("209Bi");
            DetectorSpec det;
            det.threshold = thr;
            det.noise_sigma = thr / 5.0;
            const auto r = ion_detection_mc(ion, det, 100000, 11, spread);
            const double s = std::hypot(spread * r.mean_signal, det.noise_sigma);
            const double expect = gaussian_tail(r.mean_signal, s, thr);
            EXPECT_NEAR(r.detection_prob, expect, 3.0 * std::sqrt(expect * (1 - expect) / 1e5) + 1e-12)
                << spread << " " << thr;
        }
    }
}

TEST(Detection, QuotedHighSignalCase) {
    IonSpec ion = ion_lookup("31P");
    DetectorSpec det;
    det.w_pair = 3.5 * 1000.0 / 950.0;  // mean exactly 950
    det.threshold = 110.0;
    det.noise_sigma = 22.0;
    const auto r = ion_detection_mc(ion, det, 50000, 2, 0.1);
    EXPECT_NEAR(r.mean_signal, 950.0, 1e-9);
    EXPECT_GT(r.detection_prob, 0.999);
    EXPECT_GT(gaussian_tail(950.0, std::hypot(95.0, 22.0), 110.0), 0.999);
}

TEST(Detection, NoiselessAboveThresholdAlwaysDetected) {
    DetectorSpec det;
    det.noise_sigma = 0.0;
    const auto r = ion_detection_mc(ion_lookup("123Sb"), det, 1000, 1, 0.0);
    EXPECT_EQ(r.detection_prob, 1.0);
}

TEST(Detection, MonotoneAndDeterministic) {
    const IonSpec ion = ion_lookup("75As");
    DetectorSpec det;
    det.noise_sigma = 200.0;
    double prev = 2.0;
    for (double thr : {500.0, 900.0, 1100.0, 1300.0}) {
        det.threshold = thr;
        const double p = ion_detection_mc(ion, det, 20000, 3, 0.1).detection_prob;
        EXPECT_LE(p, prev);
        prev = p;
    }
    set_thread_count(1);
    const auto a = ion_detection_mc(ion, det, 5000, 9, 0.2);
    set_thread_count(4);
    const auto b = ion_detection_mc(ion, det, 5000, 9, 0.2);
    set_thread_count(0);
    EXPECT_EQ(a.pulse_heights, b.pulse_heights);
    EXPECT_THROW(ion_detection_mc(ion, det, 10, 0, -0.1), InvalidArgument);
    EXPECT_THROW(ion_detection_mc(ion, det, 0, 0, 0.1), InvalidArgument);
}

TEST(Placement, QuadratureSum) {
    EXPECT_NEAR(placement_spread(ion_lookup("31P"), 10.0, 2.0), std::sqrt(100.0 + 6.25 + 4.0), 1e-12);
    EXPECT_NEAR(placement_spread(ion_lookup("31P"), 10.0, 2.0), 10.5, 0.01);
    EXPECT_EQ(placement_spread(ion_lookup("209Bi"), 0.0, 0.0), 5.0);
    EXPECT_EQ(placement_spread(0.0, 0.0, 0.0), 0.0);
    for (double ap : {0.0, 10.0, 40.0})
        EXPECT_LT(placement_spread(ion_lookup("209Bi"), ap, 2.0), placement_spread(ion_lookup("31P"), ap, 2.0));
    EXPECT_THROW(placement_spread(-1.0, 0.0, 0.0), InvalidArgument);
}

TEST(Yield, ClosedForm) {
    const auto z = array_yield(100, 0.0);
    EXPECT_EQ(z.p_all_correct, 1.0);
    EXPECT_EQ(z.expected_exposures, 1.0);
    EXPECT_NEAR(array_yield(100, 0.05).p_all_correct, std::pow(0.95, 100), 1e-15);
    EXPECT_NEAR(array_yield(100, 0.05).p_all_correct, 0.006, 0.0005);
    EXPECT_NEAR(array_yield(1, 0.2).p_all_correct, 0.8, 1e-15);
    EXPECT_NEAR(array_yield(1, 0.2).expected_exposures, 1.25, 1e-15);
    EXPECT_THROW(array_yield(10, 1.0), InvalidArgument);
    EXPECT_THROW(array_yield(0, 0.1), InvalidArgument);
}

TEST(Yield, MonteCarloMatchesClosedForm) {
    for (double f : {0.01, 0.05, 0.2}) {
        const auto mc = array_yield_mc(20, f, 40000, 4);
        const auto cf = array_yield(20, f);
        EXPECT_NEAR(mc.p_all_correct, cf.p_all_correct, 3.0 * mc.p_all_correct_err);
        EXPECT_NEAR(mc.mean_exposures, cf.expected_exposures, 0.01);
    }
}
