#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "donorsim/donorsim.hpp"
#include "oracles.hpp"

using namespace donorsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAILED]");
        pass = pass && ok;
    }
};

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(DONORSIM_CLI_PATH) + "' " + args + " 2>/dev/null";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

// ---------------------------------------------------------------------------

Verdict registry_fidelity() {
    Verdict v;
    const Registry reg = Registry::builtin();
    const Registry back = registry_from_json(json::parse(to_json(reg).dump()));
    v.check(back == reg, "builtin registry == parsed(dumped(registry))");

    const auto& p = donor_lookup("31P");
    const auto& bi = donor_lookup("209Bi");
    v.check(p.A == 117.53 && p.I.twice() == 1 && bi.A == 1475.4 && bi.I.twice() == 9, "donor spot values");
    v.check(p.K == 79.2 && bi.K.has_value(), "strain coefficients present");
    const auto& ion = ion_lookup("31P");
    v.check(ion.energy_keV == 14.0 && ion.ionization_keV == 3.5 && ion.eh_pairs == 950 && ion.straggle_nm == 10.0,
            "31P implant row");
    v.check(reg.ions.size() == 4 && reg.donors.size() == 5, "table sizes 5 donors / 4 ions");
    return v;
}

Verdict esr_spectrum() {
    Verdict v;
    const auto& p = donor_lookup("31P");
    const double B0 = 1.0;
    const auto H = build_static_hamiltonian(p, B0, true);
    const auto lines = transition_spectrum(H, HermitianOperator(SpinSystem::donor(p.I).lifted(0).x), 1e-3);
    v.check(lines.size() == 2, std::to_string(lines.size()) + " ESR lines");
    if (lines.size() != 2) return v;
    const double lo = kGammaElectron * B0 - p.A / 2, hi = kGammaElectron * B0 + p.A / 2;
    const double d1 = std::abs(lines[0].frequency - lo), d2 = std::abs(lines[1].frequency - hi);
    v.check(d1 <= 0.3 && d2 <= 0.3, "|diag - (gB0 -+ A/2)| = " + fmt(d1) + ", " + fmt(d2) + " MHz <= 0.3");
    const auto br = oracle::breit_rabi_esr_spin_half(kGammaElectron, p.gamma_n, p.A, B0);
    const double e = std::max(std::abs(lines[0].frequency - br[0]), std::abs(lines[1].frequency - br[1]));
    v.check(e <= 1e-9, "Breit-Rabi vs diagonalisation " + fmt(e, "%.2e") + " MHz <= 1e-9");
    return v;
}

Verdict sensitivities() {
    Verdict v;
    struct Row {
        const char* system;
        SensingMode mode;
        double rounded;  // T/sqrt(Hz)
    };
    const Row rows[] = {{"e-", SensingMode::dc, 0.3e-9},
                        {"e-", SensingMode::ac, 10e-12},
                        {"31P+", SensingMode::dc, 10e-9},
                        {"31P+", SensingMode::ac, 2e-9}};
    for (const auto& r : rows) {
        const auto& b = benchmark_lookup(r.system);
        const double gamma_hz = (std::string(r.system) == "e-" ? 28000.0 : 17.26) * 1e6;
        const double own = r.mode == SensingMode::dc
                               ? 1.0 / (2.0 * oracle::pi * gamma_hz * std::sqrt(b.T2_star_s))
                               : 1.0 / (4.0 * gamma_hz * std::sqrt(b.T2_cpmg_s));
        const double eta = magnetic_sensitivity(sensor_from_benchmark(r.system), r.mode);
        const double rel = std::abs(eta / r.rounded - 1.0);
        const double exact = std::abs(eta - own) / own;
        v.check(rel <= 0.25 && exact <= 1e-12, std::string(r.system) + " " + to_string(r.mode) + " " +
                                                   fmt(eta, "%.3g") + " T/rtHz (vs rounded " +
                                                   fmt(r.rounded, "%.1g") + ": " + fmt(100 * rel, "%.0f") +
                                                   "%, closed form " + fmt(exact, "%.1e") + ")");
    }
    return v;
}

Verdict strain() {
    Verdict v;
    const auto& p = donor_lookup("31P");
    const auto s = strain_shift(p, 1e-4, FieldRegime::high);
    v.check(s.dA >= 0.9 && s.dA <= 1.0, "31P dA = " + fmt(s.dA) + " MHz in [0.9, 1.0]");
    v.check(s.dnu >= 0.45 && s.dnu <= 0.5, "31P dnu = " + fmt(s.dnu) + " MHz in [0.45, 0.5]");
    const double own = 0.5 * 79.2 * 1e-4 * 117.53;
    v.check(std::abs(s.dnu - own) <= 1e-12, "dnu = (dnu/dA) K eps A");
    const auto& bi = donor_lookup("209Bi");
    const double eps = min_detectable_strain(bi, 2e-3, FieldRegime::low);
    const double ref = 2e-3 / (5.0 * 19.1 * 1475.4);
    v.check(eps >= 1.0e-8 && eps <= 2.0e-8 && std::abs(eps / ref - 1.0) <= 1e-12,
            "209Bi min strain at 2 kHz linewidth (low field) = " + fmt(eps, "%.3g"));
    return v;
}

Verdict crot() {
    Verdict v;
    TwoDonorParams p;
    p.J = 32.06;
    p.B0 = 1.4;
    v.check(p.a1() == 117.53 && p.a2() == 117.53, "A = 117.53 MHz");
    const auto lines = crot_lines(p);
    v.check(lines.size() == 6, std::to_string(lines.size()) + " lines above threshold");
    int n_cond = 0;
    for (const auto& l : lines) n_cond += l.conditional;
    v.check(n_cond == 4, std::to_string(n_cond) + " conditional lines");
    if (n_cond != 4) return v;
    const auto split = crot_pair_splittings(lines);
    const double e = std::max(std::abs(split[0] / p.J - 1.0), std::abs(split[1] / p.J - 1.0));
    v.check(e <= 0.01, "pair splittings " + fmt(split[0]) + ", " + fmt(split[1]) + " MHz (max dev " +
                           fmt(100 * e, "%.2f") + "% of J)");
    double worst = 1.0;
    for (std::size_t k = 0; k < lines.size(); ++k)
        if (lines[k].conditional) worst = std::min(worst, crot_gate(p, k, 0.2).fidelity);
    v.check(worst > 0.99, "worst CROT pi-pulse fidelity at 0.2 MHz Rabi = " + fmt(worst, "%.6f"));
    return v;
}

Verdict ner() {
    Verdict v;
    double worst = 0.0;
    for (int twice : {3, 5, 7, 9}) {
        const Spin I = Spin::from_twice(twice);
        worst = std::max(worst, std::abs(ner_matrix_element(I, 0.5, -0.5, QuadraticOp::IxIz_sym)));
    }
    v.check(worst <= 1e-14, "|<-1/2|{Ix,Iz}|+1/2>| = " + fmt(worst, "%.1e"));

    const auto& sb = donor_lookup("123Sb");
    v.check(sb.I.twice() == 7, "123Sb has I = 7/2");
    NerSimOptions opt;
    opt.B0 = 1.4;
    opt.f_Q = 0.011;
    const auto lin = ner_spectrum_sim(sb, NerDrive::ixiz(1.0), opt);
    int dm1 = 0, dm2 = 0;
    for (const auto& l : lin.lines) {
        if (l.delta_m && std::abs(*l.delta_m) == 1) ++dm1;
        if (l.delta_m && std::abs(*l.delta_m) == 2) ++dm2;
    }
    v.check(dm1 == 6 && dm2 == 0, "{Ix,Iz} drive: " + std::to_string(dm1) + " of 7 dm=1 lines, " +
                                      std::to_string(dm2) + " dm=2 lines");
    // the +1/2 <-> -1/2 line is absent, so check that every line sits on the 6 f_Q comb
    std::vector<double> f;
    for (const auto& l : lin.lines) f.push_back(l.frequency);
    double err = 0.0;
    const double base = sb.gamma_n * opt.B0;
    for (double x : f) {
        const double n = (x - base) / (6.0 * opt.f_Q);
        err = std::max(err, std::abs(n - std::round(n)) * 6.0 * opt.f_Q);
    }
    v.check(err <= 1e-10, "all lines on the 6 f_Q comb to " + fmt(err, "%.1e") + " MHz");
    const auto quad = ner_spectrum_sim(sb, NerDrive::quadratic_pm2(1.0), opt);
    bool only2 = !quad.lines.empty();
    for (const auto& l : quad.lines) only2 = only2 && l.delta_m && std::abs(*l.delta_m) == 2;
    v.check(only2, "Ix^2 - Iy^2 drive: " + std::to_string(quad.lines.size()) + " lines, all dm = 2");
    return v;
}

Verdict coherence() {
    Verdict v;
    // Ramsey envelope
    const double t2 = 1.0;
    EnsembleOptions eo;
    eo.n_samples = 10000;
    eo.seed = 2024;
    const auto ram = simulate_ramsey(0.0, NoiseModel::quasi_static(sigma_from_t2star(t2)), linspace(0.0, 2.0, 21), eo);
    double zmax = 0.0;
    for (std::size_t k = 0; k < ram.times.size(); ++k) {
        const double env = std::exp(-std::pow(ram.times[k] / t2, 2));
        const double d = std::abs(ram.signal[k] - env);
        if (d > 1e-12) zmax = std::max(zmax, d / ram.signal_err[k]);
    }
    v.check(zmax <= 3.0, "Ramsey vs exp(-(t/T2*)^2): max |z| = " + fmt(zmax, "%.2f") + " at n = 1e4");

    // Hahn echo with quasi-static noise
    EnsembleOptions he;
    he.n_samples = 2000;
    he.seed = 5;
    he.fit_model = DecayModel::none;
    const auto echo = simulate_cpmg(1, linspace(0.5, 10.0, 20), NoiseModel::quasi_static(1.0), he);
    const double amin = *std::min_element(echo.signal.begin(), echo.signal.end());
    v.check(amin > 0.999, "Hahn echo amplitude with quasi-static noise >= " + fmt(amin, "%.12f"));

    // filter peak
    const int n = 64;
    const double tau = 1.0, step = 1e-3;
    const auto flips = cpmg_flip_times(n, tau);
    double best = -1.0, nu_best = 0.0;
    for (int k = 1; k < 2000; ++k) {
        const double nu = k * step;
        const double y = switching_spectrum(flips, n * tau, nu);
        if (y > best) {
            best = y;
            nu_best = nu;
        }
    }
    v.check(std::abs(nu_best - 0.5 / tau) <= step * (1.0 + 1e-9), "CPMG-64 filter peak at " + fmt(nu_best) + " MHz vs 1/(2 tau) = " +
                                                       fmt(0.5 / tau) + " (grid " + fmt(step) + ")");

    // Monte Carlo vs filter function under Gaussian (OU) noise
    const double sigma = 0.05, tau_c = 10.0;
    EnsembleOptions mc;
    mc.n_samples = 4000;
    mc.seed = 17;
    mc.fit_model = DecayModel::none;
    const std::vector<double> taus{0.5, 1.0, 2.0, 3.0, 4.0};
    const auto res = simulate_cpmg(4, taus, NoiseModel::ornstein_uhlenbeck(sigma, tau_c), mc);
    const auto psd = ou_psd_table(sigma, tau_c, 40.0);
    double rel = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double ff = coherence_from_psd(psd, 4, res.times[k]);
        rel = std::max(rel, std::abs(res.signal[k] - ff) / ff);
    }
    v.check(rel <= 0.05, "CPMG-4 MC vs filter function: max relative deviation " + fmt(100 * rel, "%.2f") +
                             "% (coherence " + fmt(res.signal.back(), "%.3f") + ".." + fmt(res.signal.front(), "%.3f") + ")");
    return v;
}

Verdict qnd() {
    Verdict v;
    const double Fe = benchmark_lookup("e-").F_meas;
    v.check(Fe == 0.92, "F_e = " + fmt(Fe));
    QndParams p;
    p.F_e_up = p.F_e_down = Fe;
    p.p_flip = 1e-4;
    std::vector<QndResult> sweep;
    for (int N = 1; N <= 200; ++N) {
        p.n_cycles = N;
        sweep.push_back(qnd_nuclear_readout(p, 10000, 31));
    }
    const auto best = std::max_element(sweep.begin(), sweep.end(),
                                       [](const QndResult& a, const QndResult& b) { return a.fidelity < b.fidelity; });
    const int n_best = static_cast<int>(best - sweep.begin()) + 1;
    v.check(best->fidelity > 0.998, "max MC fidelity " + fmt(best->fidelity, "%.5f") + " at N = " + std::to_string(n_best));
    const auto& last = sweep.back();
    const bool interior = n_best > 1 && n_best < 200 &&
                          last.fidelity < best->fidelity - 3.0 * (best->fidelity_err + last.fidelity_err);
    v.check(interior, "interior optimum: F(200) = " + fmt(last.fidelity, "%.5f") + " below the peak by > 3 SE");

    std::vector<double> exact;
    for (int N = 1; N <= 200; ++N)
        exact.push_back(oracle::qnd_fidelity(Fe, Fe, 1e-4, N, [N](int k) { return 2 * k > N; }));
    const auto eb = std::max_element(exact.begin(), exact.end());
    const int n_exact = static_cast<int>(eb - exact.begin()) + 1;
    v.check(*eb > 0.998 && n_exact > 1 && n_exact < 200,
            "exact distribution: peak " + fmt(*eb, "%.5f") + " at N = " + std::to_string(n_exact));
    return v;
}

Verdict chaos() {
    Verdict v;
    const json point = json::parse(slurp(fs::path(DONORSIM_SOURCE_DIR) / "configs" / "chaos_point.json"));
    const TopParams tp{point["c1"], point["c2"], point["cd"], point["nu"], point["l_norm"]};
    const Vec3 L0 = unit_vector(point["theta"], point["phi"]);

    const auto tr = classical_trajectory(tp, L0, 1000, point["steps"]);
    double drift = 0.0;
    for (const auto& L : tr.strobe) drift = std::max(drift, std::abs(L.norm() - 1.0));
    v.check(drift <= 1e-9, "|L| drift over 1e3 periods " + fmt(drift, "%.1e"));

    // cd = 0: stroboscopic points stay on the level set of the conserved energy
    TopParams integ = tp;
    integ.cd = 0.0;
    double scatter = 0.0;
    const int fine_steps = 1024;
    for (double theta : {0.4, 1.0, 1.6, 2.2, 2.8}) {
        const Vec3 start = unit_vector(theta, 0.7);
        const auto t = classical_trajectory(integ, start, 1000, fine_steps);
        const double e0 = top_energy(integ, t.strobe.front() * integ.L_norm, 0.0);
        for (const auto& L : t.strobe) {
            const Vec3 l = L * integ.L_norm;
            const Vec3 g = top_gradient(integ, l, 0.0);
            const Vec3 gt = g - g.dot(l) / l.squaredNorm() * l;  // gradient along the sphere
            if (gt.norm() > 1e-12)
                scatter = std::max(scatter, std::abs(top_energy(integ, l, 0.0) - e0) / gt.norm() / integ.L_norm);
        }
    }
    v.check(scatter < 1e-6, "cd = 0 Poincare points off their invariant curve by <= " + fmt(scatter, "%.1e") + " (" +
                                  std::to_string(fine_steps) + " RK4 steps per period)");

    const fs::path out = fs::temp_directory_path() / "donorsim_acceptance_chaos";
    fs::remove_all(out);
    const auto ly = cli("chaos-classical --config '" + (fs::path(DONORSIM_SOURCE_DIR) / "configs" / "chaos_point.json").string() +
                        "' --output_path '" + out.string() + "'");
    double lambda = -1.0;
    if (ly.code == 0) lambda = json::parse(ly.out)["results"]["lyapunov_per_period"];
    v.check(ly.code == 0 && lambda > 0.0, "Lyapunov exponent at the configured chaotic point " + fmt(lambda, "%.4f") + " per period");

    const auto pm = cli("purity-map --config '" + (fs::path(DONORSIM_SOURCE_DIR) / "configs" / "chaos_default.json").string() +
                        "' --output_path '" + out.string() + "'");
    if (pm.code != 0) {
        v.check(false, "purity-map with the shipped default config exited " + std::to_string(pm.code));
        return v;
    }
    const json r = json::parse(pm.out)["results"];
    const double gap = r["relative_gap"];
    v.check(gap >= 0.05, "default config purity: chaotic " + fmt(r["mean_purity_chaotic"].get<double>(), "%.4f") +
                             " (" + std::to_string(r["n_chaotic"].get<int>()) + " pts) vs regular " +
                             fmt(r["mean_purity_regular"].get<double>(), "%.4f") + " (" +
                             std::to_string(r["n_regular"].get<int>()) + " pts), gap " + fmt(100 * gap, "%.1f") + "%");
    return v;
}

Verdict cavity() {
    Verdict v;
    const CavityParams cav{7400.0, 7.4e-3, 0.0};
    const double g0 = 3e-3, Gamma = 1.8e-3;
    const double n_unit = std::ceil(cav.kappa * Gamma / (g0 * g0));
    EnsembleParams e;
    e.g0 = g0;
    e.Gamma = Gamma;
    e.N = n_unit - 1;
    const double c_below = cooperativity(cav, e).C;
    e.N = n_unit;
    const double c_at = cooperativity(cav, e).C;
    v.check(n_unit == 2 && spins_for_unit_cooperativity(g0, cav.kappa, Gamma) == 2 && c_below < 1.0 && c_at >= 1.0,
            "C crosses 1 at N = " + fmt(spins_for_unit_cooperativity(g0, cav.kappa, Gamma)) + " (C(1) = " +
                fmt(c_below, "%.3f") + ", C(2) = " + fmt(c_at, "%.3f") + ")");
    const double gp = purcell_rate(g0, cav.kappa, 0.0), own = 4.0 * g0 * g0 / cav.kappa;
    v.check(std::abs(gp - own) <= 1e-12 * own, "resonant Purcell rate = 4 g^2 / kappa (rel " +
                                                   fmt(std::abs(gp - own) / own, "%.1e") + ")");

    const CavityParams c2{7400.0, 1.0, 0.0};
    EnsembleParams ens;
    ens.N = 1.0;
    ens.Gamma = 0.1;
    ens.shape = LineShape::lorentzian;
    ens.g0 = matched_g_ens(c2, ens.Gamma);
    InputPulse pulse;
    pulse.duration = 10.0;
    const auto s = photon_storage_sim(c2, ens, pulse);
    v.check(s.budget_error <= 1e-6, "storage energy budget error " + fmt(s.budget_error, "%.1e"));
    v.check(s.absorbed_fraction > 0.9, "absorbed fraction " + fmt(s.absorbed_fraction, "%.4f") +
                                           " at g_ens^2 = kappa Gamma_FWHM / 4");
    return v;
}

Verdict implantation() {
    Verdict v;
    const double w = fit_w_pair(ion_table());
    double worst = 0.0;
    for (const auto& ion : ion_table())
        worst = std::max(worst, std::abs(eh_pair_signal(ion.ionization_keV, w) / ion.eh_pairs - 1.0));
    v.check(worst <= 0.03, "fitted w_pair = " + fmt(w, "%.4f") + " eV, worst e-h count deviation " + fmt(100 * worst, "%.2f") + "%");
    const double pairs = 400.0 / w;
    v.check(pairs >= 109.0 && pairs <= 110.0, "400 eV -> " + fmt(pairs, "%.2f") + " pairs");

    const auto& ion = ion_lookup("31P");
    DetectorSpec det;
    det.w_pair = w;
    const double mean = eh_pair_signal(ion.ionization_keV, w);
    det.threshold = 0.93 * mean;
    det.noise_sigma = 30.0;
    const double spread = 0.08;
    const auto mc = ion_detection_mc(ion, det, 40000, 99, spread);
    const double s = std::hypot(spread * mean, det.noise_sigma);
    const double closed = oracle::normal_upper_tail((det.threshold - mean) / s);
    const double z = std::abs(mc.detection_prob - closed) / mc.detection_err;
    v.check(z <= 3.0, "MC detection " + fmt(mc.detection_prob, "%.4f") + " vs Gaussian tail " + fmt(closed, "%.4f") +
                          " (" + fmt(z, "%.2f") + " SE)");
    const double sp = placement_spread(ion_lookup("31P"), 10.0, 2.0);
    const double sbi = placement_spread(ion_lookup("209Bi"), 10.0, 2.0);
    v.check(sbi < sp, "placement sigma Bi " + fmt(sbi, "%.3f") + " nm < P " + fmt(sp, "%.3f") + " nm");
    return v;
}

Verdict determinism() {
    Verdict v;
    const std::vector<std::string> cmds{
        "spectrum --donor 31P --b0 1.0 --neutral",
        "rabi",
        "ramsey --samples 4000",
        "cpmg --points 8 --samples 1000",
        "readout --shots 5000",
        "qnd --n_max 40 --trials 4000",
        "crot",
        "flipflop --da_de 0.01 --e_ac 100",
        "ner --rabi_t_max 50 --rabi_points 41 --strength 0.01 --t2n_star 100 --samples 2000",
        "chaos-classical",
        "chaos-quantum",
        "purity-map --n_theta 6 --n_phi 12",
        "sense",
        "strain",
        "cavity",
        "storage",
        "implant --ions 10000",
        "yield --arrays 5000"};
    const fs::path root = fs::temp_directory_path() / "donorsim_acceptance_det";
    int identical = 0;
    std::string bad;
    for (const auto& c : cmds) {
        bool same = true;
        std::vector<std::string> outs;
        std::vector<std::vector<std::string>> files;
        int k = 0;
        for (const std::string& threads : {"1", "1", "4"}) {
            const fs::path dir = root / std::to_string(k++);
            fs::remove_all(dir);
            const auto r = cli(c + " --seed 7 --threads " + threads + " --output_path '" + dir.string() + "'");
            same = same && r.code == 0;
            outs.push_back(r.out);
            std::vector<std::string> f;
            if (r.code == 0) {
                const json summary = json::parse(r.out);
                for (const auto& name : summary.at("files")) f.push_back(slurp(dir / name.get<std::string>()));
            }
            files.push_back(f);
        }
        for (std::size_t j = 1; j < outs.size(); ++j) same = same && outs[j] == outs[0] && files[j] == files[0];
        same = same && !files[0].empty();
        if (same) {
            ++identical;
        } else {
            bad += " " + c.substr(0, c.find(' '));
        }
    }
    v.check(identical == static_cast<int>(cmds.size()),
            std::to_string(identical) + "/" + std::to_string(cmds.size()) +
                " subcommands byte-identical across two runs and threads {1, 4}" + (bad.empty() ? "" : ":" + bad));
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"Registry fidelity", registry_fidelity},
        {"Spectrum check", esr_spectrum},
        {"Sensitivity arithmetic", sensitivities},
        {"Strain", strain},
        {"CROT structure", crot},
        {"NER selection rules", ner},
        {"Coherence protocols", coherence},
        {"QND readout", qnd},
        {"Chaos", chaos},
        {"Cavity", cavity},
        {"Implantation", implantation},
        {"Determinism", determinism}};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << k + 1 << ". " << criteria[k].first << ": " << v.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
