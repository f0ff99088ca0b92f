#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "donorsim/donorsim.hpp"
#include "flat_config.hpp"

using namespace donorsim;
using nlohmann::json;

namespace {

struct Output {
    json results = json::object();
    std::vector<Table> tables;
};

/// Registers options on a subcommand and remembers how to report their values.
class Params {
  public:
    explicit Params(CLI::App* app) : app_(app) {}

    CLI::Option* real(const std::string& name, double& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v; });
        return app_->add_option("--" + name, v, help)->capture_default_str();
    }
    CLI::Option* integer(const std::string& name, int& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v; });
        return app_->add_option("--" + name, v, help)->capture_default_str();
    }
    CLI::Option* count(const std::string& name, std::size_t& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v; });
        return app_->add_option("--" + name, v, help)->capture_default_str()->check(CLI::PositiveNumber);
    }
    CLI::Option* text(const std::string& name, std::string& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v; });
        return app_->add_option("--" + name, v, help)->capture_default_str();
    }
    CLI::Option* flag(const std::string& name, bool& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v; });
        return app_->add_flag("--" + name, v, help);
    }
    /// Unset optionals are left out of the metadata.
    CLI::Option* maybe(const std::string& name, std::optional<double>& v, const std::string& help) {
        dumpers_.emplace_back(name, [&v]() -> json { return v ? json(*v) : json(); });
        return app_->add_option_function<double>("--" + name, [&v](double x) { v = x; }, help);
    }

    json dump() const {
        json j = json::object();
        for (const auto& [name, f] : dumpers_) {
            json v = f();
            if (!v.is_null()) j[name] = std::move(v);
        }
        return j;
    }

  private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<json()>>> dumpers_;
};

struct Command {
    CLI::App* app = nullptr;
    std::unique_ptr<Params> params;
    bool seeded = false;
    std::function<Output(std::uint64_t seed)> run;
};

using Commands = std::vector<Command>;

Command& add_command(CLI::App& app, Commands& cmds, const std::string& name, const std::string& help) {
    Command c;
    c.app = app.add_subcommand(name, help);
    c.params = std::make_unique<Params>(c.app);
    cmds.push_back(std::move(c));
    return cmds.back();
}

std::vector<double> linspace(double a, double b, int n) {
    require(n >= 1, "need at least one point");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    require(a > 0.0 && b > 0.0, "log grid bounds must be > 0");
    auto v = linspace(std::log(a), std::log(b), n);
    for (double& x : v) x = std::exp(x);
    return v;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

const auto kDonorNames = donor_names();
const auto kIonNames = ion_names();

// ---------------------------------------------------------------------------
// spin-core

void add_spectrum(CLI::App& app, Commands& cmds) {
    struct O {
        std::string donor = "31P";
        double b0 = 1.0;
        bool neutral = false;
        std::string band = "auto";
        double f_q = 0.0, eta = 0.0, threshold = 1e-3;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "spectrum", "Transition spectrum of a single donor");
    auto& p = *c.params;
    p.text("donor", o->donor, "Donor species")->check(CLI::IsMember(kDonorNames));
    p.real("b0", o->b0, "Static field, T")->check(CLI::NonNegativeNumber);
    p.flag("neutral", o->neutral, "Neutral donor (electron bound); default ionized");
    p.text("band", o->band, "esr, nmr or auto (esr when neutral)")->check(CLI::IsMember({"auto", "esr", "nmr"}));
    p.real("f_q", o->f_q, "Quadrupole coupling f_Q, MHz");
    p.real("eta", o->eta, "Quadrupole asymmetry")->check(CLI::Range(0.0, 1.0));
    p.real("threshold", o->threshold, "Minimum |<f|D|i>|^2")->check(CLI::NonNegativeNumber);
    c.run = [o](std::uint64_t) {
        const auto& d = donor_lookup(o->donor);
        const std::string band = o->band == "auto" ? (o->neutral ? "esr" : "nmr") : o->band;
        require(band == "nmr" || o->neutral, "--band esr needs --neutral");
        const auto H = build_static_hamiltonian(d, o->b0, o->neutral, QuadrupoleParams{o->f_q, o->eta});
        SpinOperators driven;
        if (o->neutral) {
            const auto sys = SpinSystem::donor(d.I);
            driven = sys.lifted(band == "esr" ? 0 : 1);
        } else {
            driven = spin_operators(d.I);
        }
        SpectrumOptions so;
        so.m_operator = HermitianOperator(driven.z);
        const auto lines = transition_spectrum(H, HermitianOperator(driven.x), o->threshold, so);
        Output out;
        Table t("lines", {"freq_MHz", "intensity", "i", "f", "delta_m"});
        for (const auto& l : lines)
            t.add({l.frequency, l.intensity, l.i, l.f, l.delta_m ? json(*l.delta_m) : json()});
        out.tables.push_back(std::move(t));
        out.results = {{"band", band}, {"dim", H.dim()}, {"n_lines", lines.size()}};
        return out;
    };
}

// ---------------------------------------------------------------------------
// dynamics and protocols

void add_rabi(CLI::App& app, Commands& cmds) {
    struct O {
        double b0 = 1.0, amplitude = 1e-4, detuning = 0.0, t_max = 2.0;
        int points = 121;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "rabi", "Electron Rabi oscillation under a resonant microwave drive");
    auto& p = *c.params;
    p.real("b0", o->b0, "Static field, T")->check(CLI::PositiveNumber);
    p.real("amplitude", o->amplitude, "Drive field B1, T")->check(CLI::PositiveNumber);
    p.real("detuning", o->detuning, "Drive minus Larmor frequency, MHz");
    p.real("t_max", o->t_max, "Trace length, us")->check(CLI::PositiveNumber);
    p.integer("points", o->points, "Trace points")->check(CLI::Range(4, 100000));
    c.run = [o](std::uint64_t) {
        const auto sys = electron_rabi_system(o->b0);
        const double f = kGammaElectron * o->b0 + o->detuning;
        const auto res = simulate_rabi(sys, f, o->amplitude, linspace(0.0, o->t_max, o->points));
        Output out;
        Table t("trace", {"t_us", "p_down"});
        for (std::size_t k = 0; k < res.times.size(); ++k) t.add({res.times[k], res.signal[k]});
        out.tables.push_back(std::move(t));
        const double rabi = 0.5 * kGammaElectron * o->amplitude;
        out.results = {{"rabi_MHz", opt_json(res.frequency)},
                       {"expected_rabi_MHz", std::hypot(rabi, o->detuning)},
                       {"contrast", opt_json(res.contrast)}};
        return out;
    };
}

void add_ramsey(CLI::App& app, Commands& cmds) {
    struct O {
        std::string system = "e-";
        std::optional<double> t2star;
        double detuning = 0.0, t_max = 0.0;
        int points = 41;
        std::size_t samples = 10000;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "ramsey", "Ramsey fringes with quasi-static Gaussian detuning noise");
    c.seeded = true;
    auto& p = *c.params;
    p.text("system", o->system, "Benchmark system supplying T2*")->check(CLI::IsMember({"e-", "31P", "31P+"}));
    p.maybe("t2star", o->t2star, "T2*, us (overrides --system)")->check(CLI::PositiveNumber);
    p.real("detuning", o->detuning, "Ramsey detuning, MHz");
    p.real("t_max", o->t_max, "Trace length, us (0 = 3 T2*)")->check(CLI::NonNegativeNumber);
    p.integer("points", o->points, "Trace points")->check(CLI::Range(3, 100000));
    p.count("samples", o->samples, "Noise realisations");
    c.run = [o](std::uint64_t seed) {
        const double t2 = o->t2star.value_or(benchmark_lookup(o->system).T2_star_s * 1e6);
        const double t_max = o->t_max > 0.0 ? o->t_max : 3.0 * t2;
        EnsembleOptions eo;
        eo.n_samples = o->samples;
        eo.seed = seed;
        const auto res = simulate_ramsey(o->detuning, NoiseModel::quasi_static(sigma_from_t2star(t2)),
                                         linspace(0.0, t_max, o->points), eo);
        Output out;
        Table t("trace", {"t_us", "signal", "signal_err", "envelope"});
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            const double x = res.times[k] / t2;
            t.add({res.times[k], res.signal[k], res.signal_err[k],
                   std::exp(-x * x) * std::cos(kTwoPi * o->detuning * res.times[k])});
        }
        out.tables.push_back(std::move(t));
        out.results = {{"t2star_us", t2},
                       {"fitted_t2star_us", opt_json(res.fitted_T)},
                       {"fit_exponent", opt_json(res.fit_exponent)},
                       {"linewidth_MHz", opt_json(res.linewidth)}};
        return out;
    };
}

void add_cpmg(CLI::App& app, Commands& cmds) {
    struct O {
        int n_pulses = 1;
        double sigma = 0.05, tau_c = 10.0, tau_min = 0.1, tau_max = 20.0, filter_tau = 1.0;
        int points = 30;
        std::size_t samples = 2000;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "cpmg", "Hahn echo / CPMG decay under Ornstein-Uhlenbeck noise");
    c.seeded = true;
    auto& p = *c.params;
    p.integer("n_pulses", o->n_pulses, "Number of pi pulses (1 = Hahn echo)")->check(CLI::Range(1, 100000));
    p.real("sigma", o->sigma, "Noise standard deviation, MHz")->check(CLI::NonNegativeNumber);
    p.real("tau_c", o->tau_c, "Noise correlation time, us")->check(CLI::PositiveNumber);
    p.real("tau_min", o->tau_min, "Smallest pulse spacing, us")->check(CLI::PositiveNumber);
    p.real("tau_max", o->tau_max, "Largest pulse spacing, us")->check(CLI::PositiveNumber);
    p.integer("points", o->points, "Number of spacings")->check(CLI::Range(1, 10000));
    p.count("samples", o->samples, "Noise realisations");
    p.real("filter_tau", o->filter_tau, "Spacing for the filter-function table, us")->check(CLI::PositiveNumber);
    c.run = [o](std::uint64_t seed) {
        require(o->tau_max >= o->tau_min, "--tau_max must be >= --tau_min");
        EnsembleOptions eo;
        eo.n_samples = o->samples;
        eo.seed = seed;
        eo.fit_model = o->points >= 3 ? DecayModel::stretched : DecayModel::none;
        const auto taus = logspace(o->tau_min, o->tau_max, o->points);
        const auto res = simulate_cpmg(o->n_pulses, taus, NoiseModel::ornstein_uhlenbeck(o->sigma, o->tau_c), eo);
        const auto psd = ou_psd_table(o->sigma, o->tau_c, 20.0 / o->tau_min);
        Output out;
        Table t("decay", {"T_us", "tau_us", "signal", "signal_err", "filter_prediction"});
        for (std::size_t k = 0; k < res.times.size(); ++k)
            t.add({res.times[k], taus[k], res.signal[k], res.signal_err[k],
                   coherence_from_psd(psd, o->n_pulses, res.times[k])});
        out.tables.push_back(std::move(t));

        const double T = o->n_pulses * o->filter_tau;
        const auto flips = cpmg_flip_times(o->n_pulses, o->filter_tau);
        const double nu_p = 0.5 / o->filter_tau;
        Table f("filter", {"nu_MHz", "filter"});
        double best = -1.0, nu_best = 0.0;
        for (double nu : linspace(0.0, 4.0 * nu_p, 801)) {
            const double y = switching_spectrum(flips, T, nu);
            f.add({nu, y});
            if (y > best) {
                best = y;
                nu_best = nu;
            }
        }
        out.tables.push_back(std::move(f));
        out.results = {{"fitted_T2_us", opt_json(res.fitted_T)},
                       {"fit_exponent", opt_json(res.fit_exponent)},
                       {"filter_peak_MHz", nu_best},
                       {"filter_peak_nominal_MHz", nu_p}};
        return out;
    };
}

// ---------------------------------------------------------------------------
// readout

void add_readout(CLI::App& app, Commands& cmds) {
    auto o = std::make_shared<ReadoutParams>();
    o->E_Z = 42000.0;
    o->T_el = 0.2;
    o->gamma_out = 0.02;
    o->gamma_in = 0.02;
    o->bandwidth = 0.1;
    o->window = 300.0;
    auto shots = std::make_shared<std::size_t>(20000);
    auto& c = add_command(app, cmds, "readout", "Energy-selective spin-to-charge readout Monte Carlo");
    c.seeded = true;
    auto& p = *c.params;
    p.real("ez", o->E_Z, "Zeeman splitting, MHz")->check(CLI::NonNegativeNumber);
    p.real("t_el", o->T_el, "Electron temperature, K")->check(CLI::NonNegativeNumber);
    p.real("gamma_out", o->gamma_out, "Tunnel-out rate, 1/us")->check(CLI::NonNegativeNumber);
    p.real("gamma_in", o->gamma_in, "Tunnel-in rate, 1/us")->check(CLI::NonNegativeNumber);
    p.real("bandwidth", o->bandwidth, "Detector bandwidth, MHz")->check(CLI::PositiveNumber);
    p.real("window", o->window, "Readout window, us")->check(CLI::PositiveNumber);
    p.real("fermi_offset", o->fermi_offset, "Fermi level above the level midpoint, MHz");
    p.count("shots", *shots, "Shots per initial state");
    c.run = [o, shots](std::uint64_t seed) {
        const auto r = spin_to_charge_readout(*o, SpinState::up, *shots, seed);
        Output out;
        out.results = {{"fidelity_up", r.fidelity_up},
                       {"fidelity_up_err", r.fidelity_up_err},
                       {"fidelity_down", r.fidelity_down},
                       {"fidelity_down_err", r.fidelity_down_err},
                       {"visibility", r.visibility},
                       {"ez_over_kt", o->T_el > 0.0 ? json(zeeman_to_thermal_ratio(o->E_Z, o->T_el)) : json()}};
        return out;
    };
}

void add_qnd(CLI::App& app, Commands& cmds) {
    struct O {
        double f_e = 0.92, p_flip = 1e-4;
        int n_max = 200;
        std::size_t trials = 5000;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "qnd", "Repeated QND nuclear readout: fidelity versus cycle count");
    c.seeded = true;
    auto& p = *c.params;
    p.real("f_e", o->f_e, "Single-shot electron readout fidelity")->check(CLI::Range(0.0, 1.0));
    p.real("p_flip", o->p_flip, "Nuclear flip probability per cycle")->check(CLI::Range(0.0, 1.0));
    p.integer("n_max", o->n_max, "Largest cycle count")->check(CLI::Range(1, 100000));
    p.count("trials", o->trials, "Trials per cycle count and nuclear state");
    c.run = [o](std::uint64_t seed) {
        Output out;
        Table t("sweep", {"N", "fidelity", "fidelity_err"});
        int best_n = 1;
        double best = -1.0;
        for (int n = 1; n <= o->n_max; ++n) {
            QndParams q;
            q.F_e_up = q.F_e_down = o->f_e;
            q.p_flip = o->p_flip;
            q.n_cycles = n;
            const auto r = qnd_nuclear_readout(q, o->trials, seed);
            t.add({n, r.fidelity, r.fidelity_err});
            if (r.fidelity > best) {
                best = r.fidelity;
                best_n = n;
            }
        }
        out.tables.push_back(std::move(t));
        out.results = {{"best_N", best_n}, {"best_fidelity", best}};
        return out;
    };
}

// ---------------------------------------------------------------------------
// multiqubit

void add_crot(CLI::App& app, Commands& cmds) {
    struct O {
        std::string donor1 = "31P", donor2 = "31P";
        std::optional<double> a1, a2;
        double j = 32.06, b0 = 1.4, rabi = 0.2, threshold = 1e-3;
        int line = -1;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "crot", "Exchange-coupled donor pair: ESR lines and CROT gate");
    auto& p = *c.params;
    p.text("donor1", o->donor1, "First donor")->check(CLI::IsMember(kDonorNames));
    p.text("donor2", o->donor2, "Second donor")->check(CLI::IsMember(kDonorNames));
    p.maybe("a1", o->a1, "Hyperfine of donor 1, MHz");
    p.maybe("a2", o->a2, "Hyperfine of donor 2, MHz");
    p.real("j", o->j, "Exchange, MHz")->check(CLI::NonNegativeNumber);
    p.real("b0", o->b0, "Static field, T")->check(CLI::NonNegativeNumber);
    p.real("rabi", o->rabi, "Gate Rabi frequency, MHz")->check(CLI::PositiveNumber);
    p.real("threshold", o->threshold, "Line intensity threshold")->check(CLI::NonNegativeNumber);
    p.integer("line", o->line, "Line index for the gate (-1 = first conditional line)");
    c.run = [o](std::uint64_t) {
        TwoDonorParams tp;
        tp.species1 = donor_lookup(o->donor1);
        tp.species2 = donor_lookup(o->donor2);
        tp.A1 = o->a1;
        tp.A2 = o->a2;
        tp.J = o->j;
        tp.B0 = o->b0;
        CrotSpectrumOptions so;
        so.threshold = o->threshold;
        const auto lines = crot_lines(tp, so);
        Output out;
        Table t("lines", {"freq_MHz", "intensity", "conditional", "target", "control_state"});
        int n_cond = 0, first_cond = -1;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const auto& l = lines[k];
            t.add({l.line.frequency, l.line.intensity, l.conditional, l.target, l.control_state});
            if (l.conditional) {
                if (first_cond < 0) first_cond = static_cast<int>(k);
                ++n_cond;
            }
        }
        out.tables.push_back(std::move(t));
        out.results = {{"n_lines", lines.size()}, {"n_conditional", n_cond}};
        if (n_cond >= 4) {
            const auto s = crot_pair_splittings(lines);
            out.results["pair_splittings_MHz"] = {s[0], s[1]};
        }
        const int idx = o->line >= 0 ? o->line : first_cond;
        if (idx >= 0) {
            require(idx < static_cast<int>(lines.size()), "--line exceeds the number of lines");
            const auto g = crot_gate(tp, static_cast<std::size_t>(idx), o->rabi, std::nullopt, so);
            out.results["gate"] = {{"line", idx},
                                   {"freq_MHz", g.line.line.frequency},
                                   {"duration_us", g.duration},
                                   {"drive_amplitude_T", g.drive_amplitude},
                                   {"fidelity", g.fidelity}};
        }
        return out;
    };
}

void add_flipflop(CLI::App& app, Commands& cmds) {
    struct O {
        std::string donor = "31P";
        double b0 = 0.2, e_ac = 0.0, r = 200.0, g_ref = 10.0, r_ref = 200.0, dephasing = 0.0, b0_max = 1.0;
        std::optional<double> a_eff, da_de;
        int points = 51;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "flipflop", "Flip-flop qubit splitting, EDSR drive and sqrt(iSWAP)");
    auto& p = *c.params;
    p.text("donor", o->donor, "Donor species")->check(CLI::IsMember(kDonorNames));
    p.real("b0", o->b0, "Static field, T")->check(CLI::NonNegativeNumber);
    p.maybe("a_eff", o->a_eff, "Effective hyperfine, MHz (default: species A)")->check(CLI::PositiveNumber);
    p.maybe("da_de", o->da_de, "Hyperfine sensitivity dA/dE, MHz per V/m");
    p.real("e_ac", o->e_ac, "Drive field amplitude, V/m")->check(CLI::NonNegativeNumber);
    p.real("r", o->r, "Donor separation, nm")->check(CLI::PositiveNumber);
    p.real("g_ref", o->g_ref, "Dipole coupling at r_ref, MHz")->check(CLI::PositiveNumber);
    p.real("r_ref", o->r_ref, "Reference separation, nm")->check(CLI::PositiveNumber);
    p.real("dephasing", o->dephasing, "Dephasing rate during sqrt(iSWAP), 1/us")->check(CLI::NonNegativeNumber);
    p.real("b0_max", o->b0_max, "Largest field in the splitting sweep, T")->check(CLI::PositiveNumber);
    p.integer("points", o->points, "Sweep points")->check(CLI::Range(2, 100000));
    c.run = [o](std::uint64_t) {
        const auto& d = donor_lookup(o->donor);
        FlipFlopParams fp = flipflop_params_for(d, o->b0);
        if (o->a_eff) fp.A_eff = *o->a_eff;
        fp.dA_dE_ac = o->da_de;
        fp.r = o->r;
        fp.g_ref = o->g_ref;
        fp.r_ref = o->r_ref;
        fp.validate_for(d);
        Output out;
        Table t("splitting", {"b0_T", "splitting_MHz"});
        for (double b : linspace(0.0, o->b0_max, o->points)) {
            FlipFlopParams q = fp;
            q.B0 = b;
            t.add({b, flipflop_splitting(q)});
        }
        out.tables.push_back(std::move(t));
        const double g = flipflop_dipole_coupling(o->r, o->g_ref, o->r_ref);
        const double t_gate = 1.0 / (8.0 * g);
        out.results = {{"splitting_MHz", flipflop_splitting(fp)},
                       {"subspace_gap_MHz", flipflop_subspace_gap(d, fp.A_eff, o->b0)},
                       {"dipole_coupling_MHz", g},
                       {"sqrt_iswap_time_us", t_gate},
                       {"sqrt_iswap_fidelity", xy_gate(g, t_gate, o->dephasing).fidelity}};
        if (o->da_de) {
            const auto e = edsr_rabi(fp, o->e_ac);
            out.results["edsr"] = {{"rabi_MHz", e.rabi_frequency},
                                   {"pi_time_us", std::isfinite(e.pi_time) ? json(e.pi_time) : json()},
                                   {"projection", e.projection}};
        }
        return out;
    };
}

// ---------------------------------------------------------------------------
// ner

void add_ner(CLI::App& app, Commands& cmds) {
    struct O {
        std::string donor = "123Sb", drive = "ixiz";
        double b0 = 1.4, f_q = 0.011, eta = 0.0, strength = 1e-4, rabi_t_max = 0.0, ramsey_t_max = 0.0;
        std::optional<double> rabi_from, rabi_to, t2n_star;
        int rabi_points = 201, ramsey_points = 41;
        std::size_t samples = 4000;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "ner", "Nuclear electric resonance spectrum, Rabi and Ramsey traces");
    c.seeded = true;
    auto& p = *c.params;
    p.text("donor", o->donor, "Donor species (I > 1/2)")->check(CLI::IsMember(kDonorNames));
    p.real("b0", o->b0, "Static field, T")->check(CLI::NonNegativeNumber);
    p.real("f_q", o->f_q, "Quadrupole coupling f_Q, MHz");
    p.real("eta", o->eta, "Quadrupole asymmetry")->check(CLI::Range(0.0, 1.0));
    p.text("drive", o->drive, "ixiz ({Ix,Iz} drive) or pm2 (Ix^2 - Iy^2)")->check(CLI::IsMember({"ixiz", "pm2"}));
    p.real("strength", o->strength, "Drive strength, MHz")->check(CLI::PositiveNumber);
    p.real("rabi_t_max", o->rabi_t_max, "Rabi trace length, us (0 = no trace)")->check(CLI::NonNegativeNumber);
    p.integer("rabi_points", o->rabi_points, "Rabi trace points")->check(CLI::Range(4, 100000));
    p.maybe("rabi_from", o->rabi_from, "m of the lower Rabi level (default: strongest line)");
    p.maybe("rabi_to", o->rabi_to, "m of the upper Rabi level");
    p.maybe("t2n_star", o->t2n_star, "Nuclear T2*, us (enables the Ramsey trace)")->check(CLI::PositiveNumber);
    p.real("ramsey_t_max", o->ramsey_t_max, "Ramsey trace length, us (0 = 3 T2n*)")->check(CLI::NonNegativeNumber);
    p.integer("ramsey_points", o->ramsey_points, "Ramsey trace points")->check(CLI::Range(3, 100000));
    p.count("samples", o->samples, "Ramsey noise realisations");
    c.run = [o](std::uint64_t seed) {
        require(o->rabi_from.has_value() == o->rabi_to.has_value(), "--rabi_from and --rabi_to go together");
        const auto& d = donor_lookup(o->donor);
        const NerDrive drive =
            o->drive == "ixiz" ? NerDrive::ixiz(o->strength) : NerDrive::quadratic_pm2(o->strength);
        NerSimOptions so;
        so.B0 = o->b0;
        so.f_Q = o->f_q;
        so.eta = o->eta;
        if (o->rabi_from) so.rabi_line = std::make_pair(*o->rabi_from, *o->rabi_to);
        if (o->rabi_t_max > 0.0) so.rabi_times = linspace(0.0, o->rabi_t_max, o->rabi_points);
        so.T2n_star = o->t2n_star;
        if (o->t2n_star)
            so.ramsey_times =
                linspace(0.0, o->ramsey_t_max > 0.0 ? o->ramsey_t_max : 3.0 * *o->t2n_star, o->ramsey_points);
        so.ensemble.n_samples = o->samples;
        so.ensemble.seed = seed;
        const auto res = ner_spectrum_sim(d, drive, so);

        Output out;
        Table t("lines", {"freq_MHz", "intensity", "delta_m", "label"});
        for (const auto& l : res.lines)
            t.add({l.frequency, l.intensity, l.delta_m ? json(*l.delta_m) : json(), l.label});
        out.tables.push_back(std::move(t));
        out.results = {{"n_lines", res.lines.size()}, {"nu_Q_MHz", res.nu_Q}};
        if (res.rabi) {
            Table r("rabi", {"t_us", "population"});
            for (std::size_t k = 0; k < res.rabi->times.size(); ++k) r.add({res.rabi->times[k], res.rabi->signal[k]});
            out.tables.push_back(std::move(r));
            out.results["rabi_line"] = res.rabi_line->label;
            out.results["predicted_rabi_MHz"] = res.predicted_rabi;
            out.results["rabi_MHz"] = opt_json(res.rabi->frequency);
        }
        if (res.ramsey) {
            Table r("ramsey", {"t_us", "signal", "signal_err"});
            for (std::size_t k = 0; k < res.ramsey->times.size(); ++k)
                r.add({res.ramsey->times[k], res.ramsey->signal[k], res.ramsey->signal_err[k]});
            out.tables.push_back(std::move(r));
            out.results["fitted_t2n_star_us"] = opt_json(res.ramsey->fitted_T);
        }
        return out;
    };
}

// ---------------------------------------------------------------------------
// chaos

struct TopOptions {
    ChaosDefaults def;
    double c1 = def.top.c1, c2 = def.top.c2, cd = def.top.cd, nu = def.top.nu;

    void add(Params& p) {
        p.real("c1", c1, "Linear precession coefficient, MHz");
        p.real("c2", c2, "Twisting coefficient, MHz per unit L^2");
        p.real("cd", cd, "Drive amplitude, MHz");
        p.real("nu", nu, "Drive frequency, MHz")->check(CLI::PositiveNumber);
    }
    TopParams top(double L_norm) const { return {c1, c2, cd, nu, L_norm}; }
};

void add_chaos_classical(CLI::App& app, Commands& cmds) {
    struct O : TopOptions {
        double l_norm = def.top.L_norm, theta = def.chaotic_theta, phi = def.chaotic_phi;
        int periods = 1000, steps = 256, lyapunov_periods = def.lyapunov_periods,
            lyapunov_steps = def.lyapunov_steps;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "chaos-classical", "Classical driven top: Poincare section and Lyapunov exponent");
    auto& p = *c.params;
    o->add(p);
    p.real("l_norm", o->l_norm, "|L|")->check(CLI::PositiveNumber);
    p.real("theta", o->theta, "Initial polar angle, rad");
    p.real("phi", o->phi, "Initial azimuth, rad");
    p.integer("periods", o->periods, "Drive periods")->check(CLI::Range(0, 10000000));
    p.integer("steps", o->steps, "RK4 steps per period")->check(CLI::Range(1, 1000000));
    p.integer("lyapunov_periods", o->lyapunov_periods, "Periods for the Lyapunov estimate (0 = skip)")
        ->check(CLI::Range(0, 10000000));
    p.integer("lyapunov_steps", o->lyapunov_steps, "Steps per period for the Lyapunov estimate")
        ->check(CLI::Range(1, 1000000));
    c.run = [o](std::uint64_t) {
        const TopParams tp = o->top(o->l_norm);
        const Vec3 L0 = unit_vector(o->theta, o->phi);
        const auto tr = classical_trajectory(tp, L0, o->periods, o->steps);
        Output out;
        Table t("strobe", {"period", "x", "y", "z"});
        double drift = 0.0;
        for (std::size_t k = 0; k < tr.strobe.size(); ++k) {
            const auto& L = tr.strobe[k];
            t.add({k, L.x(), L.y(), L.z()});
            drift = std::max(drift, std::abs(L.norm() - 1.0));
        }
        out.tables.push_back(std::move(t));
        out.results = {{"max_norm_drift", drift}};
        if (o->lyapunov_periods > 0) {
            const auto ly = lyapunov_exponent(tp, L0, o->lyapunov_periods, o->lyapunov_steps);
            out.results["lyapunov_per_period"] = ly.per_period;
            out.results["lyapunov_rate_per_us"] = ly.rate;
        }
        return out;
    };
}

void add_chaos_quantum(CLI::App& app, Commands& cmds) {
    struct O : TopOptions {
        int twice_i = def.twice_I, periods = def.n_periods, steps = def.steps_per_period;
        double dephasing = def.dephasing_rate, theta = def.chaotic_theta, phi = def.chaotic_phi;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "chaos-quantum", "Quantum driven top: stroboscopic spin-coherent evolution");
    auto& p = *c.params;
    o->add(p);
    p.integer("twice_i", o->twice_i, "2I of the nuclear spin")->check(CLI::Range(1, 200));
    p.real("dephasing", o->dephasing, "Iz dephasing rate, 1/us")->check(CLI::NonNegativeNumber);
    p.real("theta", o->theta, "Initial polar angle, rad");
    p.real("phi", o->phi, "Initial azimuth, rad");
    p.integer("periods", o->periods, "Drive periods")->check(CLI::Range(0, 10000000));
    p.integer("steps", o->steps, "Magnus steps per period")->check(CLI::Range(1, 1000000));
    c.run = [o](std::uint64_t) {
        const Spin I = Spin::from_twice(o->twice_i);
        const TopParams tp = o->top(1.0);
        const auto states = quantum_stroboscopic(
            tp, I, QuantumState::pure(spin_coherent_state(I, o->theta, o->phi)), o->periods, o->dephasing, o->steps);
        const auto s = spin_operators(I);
        const HermitianOperator ix(s.x), iy(s.y), iz(s.z);
        Output out;
        Table t("strobe", {"period", "purity", "jx", "jy", "jz"});
        for (std::size_t k = 0; k < states.size(); ++k) {
            const auto& st = states[k];
            t.add({k, st.purity(), st.expectation(ix) / I.value(), st.expectation(iy) / I.value(),
                   st.expectation(iz) / I.value()});
        }
        out.tables.push_back(std::move(t));
        out.results = {{"final_purity", states.back().purity()}};
        return out;
    };
}

void add_purity_map(CLI::App& app, Commands& cmds) {
    struct O : TopOptions {
        int twice_i = def.twice_I, periods = def.n_periods, steps = def.steps_per_period, n_theta = def.grid.n_theta,
            n_phi = def.grid.n_phi, lyapunov_periods = def.lyapunov_periods, lyapunov_steps = def.lyapunov_steps;
        double dephasing = def.dephasing_rate, lyapunov_threshold = def.lyapunov_threshold;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "purity-map",
                          "Purity map over spin-coherent states, split by classical chaos classification");
    auto& p = *c.params;
    o->add(p);
    p.integer("twice_i", o->twice_i, "2I of the nuclear spin")->check(CLI::Range(1, 200));
    p.real("dephasing", o->dephasing, "Iz dephasing rate, 1/us")->check(CLI::NonNegativeNumber);
    p.integer("periods", o->periods, "Drive periods")->check(CLI::Range(0, 10000000));
    p.integer("steps", o->steps, "Magnus steps per period")->check(CLI::Range(1, 1000000));
    p.integer("n_theta", o->n_theta, "Grid cells in theta")->check(CLI::Range(1, 10000));
    p.integer("n_phi", o->n_phi, "Grid cells in phi")->check(CLI::Range(1, 10000));
    p.integer("lyapunov_periods", o->lyapunov_periods, "Periods for the classification")
        ->check(CLI::Range(1, 10000000));
    p.integer("lyapunov_steps", o->lyapunov_steps, "Steps per period for the classification")
        ->check(CLI::Range(1, 1000000));
    p.real("lyapunov_threshold", o->lyapunov_threshold, "Chaotic above this exponent per period")
        ->check(CLI::NonNegativeNumber);
    c.run = [o](std::uint64_t) {
        const Spin I = Spin::from_twice(o->twice_i);
        const auto r = chaos_region_comparison(o->top(1.0), I, SphereGrid{o->n_theta, o->n_phi}, o->periods,
                                               o->dephasing, o->steps, o->lyapunov_periods, o->lyapunov_steps,
                                               o->lyapunov_threshold);
        Output out;
        Table t("map", {"theta", "phi", "purity", "lyapunov", "chaotic"});
        for (std::size_t k = 0; k < r.purity.size(); ++k)
            t.add({r.purity[k].theta, r.purity[k].phi, r.purity[k].value, r.lyapunov[k].value,
                   r.lyapunov[k].value > o->lyapunov_threshold});
        out.tables.push_back(std::move(t));
        out.results = {{"mean_purity_chaotic", r.mean_chaotic}, {"mean_purity_regular", r.mean_regular},
                       {"n_chaotic", r.n_chaotic},              {"n_regular", r.n_regular},
                       {"relative_gap", r.relative_gap}};
        return out;
    };
}

// ---------------------------------------------------------------------------
// sensing

std::string scaled_tesla(double v) {
    static const std::pair<double, const char*> units[] = {
        {1.0, "T"}, {1e-3, "mT"}, {1e-6, "uT"}, {1e-9, "nT"}, {1e-12, "pT"}, {1e-15, "fT"}};
    for (const auto& [scale, name] : units) {
        if (v >= scale || scale == 1e-15) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g %s/sqrt(Hz)", v / scale, name);
            return buf;
        }
    }
    return {};
}

void add_sense(CLI::App& app, Commands& cmds) {
    struct O {
        std::string system = "all", mode = "both";
        std::optional<double> gamma, c_eff, t2star, t2cpmg;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "sense", "DC and AC magnetic field sensitivity");
    auto& p = *c.params;
    p.text("system", o->system, "e-, 31P, 31P+, all, or custom")
        ->check(CLI::IsMember({"e-", "31P", "31P+", "all", "custom"}));
    p.text("mode", o->mode, "dc, ac or both")->check(CLI::IsMember({"dc", "ac", "both"}));
    p.maybe("gamma", o->gamma, "Gyromagnetic ratio, MHz/T (custom)")->check(CLI::PositiveNumber);
    p.maybe("c_eff", o->c_eff, "Readout efficiency C; overrides the default of 1 for benchmark systems")->check(CLI::Range(0.0, 1.0));
    p.maybe("t2star", o->t2star, "T2*, us (custom)")->check(CLI::PositiveNumber);
    p.maybe("t2cpmg", o->t2cpmg, "T2 under CPMG, us (custom)")->check(CLI::PositiveNumber);
    c.run = [o](std::uint64_t) {
        std::vector<std::pair<std::string, SensorSpec>> sensors;
        if (o->system == "custom") {
            require(o->gamma && o->c_eff, "--system custom needs --gamma and --c_eff");
            SensorSpec s;
            s.gamma = *o->gamma;
            s.C_eff = *o->c_eff;
            s.T2_star = o->t2star;
            s.T2_cpmg = o->t2cpmg;
            sensors.emplace_back("custom", s);
        } else {
            for (const std::string sys : {"e-", "31P", "31P+"})
                if (o->system == "all" || o->system == sys) {
                    SensorSpec s = sensor_from_benchmark(sys);
                    if (o->c_eff) s.C_eff = *o->c_eff;
                    sensors.emplace_back(sys, s);
                }
        }
        std::vector<SensingMode> modes;
        if (o->mode != "ac") modes.push_back(SensingMode::dc);
        if (o->mode != "dc") modes.push_back(SensingMode::ac);
        Output out;
        Table t("sensitivity", {"system", "mode", "gamma_MHz_per_T", "C_eff", "T2_us", "eta_T_per_rtHz", "display"});
        for (const auto& [name, s] : sensors) {
            for (auto m : modes) {
                const auto T2 = m == SensingMode::dc ? s.T2_star : s.T2_cpmg;
                if (!T2) continue;
                const double eta = magnetic_sensitivity(s, m);
                t.add({name, to_string(m), s.gamma, s.C_eff, *T2, eta, scaled_tesla(eta)});
                out.results[name + "_" + to_string(m)] = eta;
            }
        }
        require(!t.rows.empty(), "no sensitivity could be computed: supply --t2star or --t2cpmg");
        out.tables.push_back(std::move(t));
        return out;
    };
}

void add_strain(CLI::App& app, Commands& cmds) {
    struct O {
        std::string donor = "all", regime = "both";
        double epsilon = 1e-4, linewidth = 0.002;
    };
    auto o = std::make_shared<O>();
    auto names = kDonorNames;
    names.push_back("all");
    auto& c = add_command(app, cmds, "strain", "Hyperfine strain transduction (donor x field regime)");
    auto& p = *c.params;
    p.text("donor", o->donor, "Donor species or all")->check(CLI::IsMember(names));
    p.text("regime", o->regime, "low, high or both")->check(CLI::IsMember({"low", "high", "both"}));
    p.real("epsilon", o->epsilon, "Hydrostatic strain");
    p.real("linewidth", o->linewidth, "Resonance linewidth, MHz")->check(CLI::NonNegativeNumber);
    c.run = [o](std::uint64_t) {
        std::vector<FieldRegime> regimes;
        if (o->regime != "high") regimes.push_back(FieldRegime::low);
        if (o->regime != "low") regimes.push_back(FieldRegime::high);
        Output out;
        Table t("strain", {"donor", "regime", "K", "A_MHz", "dnu_dA", "dA_MHz", "dnu_MHz", "transduction_MHz",
                           "min_strain", "linear_regime"});
        for (const auto& name : donor_names()) {
            const auto& d = donor_lookup(name);
            if (o->donor != "all" && o->donor != d.name) continue;
            if (o->donor == "all" && !d.K) continue;
            require(d.K.has_value(), "--donor " + d.name + " has no strain data");
            for (auto r : regimes) {
                const auto s = strain_shift(d, o->epsilon, r);
                t.add({d.name, to_string(r), *d.K, d.A, dnu_dA(d, r), s.dA, s.dnu, strain_transduction(d, r),
                       min_detectable_strain(d, o->linewidth, r), s.linear_regime});
            }
        }
        out.results = {{"n_rows", t.rows.size()}, {"linear_regime", std::abs(o->epsilon) < 1e-3}};
        out.tables.push_back(std::move(t));
        return out;
    };
}

// ---------------------------------------------------------------------------
// ensemble-cavity

void add_cavity(CLI::App& app, Commands& cmds) {
    struct O {
        double f_c = 7400.0, kappa = 7.4e-3, g0 = 3e-3, gamma = 1.8e-3, detuning = 0.0, n_max = 1e6;
        std::string shape = "gaussian";
        int points = 61;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "cavity", "Ensemble-cavity cooperativity, Purcell rate and normal modes");
    auto& p = *c.params;
    p.real("f_c", o->f_c, "Cavity frequency, MHz")->check(CLI::PositiveNumber);
    p.real("kappa", o->kappa, "Cavity linewidth, MHz")->check(CLI::PositiveNumber);
    p.real("g0", o->g0, "Single-spin coupling, MHz")->check(CLI::NonNegativeNumber);
    p.real("gamma", o->gamma, "Spin linewidth (HWHM), MHz")->check(CLI::NonNegativeNumber);
    p.text("shape", o->shape, "gaussian or lorentzian")->check(CLI::IsMember({"gaussian", "lorentzian"}));
    p.real("detuning", o->detuning, "Spin minus cavity frequency, MHz");
    p.real("n_max", o->n_max, "Largest spin number in the sweep")->check(CLI::Range(1.0, 1e30));
    p.integer("points", o->points, "Sweep points")->check(CLI::Range(2, 100000));
    c.run = [o](std::uint64_t) {
        const CavityParams cav{o->f_c, o->kappa, 0.0};
        EnsembleParams ens;
        ens.g0 = o->g0;
        ens.Gamma = o->gamma;
        ens.shape = line_shape_from_string(o->shape);
        ens.detuning = o->detuning;
        Output out;
        Table t("sweep", {"N", "C", "g_ens_MHz", "splitting_MHz"});
        for (double n : logspace(1.0, o->n_max, o->points)) {
            ens.N = n;
            const auto co = cooperativity(cav, ens);
            t.add({n, co.C, co.g_ens, vacuum_rabi_splitting(cav, ens)});
        }
        out.tables.push_back(std::move(t));
        out.results = {{"N_unit_cooperativity", spins_for_unit_cooperativity(o->g0, o->kappa, o->gamma)},
                       {"purcell_rate_per_us", purcell_rate(o->g0, o->kappa, o->detuning)},
                       {"Q", cav.Q()}};
        return out;
    };
}

void add_storage(CLI::App& app, Commands& cmds) {
    struct O {
        double kappa = 1.0, kappa_int = 0.0, gamma = 0.1, duration = 10.0, detuning = 0.0, span = 8.0,
               gamma_h = 0.0;
        std::optional<double> g_ens;
        std::string shape = "lorentzian", pulse = "gaussian";
        int groups = 201;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "storage", "Microwave photon absorption by an inhomogeneous spin ensemble");
    auto& p = *c.params;
    p.real("kappa", o->kappa, "Cavity linewidth, MHz")->check(CLI::PositiveNumber);
    p.real("kappa_int", o->kappa_int, "Intrinsic part of kappa, MHz")->check(CLI::NonNegativeNumber);
    p.real("gamma", o->gamma, "Spin linewidth (HWHM), MHz")->check(CLI::PositiveNumber);
    p.maybe("g_ens", o->g_ens, "Ensemble coupling, MHz (default: matched)")->check(CLI::NonNegativeNumber);
    p.text("shape", o->shape, "Spin line shape")->check(CLI::IsMember({"gaussian", "lorentzian"}));
    p.text("pulse", o->pulse, "Input pulse shape")->check(CLI::IsMember({"gaussian", "square"}));
    p.real("duration", o->duration, "Pulse FWHM (gaussian) or length (square), us")->check(CLI::PositiveNumber);
    p.real("detuning", o->detuning, "Carrier minus cavity, MHz");
    p.integer("groups", o->groups, "Spin frequency groups")->check(CLI::Range(1, 1000000));
    p.real("span", o->span, "Line span in HWHM units")->check(CLI::PositiveNumber);
    p.real("gamma_h", o->gamma_h, "Homogeneous spin decay, MHz")->check(CLI::NonNegativeNumber);
    c.run = [o](std::uint64_t) {
        const CavityParams cav{7400.0, o->kappa, o->kappa_int};
        EnsembleParams ens;
        ens.N = 1.0;
        ens.Gamma = o->gamma;
        ens.g0 = o->g_ens.value_or(matched_g_ens(cav, o->gamma));
        ens.shape = line_shape_from_string(o->shape);
        InputPulse pulse;
        pulse.shape = pulse_shape_from_string(o->pulse);
        pulse.duration = o->duration;
        pulse.detuning = o->detuning;
        StorageOptions so;
        so.M = o->groups;
        so.span_hwhm = o->span;
        so.gamma_h = o->gamma_h;
        const auto r = photon_storage_sim(cav, ens, pulse, so);
        Output out;
        Table t("trace", {"t_us", "cavity_energy", "spin_energy", "output_power"});
        for (std::size_t k = 0; k < r.times.size(); ++k)
            t.add({r.times[k], r.cavity_energy[k], r.spin_energy[k], r.output_power[k]});
        out.tables.push_back(std::move(t));
        out.results = {{"g_ens_MHz", ens.g0},
                       {"absorbed_fraction", r.absorbed_fraction},
                       {"reflected", r.reflected},
                       {"cavity_residual", r.cavity_residual},
                       {"intrinsic_loss", r.intrinsic_loss},
                       {"input_energy", r.input_energy},
                       {"budget_error", r.budget_error}};
        return out;
    };
}

// ---------------------------------------------------------------------------
// implantation

void add_implant(CLI::App& app, Commands& cmds) {
    struct O {
        std::string ion = "31P";
        std::optional<double> w_pair, noise_sigma;
        double threshold_ev = 400.0, spread = 0.1, multiplier = 1.0, aperture = 0.0, stage = 0.0;
        std::size_t ions = 20000;
        int bins = 100;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "implant", "Single-ion implant detection: pulse heights and placement");
    c.seeded = true;
    auto& p = *c.params;
    p.text("ion", o->ion, "Implanted species")->check(CLI::IsMember(kIonNames));
    p.maybe("w_pair", o->w_pair, "Energy per e-h pair, eV (default: fit to the ion table)")
        ->check(CLI::PositiveNumber);
    p.real("threshold_ev", o->threshold_ev, "Detection threshold, eV")->check(CLI::NonNegativeNumber);
    p.maybe("noise_sigma", o->noise_sigma, "Detector noise, e-h pairs (default: threshold / 5)")
        ->check(CLI::NonNegativeNumber);
    p.real("spread", o->spread, "Relative spread of the ionization signal")->check(CLI::NonNegativeNumber);
    p.real("multiplier", o->multiplier, "Ionization multiplier")->check(CLI::NonNegativeNumber);
    p.count("ions", o->ions, "Simulated ions");
    p.integer("bins", o->bins, "Histogram bins")->check(CLI::Range(1, 1000000));
    p.real("aperture", o->aperture, "Aperture diameter, nm")->check(CLI::NonNegativeNumber);
    p.real("stage", o->stage, "Stage jitter sigma, nm")->check(CLI::NonNegativeNumber);
    c.run = [o](std::uint64_t seed) {
        const auto& ion = ion_lookup(o->ion);
        const double w = o->w_pair.value_or(fit_w_pair(ion_table()));
        DetectorSpec det = DetectorSpec::from_threshold_eV(o->threshold_ev, w);
        if (o->noise_sigma) det.noise_sigma = *o->noise_sigma;
        const auto r = ion_detection_mc(ion, det, o->ions, seed, o->spread, o->multiplier);
        const double s = std::hypot(o->spread * r.mean_signal, det.noise_sigma);
        const double tail = s > 0.0 ? 0.5 * std::erfc((det.threshold - r.mean_signal) / (std::sqrt(2.0) * s))
                                    : (r.mean_signal > det.threshold ? 1.0 : 0.0);

        const double hi = 2.0 * std::max(r.mean_signal, det.threshold);
        std::vector<std::size_t> counts(o->bins, 0);
        for (double h : r.pulse_heights) {
            const auto b = static_cast<long>(std::floor(h / hi * o->bins));
            if (b >= 0 && b < o->bins) ++counts[b];
        }
        Output out;
        Table t("histogram", {"bin_lo", "bin_hi", "count"});
        for (int b = 0; b < o->bins; ++b) t.add({hi * b / o->bins, hi * (b + 1) / o->bins, counts[b]});
        out.tables.push_back(std::move(t));
        out.results = {{"w_pair_eV", w},
                       {"threshold_pairs", det.threshold},
                       {"noise_sigma_pairs", det.noise_sigma},
                       {"mean_signal_pairs", r.mean_signal},
                       {"detection_prob", r.detection_prob},
                       {"detection_err", r.detection_err},
                       {"detection_prob_closed_form", tail},
                       {"placement_sigma_nm", placement_spread(ion, o->aperture, o->stage)}};
        return out;
    };
}

void add_yield(CLI::App& app, Commands& cmds) {
    struct O {
        int sites = 100;
        double f = 0.01;
        std::size_t arrays = 10000;
    };
    auto o = std::make_shared<O>();
    auto& c = add_command(app, cmds, "yield", "Counted-implant array yield versus false-negative rate");
    c.seeded = true;
    auto& p = *c.params;
    p.integer("sites", o->sites, "Sites per array")->check(CLI::Range(1, 100000000));
    p.real("f", o->f, "False-negative (missed ion) probability")->check(CLI::Range(0.0, 0.999999));
    p.count("arrays", o->arrays, "Simulated arrays");
    c.run = [o](std::uint64_t seed) {
        const auto y = array_yield(o->sites, o->f);
        const auto mc = array_yield_mc(o->sites, o->f, o->arrays, seed);
        Output out;
        out.results = {{"p_site_correct", y.p_site_correct},
                       {"p_all_correct", y.p_all_correct},
                       {"expected_exposures", y.expected_exposures},
                       {"mc_p_all_correct", mc.p_all_correct},
                       {"mc_p_all_correct_err", mc.p_all_correct_err},
                       {"mc_mean_exposures", mc.mean_exposures}};
        return out;
    };
}

// ---------------------------------------------------------------------------

std::string active_subcommand(int argc, char** argv, const Commands& cmds) {
    for (int k = 1; k < argc; ++k)
        for (const auto& c : cmds)
            if (c.app->get_name() == argv[k]) return argv[k];
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Donor spin qubits in silicon: simulations emitting CSV/JSON"};
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.require_subcommand(1);
    app.allow_config_extras(CLI::config_extras_mode::error);

    std::string output_path = "donorsim_out";
    std::string format = "json";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--output_path", output_path, "Directory receiving all output files");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "Seed of all random streams");
    app.add_option("--threads", threads, "Worker threads (default: all cores)")
        ->envname("DONORSIM_THREADS")
        ->check(CLI::Range(1u, 4096u));
    app.set_config("--config", "", "Flat config file (JSON object or key=value lines)");

    Commands cmds;
    add_spectrum(app, cmds);
    add_rabi(app, cmds);
    add_ramsey(app, cmds);
    add_cpmg(app, cmds);
    add_readout(app, cmds);
    add_qnd(app, cmds);
    add_crot(app, cmds);
    add_flipflop(app, cmds);
    add_ner(app, cmds);
    add_chaos_classical(app, cmds);
    add_chaos_quantum(app, cmds);
    add_purity_map(app, cmds);
    add_sense(app, cmds);
    add_strain(app, cmds);
    add_cavity(app, cmds);
    add_storage(app, cmds);
    add_implant(app, cmds);
    add_yield(app, cmds);

    app.config_formatter(std::make_shared<FlatConfig>(active_subcommand(argc, argv, cmds),
                                                      std::set<std::string>{"output_path", "format", "seed", "threads"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ConfigError& e) {
        std::cerr << "error: --config: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (threads > 0) set_thread_count(threads);

    Command* cmd = nullptr;
    for (auto& c : cmds)
        if (c.app->parsed()) cmd = &c;
    if (cmd == nullptr) {
        std::cerr << "error: no subcommand given\n";
        return 2;
    }
    const std::string name = cmd->app->get_name();

    Output out;
    try {
        out = cmd->run(seed);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << name << ": " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << name << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << name << ": " << e.what() << "\n";
        return 1;
    }

    json meta = cmd->params->dump();
    meta["command"] = name;
    meta["format"] = format;
    meta["seed"] = seed;

    std::vector<std::string> files;
    try {
        const std::filesystem::path dir(output_path);
        std::filesystem::create_directories(dir);
        if (format == "json") {
            json doc{{"metadata", meta}, {"results", out.results}, {"tables", json::object()}};
            for (const auto& t : out.tables) doc["tables"][t.name] = to_json(t);
            files.push_back(name + ".json");
            write_text(dir / files.back(), dump_json(doc, 2) + "\n");
        } else {
            for (const auto& t : out.tables) {
                files.push_back(name + "_" + t.name + ".csv");
                write_text(dir / files.back(), to_csv(t));
            }
            files.push_back(name + "_meta.json");
            write_text(dir / files.back(), dump_json(json{{"metadata", meta}, {"results", out.results}}, 2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: --output_path: " << e.what() << "\n";
        return 2;
    }

    std::cout << dump_json(json{{"command", name}, {"files", files}, {"metadata", meta}, {"results", out.results}})
              << "\n";
    return 0;
}
