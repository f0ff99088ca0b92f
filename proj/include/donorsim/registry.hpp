#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "donorsim/spin.hpp"

namespace donorsim {

enum class Donor { P31, As75, Sb121, Sb123, Bi209 };

inline constexpr std::array<Donor, 5> kAllDonors{Donor::P31, Donor::As75, Donor::Sb121, Donor::Sb123,
                                                  Donor::Bi209};

/// Electron gyromagnetic ratio used throughout, MHz/T.
inline constexpr double kGammaElectron = 28000.0;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double midpoint() const { return 0.5 * (lo + hi); }
    bool operator==(const Interval&) const = default;
};

/// Static parameters of one group-V donor species in silicon.
struct DonorSpecies {
    Donor id;
    std::string name;
    Spin I;
    double A;                          // hyperfine, MHz
    double gamma_n;                    // MHz/T
    std::optional<Interval> Qn;        // quadrupole moment, 1e-28 m^2
    std::optional<double> K;           // hyperfine strain coefficient, 1/strain
    std::optional<double> dnu_dA_low;  // |dnu/dA| for gamma_e B0 << A
    std::optional<double> dnu_dA_high; // |dnu/dA| for gamma_e B0 >> A

    bool operator==(const DonorSpecies&) const = default;
};

namespace detail {
inline const std::vector<DonorSpecies>& donor_table() {
    static const std::vector<DonorSpecies> table{
        {Donor::P31, "31P", Spin::from_twice(1), 117.53, 17.26, std::nullopt, 79.2, 1.0, 0.5},
        {Donor::As75, "75As", Spin::from_twice(3), 198.35, 7.31, Interval{0.314, 0.314}, 37.4, 2.0, 1.5},
        {Donor::Sb121, "121Sb", Spin::from_twice(5), 186.80, 10.26, Interval{-0.36, -0.54}, 32.8, 3.0, 2.5},
        {Donor::Sb123, "123Sb", Spin::from_twice(7), 101.52, 5.55, Interval{-0.49, -0.69}, std::nullopt,
         std::nullopt, std::nullopt},
        {Donor::Bi209, "209Bi", Spin::from_twice(9), 1475.4, 6.96, Interval{-0.37, -0.77}, 19.1, 5.0, 4.5},
    };
    return table;
}
}  // namespace detail

inline const DonorSpecies& donor_lookup(Donor id) {
    for (const auto& d : detail::donor_table())
        if (d.id == id) return d;
    throw InvalidArgument("unknown donor species");
}

inline const DonorSpecies& donor_lookup(std::string_view name) {
    for (const auto& d : detail::donor_table())
        if (d.name == name) return d;
    throw InvalidArgument("unknown donor species '" + std::string(name) + "'");
}

inline std::vector<std::string> donor_names() {
    std::vector<std::string> out;
    for (const auto& d : detail::donor_table()) out.push_back(d.name);
    return out;
}

/// Single-donor performance metrics. Times in seconds; pi-pulse in microseconds.
/// Absent entries are std::nullopt; T1 of the neutral nucleus is only bounded
/// from below and is stored with lower_bound set.
struct Benchmark {
    std::string system;  // "e-", "31P", "31P+"
    std::optional<double> T1_s;
    bool T1_is_lower_bound = false;
    double T2_star_s;
    double T2_hahn_s;
    double T2_cpmg_s;
    double pi_pulse_us;
    double F_meas;
    std::optional<double> F_clifford;

    bool operator==(const Benchmark&) const = default;
};

inline const std::vector<Benchmark>& benchmark_table() {
    static const std::vector<Benchmark> table{
        {"e-", 9.8, false, 0.27e-3, 1.1e-3, 0.55, 0.15, 0.92, 0.9994},
        {"31P", 100.0, true, 0.570e-3, 20e-3, 0.02, 25.0, 0.998, std::nullopt},
        {"31P+", std::nullopt, false, 600e-3, 1800e-3, 35.6, 30.0, 0.998, 0.9998},
    };
    return table;
}

inline const Benchmark& benchmark_lookup(std::string_view system) {
    for (const auto& b : benchmark_table())
        if (b.system == system) return b;
    throw InvalidArgument("unknown benchmark system '" + std::string(system) + "'");
}

/// Implantation parameters for a 20 nm deep implant.
struct IonSpec {
    std::string species;
    double energy_keV;
    double ionization_keV;
    int eh_pairs;
    double straggle_nm;

    bool operator==(const IonSpec&) const = default;
};

inline const std::vector<IonSpec>& ion_table() {
    static const std::vector<IonSpec> table{
        {"31P", 14.0, 3.5, 950, 10.0},
        {"75As", 23.0, 4.0, 1100, 7.0},
        {"123Sb", 26.0, 3.2, 870, 6.0},
        {"209Bi", 33.0, 2.8, 760, 5.0},
    };
    return table;
}

inline const IonSpec& ion_lookup(std::string_view species) {
    for (const auto& ion : ion_table())
        if (ion.species == species) return ion;
    throw InvalidArgument("no implantation data for ion '" + std::string(species) + "'");
}

inline std::vector<std::string> ion_names() {
    std::vector<std::string> out;
    for (const auto& ion : ion_table()) out.push_back(ion.species);
    return out;
}

// ---------------------------------------------------------------------------
// JSON form of the registry. Field names follow the table columns.

namespace detail {
template <class T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
template <class T>
std::optional<T> get_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}
}  // namespace detail

inline nlohmann::json to_json(const DonorSpecies& d) {
    nlohmann::json j;
    j["donor"] = d.name;
    j["I"] = d.I.value();
    j["A_MHz"] = d.A;
    j["gamma_n_MHz_per_T"] = d.gamma_n;
    j["Qn_1e-28_m2"] = d.Qn ? nlohmann::json::array({d.Qn->lo, d.Qn->hi}) : nlohmann::json(nullptr);
    j["K"] = detail::opt(d.K);
    j["dnu_dA_low_field"] = detail::opt(d.dnu_dA_low);
    j["dnu_dA_high_field"] = detail::opt(d.dnu_dA_high);
    return j;
}

inline DonorSpecies donor_from_json(const nlohmann::json& j) {
    DonorSpecies d = donor_lookup(j.at("donor").get<std::string>());
    d.I = Spin::from_double(j.at("I").get<double>());
    d.A = j.at("A_MHz").get<double>();
    d.gamma_n = j.at("gamma_n_MHz_per_T").get<double>();
    if (j.at("Qn_1e-28_m2").is_null()) {
        d.Qn.reset();
    } else {
        const auto& q = j.at("Qn_1e-28_m2");
        d.Qn = Interval{q.at(0).get<double>(), q.at(1).get<double>()};
    }
    d.K = detail::get_opt<double>(j, "K");
    d.dnu_dA_low = detail::get_opt<double>(j, "dnu_dA_low_field");
    d.dnu_dA_high = detail::get_opt<double>(j, "dnu_dA_high_field");
    require(d.A > 0 && d.gamma_n > 0, "registry entry for " + d.name + ": A and gamma_n must be positive");
    return d;
}

inline nlohmann::json to_json(const Benchmark& b) {
    return {{"system", b.system},
            {"T1_s", detail::opt(b.T1_s)},
            {"T1_is_lower_bound", b.T1_is_lower_bound},
            {"T2_star_s", b.T2_star_s},
            {"T2_hahn_s", b.T2_hahn_s},
            {"T2_cpmg_s", b.T2_cpmg_s},
            {"pi_pulse_us", b.pi_pulse_us},
            {"F_meas", b.F_meas},
            {"F_clifford", detail::opt(b.F_clifford)}};
}

inline Benchmark benchmark_from_json(const nlohmann::json& j) {
    return {j.at("system").get<std::string>(),   detail::get_opt<double>(j, "T1_s"),
            j.at("T1_is_lower_bound").get<bool>(), j.at("T2_star_s").get<double>(),
            j.at("T2_hahn_s").get<double>(),       j.at("T2_cpmg_s").get<double>(),
            j.at("pi_pulse_us").get<double>(),     j.at("F_meas").get<double>(),
            detail::get_opt<double>(j, "F_clifford")};
}

inline nlohmann::json to_json(const IonSpec& ion) {
    return {{"ion", ion.species},
            {"energy_keV", ion.energy_keV},
            {"ionization_keV", ion.ionization_keV},
            {"eh_pairs", ion.eh_pairs},
            {"straggle_nm", ion.straggle_nm}};
}

inline IonSpec ion_from_json(const nlohmann::json& j) {
    return {j.at("ion").get<std::string>(), j.at("energy_keV").get<double>(),
            j.at("ionization_keV").get<double>(), j.at("eh_pairs").get<int>(),
            j.at("straggle_nm").get<double>()};
}

struct Registry {
    std::vector<DonorSpecies> donors;
    std::vector<Benchmark> benchmarks;
    std::vector<IonSpec> ions;

    static Registry builtin() { return {detail::donor_table(), benchmark_table(), ion_table()}; }

    bool operator==(const Registry&) const = default;
};

inline nlohmann::json to_json(const Registry& r) {
    nlohmann::json j;
    j["donors"] = nlohmann::json::array();
    for (const auto& d : r.donors) j["donors"].push_back(to_json(d));
    j["benchmarks"] = nlohmann::json::array();
    for (const auto& b : r.benchmarks) j["benchmarks"].push_back(to_json(b));
    j["ions"] = nlohmann::json::array();
    for (const auto& ion : r.ions) j["ions"].push_back(to_json(ion));
    return j;
}

inline Registry registry_from_json(const nlohmann::json& j) {
    Registry r;
    for (const auto& d : j.at("donors")) r.donors.push_back(donor_from_json(d));
    for (const auto& b : j.at("benchmarks")) r.benchmarks.push_back(benchmark_from_json(b));
    for (const auto& ion : j.at("ions")) r.ions.push_back(ion_from_json(ion));
    return r;
}

}  // namespace donorsim
