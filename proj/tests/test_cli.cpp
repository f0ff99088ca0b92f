#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;  // stdout only
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("donorsim_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

/// Runs the CLI from `cwd` with the given argument string.
RunResult run(const std::string& args, const fs::path& cwd, const std::string& env = "") {
    const fs::path err = cwd / "stderr.txt";
    const std::string cmd = "cd '" + cwd.string() + "' && " + env + " '" + DONORSIM_CLI_PATH + "' " + args +
                            " 2>'" + err.string() + "'";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    fs::remove(err);
    return r;
}

json summary(const RunResult& r) { return json::parse(r.out); }

}  // namespace

TEST(Cli, NeutralPhosphorusSpectrumHasTwoEsrLines) {
    const auto dir = fresh_dir("spectrum");
    const auto r = run("spectrum --donor 31P --b0 1.0 --neutral --output_path out", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(slurp(dir / "out" / "spectrum.json"));
    ASSERT_EQ(doc["tables"]["lines"].size(), 2u);
    for (const auto& line : doc["tables"]["lines"]) {
        EXPECT_EQ(line["delta_m"], 1);
        EXPECT_NEAR(line["intensity"].get<double>(), 0.25, 1e-5);
    }
    const double lo = doc["tables"]["lines"][0]["freq_MHz"];
    const double hi = doc["tables"]["lines"][1]["freq_MHz"];
    EXPECT_NEAR(hi - lo, 117.53, 0.5);
}

TEST(Cli, SummaryIsOneLineOfSortedJson) {
    const auto dir = fresh_dir("summary");
    const auto r = run("strain --output_path out", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_FALSE(r.out.empty());
    EXPECT_EQ(r.out.find('\n'), r.out.size() - 1);
    const json s = summary(r);
    EXPECT_EQ(s.dump() + "\n", r.out);
    EXPECT_EQ(s["command"], "strain");
    EXPECT_EQ(s["files"][0], "strain.json");
    EXPECT_FALSE(s["metadata"].contains("threads"));
    EXPECT_FALSE(s["metadata"].contains("output_path"));
}

TEST(Cli, SameSeedGivesByteIdenticalOutput) {
    const auto dir = fresh_dir("seed");
    const auto a = run("spectrum --donor 31P --b0 1.0 --neutral --seed 7 --output_path a", dir);
    const auto b = run("spectrum --donor 31P --b0 1.0 --neutral --seed 7 --output_path b", dir);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(dir / "a" / "spectrum.json"), slurp(dir / "b" / "spectrum.json"));
}

TEST(Cli, SeededMonteCarloIsThreadIndependent) {
    const auto dir = fresh_dir("threads");
    for (const std::string cmd : {"ramsey --samples 2000", "implant --ions 5000", "yield --arrays 3000",
                                  "qnd --n_max 20 --trials 2000", "readout --shots 3000"}) {
        const auto one = run(cmd + " --seed 9 --threads 1 --output_path t1", dir);
        const auto four = run(cmd + " --seed 9 --output_path t4", dir, "DONORSIM_THREADS=4");
        ASSERT_EQ(one.code, 0) << cmd << one.err;
        ASSERT_EQ(four.code, 0) << cmd << four.err;
        EXPECT_EQ(one.out, four.out) << cmd;
        const std::string file = summary(one)["files"][0];
        EXPECT_EQ(slurp(dir / "t1" / file), slurp(dir / "t4" / file)) << cmd;
    }
}

TEST(Cli, DifferentSeedsChangeMonteCarloOutput) {
    const auto dir = fresh_dir("seeds");
    const auto a = run("yield --arrays 2000 --seed 1 --output_path a", dir);
    const auto b = run("yield --arrays 2000 --seed 2 --output_path b", dir);
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(summary(a)["results"]["mc_p_all_correct"], summary(b)["results"]["mc_p_all_correct"]);
    EXPECT_EQ(summary(a)["metadata"]["seed"], 1);
}

TEST(Cli, UnknownDonorExitsTwoNamingTheFlag) {
    const auto dir = fresh_dir("donor");
    const auto r = run("spectrum --donor 32P --output_path out", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--donor"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ArgumentErrorsExitTwo) {
    const auto dir = fresh_dir("args");
    EXPECT_EQ(run("", dir).code, 2);
    EXPECT_EQ(run("nonsense", dir).code, 2);
    auto r = run("spectrum --b0 -1", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--b0"), std::string::npos);
    r = run("spectrum --format xml", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--format"), std::string::npos);
    r = run("cavity --bogus 1", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--bogus"), std::string::npos);
    r = run("spectrum --threads 0", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--threads"), std::string::npos);
    r = run("spectrum --band esr", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--band"), std::string::npos);
}

TEST(Cli, NumericalFailureExitsOne) {
    const auto dir = fresh_dir("numerical");
    const auto r = run("storage --groups 5 --output_path out", dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(dir / "out" / "storage.json"));
}

TEST(Cli, ConfigStandsInForFlagsAndFlagsWin) {
    const auto dir = fresh_dir("config");
    {
        std::ofstream(dir / "c.json") << R"({"donor": "75As", "b0": 2.0, "neutral": true, "seed": 5})";
        std::ofstream(dir / "c.ini") << "# comment\ndonor = \"75As\"\nb0 = 2.0\nneutral = true\nseed = 5\n";
    }
    for (const std::string cfg : {"c.json", "c.ini"}) {
        const auto r = run("spectrum --config " + cfg + " --output_path a", dir);
        ASSERT_EQ(r.code, 0) << r.err;
        const json m = summary(r)["metadata"];
        EXPECT_EQ(m["donor"], "75As");
        EXPECT_EQ(m["b0"], 2.0);
        EXPECT_EQ(m["neutral"], true);
        EXPECT_EQ(m["seed"], 5);
        EXPECT_EQ(summary(r)["results"]["n_lines"], 4);

        const auto o = run("spectrum --config " + cfg + " --b0 0.5 --seed 6 --output_path b", dir);
        ASSERT_EQ(o.code, 0) << o.err;
        EXPECT_EQ(summary(o)["metadata"]["b0"], 0.5);
        EXPECT_EQ(summary(o)["metadata"]["seed"], 6);
        EXPECT_EQ(summary(o)["metadata"]["donor"], "75As");
    }
}

TEST(Cli, ConfigRejectsUnknownKeys) {
    const auto dir = fresh_dir("strict");
    std::ofstream(dir / "bad.json") << R"({"donor": "31P", "bfield": 1.0})";
    std::ofstream(dir / "nested.json") << R"({"donor": {"name": "31P"}})";
    std::ofstream(dir / "other.json") << R"({"command": "rabi"})";
    for (const std::string cfg : {"bad.json", "nested.json", "other.json"}) {
        const auto r = run("spectrum --config " + cfg + " --output_path out", dir);
        EXPECT_EQ(r.code, 2) << cfg;
        EXPECT_NE(r.err.find("--config"), std::string::npos) << r.err;
    }
    EXPECT_NE(run("spectrum --config bad.json", dir).err.find("bfield"), std::string::npos);
    EXPECT_EQ(run("spectrum --config missing.json", dir).code, 2);
}

TEST(Cli, MetadataReproducesTheRun) {
    const auto dir = fresh_dir("roundtrip");
    for (const std::string cmd : {"ramsey --samples 500 --seed 3", "ner --rabi_t_max 100 --rabi_points 21 --strength 0.01",
                                  "implant --ions 1000 --seed 4 --threshold_ev 300", "crot --j 20",
                                  "cpmg --points 4 --samples 200 --n_pulses 4 --seed 8", "flipflop --da_de 0.01 --e_ac 100"}) {
        const auto a = run(cmd + " --output_path a", dir);
        ASSERT_EQ(a.code, 0) << cmd << a.err;
        const std::string file = summary(a)["files"][0];
        const json doc = json::parse(slurp(dir / "a" / file));
        std::ofstream(dir / "meta.json") << doc["metadata"].dump();
        const auto b = run(summary(a)["command"].get<std::string>() + " --config meta.json --output_path b", dir);
        ASSERT_EQ(b.code, 0) << cmd << b.err;
        EXPECT_EQ(slurp(dir / "a" / file), slurp(dir / "b" / file)) << cmd;
    }
}

TEST(Cli, CsvHasHeaderCommasAndLfEndings) {
    const auto dir = fresh_dir("csv");
    const auto r = run("strain --format csv --output_path out", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const json s = summary(r);
    ASSERT_EQ(s["files"].size(), 2u);
    EXPECT_EQ(s["files"][0], "strain_strain.csv");
    EXPECT_EQ(s["files"][1], "strain_meta.json");
    const std::string csv = slurp(dir / "out" / "strain_strain.csv");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "donor,regime,K,A_MHz,dnu_dA,dA_MHz,dnu_MHz,transduction_MHz,min_strain,linear_regime");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9) << line;
    }
    EXPECT_EQ(rows, s["results"]["n_rows"].get<int>());
    EXPECT_EQ(csv.back(), '\n');
}

TEST(Cli, WritesOnlyInsideOutputPath) {
    const auto dir = fresh_dir("sandbox");
    for (const std::string cmd : {"spectrum --neutral", "sense", "cavity", "yield --arrays 100",
                                  "chaos-classical --periods 10 --lyapunov_periods 10"}) {
        for (const std::string fmt : {"csv", "json"}) {
            const auto r = run(cmd + " --format " + fmt + " --output_path out/nested", dir);
            ASSERT_EQ(r.code, 0) << cmd << r.err;
        }
    }
    std::vector<std::string> top;
    for (const auto& e : fs::directory_iterator(dir)) top.push_back(e.path().filename().string());
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0], "out");
    for (const auto& e : fs::recursive_directory_iterator(dir / "out"))
        if (e.is_regular_file()) EXPECT_EQ(e.path().parent_path(), dir / "out" / "nested");
}

TEST(Cli, EverySubcommandRunsWithDefaults) {
    const auto dir = fresh_dir("all");
    for (const std::string cmd :
         {"spectrum", "rabi", "ramsey", "cpmg", "readout", "qnd --n_max 30", "crot", "flipflop", "ner",
          "chaos-classical", "chaos-quantum", "purity-map --n_theta 4 --n_phi 8", "sense", "strain", "cavity",
          "storage", "implant", "yield"}) {
        const auto r = run(cmd + " --output_path out", dir);
        EXPECT_EQ(r.code, 0) << cmd << r.err;
        if (r.code == 0) EXPECT_TRUE(fs::exists(dir / "out" / summary(r)["files"][0].get<std::string>())) << cmd;
    }
}
