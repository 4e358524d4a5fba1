// End-to-end checks of the command-line binary. The path to the built
// executable arrives in the FEMTOHBT_CLI environment variable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "femtohbt/fit.hpp"
#include "femtohbt/optics.hpp"

using namespace femto;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("FEMTOHBT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "FEMTOHBT_CLI must point at the built binary");
    return p;
}

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run(const std::string& args) {
    fs::path out = fs::temp_directory_path() / "femtohbt_cli_stdout.txt";
    std::string cmd = cli_path() + " " + args + " > " + out.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    std::ifstream is(out);
    std::stringstream ss;
    ss << is.rdbuf();
    fs::remove(out);
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path tmpdir() {
    fs::path d = fs::temp_directory_path() / "femtohbt_cli_test";
    fs::create_directories(d);
    return d;
}

// First number following "key": in a JSON-ish text (skips an optional '[').
double json_number(const std::string& text, const std::string& key) {
    auto p = text.find("\"" + key + "\"");
    REQUIRE_MESSAGE(p != std::string::npos, "missing key " << key);
    p = text.find(':', p) + 1;
    while (p < text.size() && (text[p] == ' ' || text[p] == '[')) ++p;
    return std::stod(text.substr(p));
}

} // namespace

TEST_CASE("version banner names the generator") {
    RunResult r = run("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("femtohbt 1.0.0") != std::string::npos);
    CHECK(r.stdout_text.find("splitmix64") != std::string::npos);
}

TEST_CASE("unknown flags are hard errors") {
    CHECK(run("coherence --bogus 1").exit_code == 1);
    CHECK(run("nonsense-subcommand").exit_code == 1);
    CHECK(run("").exit_code == 1);
}

TEST_CASE("coherence tophat run") {
    fs::path out = tmpdir() / "coh.csv";
    RunResult r = run("coherence --model tophat --k 1e15 --alpha 1e-9 --b-max 10 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::string text = slurp(out);
    CHECK(text.rfind("b,C_analytic,C_numeric\n", 0) == 0);
    // First data row: b = 0, both curves 1.
    std::istringstream is(text);
    std::string header, first;
    std::getline(is, header);
    std::getline(is, first);
    CHECK(first.rfind("0,1,1", 0) == 0);
    // max |delta| summary within quadrature tolerance.
    auto pos = r.stdout_text.find("= ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.stdout_text.substr(pos + 2)) <= 1e-6);
}

TEST_CASE("coherence double-source run hits the cosine zeros") {
    fs::path out = tmpdir() / "coh2.csv";
    double k = 1e7, beta = 2e-6;
    // Sample so that k*beta*b = pi/2 lands exactly on a grid point:
    // b = pi/(2*k*beta) with b_max = 2*b and 3 samples.
    double bz = M_PI / (2.0 * k * beta);
    std::ostringstream cmd;
    cmd.precision(17);
    cmd << "coherence --model double --k " << k << " --alpha 1e-7 --beta " << beta
        << " --b-min 0 --b-max " << 2.0 * bz << " --n-baselines 3 --out " << out.string();
    RunResult r = run(cmd.str());
    CHECK(r.exit_code == 0);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line); // header
    std::getline(is, line); // b = 0
    std::getline(is, line); // b = bz: cos^2 factor zero
    auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
    double analytic = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(std::abs(analytic) < 1e-12);
}

TEST_CASE("witness subcommand state specs") {
    RunResult plus = run("witness --state psi-plus");
    CHECK(plus.exit_code == 0);
    CHECK(plus.stdout_text.find("\"entangled\": true") != std::string::npos);
    CHECK(std::abs(json_number(plus.stdout_text, "global_purity") - 1.0) < 1e-12);

    RunResult prod = run("witness --state product");
    CHECK(prod.exit_code == 0);
    CHECK(prod.stdout_text.find("\"entangled\": false") != std::string::npos);

    RunResult werner = run("witness --state werner:0.5");
    CHECK(werner.exit_code == 0);
    CHECK(werner.stdout_text.find("\"entangled\": false") != std::string::npos);
    CHECK(std::abs(json_number(werner.stdout_text, "global_purity") - 0.4375) < 1e-12);

    CHECK(run("witness --state gibberish").exit_code == 1);
    CHECK(run("witness --state werner:2.0").exit_code == 1);
    CHECK(run("witness --state file:/nonexistent.json").exit_code == 1);
}

TEST_CASE("witness reads a density matrix from file") {
    fs::path f = tmpdir() / "state.json";
    // Maximally mixed two-qubit state.
    std::ofstream os(f);
    os << "{\"dims\":[2,2],\"re\":[";
    for (int i = 0; i < 16; ++i) os << ((i % 5 == 0) ? "0.25" : "0") << (i + 1 < 16 ? "," : "");
    os << "],\"im\":[";
    for (int i = 0; i < 16; ++i) os << "0" << (i + 1 < 16 ? "," : "");
    os << "]}";
    os.close();
    RunResult r = run("witness --state file:" + f.string());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"entangled\": false") != std::string::npos);
    CHECK(std::abs(json_number(r.stdout_text, "global_purity") - 0.25) < 1e-12);
}

TEST_CASE("fock default run reproduces the charge split") {
    fs::path d = tmpdir();
    fs::path scan = d / "scan.csv";
    fs::path probs = d / "probs.json";
    RunResult r = run("fock --scan-out " + scan.string() + " --out " + probs.string());
    CHECK(r.exit_code == 0);
    std::string j = slurp(probs);
    auto value_of = [&](const std::string& key) {
        auto p = j.find(key);
        REQUIRE(p != std::string::npos);
        return std::stod(j.substr(j.find(':', p) + 1));
    };
    CHECK(std::abs(value_of("p_mixed_both") - 0.5) < 1e-10);
    CHECK(std::abs(value_of("p_plusplus_at_1") - 0.25) < 1e-10);
    CHECK(std::abs(value_of("p_minusminus_at_1") - 0.25) < 1e-10);
    // Reported deviation against the closed form.
    auto pos = r.stdout_text.find("= ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.stdout_text.substr(pos + 2)) <= 1e-9);
    // Scan file is a valid curve.
    CoherenceCurve curve = CoherenceCurve::read_csv_file(scan.string());
    CHECK(curve.baselines.size() == 65);
}

TEST_CASE("fock single-source run is flat") {
    fs::path d = tmpdir();
    fs::path scan = d / "flat.csv";
    RunResult r = run("fock --single-source --scan-out " + scan.string() + " --out " +
                      (d / "flatprobs.json").string());
    CHECK(r.exit_code == 0);
    CoherenceCurve curve = CoherenceCurve::read_csv_file(scan.string());
    double lo = 1e300, hi = -1e300;
    for (double v : curve.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo <= 1e-12);
}

TEST_CASE("fit round trip through files") {
    fs::path d = tmpdir();
    fs::path in = d / "curve.csv";
    OpticalContext ctx(1e7);
    FitModel model{FitModelKind::SingleTopHat, ctx};
    std::vector<double> b;
    for (int i = 0; i < 120; ++i) b.push_back(0.005 + 1.2 * double(i) / 119.0);
    synthesize_curve(model, {1e-6}, b, {}).write_csv_file(in.string());

    fs::path out = d / "fit.json";
    RunResult r = run("fit --input " + in.string() + " --model tophat --k 1e7 --out " + out.string());
    CHECK(r.exit_code == 0);
    std::string j = slurp(out);
    CHECK(j.find("\"converged\": true") != std::string::npos);
    CHECK(std::abs(json_number(j, "params") - 1e-6) / 1e-6 < 1e-6);
    CHECK(j.find("\"rng_algorithm\": \"splitmix64\"") != std::string::npos);
}

TEST_CASE("fit reruns are byte identical") {
    fs::path d = tmpdir();
    fs::path in = d / "noisy.csv";
    OpticalContext ctx(1e7);
    FitModel model{FitModelKind::SingleTopHat, ctx};
    std::vector<double> b;
    for (int i = 0; i < 100; ++i) b.push_back(0.005 + 1.2 * double(i) / 99.0);
    synthesize_curve(model, {1e-6}, b, {0.01, 4242}).write_csv_file(in.string());

    fs::path o1 = d / "fit1.json", o2 = d / "fit2.json";
    CHECK(run("fit --input " + in.string() + " --seed 4242 --out " + o1.string()).exit_code == 0);
    CHECK(run("fit --input " + in.string() + " --seed 4242 --out " + o2.string()).exit_code == 0);
    CHECK(slurp(o1) == slurp(o2));
    CHECK(!slurp(o1).empty());
}

TEST_CASE("fit input validation") {
    fs::path d = tmpdir();
    fs::path tiny = d / "tiny.csv";
    {
        std::ofstream os(tiny);
        os << "b,C\n0,1\n0.5,0.5\n1,0.1\n";
    }
    CHECK(run("fit --input " + tiny.string()).exit_code == 1);

    fs::path bad = d / "bad.csv";
    {
        std::ofstream os(bad);
        os << "b,C\n0,1\nnot-a-number,0.5\n";
    }
    CHECK(run("fit --input " + bad.string()).exit_code == 1);
    CHECK(run("fit --input /nonexistent.csv").exit_code == 1);
}

TEST_CASE("expansion coefficient tables") {
    RunResult def = run("expansion");
    CHECK(def.exit_code == 0);
    CHECK(std::abs(json_number(def.stdout_text, "c_0011") - 0.5) < 1e-12);
    CHECK(std::abs(json_number(def.stdout_text, "c_1100") - 0.5) < 1e-12);
    CHECK(std::abs(json_number(def.stdout_text, "c_psi_plus") - 0.5) < 1e-12);
    CHECK(std::abs(json_number(def.stdout_text, "c_psi_minus") + 0.5) < 1e-12);
    CHECK(json_number(def.stdout_text, "residual_norm") < 1e-12);

    RunResult minus = run("expansion --input psi-minus");
    CHECK(minus.exit_code == 0);
    CHECK(std::abs(json_number(minus.stdout_text, "c_psi_plus") + 0.5) < 1e-12);
    CHECK(json_number(minus.stdout_text, "residual_norm") < 1e-12);

    RunResult ident = run("expansion --pairing 12,34");
    CHECK(ident.exit_code == 0);
    CHECK(std::abs(json_number(ident.stdout_text, "c_0011")) < 1e-12);
    CHECK(std::abs(json_number(ident.stdout_text, "c_psi_plus") - 1.0) < 1e-12);

    CHECK(run("expansion --pairing 14,23").exit_code == 1);
}

TEST_CASE("reruns of file-writing subcommands are byte identical") {
    fs::path d = tmpdir();
    fs::path a = d / "rerun_a.csv", b = d / "rerun_b.csv";
    CHECK(run("coherence --out " + a.string()).exit_code == 0);
    CHECK(run("coherence --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}
