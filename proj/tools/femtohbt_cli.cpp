// Command-line front end: every experiment as a reproducible subcommand
// emitting CSV/JSON. Exit codes: 0 success, 1 argument/input error,
// 2 numerical failure or non-convergence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "femtohbt/fit.hpp"
#include "femtohbt/fock.hpp"
#include "femtohbt/optics.hpp"
#include "femtohbt/witness.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace femto;

namespace {

constexpr const char* kVersion = "1.0.0";

// Write-temp-then-rename so a failed run never leaves a truncated file.
void atomic_write(const std::string& path, const std::string& content) {
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ArgumentError("cannot open for writing: " + path);
        os << content;
        if (!os) throw ArgumentError("write failed: " + path);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw ArgumentError("rename failed for " + path + ": " + ec.message());
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        atomic_write(out_path, content);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw ArgumentError("n_baselines must be at least 2");
    if (!(hi > lo)) throw ArgumentError("b_max must exceed b_min");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

struct CoherenceArgs {
    std::string model = "tophat";
    double k = 1e7;
    double alpha = 1e-6;
    double beta = 2e-6;
    double b_min = 0.0;
    double b_max = 1.0;
    int n_baselines = 200;
    std::string out = "coherence.csv";
};

int cmd_coherence(const CoherenceArgs& a) {
    OpticalContext ctx(a.k);
    std::vector<double> b = linspace(a.b_min, a.b_max, a.n_baselines);

    std::vector<double> analytic(b.size());
    SourceProfile profile = TopHat{a.alpha};
    if (a.model == "tophat") {
        for (std::size_t i = 0; i < b.size(); ++i)
            analytic[i] = coherence_single_tophat(ctx, a.alpha, b[i]);
    } else if (a.model == "double") {
        for (std::size_t i = 0; i < b.size(); ++i)
            analytic[i] = coherence_double_source(ctx, a.alpha, a.beta, b[i]);
        // sinc^2(k alpha b) cos^2(k beta b) is the transform of two hats of
        // width 2*alpha whose centers sit 2*beta apart.
        profile = DoubleTopHat{2.0 * a.beta, 2.0 * a.alpha};
    } else {
        throw ArgumentError("unknown model: " + a.model + " (expected tophat or double)");
    }

    CoherenceCurve numeric = vcz_numeric_coherence(profile, ctx, b);

    std::ostringstream csv;
    csv << "b,C_analytic,C_numeric\n";
    double max_delta = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        max_delta = std::max(max_delta, std::abs(analytic[i] - numeric.values[i]));
        csv << fmt(b[i]) << ',' << fmt(analytic[i]) << ',' << fmt(numeric.values[i]) << '\n';
    }
    atomic_write(a.out, csv.str());
    std::cout << "max |delta| = " << fmt(max_delta) << "\n";
    return 0;
}

struct WitnessArgs {
    std::string state = "psi-plus";
    std::string out;
};

DensityOperator density_from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot open state file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ArgumentError("state file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.contains("dims") || !j.contains("re") || !j.contains("im"))
        throw ArgumentError("state file needs keys dims, re, im");
    Dims dims = j["dims"].get<Dims>();
    auto re = j["re"].get<std::vector<double>>();
    auto im = j["im"].get<std::vector<double>>();
    if (re.size() != im.size()) throw ArgumentError("re and im lengths differ");
    std::vector<Complex> mat(re.size());
    for (std::size_t i = 0; i < mat.size(); ++i) mat[i] = Complex(re[i], im[i]);
    return DensityOperator(std::move(dims), std::move(mat));
}

int cmd_witness(const WitnessArgs& a) {
    DensityOperator rho = DensityOperator::maximally_mixed({2, 2});
    if (a.state == "psi-plus") {
        rho = DensityOperator::from_state(bell_state(BellKind::PsiPlus));
    } else if (a.state == "product") {
        StateVector zero({2}, {Complex(1, 0), Complex(0, 0)});
        rho = DensityOperator::from_state(tensor_product(zero, zero));
    } else if (a.state.rfind("werner:", 0) == 0) {
        double p = 0;
        try {
            p = std::stod(a.state.substr(7));
        } catch (const std::exception&) {
            throw ArgumentError("bad werner visibility: " + a.state);
        }
        rho = werner_state(p);
    } else if (a.state.rfind("file:", 0) == 0) {
        rho = density_from_json_file(a.state.substr(5));
    } else {
        throw ArgumentError("unknown state spec: " + a.state +
                            " (expected psi-plus, product, werner:p or file:path)");
    }
    emit(a.out, witness_verdict(rho).to_json() + "\n");
    return 0;
}

struct FockArgs {
    int n_modes = 2;
    double g = 0.1;
    double dt = 0.01;
    double b_min = 0.0;
    double b_max = 3.141592653589793;
    int n_baselines = 65;
    bool single_source = false;
    std::string scan_out = "g4_scan.csv";
    std::string out;
};

int cmd_fock(const FockArgs& a) {
    if (a.n_modes < 2 || a.n_modes > 6) throw ArgumentError("n_modes must be in [2, 6]");
    std::vector<double> momenta(static_cast<std::size_t>(a.n_modes));
    for (int i = 0; i < a.n_modes; ++i)
        momenta[static_cast<std::size_t>(i)] = -1.0 + 2.0 * double(i) / double(a.n_modes - 1);
    ModeGrid grid(momenta, {0.0});
    auto space = std::make_shared<FockSpace>(grid, kDefaultTruncation);

    // Perturbative sanity of the requested coupling, reported but not fatal.
    PairSourceSpec probe = uniform_pair_spec(grid, {{0, static_cast<std::size_t>(a.n_modes) - 1}});
    FirstOrderResult first = first_order_state(HamiltonianConfig(a.g, a.dt), probe, space);
    if (first.perturbative_warning)
        std::cerr << "warning: pair amplitude |c1| = " << fmt(std::abs(first.c1))
                  << " exceeds 0.5; first-order evolution is unreliable here\n";

    FockVector state = a.single_source
                           ? two_source_state(probe, probe, space)
                           : two_source_minimal_state(space, 0, static_cast<std::size_t>(a.n_modes) - 1, 0);

    std::vector<double> seps = linspace(a.b_min, a.b_max, a.n_baselines);
    CoherenceCurve scan = g4_scan(state, 0.0, seps, 0.0);
    {
        std::ostringstream os;
        scan.write_csv(os);
        atomic_write(a.scan_out, os.str());
    }

    // Cross-check against the interference closed form (two distinct pi+
    // momenta sharing one pi- mode: (1 + cos(dk*b))/2).
    if (!a.single_source) {
        double dk = momenta[0] - momenta[static_cast<std::size_t>(a.n_modes) - 1];
        double max_dev = 0.0;
        for (std::size_t i = 0; i < seps.size(); ++i) {
            double expect = (1.0 + std::cos(dk * seps[i])) / 2.0;
            max_dev = std::max(max_dev, std::abs(scan.values[i] - expect));
        }
        std::cout << "max scan deviation from closed form = " << fmt(max_dev) << "\n";
    }

    ChargeProbs p = charge_resolved_probs(state, 0.0, 0.5, 0.0);
    std::ostringstream js;
    js.precision(17);
    js << "{\n  \"p_mixed_both\": " << p.p_mixed_both << ",\n  \"p_plusplus_at_1\": "
       << p.p_plusplus_at_1 << ",\n  \"p_minusminus_at_1\": " << p.p_minusminus_at_1 << "\n}\n";
    emit(a.out, js.str());
    return 0;
}

struct FitArgs {
    std::string input;
    std::string model = "tophat";
    double k = 1e7;
    std::uint64_t seed = 0;
    std::vector<double> guess;
    std::string out;
};

int cmd_fit(const FitArgs& a) {
    CoherenceCurve curve = CoherenceCurve::read_csv_file(a.input);
    FitModel model{a.model == "tophat" ? FitModelKind::SingleTopHat : FitModelKind::DoubleSource,
                   OpticalContext(a.k)};
    if (a.model != "tophat" && a.model != "double")
        throw ArgumentError("unknown model: " + a.model + " (expected tophat or double)");
    if (curve.baselines.size() < 4 * model.n_params() + 4)
        throw ArgumentError("too few samples: " + std::to_string(curve.baselines.size()) +
                            " rows, need at least " + std::to_string(4 * model.n_params() + 4));

    std::vector<double> guess = a.guess;
    if (guess.empty()) guess = initial_guess(curve, model).params;
    if (guess.size() != model.n_params())
        throw ArgumentError("guess has " + std::to_string(guess.size()) + " entries, model needs " +
                            std::to_string(model.n_params()));

    FitResult r = fit(curve, model, guess);
    emit(a.out, r.to_json(a.seed) + "\n");
    if (!r.converged) {
        std::cerr << "fit did not converge within " << kFitMaxIterations << " iterations\n";
        return 2;
    }
    return 0;
}

struct ExpansionArgs {
    std::string input = "psi-plus";
    std::string pairing = "13,24";
    std::string out;
};

int cmd_expansion(const ExpansionArgs& a) {
    BellKind kind;
    if (a.input == "psi-plus")
        kind = BellKind::PsiPlus;
    else if (a.input == "psi-minus")
        kind = BellKind::PsiMinus;
    else
        throw ArgumentError("unknown input state: " + a.input + " (expected psi-plus or psi-minus)");

    PairingScheme pairing = PairingScheme::detected_13_24();
    if (a.pairing == "12,34")
        pairing = PairingScheme::identity_12_34();
    else if (a.pairing != "13,24")
        throw ArgumentError("unknown pairing: " + a.pairing + " (expected 13,24 or 12,34)");

    StateVector pair = bell_state(kind);
    DetectedBasisExpansion e = detected_basis_expansion(tensor_product(pair, pair), pairing);

    std::ostringstream js;
    js.precision(17);
    auto coeff = [&](const char* name, Complex c, bool last = false) {
        js << "  \"" << name << "\": [" << c.real() << ", " << c.imag() << "]" << (last ? "\n" : ",\n");
    };
    js << "{\n";
    coeff("c_0011", e.c_0011);
    coeff("c_1100", e.c_1100);
    coeff("c_psi_plus", e.c_psi_plus);
    coeff("c_psi_minus", e.c_psi_minus);
    js << "  \"residual_norm\": " << e.residual_norm << "\n}\n";
    emit(a.out, js.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pion interferometry toolkit: coherence curves, entanglement "
                 "witnessing, Fock-space coincidence scans and curve fitting"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", std::string("femtohbt ") + kVersion + " (rng: " + kRngAlgorithm + ")");

    CoherenceArgs ca;
    auto* coh = app.add_subcommand("coherence", "Analytic vs numeric coherence curve");
    coh->add_option("--model", ca.model, "tophat or double");
    coh->add_option("--k", ca.k, "wavenumber (rad/m)");
    coh->add_option("--alpha", ca.alpha, "angular width");
    coh->add_option("--beta", ca.beta, "angular separation (double model)");
    coh->add_option("--b-min", ca.b_min, "smallest baseline");
    coh->add_option("--b-max", ca.b_max, "largest baseline");
    coh->add_option("--n-baselines", ca.n_baselines, "number of samples");
    coh->add_option("--out", ca.out, "output CSV path");

    WitnessArgs wa;
    auto* wit = app.add_subcommand("witness", "Purity witness on a two-qubit state");
    wit->add_option("--state", wa.state, "psi-plus, product, werner:p or file:path");
    wit->add_option("--out", wa.out, "output JSON path (default stdout)");

    FockArgs fa;
    auto* fock = app.add_subcommand("fock", "g4 coincidence scan and charge probabilities");
    fock->add_option("--n-modes", fa.n_modes, "pion momentum modes (2-6)");
    fock->add_option("--g", fa.g, "pair-production coupling");
    fock->add_option("--dt", fa.dt, "evolution step");
    fock->add_option("--b-min", fa.b_min, "smallest detector separation");
    fock->add_option("--b-max", fa.b_max, "largest detector separation");
    fock->add_option("--n-baselines", fa.n_baselines, "number of separations");
    fock->add_flag("--single-source", fa.single_source, "both pairs from one splitting (flat scan)");
    fock->add_option("--scan-out", fa.scan_out, "output CSV path for the scan");
    fock->add_option("--out", fa.out, "output JSON path (default stdout)");

    FitArgs ta;
    auto* fit_cmd = app.add_subcommand("fit", "Invert a coherence curve for source parameters");
    fit_cmd->add_option("--input", ta.input, "input CSV (b,C)")->required();
    fit_cmd->add_option("--model", ta.model, "tophat or double");
    fit_cmd->add_option("--k", ta.k, "wavenumber (rad/m)");
    fit_cmd->add_option("--seed", ta.seed, "seed recorded in the output");
    fit_cmd->add_option("--guess", ta.guess, "starting parameters (default: automatic)");
    fit_cmd->add_option("--out", ta.out, "output JSON path (default stdout)");

    ExpansionArgs ea;
    auto* exp = app.add_subcommand("expansion", "Detected-basis coefficients of a double Bell pair");
    exp->add_option("--input", ea.input, "psi-plus or psi-minus");
    exp->add_option("--pairing", ea.pairing, "13,24 or 12,34");
    exp->add_option("--out", ea.out, "output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (coh->parsed()) return cmd_coherence(ca);
        if (wit->parsed()) return cmd_witness(wa);
        if (fock->parsed()) return cmd_fock(fa);
        if (fit_cmd->parsed()) return cmd_fit(ta);
        if (exp->parsed()) return cmd_expansion(ea);
        std::cerr << app.help();
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
