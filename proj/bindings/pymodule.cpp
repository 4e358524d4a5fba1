// Python bindings for the main operations: coherence curves, the purity
// witness, the detected-basis expansion, Fock-space coincidence scans and
// curve fitting.

#include <memory>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "femtohbt/fit.hpp"
#include "femtohbt/fock.hpp"
#include "femtohbt/optics.hpp"
#include "femtohbt/witness.hpp"

namespace py = pybind11;
using namespace femto;

namespace {

DensityOperator density_from_lists(Dims dims, const std::vector<std::vector<Complex>>& rows) {
    std::vector<Complex> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return DensityOperator(std::move(dims), std::move(flat));
}

} // namespace

PYBIND11_MODULE(femtohbt, m) {
    m.doc() = "Pion interferometry toolkit: coherence curves, entanglement "
              "witnessing, Fock-space coincidence correlations and curve fitting";
    m.attr("__version__") = "1.0.0";
    m.attr("RNG_ALGORITHM") = kRngAlgorithm;

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainErrorFemto", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    // --- qubit layer ---------------------------------------------------
    py::enum_<BellKind>(m, "BellKind")
        .value("PSI_PLUS", BellKind::PsiPlus)
        .value("PSI_MINUS", BellKind::PsiMinus)
        .value("PHI_PLUS", BellKind::PhiPlus)
        .value("PHI_MINUS", BellKind::PhiMinus);

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<Dims, std::vector<Complex>>(), py::arg("dims"), py::arg("amps"))
        .def_readonly("dims", &StateVector::dims)
        .def_readonly("amps", &StateVector::amps)
        .def("norm", &StateVector::norm)
        .def("normalized_copy", &StateVector::normalized_copy);

    py::class_<DensityOperator>(m, "DensityOperator")
        .def(py::init(&density_from_lists), py::arg("dims"), py::arg("matrix"))
        .def_static("from_state", &DensityOperator::from_state)
        .def_static("maximally_mixed", &DensityOperator::maximally_mixed)
        .def_readonly("dims", &DensityOperator::dims)
        .def_readonly("mat", &DensityOperator::mat);

    py::class_<WitnessReport>(m, "WitnessReport")
        .def_readonly("global_purity", &WitnessReport::global_purity)
        .def_readonly("local_purity_a", &WitnessReport::local_purity_a)
        .def_readonly("local_purity_b", &WitnessReport::local_purity_b)
        .def_readonly("p_symmetric_global", &WitnessReport::p_symmetric_global)
        .def_readonly("entangled", &WitnessReport::entangled)
        .def("to_json", &WitnessReport::to_json);

    py::class_<PairingScheme>(m, "PairingScheme")
        .def_static("detected_13_24", &PairingScheme::detected_13_24)
        .def_static("identity_12_34", &PairingScheme::identity_12_34);

    py::class_<DetectedBasisExpansion>(m, "DetectedBasisExpansion")
        .def_readonly("c_0011", &DetectedBasisExpansion::c_0011)
        .def_readonly("c_1100", &DetectedBasisExpansion::c_1100)
        .def_readonly("c_psi_plus", &DetectedBasisExpansion::c_psi_plus)
        .def_readonly("c_psi_minus", &DetectedBasisExpansion::c_psi_minus)
        .def_readonly("residual_norm", &DetectedBasisExpansion::residual_norm);

    py::class_<CoincidenceProbabilities>(m, "CoincidenceProbabilities")
        .def_readonly("p_plusminus_both", &CoincidenceProbabilities::p_plusminus_both)
        .def_readonly("p_plusplus_a", &CoincidenceProbabilities::p_plusplus_a)
        .def_readonly("p_minusminus_a", &CoincidenceProbabilities::p_minusminus_a);

    m.def("bell_state", &bell_state);
    m.def("werner_state", &werner_state);
    m.def("tensor_product", py::overload_cast<const StateVector&, const StateVector&>(&tensor_product));
    m.def("partial_trace", &partial_trace, py::arg("rho"), py::arg("keep"));
    m.def("purity", &purity);
    m.def("witness_verdict", &witness_verdict);
    m.def("detected_basis_expansion", &detected_basis_expansion);
    m.def("coincidence_probabilities", &coincidence_probabilities);
    m.def("purity_from_symmetric_probability", &purity_from_symmetric_probability);

    // --- optics layer --------------------------------------------------
    py::class_<OpticalContext>(m, "OpticalContext")
        .def(py::init<double>(), py::arg("wavenumber"))
        .def_readonly("k", &OpticalContext::k)
        .def("wavelength", &OpticalContext::wavelength);

    py::class_<CoherenceCurve>(m, "CoherenceCurve")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("baselines"), py::arg("values"))
        .def_readonly("baselines", &CoherenceCurve::baselines)
        .def_readonly("values", &CoherenceCurve::values)
        .def("write_csv_file", &CoherenceCurve::write_csv_file)
        .def_static("read_csv_file", &CoherenceCurve::read_csv_file);

    m.def("sinc", &sinc);
    m.def("coherence_single_tophat", &coherence_single_tophat);
    m.def("coherence_double_source", &coherence_double_source);
    m.def(
        "vcz_tophat",
        [](double alpha, const OpticalContext& ctx, const std::vector<double>& b) {
            return vcz_numeric_coherence(TopHat{alpha}, ctx, b);
        },
        py::arg("alpha"), py::arg("ctx"), py::arg("baselines"));
    m.def(
        "vcz_double_tophat",
        [](double separation, double width, const OpticalContext& ctx, const std::vector<double>& b) {
            return vcz_numeric_coherence(DoubleTopHat{separation, width}, ctx, b);
        },
        py::arg("separation"), py::arg("width"), py::arg("ctx"), py::arg("baselines"));

    // --- Fock layer ----------------------------------------------------
    py::class_<ChargeProbs>(m, "ChargeProbs")
        .def_readonly("p_mixed_both", &ChargeProbs::p_mixed_both)
        .def_readonly("p_plusplus_at_1", &ChargeProbs::p_plusplus_at_1)
        .def_readonly("p_minusminus_at_1", &ChargeProbs::p_minusminus_at_1);

    m.def(
        "minimal_two_source_scan",
        [](const std::vector<double>& momenta, const std::vector<double>& separations) {
            auto sp = std::make_shared<FockSpace>(ModeGrid(momenta), kDefaultTruncation);
            FockVector v = two_source_minimal_state(sp, 0, momenta.size() - 1, 0);
            return g4_scan(v, 0.0, separations, 0.0);
        },
        py::arg("momenta"), py::arg("separations"),
        "Normalized g4 scan for two pion pairs sharing one negative mode");
    m.def(
        "minimal_two_source_charge_probs",
        [](const std::vector<double>& momenta, double x1, double x2) {
            auto sp = std::make_shared<FockSpace>(ModeGrid(momenta), kDefaultTruncation);
            FockVector v = two_source_minimal_state(sp, 0, momenta.size() - 1, 0);
            return charge_resolved_probs(v, x1, x2, 0.0);
        },
        py::arg("momenta"), py::arg("x1"), py::arg("x2"));

    // --- fitting layer ---------------------------------------------------
    py::enum_<FitModelKind>(m, "FitModelKind")
        .value("SINGLE_TOPHAT", FitModelKind::SingleTopHat)
        .value("DOUBLE_SOURCE", FitModelKind::DoubleSource);

    py::class_<FitModel>(m, "FitModel")
        .def(py::init([](FitModelKind kind, const OpticalContext& ctx) { return FitModel{kind, ctx}; }),
             py::arg("kind"), py::arg("ctx"))
        .def("eval", &FitModel::eval)
        .def("n_params", &FitModel::n_params);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("params", &FitResult::params)
        .def_readonly("residual_rss", &FitResult::residual_rss)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("param_stderr", &FitResult::param_stderr)
        .def("to_json", &FitResult::to_json, py::arg("seed"));

    m.def(
        "synthesize_curve",
        [](const FitModel& model, const std::vector<double>& params, const std::vector<double>& b,
           double sigma, std::uint64_t seed) {
            return synthesize_curve(model, params, b, NoiseSpec{sigma, seed});
        },
        py::arg("model"), py::arg("params"), py::arg("baselines"), py::arg("sigma") = 0.0,
        py::arg("seed") = 0);
    m.def(
        "initial_guess",
        [](const CoherenceCurve& curve, const FitModel& model) { return initial_guess(curve, model).params; },
        py::arg("curve"), py::arg("model"));
    m.def("fit", &fit, py::arg("curve"), py::arg("model"), py::arg("guess"));
}
