#include "femtohbt/witness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace femto {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Amplitudes of a 4-qubit product state X_A (x) Y_B for a given pairing,
// expressed in the original qubit order 1234 (qubit 1 most significant).
std::vector<Complex> paired_product(const PairingScheme& pairing,
                                    const std::array<Complex, 4>& x,
                                    const std::array<Complex, 4>& y) {
    std::vector<Complex> amps(16);
    for (std::size_t idx = 0; idx < 16; ++idx) {
        auto bit = [&](std::size_t q) { return (idx >> (4 - q)) & 1u; }; // q is 1-based
        std::size_t ax = bit(pairing.detector_a[0]) * 2 + bit(pairing.detector_a[1]);
        std::size_t by = bit(pairing.detector_b[0]) * 2 + bit(pairing.detector_b[1]);
        amps[idx] = x[ax] * y[by];
    }
    return amps;
}

std::array<Complex, 4> two_qubit_amps(BellKind kind) {
    switch (kind) {
        case BellKind::PsiPlus: return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
        case BellKind::PsiMinus: return {0.0, kInvSqrt2, -kInvSqrt2, 0.0};
        case BellKind::PhiPlus: return {kInvSqrt2, 0.0, 0.0, kInvSqrt2};
        case BellKind::PhiMinus: return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
    }
    throw ArgumentError("unknown Bell kind");
}

} // namespace

PairingScheme::PairingScheme(std::array<std::size_t, 2> a, std::array<std::size_t, 2> b)
    : detector_a(a), detector_b(b) {
    std::array<std::size_t, 4> all{a[0], a[1], b[0], b[1]};
    std::sort(all.begin(), all.end());
    if (all != std::array<std::size_t, 4>{1, 2, 3, 4})
        throw ArgumentError("pairing must be a permutation of qubits 1..4");
}

StateVector bell_state(BellKind kind) {
    auto a = two_qubit_amps(kind);
    return StateVector({2, 2}, {a[0], a[1], a[2], a[3]});
}

DensityOperator werner_state(double p) {
    if (p < 0 || p > 1) throw ArgumentError("Werner parameter must be in [0,1]");
    DensityOperator bell = DensityOperator::from_state(bell_state(BellKind::PsiPlus));
    std::vector<Complex> m(16);
    for (std::size_t i = 0; i < 16; ++i) m[i] = p * bell.mat[i];
    for (std::size_t i = 0; i < 4; ++i) m[i * 4 + i] += (1 - p) / 4.0;
    return DensityOperator({2, 2}, std::move(m));
}

DetectedBasisExpansion detected_basis_expansion(const StateVector& state, const PairingScheme& pairing) {
    if (state.dims != Dims{2, 2, 2, 2}) throw ArgumentError("state must be a 4-qubit state");
    if (!state.normalized()) throw ArgumentError("state must be normalized");

    const std::array<Complex, 4> ket00{1.0, 0.0, 0.0, 0.0};
    const std::array<Complex, 4> ket11{0.0, 0.0, 0.0, 1.0};
    const std::array<Complex, 4> psip = two_qubit_amps(BellKind::PsiPlus);
    const std::array<Complex, 4> psim = two_qubit_amps(BellKind::PsiMinus);

    std::array<std::vector<Complex>, 4> basis = {
        paired_product(pairing, ket00, ket11),
        paired_product(pairing, ket11, ket00),
        paired_product(pairing, psip, psip),
        paired_product(pairing, psim, psim),
    };

    DetectedBasisExpansion out{};
    std::array<Complex*, 4> cs{&out.c_0011, &out.c_1100, &out.c_psi_plus, &out.c_psi_minus};
    out.residual_amps_ = state.amps;
    for (std::size_t k = 0; k < 4; ++k) {
        Complex c(0, 0);
        for (std::size_t i = 0; i < 16; ++i) c += std::conj(basis[k][i]) * state.amps[i];
        *cs[k] = c;
        for (std::size_t i = 0; i < 16; ++i) out.residual_amps_[i] -= c * basis[k][i];
    }
    double r2 = 0;
    for (const Complex& c : out.residual_amps_) r2 += std::norm(c);
    out.residual_norm = std::sqrt(r2);
    return out;
}

StateVector DetectedBasisExpansion::resum(const PairingScheme& pairing) const {
    const std::array<Complex, 4> ket00{1.0, 0.0, 0.0, 0.0};
    const std::array<Complex, 4> ket11{0.0, 0.0, 0.0, 1.0};
    const std::array<Complex, 4> psip = two_qubit_amps(BellKind::PsiPlus);
    const std::array<Complex, 4> psim = two_qubit_amps(BellKind::PsiMinus);

    std::vector<Complex> amps = residual_amps_;
    std::array<std::pair<Complex, std::vector<Complex>>, 4> terms = {
        std::make_pair(c_0011, paired_product(pairing, ket00, ket11)),
        std::make_pair(c_1100, paired_product(pairing, ket11, ket00)),
        std::make_pair(c_psi_plus, paired_product(pairing, psip, psip)),
        std::make_pair(c_psi_minus, paired_product(pairing, psim, psim)),
    };
    for (const auto& [c, vec] : terms)
        for (std::size_t i = 0; i < 16; ++i) amps[i] += c * vec[i];
    return StateVector({2, 2, 2, 2}, std::move(amps));
}

CoincidenceProbabilities coincidence_probabilities(const DensityOperator& rho12,
                                                   const DensityOperator& rho34,
                                                   const PairingScheme& pairing) {
    if (rho12.dims != Dims{2, 2} || rho34.dims != Dims{2, 2})
        throw ArgumentError("inputs must be two-qubit density operators");
    DensityOperator rho = tensor_product(rho12, rho34);

    CoincidenceProbabilities p{0, 0, 0};
    for (std::size_t idx = 0; idx < 16; ++idx) {
        auto bit = [&](std::size_t q) { return (idx >> (4 - q)) & 1u; };
        unsigned a0 = bit(pairing.detector_a[0]);
        unsigned a1 = bit(pairing.detector_a[1]);
        double w = rho.mat[idx * 16 + idx].real();
        if (a0 == 0 && a1 == 0)
            p.p_plusplus_a += w;
        else if (a0 == 1 && a1 == 1)
            p.p_minusminus_a += w;
        else
            p.p_plusminus_both += w;
    }
    return p;
}

LinearOperator symmetric_projector() {
    std::vector<StateVector> basis = {
        StateVector({2, 2}, {1.0, 0.0, 0.0, 0.0}),
        bell_state(BellKind::PsiPlus),
        StateVector({2, 2}, {0.0, 0.0, 0.0, 1.0}),
    };
    std::vector<Complex> m(16, Complex(0, 0));
    for (const StateVector& v : basis)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m[i * 4 + j] += v.amps[i] * std::conj(v.amps[j]);
    return LinearOperator({2, 2}, std::move(m));
}

double purity_from_symmetric_probability(double p_sym) {
    if (p_sym < 0.5 - 1e-9 || p_sym > 1.0 + 1e-9)
        throw DomainError("symmetric probability outside [1/2, 1]: inconsistent measurement data");
    return std::clamp(2.0 * p_sym - 1.0, 0.0, 1.0);
}

WitnessReport witness_verdict(const DensityOperator& rho) {
    if (rho.dims.size() != 2) throw ArgumentError("witness requires a bipartite density operator");
    WitnessReport r;
    r.global_purity = purity(rho);
    r.local_purity_a = purity(partial_trace(rho, {0}));
    r.local_purity_b = purity(partial_trace(rho, {1}));
    r.p_symmetric_global = 0.5 * (1.0 + r.global_purity);
    r.entangled = r.global_purity > r.local_purity_a + kWitnessMargin &&
                  r.global_purity > r.local_purity_b + kWitnessMargin;
    return r;
}

std::string WitnessReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"global_purity\": " << global_purity << ", \"local_purity_a\": " << local_purity_a
       << ", \"local_purity_b\": " << local_purity_b << ", \"p_symmetric_global\": "
       << p_symmetric_global << ", \"entangled\": " << (entangled ? "true" : "false") << "}";
    return os.str();
}

} // namespace femto
