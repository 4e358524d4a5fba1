#pragma once

// Qubit-level model of the pion-pair experiment: Bell states, the re-paired
// detected-basis expansion, detector charge-coincidence probabilities, and the
// purity-based entanglement witness.
//
// Charge convention: |0> is a positive pion, |1> a negative pion.

#include <array>
#include <string>

#include "femtohbt/linalg.hpp"

namespace femto {

enum class BellKind { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

// Which qubits (1-based, a permutation of {1,2,3,4}) each detector receives.
struct PairingScheme {
    std::array<std::size_t, 2> detector_a;
    std::array<std::size_t, 2> detector_b;

    PairingScheme(std::array<std::size_t, 2> a, std::array<std::size_t, 2> b);

    // The pairing of the experiment: detector A sees qubits 1 and 3.
    static PairingScheme detected_13_24() { return PairingScheme({1, 3}, {2, 4}); }
    static PairingScheme identity_12_34() { return PairingScheme({1, 2}, {3, 4}); }
};

struct WitnessReport {
    double global_purity = 0;
    double local_purity_a = 0;
    double local_purity_b = 0;
    double p_symmetric_global = 0;
    bool entangled = false;

    std::string to_json() const;
};

// Margin below which numerically equal purities do not flag entanglement.
inline constexpr double kWitnessMargin = 1e-9;

// Normalized two-qubit Bell state.
StateVector bell_state(BellKind kind);

// Werner family p|Psi+><Psi+| + (1-p) I/4, p in [0,1].
DensityOperator werner_state(double p);

// Coefficients of a 4-qubit state in the detected basis
// {|00>_A|11>_B, |11>_A|00>_B, Psi+_A Psi+_B, Psi-_A Psi-_B} plus whatever is
// left outside that span.
struct DetectedBasisExpansion {
    Complex c_0011;
    Complex c_1100;
    Complex c_psi_plus;
    Complex c_psi_minus;
    double residual_norm;

    // Rebuilds the expanded state (including the residual component).
    StateVector resum(const PairingScheme& pairing) const;

  private:
    friend DetectedBasisExpansion detected_basis_expansion(const StateVector&, const PairingScheme&);
    std::vector<Complex> residual_amps_;
};

DetectedBasisExpansion detected_basis_expansion(const StateVector& state, const PairingScheme& pairing);

// Probabilities of the charge content seen by detector A when pairs 12 and 34
// are re-paired into the detected qubits: both detectors mixed-charge, two
// positive pions at A, or two negative pions at A.
struct CoincidenceProbabilities {
    double p_plusminus_both;
    double p_plusplus_a;
    double p_minusminus_a;
};

CoincidenceProbabilities coincidence_probabilities(const DensityOperator& rho12,
                                                   const DensityOperator& rho34,
                                                   const PairingScheme& pairing);

// Rank-3 projector onto the two-qubit symmetric subspace span{|00>, Psi+, |11>}.
LinearOperator symmetric_projector();

// Inverts the two-copy swap-test relation p_sym = (1 + tr rho^2)/2.
double purity_from_symmetric_probability(double p_sym);

// Purity comparison witness on a bipartite density operator. A true verdict
// is sufficient for entanglement, not necessary.
WitnessReport witness_verdict(const DensityOperator& rho);

} // namespace femto
