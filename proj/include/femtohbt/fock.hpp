#pragma once

// Truncated Fock-space engine over discrete momentum modes for pi+, pi- and
// rho species: first-order pair production from the rho decay Hamiltonian,
// detector field operators, the g^(4) coincidence correlation, and
// charge-resolved detection probabilities.
//
// Field-part conventions (t enters as kx - omega*t):
//   (PiPlus,  Annihilate): sum_k a_k      e^{+i(kx-wt)}
//   (PiPlus,  Create)    : sum_k a_k^dag  e^{-i(kx-wt)}
//   (PiMinus, Annihilate): sum_k b_k      e^{-i(kx-wt)}
//   (PiMinus, Create)    : sum_k b_k^dag  e^{+i(kx-wt)}

#include <map>
#include <memory>
#include <vector>

#include "femtohbt/linalg.hpp"
#include "femtohbt/optics.hpp"

namespace femto {

enum class Species { PiPlus, PiMinus, Rho };
enum class FieldSign { Annihilate, Create };
enum class Dispersion { Massless, Massive };

struct ModeGrid {
    std::vector<double> momenta;     // pion modes, strictly increasing
    std::vector<double> rho_momenta; // rho modes, strictly increasing (may be empty)
    Dispersion dispersion = Dispersion::Massless;
    double mass = 0.0;

    ModeGrid(std::vector<double> pion_momenta, std::vector<double> rho = {},
             Dispersion d = Dispersion::Massless, double m = 0.0);

    double omega(double k) const;
    std::size_t n_modes() const { return momenta.size(); }
};

struct FockBasisState {
    std::vector<int> occ_plus;
    std::vector<int> occ_minus;
    std::vector<int> occ_rho;

    int total() const;
    bool operator==(const FockBasisState&) const = default;
};

inline constexpr int kDefaultTruncation = 4;

// Enumeration of all occupation states with total particle number <= n_max.
// The vacuum has index 0.
class FockSpace {
  public:
    explicit FockSpace(ModeGrid grid, int n_max = kDefaultTruncation);

    const ModeGrid& grid() const { return grid_; }
    int n_max() const { return n_max_; }
    std::size_t dim() const { return basis_.size(); }
    const FockBasisState& basis(std::size_t i) const { return basis_[i]; }
    // npos when the occupation state lies outside the truncated space.
    std::size_t index_of(const FockBasisState& s) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    ModeGrid grid_;
    int n_max_;
    std::vector<FockBasisState> basis_;
    std::map<std::vector<int>, std::size_t> index_;
};

struct FockVector {
    std::shared_ptr<const FockSpace> space;
    std::vector<Complex> amps;

    FockVector(std::shared_ptr<const FockSpace> sp, std::vector<Complex> a);
    static FockVector vacuum(std::shared_ptr<const FockSpace> sp);

    double norm() const;
    FockVector normalized_copy() const;
    // Flat StateVector view (single subsystem of dimension dim()).
    StateVector to_state_vector() const;
};

// Ladder operators with standard bosonic sqrt(n) matrix elements. Creation
// out of the truncated space is dropped.
FockVector apply_annihilator(const FockVector& v, Species s, std::size_t mode);
FockVector apply_creator(const FockVector& v, Species s, std::size_t mode);

// Mode-summed detector field part at position x and time t, per the
// convention table above.
FockVector apply_field(const FockVector& v, Species s, FieldSign sign, double x, double t);

// Same operator as a dense matrix on the truncated basis.
LinearOperator field_operator(const std::shared_ptr<const FockSpace>& space, Species s,
                              FieldSign sign, double x, double t);

// One (pi+, pi-) splitting of a rho of momentum q_rho: mode indices into the
// pion grid and a complex weight.
struct Splitting {
    std::size_t plus_mode;
    std::size_t minus_mode;
    Complex weight;
};

struct PairSourceSpec {
    double q_rho;
    double omega_rho;
    double position = 0.0; // source location, phase reference
    std::vector<Splitting> splittings;
};

// Uniform-weight spec over the given splittings; q_rho is taken from the
// first splitting and every splitting must reproduce it exactly.
PairSourceSpec uniform_pair_spec(const ModeGrid& grid,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& splittings,
                                 double position = 0.0);

// sum_q f(q) a^dag_q b^dag_{q_rho-q} |0>, normalized, with the source-position
// phase e^{i q_rho x_src} on every term.
FockVector pair_state(const PairSourceSpec& spec, std::shared_ptr<const FockSpace> space);

struct HamiltonianConfig {
    double g;  // coupling strength
    double dt; // evolution step

    HamiltonianConfig(double coupling, double step);
};

struct FirstOrderResult {
    FockVector state;
    Complex c0;
    Complex c1;
    bool perturbative_warning; // |c1| > 0.5
};

// (1 - i H dt) applied to |one rho at q_rho, no pions>, restricted to the
// c a^dag b^dag term and renormalized.
FirstOrderResult first_order_state(const HamiltonianConfig& config, const PairSourceSpec& spec,
                                   std::shared_ptr<const FockSpace> space);

// Normalized product of two independent pair states (two rho sources).
FockVector two_source_state(const PairSourceSpec& a, const PairSourceSpec& b,
                            std::shared_ptr<const FockSpace> space);

// Minimal interference configuration: source 1 emits (pi+ at mode p1, pi- at
// mode m), source 2 emits (pi+ at mode p2, pi- at mode m). The g4 pattern is
// (1 + cos((k_p1-k_p2)(x1-x2)))-shaped with unit visibility.
FockVector two_source_minimal_state(std::shared_ptr<const FockSpace> space, std::size_t p1,
                                    std::size_t p2, std::size_t m, double x_src1 = 0.0,
                                    double x_src2 = 0.0);

// Joint probability density for one pi+ and one pi- at each of x1 and x2
// (the 8-point coincidence correlation), evaluated on the pion component.
double g4_coincidence(const FockVector& state, double x1, double x2, double t);

// g4 over a grid of detector separations b = x2 - x1, normalized by its
// maximum value.
CoherenceCurve g4_scan(const FockVector& state, double x1, const std::vector<double>& separations,
                       double t);

struct ChargeProbs {
    double p_mixed_both;
    double p_plusplus_at_1;
    double p_minusminus_at_1;
};

struct AcceptanceWindow {
    double phase_span = 6.283185307179586476925286766559; // in delta_q * (x2-x1)
    int samples = 256;
    double delta_q = 0.0; // 0: infer from the occupied pi+ modes
};

// Charge content of detector 1 for a two-pair state, averaged uniformly over
// the acceptance window in delta_q*(x2-x1) and normalized to sum 1. Requires
// the exact (2 pi+, 2 pi-, 0 rho) sector.
ChargeProbs charge_resolved_probs(const FockVector& state, double x1, double x2, double t,
                                  const AcceptanceWindow& window = {});

// Momentum-binned detector variant: detector 1 accepts the listed pion modes
// and detector 2 the rest; events are post-selected on two particles per
// detector.
ChargeProbs charge_resolved_probs_binned(const FockVector& state,
                                         const std::vector<std::size_t>& detector1_modes);

} // namespace femto
