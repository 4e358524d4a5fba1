#include "femtohbt/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace femto {

namespace {

Complex phase(double arg) { return Complex(std::cos(arg), std::sin(arg)); }

std::vector<int> flatten(const FockBasisState& s) {
    std::vector<int> key;
    key.reserve(s.occ_plus.size() + s.occ_minus.size() + s.occ_rho.size());
    key.insert(key.end(), s.occ_plus.begin(), s.occ_plus.end());
    key.insert(key.end(), s.occ_minus.begin(), s.occ_minus.end());
    key.insert(key.end(), s.occ_rho.begin(), s.occ_rho.end());
    return key;
}

std::vector<int>& occ_of(FockBasisState& s, Species sp) {
    switch (sp) {
        case Species::PiPlus: return s.occ_plus;
        case Species::PiMinus: return s.occ_minus;
        case Species::Rho: return s.occ_rho;
    }
    throw ArgumentError("unknown species");
}

const std::vector<int>& occ_of(const FockBasisState& s, Species sp) {
    return occ_of(const_cast<FockBasisState&>(s), sp);
}

void check_increasing(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) throw ArgumentError(std::string(what) + " must be strictly increasing");
}

} // namespace

ModeGrid::ModeGrid(std::vector<double> pion_momenta, std::vector<double> rho, Dispersion d, double m)
    : momenta(std::move(pion_momenta)), rho_momenta(std::move(rho)), dispersion(d), mass(m) {
    if (momenta.empty()) throw ArgumentError("mode grid needs at least one pion mode");
    check_increasing(momenta, "pion momenta");
    check_increasing(rho_momenta, "rho momenta");
    if (dispersion == Dispersion::Massive && !(mass > 0))
        throw ArgumentError("massive dispersion needs a positive mass");
}

double ModeGrid::omega(double k) const {
    double w = dispersion == Dispersion::Massless ? std::abs(k) : std::sqrt(k * k + mass * mass);
    if (!std::isfinite(w)) throw ArgumentError("non-finite mode energy");
    return w;
}

int FockBasisState::total() const {
    int n = 0;
    for (int x : occ_plus) n += x;
    for (int x : occ_minus) n += x;
    for (int x : occ_rho) n += x;
    return n;
}

FockSpace::FockSpace(ModeGrid grid, int n_max) : grid_(std::move(grid)), n_max_(n_max) {
    if (n_max_ < 0) throw ArgumentError("truncation cap must be nonnegative");
    std::size_t np = grid_.momenta.size();
    std::size_t nr = grid_.rho_momenta.size();
    std::size_t slots = 2 * np + nr;

    std::vector<int> occ(slots, 0);
    // Depth-first over slots, budget-limited; all-zero (the vacuum) comes first.
    auto emit = [&](auto&& self, std::size_t slot, int budget) -> void {
        if (slot == slots) {
            FockBasisState s;
            s.occ_plus.assign(occ.begin(), occ.begin() + np);
            s.occ_minus.assign(occ.begin() + np, occ.begin() + 2 * np);
            s.occ_rho.assign(occ.begin() + 2 * np, occ.end());
            index_.emplace(occ, basis_.size());
            basis_.push_back(std::move(s));
            return;
        }
        for (int n = 0; n <= budget; ++n) {
            occ[slot] = n;
            self(self, slot + 1, budget - n);
        }
        occ[slot] = 0;
    };
    emit(emit, 0, n_max_);
}

std::size_t FockSpace::index_of(const FockBasisState& s) const {
    if (s.occ_plus.size() != grid_.momenta.size() || s.occ_minus.size() != grid_.momenta.size() ||
        s.occ_rho.size() != grid_.rho_momenta.size())
        throw ArgumentError("occupation vector length does not match the grid");
    auto it = index_.find(flatten(s));
    return it == index_.end() ? npos : it->second;
}

FockVector::FockVector(std::shared_ptr<const FockSpace> sp, std::vector<Complex> a)
    : space(std::move(sp)), amps(std::move(a)) {
    if (!space) throw ArgumentError("null Fock space");
    if (amps.size() != space->dim()) throw ArgumentError("amplitude count != Fock dimension");
}

FockVector FockVector::vacuum(std::shared_ptr<const FockSpace> sp) {
    std::vector<Complex> a(sp->dim(), Complex(0, 0));
    a[0] = 1.0;
    return FockVector(std::move(sp), std::move(a));
}

double FockVector::norm() const {
    double s = 0;
    for (const Complex& c : amps) s += std::norm(c);
    return std::sqrt(s);
}

FockVector FockVector::normalized_copy() const {
    double n = norm();
    if (n == 0) throw ArgumentError("cannot normalize the zero vector");
    std::vector<Complex> a = amps;
    for (Complex& c : a) c /= n;
    return FockVector(space, std::move(a));
}

StateVector FockVector::to_state_vector() const { return StateVector({space->dim()}, amps); }

FockVector apply_annihilator(const FockVector& v, Species s, std::size_t mode) {
    std::vector<Complex> out(v.amps.size(), Complex(0, 0));
    const FockSpace& sp = *v.space;
    for (std::size_t i = 0; i < v.amps.size(); ++i) {
        if (v.amps[i] == Complex(0, 0)) continue;
        const FockBasisState& b = sp.basis(i);
        int n = occ_of(b, s).at(mode);
        if (n == 0) continue;
        FockBasisState lowered = b;
        occ_of(lowered, s)[mode] = n - 1;
        std::size_t j = sp.index_of(lowered);
        out[j] += std::sqrt(static_cast<double>(n)) * v.amps[i];
    }
    return FockVector(v.space, std::move(out));
}

FockVector apply_creator(const FockVector& v, Species s, std::size_t mode) {
    std::vector<Complex> out(v.amps.size(), Complex(0, 0));
    const FockSpace& sp = *v.space;
    for (std::size_t i = 0; i < v.amps.size(); ++i) {
        if (v.amps[i] == Complex(0, 0)) continue;
        const FockBasisState& b = sp.basis(i);
        int n = occ_of(b, s).at(mode);
        FockBasisState raised = b;
        occ_of(raised, s)[mode] = n + 1;
        std::size_t j = sp.index_of(raised);
        if (j == FockSpace::npos) continue; // truncated away
        out[j] += std::sqrt(static_cast<double>(n + 1)) * v.amps[i];
    }
    return FockVector(v.space, std::move(out));
}

FockVector apply_field(const FockVector& v, Species s, FieldSign sign, double x, double t) {
    if (s == Species::Rho) throw ArgumentError("detector fields act on pion species only");
    if (!std::isfinite(x) || !std::isfinite(t)) throw ArgumentError("x and t must be finite");
    const ModeGrid& grid = v.space->grid();
    std::vector<Complex> acc(v.amps.size(), Complex(0, 0));
    // e^{+i(kx-wt)} on the psi-field parts (pi+ annihilation, pi- creation),
    // conjugated on the adjoint parts.
    bool positive_phase = (s == Species::PiPlus) == (sign == FieldSign::Annihilate);
    for (std::size_t m = 0; m < grid.momenta.size(); ++m) {
        double arg = grid.momenta[m] * x - grid.omega(grid.momenta[m]) * t;
        Complex ph = phase(positive_phase ? arg : -arg);
        FockVector term = sign == FieldSign::Annihilate ? apply_annihilator(v, s, m)
                                                        : apply_creator(v, s, m);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += ph * term.amps[i];
    }
    return FockVector(v.space, std::move(acc));
}

LinearOperator field_operator(const std::shared_ptr<const FockSpace>& space, Species s,
                              FieldSign sign, double x, double t) {
    std::size_t n = space->dim();
    std::vector<Complex> mat(n * n, Complex(0, 0));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Complex> e(n, Complex(0, 0));
        e[j] = 1.0;
        FockVector col = apply_field(FockVector(space, std::move(e)), s, sign, x, t);
        for (std::size_t i = 0; i < n; ++i) mat[i * n + j] = col.amps[i];
    }
    return LinearOperator({n}, std::move(mat));
}

namespace {

void validate_spec(const PairSourceSpec& spec, const ModeGrid& grid) {
    if (spec.splittings.empty()) throw ArgumentError("pair source needs at least one splitting");
    double wsum = 0;
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (const Splitting& s : spec.splittings) {
        if (s.plus_mode >= grid.momenta.size() || s.minus_mode >= grid.momenta.size())
            throw ArgumentError("splitting mode index out of range");
        // Momentum conservation is grid arithmetic, no tolerance.
        if (grid.momenta[s.plus_mode] + grid.momenta[s.minus_mode] != spec.q_rho)
            throw ArgumentError("splitting is off-grid: q1+q2 != q_rho");
        auto key = std::make_pair(s.plus_mode, s.minus_mode);
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ArgumentError("duplicate splitting");
        seen.push_back(key);
        wsum += std::norm(s.weight);
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw ArgumentError("splitting weights must have unit norm");
}

// Unnormalized pair creation applied to an existing vector.
FockVector apply_pair_creation(const FockVector& v, const PairSourceSpec& spec) {
    Complex src_phase = phase(spec.q_rho * spec.position);
    std::vector<Complex> acc(v.amps.size(), Complex(0, 0));
    for (const Splitting& s : spec.splittings) {
        FockVector term = apply_creator(apply_creator(v, Species::PiPlus, s.plus_mode),
                                        Species::PiMinus, s.minus_mode);
        Complex c = s.weight * src_phase;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * term.amps[i];
    }
    return FockVector(v.space, std::move(acc));
}

} // namespace

PairSourceSpec uniform_pair_spec(const ModeGrid& grid,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& splittings,
                                 double position) {
    if (splittings.empty()) throw ArgumentError("pair source needs at least one splitting");
    PairSourceSpec spec;
    spec.position = position;
    double w = 1.0 / std::sqrt(static_cast<double>(splittings.size()));
    for (auto [p, m] : splittings) {
        if (p >= grid.momenta.size() || m >= grid.momenta.size())
            throw ArgumentError("splitting mode index out of range");
        spec.splittings.push_back({p, m, Complex(w, 0)});
    }
    spec.q_rho = grid.momenta[splittings.front().first] + grid.momenta[splittings.front().second];
    spec.omega_rho = grid.omega(grid.momenta[splittings.front().first]) +
                     grid.omega(grid.momenta[splittings.front().second]);
    validate_spec(spec, grid);
    return spec;
}

FockVector pair_state(const PairSourceSpec& spec, std::shared_ptr<const FockSpace> space) {
    validate_spec(spec, space->grid());
    if (space->n_max() < 2) throw ArgumentError("truncation cap too small for a pair");
    FockVector v = apply_pair_creation(FockVector::vacuum(space), spec);
    return v.normalized_copy();
}

HamiltonianConfig::HamiltonianConfig(double coupling, double step) : g(coupling), dt(step) {
    if (!(dt > 0)) throw ArgumentError("dt must be positive");
    if (!std::isfinite(g)) throw ArgumentError("coupling must be finite");
}

FirstOrderResult first_order_state(const HamiltonianConfig& config, const PairSourceSpec& spec,
                                   std::shared_ptr<const FockSpace> space) {
    validate_spec(spec, space->grid());
    const ModeGrid& grid = space->grid();
    auto it = std::find(grid.rho_momenta.begin(), grid.rho_momenta.end(), spec.q_rho);
    if (it == grid.rho_momenta.end())
        throw ArgumentError("q_rho is not a rho mode of the grid");
    std::size_t rho_mode = static_cast<std::size_t>(it - grid.rho_momenta.begin());

    // (1 - i H dt)|rho> with H = -g (c a^dag b^dag + h.c.) restricted to the
    // pair-producing term: |rho> + i g dt sum_q f(q) a^dag b^dag |0>.
    Complex c0(1.0, 0.0);
    Complex c1 = Complex(0.0, 1.0) * config.g * config.dt;
    double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    c0 /= norm;
    c1 /= norm;

    FockVector rho_only = apply_creator(FockVector::vacuum(space), Species::Rho, rho_mode);
    FockVector pions = config.g == 0 ? FockVector(space, std::vector<Complex>(space->dim()))
                                     : pair_state(spec, space);
    std::vector<Complex> amps(space->dim());
    for (std::size_t i = 0; i < amps.size(); ++i)
        amps[i] = c0 * rho_only.amps[i] + c1 * pions.amps[i];

    FirstOrderResult r{FockVector(space, std::move(amps)), c0, c1, std::abs(c1) > 0.5};
    return r;
}

FockVector two_source_state(const PairSourceSpec& a, const PairSourceSpec& b,
                            std::shared_ptr<const FockSpace> space) {
    validate_spec(a, space->grid());
    validate_spec(b, space->grid());
    if (space->n_max() < 4) throw ArgumentError("truncation cap too small for two pairs");
    FockVector v = apply_pair_creation(apply_pair_creation(FockVector::vacuum(space), b), a);
    return v.normalized_copy();
}

FockVector two_source_minimal_state(std::shared_ptr<const FockSpace> space, std::size_t p1,
                                    std::size_t p2, std::size_t m, double x_src1, double x_src2) {
    const ModeGrid& grid = space->grid();
    PairSourceSpec s1 = uniform_pair_spec(grid, {{p1, m}}, x_src1);
    PairSourceSpec s2 = uniform_pair_spec(grid, {{p2, m}}, x_src2);
    return two_source_state(s1, s2, space);
}

double g4_coincidence(const FockVector& state, double x1, double x2, double t) {
    if (std::abs(state.norm() - 1.0) > 1e-10) throw ArgumentError("state must be normalized");
    // Annihilation string of the 8-point correlator, rightmost factor first.
    FockVector v = apply_field(state, Species::PiPlus, FieldSign::Annihilate, x1, t);
    v = apply_field(v, Species::PiMinus, FieldSign::Annihilate, x1, t);
    v = apply_field(v, Species::PiPlus, FieldSign::Annihilate, x2, t);
    v = apply_field(v, Species::PiMinus, FieldSign::Annihilate, x2, t);
    double n = v.norm();
    return n * n;
}

CoherenceCurve g4_scan(const FockVector& state, double x1, const std::vector<double>& separations,
                       double t) {
    if (separations.empty()) throw ArgumentError("separation grid must be nonempty");
    std::vector<double> raw(separations.size());
    double peak = 0;
    for (std::size_t i = 0; i < separations.size(); ++i) {
        raw[i] = g4_coincidence(state, x1, x1 + separations[i], t);
        peak = std::max(peak, raw[i]);
    }
    if (peak <= 0) throw ArgumentError("correlation vanishes over the whole scan");
    for (double& x : raw) x = std::clamp(x / peak, 0.0, 1.0);
    return CoherenceCurve(separations, std::move(raw));
}

namespace {

void require_two_pair_sector(const FockVector& state) {
    bool any = false;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        if (std::norm(state.amps[i]) < 1e-24) continue;
        const FockBasisState& b = state.space->basis(i);
        int np = 0, nm = 0, nr = 0;
        for (int x : b.occ_plus) np += x;
        for (int x : b.occ_minus) nm += x;
        for (int x : b.occ_rho) nr += x;
        if (np != 2 || nm != 2 || nr != 0)
            throw ArgumentError("state is not in the two-pair (2 pi+, 2 pi-) sector");
        any = true;
    }
    if (!any) throw ArgumentError("state is empty");
}

double infer_delta_q(const FockVector& state) {
    const ModeGrid& grid = state.space->grid();
    std::vector<double> occupied;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        if (std::norm(state.amps[i]) < 1e-24) continue;
        const FockBasisState& b = state.space->basis(i);
        for (std::size_t m = 0; m < b.occ_plus.size(); ++m)
            if (b.occ_plus[m] > 0) occupied.push_back(grid.momenta[m]);
    }
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    double best = 0;
    for (std::size_t i = 1; i < occupied.size(); ++i)
        best = best > 0 ? std::min(best, occupied[i] - occupied[i - 1]) : occupied[i] - occupied[i - 1];
    return best > 0 ? best : 1.0;
}

} // namespace

ChargeProbs charge_resolved_probs(const FockVector& state, double x1, double x2, double t,
                                  const AcceptanceWindow& window) {
    require_two_pair_sector(state);
    if (window.samples < 1) throw ArgumentError("acceptance window needs at least one sample");
    double dq = window.delta_q > 0 ? window.delta_q : infer_delta_q(state);

    double mixed = 0, pp = 0, mm = 0;
    for (int j = 0; j < window.samples; ++j) {
        double u = window.phase_span * j / window.samples;
        double xb = x2 + u / dq;
        mixed += g4_coincidence(state, x1, xb, t);

        FockVector v = apply_field(state, Species::PiPlus, FieldSign::Annihilate, x1, t);
        v = apply_field(v, Species::PiPlus, FieldSign::Annihilate, x1, t);
        v = apply_field(v, Species::PiMinus, FieldSign::Annihilate, xb, t);
        v = apply_field(v, Species::PiMinus, FieldSign::Annihilate, xb, t);
        double n = v.norm();
        pp += n * n / 4.0; // 1/2! per same-point identical pair

        v = apply_field(state, Species::PiMinus, FieldSign::Annihilate, x1, t);
        v = apply_field(v, Species::PiMinus, FieldSign::Annihilate, x1, t);
        v = apply_field(v, Species::PiPlus, FieldSign::Annihilate, xb, t);
        v = apply_field(v, Species::PiPlus, FieldSign::Annihilate, xb, t);
        n = v.norm();
        mm += n * n / 4.0;
    }
    double total = mixed + pp + mm;
    if (total <= 0) throw ArgumentError("all detection channels vanish");
    return ChargeProbs{mixed / total, pp / total, mm / total};
}

ChargeProbs charge_resolved_probs_binned(const FockVector& state,
                                         const std::vector<std::size_t>& detector1_modes) {
    require_two_pair_sector(state);
    const ModeGrid& grid = state.space->grid();
    std::vector<bool> at1(grid.momenta.size(), false);
    for (std::size_t m : detector1_modes) {
        if (m >= grid.momenta.size()) throw ArgumentError("detector mode index out of range");
        at1[m] = true;
    }
    double mixed = 0, pp = 0, mm = 0;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        double w = std::norm(state.amps[i]);
        if (w < 1e-24) continue;
        const FockBasisState& b = state.space->basis(i);
        int cp = 0, cm = 0;
        for (std::size_t m = 0; m < at1.size(); ++m) {
            if (!at1[m]) continue;
            cp += b.occ_plus[m];
            cm += b.occ_minus[m];
        }
        if (cp + cm != 2) continue; // post-select two particles at detector 1
        if (cp == 2)
            pp += w;
        else if (cm == 2)
            mm += w;
        else
            mixed += w;
    }
    double total = mixed + pp + mm;
    if (total <= 0) throw ArgumentError("no events survive the detector post-selection");
    return ChargeProbs{mixed / total, pp / total, mm / total};
}

} // namespace femto
