#pragma once

// Plane-wave interference amplitudes, closed-form coherence curves for
// top-hat and double sources, and a numerical van Cittert-Zernike transform
// for arbitrary 1-D intensity profiles.
//
// Units: angles in radians, baselines in meters, wavenumbers in rad/m.

#include <array>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "femtohbt/linalg.hpp"

namespace femto {

struct OpticalContext {
    double k; // wavenumber, rad/m

    explicit OpticalContext(double wavenumber);
    double wavelength() const; // 2*pi/k
};

struct DetectorPair {
    double x1;
    double x2;

    double baseline() const { return x2 >= x1 ? x2 - x1 : x1 - x2; }
};

struct TopHat {
    double alpha; // full angular width
};
struct DeltaPair {
    double alpha; // angular separation of the two point sources
};
struct DoubleTopHat {
    double separation; // angular distance between hat centers
    double width;      // full width of each hat
};
struct Sampled {
    std::vector<double> angles;  // strictly increasing, >= 3 points
    std::vector<double> weights; // nonnegative; normalized to sum 1 on construction

    Sampled(std::vector<double> a, std::vector<double> w);
};

using SourceProfile = std::variant<TopHat, DeltaPair, DoubleTopHat, Sampled>;

struct CoherenceCurve {
    std::vector<double> baselines; // strictly increasing
    std::vector<double> values;    // within [-1e-9, 1+1e-9]

    CoherenceCurve(std::vector<double> b, std::vector<double> v);

    // CSV exchange format: header "b,C", one row per sample, 17 significant
    // digits, LF line endings.
    void write_csv(std::ostream& os) const;
    void write_csv_file(const std::string& path) const;
    static CoherenceCurve read_csv(std::istream& is);
    static CoherenceCurve read_csv_file(const std::string& path);
};

// Two-pion arrival amplitude e^{ik1x1}e^{ik2x2} + e^{ik1x2}e^{ik2x1}
// (unnormalized).
Complex two_path_amplitude(double k1, double k2, const DetectorPair& det);

// Two-pair arrival amplitude: the direct assignment
// e^{i(k1+k3)x1}e^{i(k2+k4)x2} plus the exchange of detector attributions
// between the two pairs, e^{i(k1+k4)x1}e^{i(k2+k3)x2}. Requires the per-source
// momentum sums to match: k1+k3 = k2+k4 within 1e-9.
Complex four_path_amplitude(const std::array<double, 4>& k, const DetectorPair& det);

// sin^2(k*alpha*b/2) / (k*alpha*b/2)^2, with the b -> 0 limit equal to 1.
double coherence_single_tophat(const OpticalContext& ctx, double alpha, double b);

// sin^2(k*alpha*b)/(k*alpha*b)^2 * cos^2(k*beta*b), as printed; b -> 0 gives 1.
double coherence_double_source(const OpticalContext& ctx, double alpha, double beta, double b);

// C(b) = |int I(theta) e^{ik theta b} dtheta|^2 / |int I|^2 by composite
// Simpson quadrature with automatic grid doubling (DeltaPair is evaluated
// analytically as a two-term sum).
CoherenceCurve vcz_numeric_coherence(const SourceProfile& profile, const OpticalContext& ctx,
                                     const std::vector<double>& baselines);

// sin(z)/z with a series expansion below |z| = 1e-6.
double sinc(double z);

} // namespace femto
