#pragma once

// Inversion of coherence curves: damped least squares (Levenberg-Marquardt
// style) on the closed-form coherence models, plus seeded synthetic-data
// generation for round-trip tests.

#include <cstdint>
#include <string>
#include <vector>

#include "femtohbt/optics.hpp"

namespace femto {

// Counter-free splittable generator; the seed fully determines all output.
// Algorithm: splitmix64 (Steele, Lea & Flood), Gaussians via Box-Muller.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double uniform01(); // in (0,1)
    double gaussian();  // standard normal
};

inline constexpr const char* kRngAlgorithm = "splitmix64";

enum class FitModelKind { SingleTopHat, DoubleSource };

struct FitModel {
    FitModelKind kind;
    OpticalContext ctx;

    std::size_t n_params() const { return kind == FitModelKind::SingleTopHat ? 1 : 2; }
    double eval(const std::vector<double>& params, double b) const;
};

struct NoiseSpec {
    double sigma = 0.0; // additive Gaussian std on C
    std::uint64_t seed = 0;
};

struct FitResult {
    std::vector<double> params;
    double residual_rss = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> param_stderr;
    std::vector<double> rss_trace; // RSS after each accepted step

    std::string to_json(std::uint64_t seed) const;
};

struct GuessResult {
    std::vector<double> params;
    bool fallback = false; // no zero crossing found; configured default used
};

inline constexpr int kFitMaxIterations = 200;

// Forward model plus optional seeded Gaussian noise, clamped to [0,1].
CoherenceCurve synthesize_curve(const FitModel& model, const std::vector<double>& params,
                                const std::vector<double>& baselines, const NoiseSpec& noise);

// Scale estimates from the first zero of the curve (and, for the double
// source, the envelope's first zero).
GuessResult initial_guess(const CoherenceCurve& curve, const FitModel& model);

// Damped least squares with a central finite-difference Jacobian over
// log-parameters (which keeps the parameters positive).
FitResult fit(const CoherenceCurve& curve, const FitModel& model, const std::vector<double>& guess);

} // namespace femto
