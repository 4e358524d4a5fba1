#include "femtohbt/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace femto {

std::uint64_t SplitMix64::next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
    // 53 random bits into (0,1); never returns 0 exactly.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double FitModel::eval(const std::vector<double>& params, double b) const {
    if (params.size() != n_params()) throw ArgumentError("parameter count mismatch for model");
    if (kind == FitModelKind::SingleTopHat) return coherence_single_tophat(ctx, params[0], b);
    return coherence_double_source(ctx, params[0], params[1], b);
}

CoherenceCurve synthesize_curve(const FitModel& model, const std::vector<double>& params,
                                const std::vector<double>& baselines, const NoiseSpec& noise) {
    if (params.size() != model.n_params()) throw ArgumentError("parameter count mismatch for model");
    if (noise.sigma < 0) throw ArgumentError("noise sigma must be nonnegative");
    SplitMix64 rng(noise.seed);
    std::vector<double> values(baselines.size());
    for (std::size_t i = 0; i < baselines.size(); ++i) {
        double v = model.eval(params, baselines[i]);
        if (noise.sigma > 0) v += noise.sigma * rng.gaussian();
        values[i] = std::clamp(v, 0.0, 1.0);
    }
    return CoherenceCurve(baselines, std::move(values));
}

namespace {

constexpr double kZeroLevel = 0.01;     // a sample this low counts as a zero of C
constexpr double kEnvelopeLevel = 0.05; // envelope considered extinguished below this

// Baseline of the first sample at or below `level`, or 0 when none exists.
double first_zero_baseline(const std::vector<double>& b, const std::vector<double>& v, double level) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] <= level) return b[i];
    return 0;
}

} // namespace

GuessResult initial_guess(const CoherenceCurve& curve, const FitModel& model) {
    if (curve.baselines.size() < 8) throw ArgumentError("initial guess needs at least 8 samples");
    double k = model.ctx.k;
    double b_max = curve.baselines.back();

    if (model.kind == FitModelKind::SingleTopHat) {
        double b0 = first_zero_baseline(curve.baselines, curve.values, kZeroLevel);
        if (b0 > 0) return {{2 * std::numbers::pi / (k * b0)}, false};
        // Fallback: place the first zero just beyond the observed range.
        return {{2 * std::numbers::pi / (k * b_max)}, true};
    }

    // Double source: the cosine factor zeroes first (k*beta*b = pi/2); the
    // sinc envelope's first zero (k*alpha*b = pi) is read off the decay of the
    // local maxima.
    double b_first = first_zero_baseline(curve.baselines, curve.values, kZeroLevel);
    std::vector<double> peak_b, peak_v;
    const auto& bs = curve.baselines;
    const auto& vs = curve.values;
    peak_b.push_back(bs.front());
    peak_v.push_back(vs.front());
    for (std::size_t i = 1; i + 1 < vs.size(); ++i)
        if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1]) {
            peak_b.push_back(bs[i]);
            peak_v.push_back(vs[i]);
        }
    double b_env = first_zero_baseline(peak_b, peak_v, kEnvelopeLevel);

    bool fallback = !(b_first > 0) || !(b_env > 0);
    double beta = b_first > 0 ? std::numbers::pi / (2 * k * b_first)
                              : std::numbers::pi / (2 * k * b_max);
    double alpha = b_env > 0 ? std::numbers::pi / (k * b_env) : std::numbers::pi / (k * b_max);
    return {{alpha, beta}, fallback};
}

namespace {

// Solve the (tiny) symmetric system A x = rhs by Gaussian elimination with
// partial pivoting.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) throw NumericalError("singular normal equations");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

double rss_of(const CoherenceCurve& curve, const FitModel& model, const std::vector<double>& u) {
    std::vector<double> p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = std::exp(u[i]);
    double s = 0;
    for (std::size_t i = 0; i < curve.baselines.size(); ++i) {
        double r = model.eval(p, curve.baselines[i]) - curve.values[i];
        s += r * r;
    }
    return s;
}

// Central finite-difference Jacobian of the residual vector w.r.t. the
// log-parameters u, relative step 1e-6.
std::vector<double> jacobian(const CoherenceCurve& curve, const FitModel& model,
                             const std::vector<double>& u) {
    std::size_t m = curve.baselines.size(), n = u.size();
    std::vector<double> jac(m * n);
    for (std::size_t j = 0; j < n; ++j) {
        double h = 1e-6 * std::max(std::abs(u[j]), 1.0);
        std::vector<double> up = u, dn = u;
        up[j] += h;
        dn[j] -= h;
        std::vector<double> pp(n), pd(n);
        for (std::size_t i = 0; i < n; ++i) {
            pp[i] = std::exp(up[i]);
            pd[i] = std::exp(dn[i]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            double b = curve.baselines[i];
            jac[i * n + j] = (model.eval(pp, b) - model.eval(pd, b)) / (2 * h);
        }
    }
    return jac;
}

} // namespace

FitResult fit(const CoherenceCurve& curve, const FitModel& model, const std::vector<double>& guess) {
    std::size_t n = model.n_params();
    if (guess.size() != n) throw ArgumentError("guess length mismatch for model");
    for (double g : guess)
        if (!(g > 0)) throw ArgumentError("guess parameters must be positive");
    if (curve.baselines.size() < 2 * n) throw ArgumentError("need at least 2x more samples than parameters");

    std::size_t m = curve.baselines.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(guess[i]);

    FitResult result;
    double rss = rss_of(curve, model, u);
    result.rss_trace.push_back(rss);
    double lambda = 1e-3;
    bool converged = false;

    int it = 0;
    for (; it < kFitMaxIterations && !converged; ++it) {
        std::vector<double> jac = jacobian(curve, model, u);
        // Normal equations JtJ du = -Jt r.
        std::vector<double> jtj(n * n, 0.0), jtr(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double r = model.eval([&] {
                std::vector<double> p(n);
                for (std::size_t q = 0; q < n; ++q) p[q] = std::exp(u[q]);
                return p;
            }(), curve.baselines[i]) - curve.values[i];
            for (std::size_t a = 0; a < n; ++a) {
                jtr[a] += jac[i * n + a] * r;
                for (std::size_t b = a; b < n; ++b) jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
            }
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a * n + b] = jtj[b * n + a];

        bool accepted = false;
        while (!accepted) {
            std::vector<double> damped = jtj;
            for (std::size_t a = 0; a < n; ++a) {
                double d = jtj[a * n + a];
                damped[a * n + a] += lambda * (d > 0 ? d : 1.0);
            }
            std::vector<double> rhs(n);
            for (std::size_t a = 0; a < n; ++a) rhs[a] = -jtr[a];
            std::vector<double> step = solve_dense(damped, rhs, n);

            std::vector<double> u_try = u;
            for (std::size_t a = 0; a < n; ++a) u_try[a] += step[a];
            double rss_try = rss_of(curve, model, u_try);
            if (rss_try <= rss) {
                double step_norm = 0, u_norm = 0;
                for (std::size_t a = 0; a < n; ++a) {
                    step_norm += step[a] * step[a];
                    u_norm += std::max(std::abs(u[a]), 1.0) * std::max(std::abs(u[a]), 1.0);
                }
                double rel_step = std::sqrt(step_norm / u_norm);
                double rel_drop = rss > 0 ? (rss - rss_try) / rss : 0.0;
                u = std::move(u_try);
                rss = rss_try;
                result.rss_trace.push_back(rss);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel_step < 1e-10 || rel_drop < 1e-12) converged = true;
            } else {
                lambda *= 10.0;
                if (lambda > 1e12) break; // give up on this iteration; treat as stalled
            }
        }
        if (!accepted) break;
    }

    result.iterations = it;
    result.converged = converged;
    result.residual_rss = rss;
    result.params.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.params[i] = std::exp(u[i]);

    // Linearized covariance at the solution: sigma^2 (JtJ)^-1 over the
    // log-parameters, mapped back with d p / d u = p.
    std::vector<double> jac = jacobian(curve, model, u);
    std::vector<double> jtj(n * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
    double dof = static_cast<double>(m > n ? m - n : 1);
    double sigma2 = rss / dof;
    result.param_stderr.assign(n, 0.0);
    try {
        for (std::size_t a = 0; a < n; ++a) {
            std::vector<double> e(n, 0.0);
            e[a] = 1.0;
            std::vector<double> col = solve_dense(jtj, e, n);
            double var = sigma2 * col[a];
            result.param_stderr[a] = var > 0 ? std::sqrt(var) * result.params[a] : 0.0;
        }
    } catch (const NumericalError&) {
        // Degenerate Jacobian at the optimum; leave stderr at zero.
    }
    return result;
}

std::string FitResult::to_json(std::uint64_t seed) const {
    std::ostringstream os;
    os.precision(17);
    auto list = [&os](const std::vector<double>& v) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << "]";
    };
    os << "{\"params\": ";
    list(params);
    os << ", \"residual_rss\": " << residual_rss << ", \"iterations\": " << iterations
       << ", \"converged\": " << (converged ? "true" : "false") << ", \"param_stderr\": ";
    list(param_stderr);
    os << ", \"rng_algorithm\": \"" << kRngAlgorithm << "\", \"seed\": " << seed << "}";
    return os.str();
}

} // namespace femto
