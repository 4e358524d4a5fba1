#include "femtohbt/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace femto {

namespace {

constexpr double kSincSeriesCut = 1e-6;
constexpr double kQuadTarget = 1e-8;
constexpr int kQuadStartIntervals = 512; // 513 points
constexpr int kQuadMaxDoublings = 20;

struct Piece {
    double lo;
    double hi;
    std::function<double(double)> density;
};

std::vector<Piece> profile_pieces(const SourceProfile& profile) {
    if (const auto* th = std::get_if<TopHat>(&profile)) {
        if (th->alpha <= 0) throw ArgumentError("top-hat width must be positive");
        double h = th->alpha / 2;
        return {{-h, h, [](double) { return 1.0; }}};
    }
    if (const auto* dt = std::get_if<DoubleTopHat>(&profile)) {
        if (dt->separation <= 0 || dt->width <= 0)
            throw ArgumentError("double top-hat parameters must be positive");
        double s = dt->separation / 2, w = dt->width / 2;
        return {{-s - w, -s + w, [](double) { return 1.0; }},
                {s - w, s + w, [](double) { return 1.0; }}};
    }
    if (const auto* sm = std::get_if<Sampled>(&profile)) {
        const auto& a = sm->angles;
        const auto& w = sm->weights;
        auto interp = [a, w](double theta) {
            if (theta < a.front() || theta > a.back()) return 0.0;
            auto it = std::upper_bound(a.begin(), a.end(), theta);
            if (it == a.end()) return w.back(); // theta == a.back()
            std::size_t i = static_cast<std::size_t>(it - a.begin());
            double t = (theta - a[i - 1]) / (a[i] - a[i - 1]);
            return w[i - 1] + t * (w[i] - w[i - 1]);
        };
        return {{a.front(), a.back(), interp}};
    }
    throw ArgumentError("profile has no quadrature representation");
}

// Composite Simpson of density(theta) * e^{i k theta b} over one piece with a
// fixed number of intervals (even).
Complex simpson_transform(const Piece& piece, double kb, int intervals) {
    double h = (piece.hi - piece.lo) / intervals;
    Complex sum(0, 0);
    for (int i = 0; i <= intervals; ++i) {
        double theta = piece.lo + i * h;
        double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        double z = kb * theta;
        sum += weight * piece.density(theta) * Complex(std::cos(z), std::sin(z));
    }
    return sum * (h / 3.0);
}

std::vector<double> curve_at_resolution(const std::vector<Piece>& pieces, double k,
                                        const std::vector<double>& baselines, int intervals) {
    double norm = 0;
    for (const Piece& p : pieces) norm += simpson_transform(p, 0.0, intervals).real();
    if (norm <= 0) throw ArgumentError("source profile has nonpositive total intensity");
    std::vector<double> values(baselines.size());
    for (std::size_t i = 0; i < baselines.size(); ++i) {
        Complex f(0, 0);
        for (const Piece& p : pieces) f += simpson_transform(p, k * baselines[i], intervals);
        values[i] = std::norm(f) / (norm * norm);
    }
    return values;
}

void check_baselines(const std::vector<double>& baselines) {
    if (baselines.empty()) throw ArgumentError("baseline grid must be nonempty");
    if (baselines.front() < 0) throw ArgumentError("baselines must be nonnegative");
    for (std::size_t i = 1; i < baselines.size(); ++i)
        if (baselines[i] <= baselines[i - 1])
            throw ArgumentError("baselines must be strictly increasing");
}

} // namespace

OpticalContext::OpticalContext(double wavenumber) : k(wavenumber) {
    if (!(k > 0)) throw ArgumentError("wavenumber must be positive");
}

double OpticalContext::wavelength() const { return 2 * std::numbers::pi / k; }

Sampled::Sampled(std::vector<double> a, std::vector<double> w)
    : angles(std::move(a)), weights(std::move(w)) {
    if (angles.size() < 3) throw ArgumentError("sampled profile needs at least 3 points");
    if (angles.size() != weights.size()) throw ArgumentError("angles/weights length mismatch");
    double sum = 0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (i > 0 && angles[i] <= angles[i - 1])
            throw ArgumentError("sampled angles must be strictly increasing");
        if (weights[i] < 0) throw ArgumentError("sampled weights must be nonnegative");
        sum += weights[i];
    }
    if (sum <= 0) throw ArgumentError("sampled weights must not all vanish");
    for (double& x : weights) x /= sum;
}

CoherenceCurve::CoherenceCurve(std::vector<double> b, std::vector<double> v)
    : baselines(std::move(b)), values(std::move(v)) {
    check_baselines(baselines);
    if (values.size() != baselines.size()) throw ArgumentError("curve length mismatch");
    for (double x : values)
        if (!(x >= -1e-9 && x <= 1 + 1e-9)) throw ArgumentError("coherence value outside [0,1]");
}

void CoherenceCurve::write_csv(std::ostream& os) const {
    os << "b,C\n";
    std::ostringstream row;
    row.precision(17);
    for (std::size_t i = 0; i < baselines.size(); ++i) {
        row.str("");
        row << baselines[i] << "," << values[i] << "\n";
        os << row.str();
    }
}

void CoherenceCurve::write_csv_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArgumentError("cannot open output file: " + path);
    write_csv(os);
}

CoherenceCurve CoherenceCurve::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ArgumentError("empty CSV (line 1)");
    if (line == "b,C\r") line = "b,C";
    if (line != "b,C") throw ArgumentError("bad CSV header, expected 'b,C' (line 1)");
    std::vector<double> b, v;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ArgumentError("missing comma (line " + std::to_string(lineno) + ")");
        try {
            std::size_t pos1 = 0, pos2 = 0;
            double bb = std::stod(line.substr(0, comma), &pos1);
            std::string rest = line.substr(comma + 1);
            double vv = std::stod(rest, &pos2);
            if (pos1 != comma || pos2 != rest.size())
                throw ArgumentError("trailing garbage (line " + std::to_string(lineno) + ")");
            b.push_back(bb);
            v.push_back(vv);
        } catch (const std::invalid_argument&) {
            throw ArgumentError("unparsable number (line " + std::to_string(lineno) + ")");
        } catch (const std::out_of_range&) {
            throw ArgumentError("number out of range (line " + std::to_string(lineno) + ")");
        }
    }
    return CoherenceCurve(std::move(b), std::move(v));
}

CoherenceCurve CoherenceCurve::read_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot open input file: " + path);
    return read_csv(is);
}

Complex two_path_amplitude(double k1, double k2, const DetectorPair& det) {
    auto phase = [](double arg) { return Complex(std::cos(arg), std::sin(arg)); };
    return phase(k1 * det.x1 + k2 * det.x2) + phase(k1 * det.x2 + k2 * det.x1);
}

Complex four_path_amplitude(const std::array<double, 4>& k, const DetectorPair& det) {
    if (std::abs((k[0] + k[2]) - (k[1] + k[3])) > 1e-9)
        throw ArgumentError("momentum constraint violated: k1+k3 must equal k2+k4");
    auto phase = [](double arg) { return Complex(std::cos(arg), std::sin(arg)); };
    return phase((k[0] + k[2]) * det.x1 + (k[1] + k[3]) * det.x2) +
           phase((k[0] + k[3]) * det.x1 + (k[1] + k[2]) * det.x2);
}

double sinc(double z) {
    double az = std::abs(z);
    if (az < kSincSeriesCut) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

double coherence_single_tophat(const OpticalContext& ctx, double alpha, double b) {
    if (alpha <= 0) throw ArgumentError("alpha must be positive");
    if (b < 0) throw ArgumentError("baseline must be nonnegative");
    double s = sinc(ctx.k * alpha * b / 2);
    return s * s;
}

double coherence_double_source(const OpticalContext& ctx, double alpha, double beta, double b) {
    if (alpha <= 0 || beta <= 0) throw ArgumentError("alpha and beta must be positive");
    if (b < 0) throw ArgumentError("baseline must be nonnegative");
    double s = sinc(ctx.k * alpha * b);
    double c = std::cos(ctx.k * beta * b);
    return s * s * c * c;
}

CoherenceCurve vcz_numeric_coherence(const SourceProfile& profile, const OpticalContext& ctx,
                                     const std::vector<double>& baselines) {
    check_baselines(baselines);

    if (const auto* dp = std::get_if<DeltaPair>(&profile)) {
        if (dp->alpha <= 0) throw ArgumentError("delta-pair separation must be positive");
        std::vector<double> values(baselines.size());
        for (std::size_t i = 0; i < baselines.size(); ++i) {
            double c = std::cos(ctx.k * dp->alpha * baselines[i] / 2);
            values[i] = c * c;
        }
        return CoherenceCurve(baselines, std::move(values));
    }

    std::vector<Piece> pieces = profile_pieces(profile);
    int intervals = kQuadStartIntervals;
    std::vector<double> prev = curve_at_resolution(pieces, ctx.k, baselines, intervals);
    for (int d = 0; d < kQuadMaxDoublings; ++d) {
        intervals *= 2;
        std::vector<double> next = curve_at_resolution(pieces, ctx.k, baselines, intervals);
        double worst = 0;
        for (std::size_t i = 0; i < next.size(); ++i)
            worst = std::max(worst, std::abs(next[i] - prev[i]));
        prev = std::move(next);
        if (worst <= kQuadTarget) {
            for (double& x : prev) x = std::clamp(x, 0.0, 1.0 + 1e-9);
            return CoherenceCurve(baselines, std::move(prev));
        }
    }
    throw NumericalError("van Cittert-Zernike quadrature did not converge");
}

} // namespace femto
