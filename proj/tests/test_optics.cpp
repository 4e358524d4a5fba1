#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "femtohbt/optics.hpp"

using namespace femto;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}
} // namespace

TEST_CASE("sinc reference values") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(kPi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sinc(kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
    // Series branch agrees with the direct ratio just above the switch point.
    double z = 2e-6;
    CHECK(sinc(z) == doctest::Approx(std::sin(z) / z).epsilon(1e-15));
    CHECK(sinc(5e-7) == doctest::Approx(1.0 - 5e-7 * 5e-7 / 6.0).epsilon(1e-16));
    CHECK(sinc(-kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
}

TEST_CASE("optical context basics") {
    OpticalContext ctx(2.0 * kPi);
    CHECK(ctx.wavelength() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(OpticalContext(0.0), ArgumentError);
    CHECK_THROWS_AS(OpticalContext(-1.0), ArgumentError);
}

TEST_CASE("two-path amplitude extremes") {
    DetectorPair det{0.0, 0.5};
    // Same momentum: amplitudes add coherently, |A|^2 = 4.
    Complex a = two_path_amplitude(1.0, 1.0, det);
    CHECK(std::norm(a) == doctest::Approx(4.0).epsilon(1e-14));
    // (k1-k2)(x1-x2) = pi: perfect anti-node.
    Complex b = two_path_amplitude(0.0, 2.0 * kPi, det);
    CHECK(std::norm(b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-path modulus squared is 2 + 2cos") {
    std::mt19937 rng(991);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        double k1 = d(rng), k2 = d(rng);
        DetectorPair det{d(rng), d(rng)};
        double expect = 2.0 + 2.0 * std::cos((k1 - k2) * (det.x1 - det.x2));
        CHECK(std::norm(two_path_amplitude(k1, k2, det)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("four-path amplitude enforces momentum balance") {
    DetectorPair det{0.0, 1.0};
    CHECK_THROWS_AS(four_path_amplitude({1.0, 2.0, 3.0, 3.0}, det), ArgumentError);
    CHECK_NOTHROW(four_path_amplitude({1.0, 2.0, 3.0, 2.0}, det));
}

TEST_CASE("four-path modulus squared reduces to the pair fringe") {
    // With k1+k3 = k2+k4 the exchange term differs only by the phase
    // (k1-k2)(x1-x2), so |A|^2 = 2 + 2cos of that.
    std::mt19937 rng(313);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        double k1 = d(rng), k2 = d(rng), k3 = d(rng);
        double k4 = k1 + k3 - k2;
        DetectorPair det{d(rng), d(rng)};
        double expect = 2.0 + 2.0 * std::cos((k1 - k2) * (det.x1 - det.x2));
        CHECK(std::norm(four_path_amplitude({k1, k2, k3, k4}, det)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("single top-hat coherence closed form") {
    OpticalContext ctx(1e7);
    double alpha = 1e-6;
    // First zero at b = 2*pi / (k*alpha).
    double b0 = 2.0 * kPi / (ctx.k * alpha);
    CHECK(coherence_single_tophat(ctx, alpha, 0.0) == doctest::Approx(1.0));
    CHECK(coherence_single_tophat(ctx, alpha, b0) == doctest::Approx(0.0).epsilon(1e-14));
    // Midpoint: sinc^2(pi/2) = (2/pi)^2.
    CHECK(coherence_single_tophat(ctx, alpha, b0 / 2) ==
          doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-13));
    CHECK_THROWS_AS(coherence_single_tophat(ctx, -1e-6, 1.0), ArgumentError);
}

TEST_CASE("double-source coherence closed form") {
    OpticalContext ctx(1e7);
    double alpha = 5e-7, beta = 2e-6;
    CHECK(coherence_double_source(ctx, alpha, beta, 0.0) == doctest::Approx(1.0));
    // cos^2 zero: k*beta*b = pi/2.
    double bz = kPi / (2.0 * ctx.k * beta);
    CHECK(coherence_double_source(ctx, alpha, beta, bz) == doctest::Approx(0.0).epsilon(1e-14));
    // Product structure at a generic point.
    double b = 0.07;
    double expect = std::pow(sinc(ctx.k * alpha * b), 2) * std::pow(std::cos(ctx.k * beta * b), 2);
    CHECK(coherence_double_source(ctx, alpha, beta, b) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("numeric transform matches the delta-pair analytic form") {
    OpticalContext ctx(1e7);
    double alpha = 1e-6;
    auto b = linspace(0.0, 1.0, 101);
    CoherenceCurve curve = vcz_numeric_coherence(DeltaPair{alpha}, ctx, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
        double expect = std::pow(std::cos(ctx.k * alpha * b[i] / 2.0), 2);
        CHECK(curve.values[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("numeric transform matches the top-hat closed form") {
    OpticalContext ctx(1e7);
    double alpha = 1e-6;
    // Cover three lobes: zeros at multiples of 2*pi/(k*alpha) ~ 0.628.
    auto b = linspace(0.0, 2.0, 201);
    CoherenceCurve curve = vcz_numeric_coherence(TopHat{alpha}, ctx, b);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(std::abs(curve.values[i] - coherence_single_tophat(ctx, alpha, b[i])) < 1e-8);
}

TEST_CASE("numeric transform matches the double-hat product form") {
    // Convolution of a hat of width w with a symmetric delta pair at +-s/2:
    // C(b) = sinc^2(k*w*b/2) * cos^2(k*s*b/2).
    OpticalContext ctx(1e7);
    double sep = 2e-6, width = 6e-7;
    auto b = linspace(0.0, 1.0, 151);
    CoherenceCurve curve = vcz_numeric_coherence(DoubleTopHat{sep, width}, ctx, b);
    for (std::size_t i = 0; i < b.size(); ++i) {
        double expect = std::pow(sinc(ctx.k * width * b[i] / 2.0), 2) *
                        std::pow(std::cos(ctx.k * sep * b[i] / 2.0), 2);
        CHECK(std::abs(curve.values[i] - expect) < 1e-8);
    }
}

TEST_CASE("sampled profile reproduces a top hat") {
    OpticalContext ctx(1e7);
    double alpha = 1e-6;
    // Densely sampled flat profile over [-alpha/2, alpha/2].
    std::size_t n = 2001;
    std::vector<double> ang(n), w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) ang[i] = -alpha / 2 + alpha * double(i) / double(n - 1);
    auto b = linspace(0.0, 1.2, 61);
    CoherenceCurve curve = vcz_numeric_coherence(Sampled(ang, w), ctx, b);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(std::abs(curve.values[i] - coherence_single_tophat(ctx, alpha, b[i])) < 1e-6);
}

TEST_CASE("scaling covariance of the transform") {
    // C(b; k, alpha) depends only on the product k*alpha*b: doubling k and
    // halving alpha leaves the curve unchanged.
    auto b = linspace(0.0, 1.0, 41);
    CoherenceCurve c1 = vcz_numeric_coherence(TopHat{2e-6}, OpticalContext(5e6), b);
    CoherenceCurve c2 = vcz_numeric_coherence(TopHat{1e-6}, OpticalContext(1e7), b);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(c1.values[i] == doctest::Approx(c2.values[i]).epsilon(1e-10));
}

TEST_CASE("sampled profile validation") {
    CHECK_THROWS_AS(Sampled({0.0, 1.0}, {1.0, 1.0}), ArgumentError);            // too few
    CHECK_THROWS_AS(Sampled({0.0, 1.0, 0.5}, {1.0, 1.0, 1.0}), ArgumentError);  // not increasing
    CHECK_THROWS_AS(Sampled({0.0, 1.0, 2.0}, {1.0, -1.0, 1.0}), ArgumentError); // negative weight
    CHECK_THROWS_AS(Sampled({0.0, 1.0, 2.0}, {1.0, 1.0}), ArgumentError);       // size mismatch
    Sampled ok({0.0, 1.0, 2.0}, {1.0, 2.0, 1.0});
    double sum = 0;
    for (double x : ok.weights) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("coherence curve validation") {
    CHECK_THROWS_AS(CoherenceCurve({0.0, 1.0}, {1.0}), ArgumentError);
    CHECK_THROWS_AS(CoherenceCurve({1.0, 0.5}, {1.0, 0.5}), ArgumentError);
    CHECK_THROWS_AS(CoherenceCurve({0.0, 1.0}, {1.0, 1.5}), ArgumentError);
    CHECK_THROWS_AS(CoherenceCurve({0.0, 1.0}, {1.0, -0.5}), ArgumentError);
}

TEST_CASE("csv round trip is bit exact") {
    std::mt19937 rng(44);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> b, v;
    double x = 0;
    for (int i = 0; i < 50; ++i) {
        x += d(rng) + 1e-6;
        b.push_back(x);
        v.push_back(d(rng));
    }
    CoherenceCurve curve(b, v);
    std::ostringstream os;
    curve.write_csv(os);
    std::istringstream is(os.str());
    CoherenceCurve back = CoherenceCurve::read_csv(is);
    REQUIRE(back.baselines.size() == curve.baselines.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(back.baselines[i] == curve.baselines[i]);
        CHECK(back.values[i] == curve.values[i]);
    }
    // Header and LF endings.
    CHECK(os.str().rfind("b,C\n", 0) == 0);
    CHECK(os.str().find('\r') == std::string::npos);
}

TEST_CASE("csv reader reports the offending line") {
    std::istringstream bad("b,C\n0.0,1.0\nnonsense\n");
    try {
        CoherenceCurve::read_csv(bad);
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    std::istringstream badhdr("x,y\n0.0,1.0\n");
    CHECK_THROWS_AS(CoherenceCurve::read_csv(badhdr), ArgumentError);
}

TEST_CASE("csv file round trip") {
    fs::path tmp = fs::temp_directory_path() / "femtohbt_curve_test.csv";
    CoherenceCurve curve({0.0, 0.5, 1.0}, {1.0, 0.25, 0.0});
    curve.write_csv_file(tmp.string());
    CoherenceCurve back = CoherenceCurve::read_csv_file(tmp.string());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.baselines[i] == curve.baselines[i]);
        CHECK(back.values[i] == curve.values[i]);
    }
    fs::remove(tmp);
    CHECK_THROWS_AS(CoherenceCurve::read_csv_file("/nonexistent/file.csv"), ArgumentError);
}
