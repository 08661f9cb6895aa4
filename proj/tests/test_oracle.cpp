#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "spinsim/errors.hpp"
#include "spinsim/oracle.hpp"

using namespace spinsim;
using oracle::probDetuned;
using oracle::probFilter;
using oracle::probGeneral;
using oracle::probTriple;
using oracle::TwoOutcomeDistribution;

namespace {

std::mt19937_64 gen(555777);

Vec3 randomUnit() {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 v(normal(gen), normal(gen), normal(gen));
    while (v.norm() < 1e-3) {
        v = Vec3(normal(gen), normal(gen), normal(gen));
    }
    return v.normalized();
}

Vec3 randomState() { // norm <= 1, mixed states included
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen) * randomUnit();
}

double randomAngle() {
    return std::uniform_real_distribution<double>(-kTwoPi, kTwoPi)(gen);
}

Vec3 planeAxis(double phi) { return Vec3(std::cos(phi), std::sin(phi), 0.0); }

constexpr int kSigns[2] = {+1, -1};

// Brute-force evaluator built directly from the 2x2 matrix mechanics: stage
// unitaries, projection operators and the density matrix, with
//   U_e(theta) = cos(theta/2) I + i sin(theta/2) (e . sigma),
// the spin-rotation convention the closed forms are derived under.
namespace matrixoracle {

using Mat2 = Eigen::Matrix2cd;
const std::complex<double> kI(0.0, 1.0);

Mat2 sigmaDot(const Vec3& e) {
    Mat2 m;
    m << e.z(), std::complex<double>(e.x(), -e.y()), std::complex<double>(e.x(), e.y()), -e.z();
    return m;
}

Mat2 stageUnitary(double theta, const Vec3& e) {
    return std::cos(0.5 * theta) * Mat2::Identity() +
           kI * std::sin(0.5 * theta) * sigmaDot(e);
}

Mat2 projector(int s, const Vec3& n) {
    return 0.5 * (Mat2::Identity() + static_cast<double>(s) * sigmaDot(n));
}

Mat2 density(const Vec3& a) {
    return 0.5 * (Mat2::Identity() + sigmaDot(a));
}

double detectionProbability(const Vec3& a, int s1, int s2, double t1, double t2, double t3,
                            double t4, double t5) {
    const Vec3 x = Vec3::UnitX();
    const Vec3 z = Vec3::UnitZ();
    const Mat2 stage1 = stageUnitary(t1, z);
    const Mat2 stage2 = stageUnitary(t4, z) * stageUnitary(M_PI / 2.0, x) * projector(s1, z) *
                        stageUnitary(t3, z) * stageUnitary(M_PI / 2.0, x) * stageUnitary(t2, z);
    const Mat2 stage3 = projector(s2, z) * stageUnitary(t5, z) * stageUnitary(M_PI / 2.0, x);
    const Mat2 chain = stage3 * stage2 * stage1;
    return (density(a) * chain.adjoint() * chain).trace().real();
}

} // namespace matrixoracle

} // namespace

TEST_CASE("detuned distribution reference values") {
    const TwoOutcomeDistribution d = probDetuned(Vec3::UnitX(), 0.0);
    CHECK(d.at(+1, +1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.at(+1, -1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.at(-1, +1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.at(-1, -1) == doctest::Approx(0.0).epsilon(1e-15));

    for (double phi : {0.3, 1.1, 2.9, 4.4}) {
        const TwoOutcomeDistribution dz = probDetuned(Vec3::UnitZ(), phi);
        for (int s1 : kSigns) {
            for (int s2 : kSigns) {
                CHECK(dz.at(s1, s2) ==
                      doctest::Approx(0.25 * (1.0 + s1 * s2 * std::sin(phi))).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("distributions are normalized and nonnegative for physical states") {
    for (int i = 0; i < 10000; ++i) {
        const TwoOutcomeDistribution d = probDetuned(randomState(), randomAngle());
        double sum = 0.0;
        for (double p : d.p) {
            CHECK(p >= -1e-15);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("unphysical states are rejected") {
    CHECK_THROWS_AS(probDetuned(Vec3(1.1, 0.0, 0.0), 0.5), ConfigError);
    CHECK_THROWS_AS(probFilter(Vec3(0.0, 0.0, 1.5), Vec3::UnitX(), Vec3::UnitY()), ConfigError);
    CHECK_THROWS_AS(probFilter(Vec3::UnitX(), Vec3(0.4, 0.0, 0.0), Vec3::UnitY()), ConfigError);
}

TEST_CASE("general stage form reduces to the detuned form") {
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randomState();
        const double phi = randomAngle();
        const TwoOutcomeDistribution viaGeneral =
            probGeneral(a, 0.0, phi + M_PI / 2.0, -phi - M_PI / 2.0);
        const TwoOutcomeDistribution direct = probDetuned(a, phi);
        for (int s1 : kSigns) {
            for (int s2 : kSigns) {
                CHECK(viaGeneral.at(s1, s2) == doctest::Approx(direct.at(s1, s2)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("closed forms agree with the 2x2 matrix mechanics") {
    for (int i = 0; i < 200; ++i) {
        const Vec3 a = randomState();
        const double t1 = randomAngle();
        const double t2 = randomAngle();
        const double t3 = randomAngle();
        const double t4 = randomAngle();
        const double t5 = randomAngle();
        const TwoOutcomeDistribution closed = probGeneral(a, t1, t2, t4);
        for (int s1 : kSigns) {
            for (int s2 : kSigns) {
                const double brute =
                    matrixoracle::detectionProbability(a, s1, s2, t1, t2, t3, t4, t5);
                CHECK(std::abs(closed.at(s1, s2) - brute) < 1e-12);
            }
        }
    }
}

TEST_CASE("filtering distribution reference values") {
    const Vec3 a = randomUnit();
    const TwoOutcomeDistribution aligned = probFilter(a, a, a);
    CHECK(aligned.at(+1, +1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(aligned.at(+1, -1)) < 1e-12);
    CHECK(std::abs(aligned.at(-1, +1)) < 1e-12);
    CHECK(std::abs(aligned.at(-1, -1)) < 1e-12);

    const TwoOutcomeDistribution orthogonal =
        probFilter(Vec3::UnitX(), Vec3::UnitX(), Vec3::UnitZ());
    for (int s1 : kSigns) {
        for (int s2 : kSigns) {
            CHECK(orthogonal.at(s1, s2) == doctest::Approx(0.25 * (1.0 + s1)).epsilon(1e-14));
        }
    }
}

TEST_CASE("filtering form specializes to the detuned form") {
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randomState();
        const double phi = randomAngle();
        const TwoOutcomeDistribution filter = probFilter(a, planeAxis(phi), Vec3::UnitY());
        const TwoOutcomeDistribution detuned = probDetuned(a, phi);
        for (int s1 : kSigns) {
            for (int s2 : kSigns) {
                CHECK(std::abs(filter.at(s1, s2) - detuned.at(s1, s2)) < 1e-12);
            }
        }
    }
}

TEST_CASE("triple distribution normalizes and marginalizes to the pair form") {
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randomState();
        const Vec3 b = randomUnit();
        const Vec3 c = randomUnit();
        const Vec3 d = randomUnit();
        const auto triple = probTriple(a, b, c, d);
        double sum = 0.0;
        for (double p : triple.p) {
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);

        const TwoOutcomeDistribution marginal = triple.marginalOverS3();
        const TwoOutcomeDistribution pair = probFilter(a, b, c);
        for (int s1 : kSigns) {
            for (int s2 : kSigns) {
                CHECK(std::abs(marginal.at(s1, s2) - pair.at(s1, s2)) < 1e-12);
            }
        }
    }
}

TEST_CASE("one triple experiment carries both incompatible pair experiments") {
    for (double phi : {0.0, 0.5, M_PI / 4.0, 1.2, 2.8, 5.0}) {
        const Vec3 b = planeAxis(phi);
        const auto triple = probTriple(Vec3::UnitX(), b, Vec3::UnitY(), b);

        const TwoOutcomeDistribution pairX = probFilter(Vec3::UnitX(), b, Vec3::UnitY());
        CHECK(std::abs(triple.moment(0b001) - pairX.s1Moment()) < 1e-12);
        CHECK(std::abs(triple.moment(0b010) - pairX.s2Moment()) < 1e-12);
        CHECK(std::abs(triple.moment(0b011) - pairX.s12Moment()) < 1e-12);

        const TwoOutcomeDistribution pairY = probFilter(Vec3::UnitY(), b, Vec3::UnitY());
        CHECK(std::abs(triple.moment(0b110) - pairY.s1Moment()) < 1e-12);
        CHECK(std::abs(triple.moment(0b101) - pairY.s2Moment()) < 1e-12);
        CHECK(std::abs(triple.moment(0b011) - pairY.s12Moment()) < 1e-12);
    }
}

TEST_CASE("expectations match the distribution moments") {
    const auto alongX = oracle::expectations(Vec3::UnitX(), 1.1);
    CHECK(alongX.s1 == doctest::Approx(std::cos(1.1)).epsilon(1e-15));
    CHECK(alongX.s2 == doctest::Approx(std::sin(1.1) * std::cos(1.1)).epsilon(1e-15));
    CHECK(alongX.s12 == doctest::Approx(std::sin(1.1)).epsilon(1e-15));

    const auto quiet = oracle::expectations(Vec3::UnitY(), 0.0);
    CHECK(quiet.s1 == 0.0);
    CHECK(quiet.s2 == 0.0);
    CHECK(quiet.s12 == 0.0);

    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randomState();
        const double phi = randomAngle();
        const auto closed = oracle::expectations(a, phi);
        const TwoOutcomeDistribution d = probDetuned(a, phi);
        CHECK(std::abs(closed.s1 - d.s1Moment()) < 1e-14);
        CHECK(std::abs(closed.s2 - d.s2Moment()) < 1e-14);
        CHECK(std::abs(closed.s12 - d.s12Moment()) < 1e-14);
    }
}

TEST_CASE("theory error and disturbance reference values") {
    const auto atZero = oracle::theoryEpsilonEta(0.0);
    CHECK(atZero.epsilon == 0.0);
    CHECK(atZero.eta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(atZero.sigmaA == 1.0);
    CHECK(atZero.sigmaB == 1.0);

    const auto atHalfPi = oracle::theoryEpsilonEta(M_PI / 2.0);
    CHECK(atHalfPi.epsilon == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(atHalfPi.eta < 1e-15);

    const auto atPi = oracle::theoryEpsilonEta(M_PI);
    CHECK(atPi.epsilon == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(atPi.eta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("error and disturbance follow from the count expectations") {
    for (int k = 0; k < 100; ++k) {
        const double phi = kTwoPi * k / 100.0;
        const double eps2 = 2.0 - 2.0 * oracle::expectations(Vec3::UnitX(), phi).s1;
        const double eta2 = 2.0 - 2.0 * oracle::expectations(Vec3::UnitY(), phi).s2;
        CHECK(std::abs(eps2 - 4.0 * std::pow(std::sin(0.5 * phi), 2)) < 1e-12);
        CHECK(std::abs(eta2 - 2.0 * std::pow(std::cos(phi), 2)) < 1e-12);
        const auto th = oracle::theoryEpsilonEta(phi);
        CHECK(std::abs(std::sqrt(std::max(0.0, eps2)) - th.epsilon) < 1e-12);
        CHECK(std::abs(std::sqrt(std::max(0.0, eta2)) - th.eta) < 1e-12);
    }
}

TEST_CASE("inequality left-hand side reference values and bound") {
    CHECK(oracle::ozawaLhsTheory(0.0) == doctest::Approx(1.4142135623730951).epsilon(1e-15));
    CHECK(oracle::ozawaLhsTheory(M_PI / 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(oracle::ozawaLhsTheory(M_PI) ==
          doctest::Approx(3.0 * std::sqrt(2.0) + 2.0).epsilon(1e-15));

    for (int k = 0; k < 200; ++k) {
        const double phi = kTwoPi * k / 200.0;
        CHECK(oracle::ozawaLhsTheory(phi) >= 1.0);
    }

    // matches the printed closed form where all of its terms are nonnegative
    for (int k = 0; k <= 50; ++k) {
        const double phi = 0.5 * M_PI * k / 50.0;
        const double printed = 2.0 * std::sqrt(2.0) * std::cos(phi) * std::sin(0.5 * phi) +
                               2.0 * std::sin(0.5 * phi) + std::sqrt(2.0) * std::cos(phi);
        CHECK(std::abs(oracle::ozawaLhsTheory(phi) - printed) < 1e-12);
    }
}

TEST_CASE("naive product dips below the bound near a quarter turn") {
    CHECK(oracle::heisenbergProductTheory(M_PI / 2.0) < 1e-15);
    for (double phi : {M_PI / 2.0 - 0.3, M_PI / 2.0, M_PI / 2.0 + 0.3}) {
        CHECK(oracle::heisenbergProductTheory(phi) < 1.0);
        const double expected =
            2.0 * std::sqrt(2.0) * std::abs(std::sin(0.5 * phi) * std::cos(phi));
        CHECK(oracle::heisenbergProductTheory(phi) == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(oracle::heisenbergProductTheory(M_PI) > 1.0); // violation is local, not global
}
