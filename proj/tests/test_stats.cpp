#include <doctest.h>

#include <cmath>
#include <random>

#include "spinsim/errors.hpp"
#include "spinsim/stats.hpp"

using namespace spinsim;

namespace {

std::mt19937_64 gen(90210);

CountTable tableFromCells(std::uint64_t pp, std::uint64_t pm, std::uint64_t mp,
                          std::uint64_t mm, std::uint64_t perSetting) {
    CountTable t;
    t.cell(+1, +1) = pp;
    t.cell(+1, -1) = pm;
    t.cell(-1, +1) = mp;
    t.cell(-1, -1) = mm;
    t.emitted = 4 * perSetting;
    t.destroyed = t.emitted - t.detected();
    return t;
}

stats::FrequencyTable frequencyFromDistribution(const oracle::TwoOutcomeDistribution& d) {
    stats::FrequencyTable f;
    f.f = d.p;
    f.totalDetected = 1;
    return f;
}

Vec3 randomState() {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 v(normal(gen), normal(gen), normal(gen));
    while (v.norm() < 1e-3) {
        v = Vec3(normal(gen), normal(gen), normal(gen));
    }
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen) * v.normalized();
}

} // namespace

TEST_CASE("frequencies normalize by the detected count") {
    const auto half = stats::frequencies(tableFromCells(5000, 5000, 0, 0, 10000));
    CHECK(half.at(+1, +1) == 0.5);
    CHECK(half.at(+1, -1) == 0.5);
    CHECK(half.at(-1, +1) == 0.0);
    CHECK(half.at(-1, -1) == 0.0);
    CHECK(half.totalDetected == 10000);

    const auto uniform = stats::frequencies(tableFromCells(250, 250, 250, 250, 1000));
    for (double f : uniform.f) {
        CHECK(f == 0.25);
    }

    CHECK_THROWS_AS(stats::frequencies(tableFromCells(0, 0, 0, 0, 100)), EmptyTableError);
}

TEST_CASE("moments of reference tables") {
    const auto m = stats::momentsOf(stats::frequencies(tableFromCells(5000, 5000, 0, 0, 10000)));
    CHECK(m.s1 == 1.0);
    CHECK(m.s2 == 0.0);
    CHECK(m.s12 == 0.0);

    const auto zero = stats::momentsOf(stats::frequencies(tableFromCells(25, 25, 25, 25, 100)));
    CHECK(zero.s1 == 0.0);
    CHECK(zero.s2 == 0.0);
    CHECK(zero.s12 == 0.0);

    const double phi = M_PI / 3.0;
    const auto exact =
        stats::momentsOf(frequencyFromDistribution(oracle::probDetuned(Vec3::UnitX(), phi)));
    CHECK(exact.s1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(exact.s2 == doctest::Approx(std::sin(phi) * 0.5).epsilon(1e-14));
    CHECK(exact.s12 == doctest::Approx(std::sin(phi)).epsilon(1e-14));
}

TEST_CASE("estimators reproduce theory exactly on exact tables") {
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randomState();
        const double phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(gen);
        const auto moments =
            stats::momentsOf(frequencyFromDistribution(oracle::probDetuned(a, phi)));
        const auto closed = oracle::expectations(a, phi);
        CHECK(std::abs(moments.s1 - closed.s1) < 1e-14);
        CHECK(std::abs(moments.s2 - closed.s2) < 1e-14);
        CHECK(std::abs(moments.s12 - closed.s12) < 1e-14);
    }
    for (int k = 0; k < 100; ++k) {
        const double phi = kTwoPi * k / 100.0;
        const auto th = oracle::theoryEpsilonEta(phi);
        const double epsilon =
            stats::epsilonFromMoment(oracle::expectations(Vec3::UnitX(), phi).s1);
        const double eta = stats::etaFromMoment(oracle::expectations(Vec3::UnitY(), phi).s2);
        CHECK(std::abs(epsilon - th.epsilon) < 1e-12);
        CHECK(std::abs(eta - th.eta) < 1e-12);
    }
}

TEST_CASE("noise past the estimator boundary clamps to zero") {
    CHECK(stats::epsilonFromMoment(1.0) == 0.0);
    CHECK(stats::epsilonFromMoment(1.0 + 1e-15) == 0.0);
    CHECK(stats::etaFromMoment(1.0 + 1e-12) == 0.0);
    CHECK(std::isfinite(stats::epsilonFromMoment(-1.0)));
}

TEST_CASE("count-based error and disturbance at exact settings") {
    // the two degenerate tables: <S1>_x = 1 and <S2>_y = 1
    const CountTable tableX = tableFromCells(5000, 5000, 0, 0, 10000);
    const CountTable tableY = tableFromCells(10000, 0, 0, 0, 10000);
    const auto estimate = stats::epsilonEtaFromCounts(tableX, tableY);
    CHECK(estimate.epsilon == 0.0);
    CHECK(estimate.stderrEpsilon == 0.0);
    CHECK_FALSE(estimate.epsilonClamped);
    CHECK(estimate.eta == 0.0);
    CHECK(estimate.stderrEta == 0.0);

    // balanced tables: both moments 0, epsilon = eta = sqrt(2)
    const CountTable balanced = tableFromCells(2500, 2500, 2500, 2500, 10000);
    const auto spread = stats::epsilonEtaFromCounts(balanced, balanced);
    CHECK(spread.epsilon == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(spread.eta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(spread.stderrEpsilon > 0.0);
    CHECK(spread.stderrEpsilon < 0.02);
}

TEST_CASE("moment standard errors scale like the binomial width") {
    const CountTable balanced = tableFromCells(2500, 2500, 2500, 2500, 10000);
    const auto se = stats::momentStderr(balanced);
    // four independent cells of 10000 trials each: sd(<S1>) ~ 1/sqrt(total)
    CHECK(se.s1 > 0.003);
    CHECK(se.s1 < 0.02);
    CHECK(se.s2 == se.s1);
    CHECK(se.s12 == se.s1);

    // deterministic cells carry no variance
    const auto exact = stats::momentStderr(tableFromCells(10000, 0, 0, 0, 10000));
    CHECK(exact.s1 == 0.0);
    CHECK(exact.s2 == 0.0);
}

TEST_CASE("inequality record reference values") {
    const auto atZero = stats::ozawaCheck(0.0, {0.0, std::sqrt(2.0), 0.0, 0.0, false, false});
    CHECK(atZero.ozawaLhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(atZero.heisenbergProduct == 0.0);
    CHECK(atZero.bound == 1.0);
    CHECK(atZero.ozawaLhs >= atZero.bound);
    CHECK(atZero.heisenbergProduct < atZero.bound); // naive product violated

    const auto atPi = stats::ozawaCheck(M_PI, {2.0, std::sqrt(2.0), 0.0, 0.0, false, false});
    CHECK(atPi.ozawaLhs == doctest::Approx(3.0 * std::sqrt(2.0) + 2.0).epsilon(1e-15));

    const auto atHalfPi =
        stats::ozawaCheck(M_PI / 2.0, {std::sqrt(2.0), 0.0, 0.0, 0.0, false, false});
    CHECK(atHalfPi.ozawaLhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // error propagation: lhs gradient weights the two inputs
    const auto noisy = stats::ozawaCheck(1.0, {1.0, 0.5, 0.01, 0.02, false, false});
    CHECK(noisy.stderrLhs ==
          doctest::Approx(std::hypot(1.5 * 0.01, 2.0 * 0.02)).epsilon(1e-12));
    CHECK(noisy.stderrProduct ==
          doctest::Approx(std::hypot(0.5 * 0.01, 1.0 * 0.02)).epsilon(1e-12));
}

TEST_CASE("variance relation record reference values") {
    const auto boundary = stats::robertsonCheck(0.0, 1.0, 0.0, 0.0, 10000);
    CHECK(boundary.lhs == 0.0);
    CHECK(boundary.rhs == 0.0);

    const auto pole = stats::robertsonCheck(1.0, 0.0, 0.0, 1.0, 10000);
    CHECK(pole.lhs == 1.0);
    CHECK(pole.rhs == 1.0);

    const auto sphere = stats::robertsonCheck(0.8, 0.6, 0.0, 0.8, 10000);
    CHECK(sphere.lhs == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(sphere.rhs == doctest::Approx(0.64).epsilon(1e-15));

    // stderr vanishes where the gradient does and grows with 1/sqrt(N)
    CHECK(stats::robertsonCheck(0.0, 0.0, 0.0, 0.0, 10000).stderrLhs == 0.0);
    const double seSmall = stats::robertsonCheck(0.5, 0.5, 0.3, 0.5, 40000).stderrLhs;
    const double seLarge = stats::robertsonCheck(0.5, 0.5, 0.3, 0.5, 10000).stderrLhs;
    CHECK(seLarge == doctest::Approx(2.0 * seSmall).epsilon(1e-12));
}

TEST_CASE("commutator bound for a general state") {
    CHECK(stats::commutatorBound(Vec3::UnitZ()) == 1.0);
    CHECK(stats::commutatorBound(Vec3(0.0, 0.0, -0.3)) == doctest::Approx(0.3));
    CHECK(stats::commutatorBound(Vec3::UnitX()) == 0.0);
}
