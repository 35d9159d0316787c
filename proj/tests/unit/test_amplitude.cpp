#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qpr/amplitude.hpp"
#include "qpr/errors.hpp"

using namespace qpr;
using std::numbers::pi;

TEST_SUITE("amplitude") {

TEST_CASE("amplitude construction") {
    CHECK_THROWS_AS(Amplitude(-1.0, 0.0), domain_error);
    CHECK_THROWS_AS(Amplitude(NAN, 0.0), domain_error);
    CHECK_THROWS_AS(Amplitude(1.0, INFINITY), domain_error);
    const Amplitude z(0.0, 2.0);
    CHECK(z.phase == 0.0);
    const Amplitude a(2.0, 7.5);
    CHECK(a.phase == 7.5);  // stored unreduced
    CHECK(a.density() == 4.0);
}

TEST_CASE("superpose examples") {
    CHECK_THROWS_AS(superpose({}), domain_error);

    const std::vector<Amplitude> one{{1.0, 0.0}};
    const auto s1 = superpose(one);
    CHECK(s1.modulus == 1.0);
    CHECK(s1.phase == 0.0);

    const std::vector<Amplitude> cancel{{1.0, 0.0}, {1.0, pi}};
    CHECK(superpose(cancel).modulus < 1e-15);

    // rectangular form: (1 + 0i) + (0 + 1i) = 1 + i
    const std::vector<Amplitude> quarter{{1.0, 0.0}, {1.0, pi / 2}};
    const auto s = superpose(quarter);
    CHECK(s.modulus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.phase == doctest::Approx(pi / 4).epsilon(1e-15));
}

TEST_CASE("interference density examples") {
    CHECK(interference_density({1.0, 0.0}, {1.0, 0.0}) == doctest::Approx(4.0));
    CHECK(interference_density({1.0, 0.0}, {1.0, pi}) < 1e-15);
    CHECK(interference_density({1.0, 0.0}, {1.0, pi / 2}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("interference is symmetric and extremal at aligned and opposite phases") {
    const Amplitude a(1.3, 0.4);
    const Amplitude b(0.7, -2.1);
    CHECK(interference_density(a, b) == interference_density(b, a));
    const double best = interference_density(a, {0.7, 0.4});
    const double worst = interference_density(a, {0.7, 0.4 + pi});
    for (int k = 0; k < 360; ++k) {
        const double v = interference_density(a, {0.7, k * pi / 180.0});
        CHECK(v <= best + 1e-12);
        CHECK(v >= worst - 1e-12);
    }
    CHECK(best == doctest::Approx(4.0));   // (1.3 + 0.7)^2
    CHECK(worst == doctest::Approx(0.36)); // (1.3 - 0.7)^2
}

TEST_CASE("density of a superposition equals the pairwise expansion") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> mod(0.0, 3.0), ph(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Amplitude> parts;
        const int k = 1 + trial % 7;
        for (int i = 0; i < k; ++i) parts.emplace_back(mod(gen), ph(gen));
        double expansion = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                expansion += parts[i].modulus * parts[j].modulus * std::cos(parts[i].phase - parts[j].phase);
        CHECK(superpose(parts).density() == doctest::Approx(expansion).epsilon(1e-10));
    }
}

TEST_CASE("components examples and round trip") {
    auto c = components({2.0, 0.0});
    CHECK(c.rebalancing == 2.0);
    CHECK(c.sentiment == 0.0);

    c = components({1.0, pi / 2});
    CHECK(std::abs(c.rebalancing) < 1e-15);
    CHECK(c.sentiment == doctest::Approx(1.0));

    c = components({1.0, 3 * pi / 4});
    CHECK(c.rebalancing == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(c.sentiment == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> mod(0.0, 5.0), ph(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
        const Amplitude a(mod(gen), ph(gen));
        const auto ab = components(a);
        CHECK(std::abs(ab.rebalancing * ab.rebalancing + ab.sentiment * ab.sentiment - a.density()) <=
              1e-12 * std::max(1.0, a.density()));
        const auto back = from_components(ab);
        CHECK(back.density() == doctest::Approx(a.density()).epsilon(1e-12));
        CHECK(same_phase(back, a, 1e-9));
    }
}

TEST_CASE("phase comparison is modulo two pi") {
    CHECK(same_phase({1.0, 0.1}, {1.0, 0.1 + 6 * pi}, 1e-12));
    CHECK_FALSE(same_phase({1.0, 0.1}, {1.0, 0.2}, 1e-3));
    CHECK(same_phase({0.0, 0.0}, {1.0, 2.0}, 1e-12));
}

TEST_CASE("amplitude grid") {
    const auto g = UniformGrid::symmetric(10.0, 2001);
    CHECK_THROWS_AS(AmplitudeGrid(UniformGrid::symmetric(1.0, 4), std::vector<Amplitude>(4)), domain_error);
    CHECK_THROWS_AS(AmplitudeGrid(UniformGrid{0.0, 1.0, 5}, std::vector<Amplitude>(5)), domain_error);
    CHECK_THROWS_AS(AmplitudeGrid(g, std::vector<Amplitude>(3)), domain_error);

    const auto psi = AmplitudeGrid::sample(g, [](double r) {
        return std::polar(2.0 * std::exp(-r * r / 2), 0.3 * r);
    });
    // trapezoid of 4 e^{-r^2} is 4 sqrt(pi) to spectral accuracy
    CHECK(psi.norm_squared() == doctest::Approx(4.0 * std::sqrt(pi)).epsilon(1e-12));
    CHECK_FALSE(psi.is_normalized());
    const auto unit = psi.normalized();
    CHECK(unit.is_normalized());
    CHECK(same_phase(unit.values()[1500], psi.values()[1500], 1e-14));
    CHECK_THROWS_AS(AmplitudeGrid(g, std::vector<Amplitude>(2001)).normalized(), domain_error);

    const auto z = psi.to_complex();
    const auto back = AmplitudeGrid::from_complex(g, z);
    CHECK(back.values()[700].modulus == doctest::Approx(psi.values()[700].modulus));
}

}
