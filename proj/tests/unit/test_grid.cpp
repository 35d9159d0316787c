#include "doctest.h"

#include <cmath>
#include <vector>

#include "qpr/errors.hpp"
#include "qpr/grid.hpp"

using namespace qpr;

TEST_SUITE("grid") {

TEST_CASE("symmetric grid nodes mirror exactly and include zero") {
    const auto g = UniformGrid::symmetric(3.7, 101);
    const auto r = g.nodes();
    REQUIRE(r.size() == 101);
    CHECK(r.front() == -3.7);
    CHECK(r.back() == 3.7);
    CHECK(r[50] == 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == -r[r.size() - 1 - i]);
    CHECK(g.spacing() == doctest::Approx(0.074).epsilon(1e-14));
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(UniformGrid::symmetric(1.0, 1), domain_error);
    CHECK_THROWS_AS(UniformGrid::symmetric(0.0, 11), domain_error);
    CHECK_THROWS_AS(UniformGrid::symmetric(NAN, 11), domain_error);
    CHECK_THROWS_AS((UniformGrid{2.0, 1.0, 5}.validate()), domain_error);
}

TEST_CASE("trapezoid integrates linear functions exactly") {
    const UniformGrid g{0.0, 2.0, 5};
    std::vector<double> f;
    for (double x : g.nodes()) f.push_back(3.0 * x + 1.0);
    CHECK(trapezoid(f, g.spacing()) == doctest::Approx(8.0).epsilon(1e-15));
    const auto c = cumulative_trapezoid(f, g.spacing());
    CHECK(c.front() == 0.0);
    CHECK(c[2] == doctest::Approx(2.5).epsilon(1e-15));  // 1.5 * 1 + 1
    CHECK(c.back() == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(trapezoid(std::vector<double>{1.0}, 0.1) == 0.0);
}

}
