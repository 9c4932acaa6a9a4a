#include "broadkin/errors.hpp"
#include "broadkin/parallel.hpp"
#include "broadkin/params.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace broadkin;

TEST_CASE("dispersion constants follow from the physical parameters")
{
    PhysicalParams p;
    p.coriolis_F = 2.0;
    p.gravity_g = 3.0;
    p.ref_vertical_wavenumber_m = 1.0;
    p.density_rho0 = 1.0;
    p.buoyancy_N = 1.0;
    const DispersionParams d = derive_dispersion(p);
    CHECK(d.lambda1 == doctest::Approx(4.0));
    CHECK(d.lambda2 == doctest::Approx(9.0));

    p.ref_vertical_wavenumber_m = 3.0;
    CHECK(derive_dispersion(p).lambda2 == doctest::Approx(1.0));
}

TEST_CASE("params_for_dispersion round trips")
{
    for (double l1 : {0.0, 1.0, 2.5}) {
        for (double l2 : {0.5, 1.0, 4.0}) {
            const DispersionParams d = derive_dispersion(params_for_dispersion(l1, l2));
            CHECK(d.lambda1 == doctest::Approx(l1));
            CHECK(d.lambda2 == doctest::Approx(l2));
        }
    }
}

TEST_CASE("omega")
{
    const DispersionParams acoustic{0.0, 1.0};
    CHECK(omega(0.0, acoustic) == 0.0);
    CHECK(omega(2.5, acoustic) == doctest::Approx(2.5));
    const DispersionParams gapped{1.0, 1.0};
    CHECK(omega(0.0, gapped) == 1.0);
    CHECK(omega(1.0, gapped) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("damping")
{
    PhysicalParams p; // nu = 0.1, gamma = 3
    CHECK(damping(0.0, p) == 0.0);
    CHECK(damping(2.0, p) == doctest::Approx(1.6));
}

TEST_CASE("sphere area")
{
    CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("validate rejects bad parameters")
{
    PhysicalParams p;
    CHECK_NOTHROW(validate(p));
    p.damping_exponent_gamma = 2.0;
    CHECK_THROWS_AS(validate(p), PreconditionError);
    p = {};
    p.dimension_d = 4;
    CHECK_THROWS_AS(validate(p), PreconditionError);
    p = {};
    p.broadening_c1 = 0.0;
    CHECK_THROWS_AS(validate(p), PreconditionError);
    p = {};
    p.viscosity_nu = -1.0;
    CHECK_THROWS_AS(validate(p), PreconditionError);
}

TEST_CASE("parallel_for visits every index once for any worker count")
{
    for (std::size_t workers : {1u, 2u, 3u, 7u, 64u}) {
        std::vector<int> hits(101, 0);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) {
            CHECK(h == 1);
        }
    }
}

TEST_CASE("parallel_for rethrows worker exceptions")
{
    CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                        if (i == 7) {
                            throw DomainError("boom");
                        }
                    }),
                    DomainError);
}
