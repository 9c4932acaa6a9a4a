#include "broadkin/errors.hpp"
#include "broadkin/mc_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace broadkin;

namespace {

Physics phys0()
{
    return Physics::make(params_for_dispersion(0.0, 1.0));
}

RadialSpectrum bump(const GridPtr& grid)
{
    return RadialSpectrum::sample(grid, [](double k) {
        if (k <= 0.0) {
            return 0.0;
        }
        const double z = std::log(k) / 0.3;
        return std::exp(-0.5 * z * z);
    });
}

bool same(const McEstimate& a, const McEstimate& b)
{
    return a.mean == b.mean && a.std_error == b.std_error && a.samples_used == b.samples_used;
}

} // namespace

TEST_CASE("zero spectrum gives exactly zero")
{
    auto grid = make_grid(Spacing::uniform, 32, 0.0, 2.0);
    const RadialSpectrum z = RadialSpectrum::zeros(grid);
    McConfig cfg;
    cfg.samples = 1000;
    for (const McEstimate& e : {mc_gain(z, 1.0, cfg, phys0()), mc_loss_frequency(z, 1.0, cfg, phys0()),
                                mc_collision(z, 1.0, cfg, phys0())}) {
        CHECK(e.mean == 0.0);
        CHECK(e.std_error == 0.0);
    }
}

TEST_CASE("samples must be positive")
{
    auto grid = make_grid(Spacing::uniform, 32, 0.0, 2.0);
    McConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS_AS(mc_gain(bump(grid), 1.0, cfg, phys0()), DomainError);
}

TEST_CASE("fixed seed reproduces bit-identical estimates")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig cfg;
    cfg.samples = 20000;
    cfg.seed = 42;
    CHECK(same(mc_collision(f, 0.8, cfg, phys0()), mc_collision(f, 0.8, cfg, phys0())));
    CHECK(same(mc_gain(f, 0.8, cfg, phys0()), mc_gain(f, 0.8, cfg, phys0())));
    cfg.stratification = Stratification::radial_shells;
    CHECK(same(mc_loss_frequency(f, 0.8, cfg, phys0()), mc_loss_frequency(f, 0.8, cfg, phys0())));
    McConfig other = cfg;
    other.seed = 43;
    CHECK(mc_loss_frequency(f, 0.8, cfg, phys0()).mean != mc_loss_frequency(f, 0.8, other, phys0()).mean);
}

TEST_CASE("standard error scales as samples^{-1/2}")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig small, large;
    small.samples = 10000;
    large.samples = 100000;
    const double r = mc_gain(f, 1.0, small, phys0()).std_error / mc_gain(f, 1.0, large, phys0()).std_error;
    CHECK(r > std::sqrt(10.0) / 2.0);
    CHECK(r < 2.0 * std::sqrt(10.0));
}

TEST_CASE("gain estimate is nonnegative within 3 standard errors")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig cfg;
    cfg.samples = 5000;
    for (double k : {0.1, 1.0, 3.0, 6.0}) {
        const McEstimate e = mc_gain(f, k, cfg, phys0());
        CHECK(e.mean + 3.0 * e.std_error >= 0.0);
    }
}

TEST_CASE("collision is gain minus f theta within combined errors")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig cfg;
    cfg.samples = 200000;
    cfg.seed = 7;
    const double k = (*grid)[16];
    const McEstimate c = mc_collision(f, k, cfg, phys0());
    const McEstimate g = mc_gain(f, k, cfg, phys0());
    const McEstimate t = mc_loss_frequency(f, k, cfg, phys0());
    const double fk = f[16];
    const double se = std::sqrt(c.std_error * c.std_error + g.std_error * g.std_error +
                                fk * fk * t.std_error * t.std_error);
    CHECK(std::abs(c.mean - (g.mean - fk * t.mean)) <= 3.0 * se);
}

TEST_CASE("stratified and plain sampling agree")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig plain, shells;
    plain.samples = shells.samples = 200000;
    shells.stratification = Stratification::radial_shells;
    const McEstimate a = mc_loss_frequency(f, 1.0, plain, phys0());
    const McEstimate b = mc_loss_frequency(f, 1.0, shells, phys0());
    CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("two-dimensional momentum space is supported")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const RadialSpectrum f = bump(grid);
    McConfig cfg;
    cfg.samples = 20000;
    cfg.dimension = 2;
    const McEstimate e = mc_gain(f, 1.0, cfg, phys0());
    CHECK(std::isfinite(e.mean));
    CHECK(e.mean > 0.0);
}
