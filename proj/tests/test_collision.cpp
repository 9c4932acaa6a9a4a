#include "broadkin/collision.hpp"
#include "broadkin/errors.hpp"

#include <doctest.h>

#include <array>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

using namespace broadkin;

namespace {

Physics default_physics(double l1 = 0.0)
{
    return Physics::make(params_for_dispersion(l1, 1.0));
}

RadialSpectrum bump(const GridPtr& grid, double center = 1.0, double width = 0.3, double amp = 1.0)
{
    return RadialSpectrum::sample(grid, [=](double k) {
        if (k <= 0.0) {
            return 0.0;
        }
        const double z = std::log(k / center) / width;
        return amp * std::exp(-0.5 * z * z);
    });
}

} // namespace

TEST_CASE("triangle cell fraction")
{
    const std::array<double, 3> lo_in{0.9, 1.0, 1.0}, hi_in{1.1, 1.1, 1.1};
    CHECK(triangle_cell_fraction(lo_in, hi_in) == doctest::Approx(1.0));
    const std::array<double, 3> lo_out{3.0, 0.9, 0.9}, hi_out{3.1, 1.0, 1.0};
    CHECK(triangle_cell_fraction(lo_out, hi_out) == 0.0);
    // x <= y + z cuts the cube [0,1]^3 corner-wise: inside fraction is 1/2
    const std::array<double, 3> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};
    CHECK(triangle_cell_fraction(lo, hi) == doctest::Approx(0.5));
    const std::array<double, 3> a_lo{0.2, 0.5, 0.9}, a_hi{0.4, 0.6, 1.2};
    const std::array<double, 3> b_lo{0.9, 0.2, 0.5}, b_hi{1.2, 0.4, 0.6};
    CHECK(triangle_cell_fraction(a_lo, a_hi) == doctest::Approx(triangle_cell_fraction(b_lo, b_hi)));
}

TEST_CASE("quadrature weights are trapezoid times the reduction density")
{
    auto grid = make_grid(Spacing::uniform, 8, 0.0, 1.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    const RadialGrid& E = q.nodes();
    const std::size_t i = 3;
    REQUIRE(q.triples(i).size() > 0);
    for (const auto& t : q.triples(i)) {
        std::array<std::size_t, 3> idx{i, t.j, t.l};
        std::sort(idx.begin(), idx.end());
        std::array<double, 3> lo{}, hi{};
        for (int a = 0; a < 3; ++a) {
            lo[a] = E.cell_lower()[idx[a]];
            hi[a] = E.cell_upper()[idx[a]];
        }
        const double expected = 2.0 * std::numbers::pi / E[i] * E[t.j] * E[t.l] * E.weights()[t.j] *
                                E.weights()[t.l] * triangle_cell_fraction(lo, hi);
        CHECK(t.weight == doctest::Approx(expected).epsilon(1e-14));
    }
    // interior pair deep inside the triangle: chi = 1, plain trapezoid
    const double h = 1.0 / 7.0;
    bool found = false;
    for (const auto& t : q.triples(i)) {
        if (t.j == 2 && t.l == 3) {
            found = true;
            CHECK(t.weight == doctest::Approx(2.0 * std::numbers::pi / (3 * h) * (2 * h) * (3 * h) * h * h));
        }
    }
    CHECK(found);
}

TEST_CASE("triples respect the triangle condition up to one cell")
{
    auto grid = make_grid(Spacing::uniform, 48, 0.0, 2.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    const RadialGrid& E = q.nodes();
    auto width = [&](std::size_t a) { return E.cell_upper()[a] - E.cell_lower()[a]; };
    for (std::size_t i = 0; i < q.node_count(); ++i) {
        for (const auto& t : q.triples(i)) {
            const double slack = width(i) + width(t.j) + width(t.l);
            CHECK(E[i] <= E[t.j] + E[t.l] + slack);
            CHECK(std::abs(E[t.j] - E[t.l]) <= E[i] + slack);
            CHECK(t.weight > 0.0);
        }
    }
}

TEST_CASE("full triad weight is symmetric")
{
    auto grid = make_grid(Spacing::uniform, 16, 0.0, 1.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    std::map<std::array<std::size_t, 3>, double> W;
    for (std::size_t i = 0; i < q.node_count(); ++i) {
        for (const auto& t : q.triples(i)) {
            W[{i, t.j, t.l}] = q.measure()[i] * t.weight;
        }
    }
    std::size_t checked = 0;
    for (const auto& [key, w] : W) {
        const auto it = W.find({key[1], key[0], key[2]});
        if (it != W.end()) {
            CHECK(it->second == doctest::Approx(w).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("zero spectrum gives zero collision")
{
    auto grid = make_grid(Spacing::uniform, 32, 0.0, 2.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    const CollisionOutput c = collision(RadialSpectrum::zeros(grid), q, default_physics());
    for (std::size_t i = 0; i < c.total.size(); ++i) {
        CHECK(c.total[i] == 0.0);
        CHECK(c.gain[i] == 0.0);
        CHECK(c.loss_frequency[i] == 0.0);
    }
}

TEST_CASE("gain and loss are nonnegative and split the total")
{
    for (double l1 : {0.0, 1.0}) {
        auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
        const TriadQuadrature q = build_quadrature(*grid, 3);
        const Physics phys = default_physics(l1);
        const RadialSpectrum f = bump(grid);
        const CollisionOutput c = collision(f, q, phys);
        const auto g = gain(f, q, phys);
        const auto th = loss_frequency(f, q, phys);
        const auto direct = collision_direct(f, q, phys);
        for (std::size_t i = 0; i < c.total.size(); ++i) {
            const double fi = i < f.size() ? f[i] : 0.0;
            CHECK(c.gain[i] >= 0.0);
            CHECK(c.loss_frequency[i] >= 0.0);
            CHECK(g[i] == c.gain[i]);
            CHECK(th[i] == c.loss_frequency[i]);
            CHECK(c.total[i] == doctest::Approx(c.gain[i] - fi * c.loss_frequency[i]).epsilon(1e-13));
            const double scale = c.gain[i] + fi * c.loss_frequency[i];
            if (scale > 0.0) {
                CHECK(std::abs(direct[i] - c.total[i]) / scale < 1e-10);
            }
        }
        // continuous extension at k = 0
        CHECK(c.total[0] == c.total[1]);
    }
}

TEST_CASE("weak form with phi = 1 is minus the triad sum")
{
    auto grid = make_grid(Spacing::uniform, 48, 0.0, 3.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    const Physics phys = default_physics();
    const RadialSpectrum f = bump(grid, 0.8, 0.25, 2.0);
    const std::vector<double> one(q.node_count(), 1.0);
    const double strong = integrate_nodes(collision(f, q, phys).total, one, q);
    const double weak = weak_form_apply(f, one, q, phys);
    CHECK(std::abs(strong - weak) / (1.0 + std::abs(strong)) < 1e-10);
    const double weak_fn = weak_form_apply(f, [](double) { return 1.0; }, q, phys);
    CHECK(weak_fn == doctest::Approx(weak).epsilon(1e-14));
    CHECK(weak_form_apply(RadialSpectrum::zeros(grid), one, q, phys) == 0.0);
}

TEST_CASE("single-cell support leaves far nodes without interactions")
{
    auto grid = make_grid(Spacing::uniform, 64, 0.0, 4.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    std::vector<double> v(grid->size(), 0.0);
    v[5] = 1.0;
    const RadialSpectrum f(grid, v);
    const auto g = gain(f, q, default_physics());
    // f1 f2 needs both k1, k2 near k_5, so k <= 2 k_6 for a nonzero gain
    for (std::size_t i = 0; i < q.node_count(); ++i) {
        if (q.nodes()[i] > 2.0 * (*grid)[7]) {
            CHECK(g[i] == 0.0);
        }
    }
}

TEST_CASE("weight scale multiplies the operator")
{
    auto grid = make_grid(Spacing::uniform, 32, 0.0, 2.0);
    QuadratureOptions o;
    o.weight_scale = 2.0;
    const TriadQuadrature q1 = build_quadrature(*grid, 3);
    const TriadQuadrature q2 = build_quadrature(*grid, 3, o);
    const RadialSpectrum f = bump(grid);
    const auto a = gain(f, q1, default_physics());
    const auto b = gain(f, q2, default_physics());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i] == doctest::Approx(2.0 * a[i]));
    }
}

TEST_CASE("d = 2 has no deterministic quadrature")
{
    auto grid = make_grid(Spacing::uniform, 16, 0.0, 1.0);
    CHECK_THROWS_AS(build_quadrature(*grid, 2), PreconditionError);
}

TEST_CASE("overflow is reported")
{
    auto grid = make_grid(Spacing::uniform, 16, 0.0, 1.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    const RadialSpectrum f = RadialSpectrum::sample(grid, [](double) { return 1e300; });
    CHECK_THROWS_AS(collision(f, q, default_physics()), OverflowError);
}

TEST_CASE("other model pairs evaluate")
{
    auto grid = make_grid(Spacing::uniform, 32, 0.0, 2.0);
    const TriadQuadrature q = build_quadrature(*grid, 3);
    ModelSelection m;
    m.broadening = BroadeningModel::acoustic_one_loop;
    m.kernel = KernelModel::product_form;
    const Physics phys = Physics::make(params_for_dispersion(0.0, 1.0), m);
    const CollisionOutput c = collision(bump(grid), q, phys);
    for (double v : c.total) {
        CHECK(std::isfinite(v));
    }
}
