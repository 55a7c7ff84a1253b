#include <doctest.h>

#include <cmath>

#include "nd/error.hpp"
#include "nd/harness.hpp"
#include "nd/kernels.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nd;

namespace {

KernelSpec constant_table(std::size_t points, Complex value, KernelClass cls = KernelClass::Singular) {
    return KernelSpec::table(cls, 1.0, 1.0, 0.5, points, std::vector<Complex>(points * points, value));
}

SpacePtr scaled_copy(const SpacePtr& base, double lambda) {
    auto coords = base->all_coordinates();
    for (auto& row : coords)
        for (auto& c : row) c *= lambda;
    std::vector<double> w(base->weights().begin(), base->weights().end());
    return support::share(MetricMeasureSpace::from_coordinates(base->name(), std::move(coords), std::move(w),
                                                               base->n()));
}

double smoothness_at(const KernelSpec& k, const MetricMeasureSpace& s, const std::vector<PointId>& w) {
    const double g = k.gamma();
    const double e = k.n() + k.order_shift() + g;
    return std::abs(k(s, w[0], w[2]) - k(s, w[1], w[2])) * std::pow(s.distance(w[0], w[2]), e) /
           std::pow(s.distance(w[0], w[1]), g);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("kernel evaluation examples") {
    const auto two = support::two_point();
    CHECK(KernelSpec::riesz_fractional(1, 0.5)(*two, 0, 1) == Complex(1.0));
    CHECK(KernelSpec::riesz_hypersingular(1, 0.5)(*two, 0, 1) == Complex(1.0));

    const auto c4 = builtin_space(BuiltinKind::UniformCircle, 4);
    const auto odd = KernelSpec::odd_circle();
    CHECK(odd(*c4, 0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(odd(*c4, 1, 0).real() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(odd(*c4, 0, 3).real() < 0.0);
    CHECK(odd(*c4, 0, 2) == Complex(0.0));
}

TEST_CASE("kernel evaluation errors") {
    const auto two = support::two_point();
    CHECK_THROWS_AS(KernelSpec::riesz_singular(1)(*two, 0, 0), InvalidArgument);
    const auto odd = KernelSpec::odd_circle();
    CHECK_THROWS_AS(odd.check_space(*builtin_space(BuiltinKind::UniformInterval, 8)), KernelMismatch);
    CHECK_THROWS_AS(odd.check_space(*builtin_space(BuiltinKind::UniformCircle, 7)), KernelMismatch);
    CHECK_NOTHROW(odd.check_space(*builtin_space(BuiltinKind::UniformCircle, 8)));
    CHECK_THROWS_AS(verify_size_condition(odd, *builtin_space(BuiltinKind::UniformCircle, 9)), KernelMismatch);

    CHECK_THROWS_AS(KernelSpec::riesz_fractional(1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec::riesz_fractional(1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec::riesz_singular(0.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec::riesz_singular(1, 1.5), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec::table(KernelClass::Singular, 1, 1, 0, 2, {1.0, 2.0, 3.0}), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec::table(KernelClass::Singular, 1, 1, 0, 2, {0.0, NAN, 1.0, 0.0}), InvalidArgument);
    // Diagonal entries are never read, so they may hold anything.
    CHECK_NOTHROW(KernelSpec::table(KernelClass::Singular, 1, 1, 0, 2, {NAN, 1.0, 1.0, INFINITY}));

    const auto table = KernelSpec::table(KernelClass::Singular, 1, 1, 0, 2, {0.0, 1.0, 1.0, 0.0}, "other");
    CHECK_THROWS_AS(table.check_space(*support::two_point()), KernelMismatch);
    CHECK_THROWS_AS(table.check_space(*builtin_space(BuiltinKind::UniformInterval, 3)), KernelMismatch);
    CHECK_THROWS_AS(KernelSpec::riesz_singular(1).table_entries(), KernelMismatch);
}

TEST_CASE("kernel naming") {
    for (auto src : {KernelSource::RieszFractional, KernelSource::RieszSingular,
                     KernelSource::RieszHypersingular, KernelSource::OddCircle, KernelSource::Table})
        CHECK(parse_kernel_source(to_string(src)) == src);
    CHECK_FALSE(parse_kernel_source("gauss").has_value());
    CHECK(KernelSpec::riesz_fractional(1, 0.25).order_shift() == -0.25);
    CHECK(KernelSpec::riesz_hypersingular(1, 0.25).order_shift() == 0.25);
    CHECK(KernelSpec::odd_circle().order_shift() == 0.0);
    CHECK(truncate_kernel(KernelSpec::odd_circle(), 0.5).describe() ==
          "odd_circle[singular, n=1, gamma=1, epsilon=0.5]");
}

TEST_CASE("eta values") {
    CHECK(eta(0.0) == 0.0);
    CHECK(eta(0.5) == 0.0);
    CHECK(eta(0.75) == 0.5);
    CHECK(eta(1.0) == 1.0);
    CHECK(eta(7.0) == 1.0);
    CHECK(eta_derivative(0.75) == 3.0);
    CHECK(eta_derivative(0.25) == 0.0);
    CHECK(eta_derivative(2.0) == 0.0);
    CHECK_THROWS_AS(eta(-0.1), InvalidArgument);
    CHECK_THROWS_AS(eta_derivative(-1e-300), InvalidArgument);
}

TEST_CASE("eta is monotone, bounded, C1 with sup of the derivative 3") {
    double previous = 0;
    double max_derivative = 0;
    for (int i = 0; i <= 20000; ++i) {
        const double s = 1.5 * i / 20000.0;
        const double v = eta(s);
        CHECK(v >= previous);
        CHECK(v <= 1.0);
        max_derivative = std::max(max_derivative, eta_derivative(s));
        previous = v;
    }
    CHECK(max_derivative == kEtaDerivativeMax);
    for (double step : {1e-3, 1e-4, 1e-5}) {
        for (double knot : {0.5, 1.0}) {
            const double right = (eta(knot + step) - eta(knot)) / step;
            const double left = (eta(knot) - eta(knot - step)) / step;
            CHECK(std::abs(right) <= 13 * step);
            CHECK(std::abs(left) <= 13 * step);
        }
        // Interior: the difference quotient tracks the closed-form derivative.
        const double s = 0.6;
        CHECK(std::abs((eta(s + step) - eta(s - step)) / (2 * step) - eta_derivative(s)) <= 30 * step * step + 1e-9);
    }
}

TEST_CASE("truncation examples") {
    const auto s = builtin_space(BuiltinKind::UniformInterval, 16);
    const auto k = KernelSpec::riesz_singular(1);
    const double eps = 0.3;
    const auto t = truncate_kernel(k, eps);
    REQUIRE(t.truncation() == eps);
    for (PointId x = 0; x < 16; ++x) {
        CHECK(t(*s, x, x) == Complex(0.0));
        for (PointId y = 0; y < 16; ++y) {
            if (x == y) continue;
            const double d = s->distance(x, y);
            if (d >= eps) CHECK(t(*s, x, y) == k(*s, x, y));
            if (d <= eps / 2) CHECK(t(*s, x, y) == Complex(0.0));
        }
    }
    const auto wide = truncate_kernel(k, 2.0 * s->diameter() + 1e-9);
    for (PointId x = 0; x < 16; ++x)
        for (PointId y = 0; y < 16; ++y) CHECK(wide(*s, x, y) == Complex(0.0));

    CHECK_THROWS_AS(truncate_kernel(k, 0.0), InvalidArgument);
    CHECK_THROWS_AS(truncate_kernel(k, -1.0), InvalidArgument);
    CHECK_THROWS_AS(truncate_kernel(t, 0.1), InvalidArgument);
}

TEST_CASE("adjoint kernel") {
    const auto s = builtin_space(BuiltinKind::UniformInterval, 6);
    const auto k = random_table_kernel(*s, 5);
    const auto a = adjoint_kernel(k);
    CHECK(a.is_adjoint());
    CHECK_FALSE(adjoint_kernel(a).is_adjoint());
    for (PointId x = 0; x < 6; ++x)
        for (PointId y = 0; y < 6; ++y)
            if (x != y) CHECK(a(*s, x, y) == std::conj(k(*s, y, x)));
}

TEST_CASE("tapered_hilbert") {
    const auto s = builtin_space(BuiltinKind::UniformInterval, 8);
    const auto k = tapered_hilbert(*s);
    CHECK(k.kernel_class() == KernelClass::Singular);
    const double t = s->coordinates(5)[0];
    CHECK(k(*s, 1, 5) == Complex(4 * t * (1 - t) / s->distance(1, 5)));
    CHECK(k(*s, 5, 1).real() < 0);
    CHECK_THROWS_AS(tapered_hilbert(*builtin_space(BuiltinKind::UniformCircle, 8)), InvalidArgument);
    CHECK_THROWS_AS(tapered_hilbert(*builtin_space(BuiltinKind::Islands, 2)), InvalidArgument);
}

TEST_CASE("size condition examples") {
    for (auto kind : {BuiltinKind::UniformInterval, BuiltinKind::UniformCircle})
        for (long n : {16, 64, 512}) {
            const auto s = builtin_space(kind, n);
            const auto r = verify_size_condition(KernelSpec::riesz_fractional(1, 0.5), *s);
            CHECK(r.constant == 1.0);
            CHECK(r.admissible_count == static_cast<std::uint64_t>(n * (n - 1)));
        }
    const auto s = builtin_space(BuiltinKind::UniformInterval, 8);
    CHECK(verify_size_condition(constant_table(8, 0.0), *s).constant == 0.0);
    CHECK_THROWS_AS(verify_size_condition(KernelSpec::riesz_singular(1), *builtin_space(BuiltinKind::UniformInterval, 1)),
                    DegenerateSpace);
}

TEST_CASE("smoothness condition examples") {
    const auto two = support::two_point();
    const auto r = verify_smoothness_condition(KernelSpec::riesz_fractional(1, 0.5), *two);
    CHECK(r.admissible_count == 0);
    CHECK(r.constant == 0.0);

    const auto s = builtin_space(BuiltinKind::UniformInterval, 8);
    CHECK(verify_smoothness_condition(constant_table(8, Complex(2, 1)), *s).constant == 0.0);

    const auto k = KernelSpec::riesz_fractional(1, 0.5, 1.0);
    const auto rf = verify_smoothness_condition(k, *s);
    const auto o = oracle::smoothness_constant(k, *s);
    // Frozen from the exhaustive scan; equal to 2 (sqrt 2 - 1).
    CHECK(rf.constant == doctest::Approx(0.82842712474619029).epsilon(1e-15));
    CHECK(rf.constant == doctest::Approx(2 * (std::sqrt(2.0) - 1)).epsilon(1e-14));
    CHECK(rf.constant == doctest::Approx(o.constant).epsilon(1e-14));
    CHECK(rf.admissible_count == 104);
    CHECK(rf.admissible_count == o.admissible);
    CHECK(rf.witness == std::vector<PointId>{0, 2, 4});
    CHECK(smoothness_at(k, *s, rf.witness) == rf.constant);
}

TEST_CASE("condition constants match the oracles on random spaces and kernels") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto s = support::random_cloud(seed, 18);
        const KernelSpec kernels[] = {KernelSpec::riesz_fractional(1, 0.3), KernelSpec::riesz_singular(1),
                                      KernelSpec::riesz_hypersingular(1, 0.4, 0.8),
                                      random_table_kernel(*s, seed)};
        for (const auto& k : kernels) {
            const auto size = verify_size_condition(k, *s);
            CHECK(size.constant == doctest::Approx(oracle::size_constant(k, *s)).epsilon(1e-14));
            CHECK(std::abs(k(*s, size.witness[0], size.witness[1])) *
                      std::pow(s->distance(size.witness[0], size.witness[1]), k.n() + k.order_shift()) ==
                  size.constant);
            const auto smooth = verify_smoothness_condition(k, *s);
            const auto o = oracle::smoothness_constant(k, *s);
            CHECK(smooth.constant == doctest::Approx(o.constant).epsilon(1e-13));
            CHECK(smooth.admissible_count == o.admissible);
            CHECK(smoothness_at(k, *s, smooth.witness) == doctest::Approx(smooth.constant).epsilon(1e-15));
        }
    }
}

TEST_CASE("odd_circle conditions on the circle") {
    const auto s = builtin_space(BuiltinKind::UniformCircle, 16);
    const auto k = KernelSpec::odd_circle();
    CHECK(verify_size_condition(k, *s).constant == doctest::Approx(1.0).epsilon(1e-15));
    const auto smooth = verify_smoothness_condition(k, *s);
    CHECK(smooth.constant == doctest::Approx(oracle::smoothness_constant(k, *s).constant).epsilon(1e-14));
    CHECK(std::isfinite(smooth.constant));
}

TEST_CASE("truncated smoothness stays below C2 + 6 C1 across the epsilon grid") {
    struct Case {
        SpacePtr space;
        KernelSpec kernel;
    };
    const auto interval = builtin_space(BuiltinKind::UniformInterval, 32);
    const auto circle = builtin_space(BuiltinKind::UniformCircle, 32);
    const auto cantor = builtin_space(BuiltinKind::Cantor4, 2);
    const Case cases[] = {{interval, KernelSpec::riesz_singular(1)},
                          {interval, tapered_hilbert(*interval)},
                          {circle, KernelSpec::odd_circle()},
                          {cantor, KernelSpec::riesz_singular(1)},
                          {cantor, random_table_kernel(*cantor, 3)}};
    for (const auto& c : cases) {
        const double c1 = verify_size_condition(c.kernel, *c.space).constant;
        const double c2 = verify_smoothness_condition(c.kernel, *c.space).constant;
        const auto grid = epsilon_grid(*c.space);
        REQUIRE(grid.size() == 16);
        for (double eps : grid) {
            const auto t = truncate_kernel(c.kernel, eps);
            CHECK(verify_smoothness_condition(t, *c.space).constant <= c2 + kEtaDerivativeMax * 2 * c1);
            CHECK(verify_size_condition(t, *c.space).constant <= c1);
        }
    }
}

TEST_CASE("condition constants scale with the metric") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto base = support::random_cloud(seed, 14);
        const auto k = random_table_kernel(*base, seed + 10);
        const double size0 = verify_size_condition(k, *base).constant;
        const double smooth0 = verify_smoothness_condition(k, *base).constant;
        for (double lambda : {2.0, 0.25}) {
            // Powers of two keep every distance and product exact.
            const auto scaled = scaled_copy(base, lambda);
            CHECK(verify_size_condition(k, *scaled).constant == lambda * size0);
            CHECK(verify_smoothness_condition(k, *scaled).constant == lambda * smooth0);
        }
        const double lambda = 3.0;
        const auto scaled = scaled_copy(base, lambda);
        CHECK(verify_size_condition(k, *scaled).constant == doctest::Approx(lambda * size0).epsilon(1e-14));
        CHECK(verify_smoothness_condition(k, *scaled).constant ==
              doctest::Approx(lambda * smooth0).epsilon(1e-14));

        // The fractional kernel itself scales too: |K| d^(n - alpha) stays 1.
        const auto frac = KernelSpec::riesz_fractional(1, 0.5);
        CHECK(verify_size_condition(frac, *scaled).constant == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("condition scans are thread-count independent") {
    support::ThreadGuard guard;
    const auto s = builtin_space(BuiltinKind::Cantor4, 2);
    const auto k = random_table_kernel(*s, 9);
    set_thread_count(1);
    const auto a = verify_smoothness_condition(k, *s);
    const auto sa = verify_size_condition(k, *s);
    set_thread_count(7);
    const auto b = verify_smoothness_condition(k, *s);
    const auto sb = verify_size_condition(k, *s);
    CHECK(a.constant == b.constant);
    CHECK(a.witness == b.witness);
    CHECK(a.admissible_count == b.admissible_count);
    CHECK(sa.constant == sb.constant);
    CHECK(sa.witness == sb.witness);
}

}  // TEST_SUITE
