#include <doctest.h>

#include <cmath>
#include <random>

#include "nd/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nd;

namespace {

SampledFunction coordinate_function(const SpacePtr& s) {
    std::vector<Complex> v(s->size());
    for (PointId i = 0; i < s->size(); ++i) v[i] = s->coordinates(i)[0];
    return SampledFunction(s, std::move(v));
}

}  // namespace

TEST_SUITE("lipschitz") {

TEST_CASE("constant function has zero seminorm") {
    const auto s = builtin_space(BuiltinKind::UniformCircle, 10);
    const auto f = constant_function(s, Complex(2.5, -1.0));
    CHECK(holder_seminorm(f, 0.5).value == 0.0);
    const auto one = lambda_norm(constant_function(s, 1.0), 0.5);
    CHECK(one.sup_part == 1.0);
    CHECK(one.seminorm_part == 0.0);
    CHECK(one.total() == 1.0);
    CHECK(lambda_norm(constant_function(s, 0.0), 0.5).total() == 0.0);
}

TEST_CASE("distance powers have seminorm exactly one, witnessed at the anchor") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto s = support::random_cloud(seed, 17);
        for (double beta : {0.2, 0.5, 1.0}) {
            const PointId anchor = seed % s->size();
            const auto r = holder_seminorm(distance_power(s, anchor, beta), beta);
            CHECK(r.value == 1.0);
            CHECK((r.witness.first == anchor || r.witness.second == anchor));
        }
    }
}

TEST_CASE("f(x) = x on uniform_interval(4)") {
    const auto s = builtin_space(BuiltinKind::UniformInterval, 4);
    const auto f = coordinate_function(s);
    const auto r = holder_seminorm(f, 0.5);
    CHECK(r.value == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(r.value == oracle::holder(f, 0.5));
    CHECK(r.witness == std::pair<PointId, PointId>{0, 3});
    const auto n = lambda_norm(f, 0.5);
    CHECK(n.sup_part == 0.875);
    CHECK(n.total() == doctest::Approx(1.741025).epsilon(1e-6));
    CHECK(n.witness == r.witness);
}

TEST_CASE("seminorm errors") {
    const auto s = builtin_space(BuiltinKind::UniformInterval, 4);
    const auto f = coordinate_function(s);
    CHECK_THROWS_AS(holder_seminorm(f, 0.0), InvalidArgument);
    CHECK_THROWS_AS(holder_seminorm(f, 1.5), InvalidArgument);
    CHECK_THROWS_AS(lambda_norm(f, -0.1), InvalidArgument);
    const auto single = builtin_space(BuiltinKind::UniformInterval, 1);
    CHECK_THROWS_AS(holder_seminorm(constant_function(single, 1.0), 0.5), DegenerateSpace);
    CHECK_THROWS_AS(SampledFunction(s, std::vector<Complex>(3)), InvalidArgument);
    CHECK_THROWS_AS(SampledFunction(s, std::vector<Complex>(4, Complex(NAN, 0))), InvalidArgument);
}

TEST_CASE("witness reproduces the seminorm and matches the oracle") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto s = support::random_cloud(seed, 23);
        const auto f = support::random_function(s, seed + 100);
        const double beta = 0.1 + 0.03 * static_cast<double>(seed);
        const auto r = holder_seminorm(f, beta);
        const auto [x, y] = r.witness;
        CHECK(x < y);
        CHECK(std::abs(f[x] - f[y]) / std::pow(s->distance(x, y), beta) == r.value);
        CHECK(r.value == oracle::holder(f, beta));
        CHECK(lambda_norm(f, beta).total() == doctest::Approx(oracle::lambda(f, beta)).epsilon(1e-15));
    }
}

TEST_CASE("subadditivity over 100 seeded pairs") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto s = support::random_cloud(seed % 7 + 1, 15);
        const auto f = support::random_function(s, 2 * seed);
        const auto g = support::random_function(s, 2 * seed + 1);
        const double beta = 0.5;
        const double sf = holder_seminorm(f, beta).value;
        const double sg = holder_seminorm(g, beta).value;
        const double sum = holder_seminorm(linear_combination(1.0, f, 1.0, g), beta).value;
        CHECK(sum <= sf + sg + 1e-12 * (sf + sg));
    }
}

TEST_CASE("homogeneity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto s = support::random_cloud(seed, 12);
        const auto f = support::random_function(s, seed);
        const Complex lambda(u(rng), u(rng));
        const double base = holder_seminorm(f, 0.7).value;
        const double scaled = holder_seminorm(linear_combination(lambda, f, 0.0, f), 0.7).value;
        CHECK(scaled == doctest::Approx(std::abs(lambda) * base).epsilon(4e-16 * 8));
    }
}

TEST_CASE("seminorm is non-decreasing in beta when the diameter is at most one") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = builtin_space(BuiltinKind::UniformInterval, 20 + static_cast<long>(seed));
        REQUIRE(s->diameter() <= 1.0);
        const auto f = support::random_function(s, seed);
        double previous = 0;
        for (double beta = 0.05; beta <= 1.0; beta += 0.05) {
            const double v = holder_seminorm(f, beta).value;
            CHECK(v >= previous);
            previous = v;
        }
    }
}

TEST_CASE("Lip and Lambda norms share one code path") {
    const auto s = support::random_cloud(9, 20);
    const auto f = support::random_function(s, 4);
    const auto a = lambda_norm(f, 0.4);
    const auto b = lip_norm(f, 0.4);
    CHECK(a.total() == b.total());
    CHECK(a.witness == b.witness);
}

TEST_CASE("pruned scan agrees bit for bit with the reference") {
    support::ThreadGuard guard;
    for (std::size_t threads : {1u, 3u, 8u}) {
        set_thread_count(threads);
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            const auto s = seed % 2 ? support::random_cloud(seed, 40)
                                    : builtin_space(BuiltinKind::Cantor4, 2 + static_cast<long>(seed % 3));
            const auto f = seed % 3 ? support::random_function(s, seed) : distance_power(s, seed % s->size(), 0.5);
            const double beta = seed % 4 ? 0.5 : 1.0;
            const auto ref = holder_seminorm(f, beta);
            const auto fast = holder_seminorm_pruned(f, beta);
            CHECK(ref.value == fast.value);
            CHECK(ref.witness == fast.witness);
        }
    }
}

TEST_CASE("ties keep the lexicographically smallest pair") {
    // All distances 1 and f alternating 0, 1: four pairs tie exactly.
    const auto s = support::table_space(
        {{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}}, {1, 1, 1, 1});
    const SampledFunction f(s, {0.0, 1.0, 0.0, 1.0});
    const auto r = holder_seminorm(f, 0.5);
    CHECK(r.value == 1.0);
    CHECK(r.witness == std::pair<PointId, PointId>{0, 1});
    CHECK(holder_seminorm_pruned(f, 0.5).witness == r.witness);
    support::ThreadGuard guard;
    set_thread_count(4);
    CHECK(holder_seminorm(f, 0.5).witness == r.witness);
}

TEST_CASE("test families") {
    const auto s = builtin_space(BuiltinKind::UniformCircle, 32);
    const auto powers = test_family(s, 0.5, FamilyKind::DistancePowers, 3, 7);
    REQUIRE(powers.size() == 3);
    for (const auto& f : powers) CHECK(holder_seminorm(f, 0.5).value == 1.0);

    for (auto kind : {FamilyKind::DistancePowers, FamilyKind::CoordinateWaves, FamilyKind::AnchoredMix}) {
        const auto a = test_family(s, 0.5, kind, 6, 42);
        const auto b = test_family(s, 0.5, kind, 6, 42);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(support::bitwise_equal(a[i], b[i]));
        CHECK(parse_family_kind(to_string(kind)) == kind);
    }

    for (const auto& f : test_family(s, 0.5, FamilyKind::AnchoredMix, 5, 3))
        CHECK(std::abs(lambda_norm(f, 0.5).total() - 1.0) <= 1e-12);
    for (const auto& f : test_family(s, 0.5, FamilyKind::CoordinateWaves, 5, 3))
        CHECK(std::abs(lambda_norm(f, 0.5).total() - 1.0) <= 1e-12);
}

TEST_CASE("test family errors") {
    const auto table = support::table_space({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {1, 1, 1});
    CHECK_THROWS_AS(test_family(table, 0.5, FamilyKind::CoordinateWaves, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(test_family(table, 0.5, FamilyKind::DistancePowers, 0, 1), InvalidArgument);
    CHECK_FALSE(parse_family_kind("sines").has_value());
}

TEST_CASE("linear combination rejects mixed spaces") {
    const auto a = builtin_space(BuiltinKind::UniformInterval, 4);
    const auto b = builtin_space(BuiltinKind::UniformInterval, 4);
    CHECK_THROWS_AS(linear_combination(1.0, constant_function(a, 1.0), 1.0, constant_function(b, 1.0)),
                    SpaceMismatch);
}

}  // TEST_SUITE
