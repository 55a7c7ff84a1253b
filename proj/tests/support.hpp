#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nd/lipschitz.hpp"
#include "nd/parallel.hpp"
#include "nd/space.hpp"

namespace support {

inline nd::SpacePtr share(nd::MetricMeasureSpace space) {
    return std::make_shared<const nd::MetricMeasureSpace>(std::move(space));
}

inline nd::SpacePtr table_space(std::vector<std::vector<double>> d, std::vector<double> w,
                                std::string name = "table") {
    return share(nd::MetricMeasureSpace::from_table(std::move(name), std::move(d), std::move(w), 1.0));
}

// d = 1, weights 1/2 each.
inline nd::SpacePtr two_point() { return table_space({{0, 1}, {1, 0}}, {0.5, 0.5}, "two_point"); }

// Seeded cloud of points in the unit square with random positive weights.
inline nd::SpacePtr random_cloud(std::uint64_t seed, std::size_t count, double n = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> coords;
    std::vector<double> weights;
    for (std::size_t i = 0; i < count; ++i) {
        coords.push_back({u(rng), u(rng)});
        weights.push_back(0.1 + u(rng));
    }
    return share(nd::MetricMeasureSpace::from_coordinates("cloud" + std::to_string(seed),
                                                          std::move(coords), std::move(weights), n));
}

inline nd::SampledFunction random_function(const nd::SpacePtr& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<nd::Complex> values(space->size());
    for (auto& v : values) {
        const double re = g(rng);
        v = nd::Complex(re, g(rng));
    }
    return nd::SampledFunction(space, std::move(values));
}

inline bool bitwise_equal(const nd::SampledFunction& a, const nd::SampledFunction& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(nd::Complex)) == 0;
}

inline double max_modulus(const nd::SampledFunction& f) {
    double m = 0;
    for (const auto v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

// Restores the worker count when a test changes it.
struct ThreadGuard {
    std::size_t saved = nd::thread_count();
    ~ThreadGuard() { nd::set_thread_count(saved); }
};

}  // namespace support
