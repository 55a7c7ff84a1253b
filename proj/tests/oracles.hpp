#pragma once

// Deliberately naive reference implementations. They share no code with the
// library beyond the space's distance table and weights: plain loops, long
// double accumulation, no sorting, no prefix sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "nd/kernels.hpp"
#include "nd/lipschitz.hpp"
#include "nd/space.hpp"

namespace oracle {

using nd::Complex;
using nd::MetricMeasureSpace;
using nd::PointId;
using LComplex = std::complex<long double>;

inline std::vector<double> distinct_distances(const MetricMeasureSpace& s) {
    std::set<double> d;
    for (PointId x = 0; x < s.size(); ++x)
        for (PointId y = 0; y < s.size(); ++y)
            if (x != y) d.insert(s.distance(x, y));
    return {d.begin(), d.end()};
}

inline long double naive_ball_mass(const MetricMeasureSpace& s, PointId c, double r, bool closed) {
    long double m = 0;
    for (PointId y = 0; y < s.size(); ++y) {
        const double d = s.distance(c, y);
        if (closed ? d <= r : d < r) m += s.weight(y);
    }
    return m;
}

inline double growth_constant(const MetricMeasureSpace& s, double n, double r_min) {
    long double best = 0;
    std::vector<double> radii{r_min};
    for (double d : distinct_distances(s))
        if (d > r_min) radii.push_back(d);
    for (PointId x = 0; x < s.size(); ++x)
        for (double r : radii) best = std::max(best, naive_ball_mass(s, x, r, true) / std::pow((long double)r, (long double)n));
    return static_cast<double>(best);
}

inline double doubling_ratio(const MetricMeasureSpace& s, double r_min) {
    long double best = 0;
    for (PointId x = 0; x < s.size(); ++x)
        for (double d : distinct_distances(s))
            for (double r : {d, d / 2})
                if (r >= r_min) best = std::max(best, naive_ball_mass(s, x, 2 * r, true) / naive_ball_mass(s, x, r, true));
    return static_cast<double>(best);
}

inline double holder(const nd::SampledFunction& f, double beta) {
    const auto& s = *f.space();
    double best = 0;
    for (PointId x = 0; x < f.size(); ++x)
        for (PointId y = 0; y < f.size(); ++y)
            if (x != y) best = std::max(best, std::abs(f[x] - f[y]) / std::pow(s.distance(x, y), beta));
    return best;
}

inline double lambda(const nd::SampledFunction& f, double beta) {
    double sup = 0;
    for (PointId x = 0; x < f.size(); ++x) sup = std::max(sup, std::abs(f[x]));
    return sup + holder(f, beta);
}

inline double size_constant(const nd::KernelSpec& k, const MetricMeasureSpace& s) {
    double best = 0;
    const double e = k.n() + k.order_shift();
    for (PointId x = 0; x < s.size(); ++x)
        for (PointId y = 0; y < s.size(); ++y)
            if (x != y) best = std::max(best, std::abs(k(s, x, y)) * std::pow(s.distance(x, y), e));
    return best;
}

struct Smoothness {
    double constant = 0;
    std::uint64_t admissible = 0;
};

inline Smoothness smoothness_constant(const nd::KernelSpec& k, const MetricMeasureSpace& s) {
    Smoothness out;
    const double g = k.gamma();
    const double e = k.n() + k.order_shift() + g;
    for (PointId a = 0; a < s.size(); ++a)
        for (PointId b = 0; b < s.size(); ++b)
            for (PointId y = 0; y < s.size(); ++y) {
                if (a == b || a == y || b == y) continue;
                if (!(2 * s.distance(a, b) <= s.distance(a, y))) continue;
                ++out.admissible;
                const double v = std::abs(k(s, a, y) - k(s, b, y)) * std::pow(s.distance(a, y), e) /
                                 std::pow(s.distance(a, b), g);
                out.constant = std::max(out.constant, v);
            }
    return out;
}

// sum over y != x of K(x, y) f(y) mu(y); eps > 0 applies the cutoff.
inline std::vector<Complex> apply(const nd::KernelSpec& k, const nd::SampledFunction& f,
                                  double eps = 0, bool hypersingular = false) {
    const auto& s = *f.space();
    std::vector<Complex> out(s.size());
    for (PointId x = 0; x < s.size(); ++x) {
        LComplex acc = 0;
        for (PointId y = 0; y < s.size(); ++y) {
            if (y == x) continue;
            Complex kv = k(s, x, y);
            if (eps > 0) kv *= nd::eta(s.distance(x, y) / eps);
            const Complex fv = hypersingular ? f[y] - f[x] : f[y];
            acc += LComplex(kv * fv) * (long double)s.weight(y);
        }
        out[x] = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

// max over x, r1 in {0} U D, r2 in D, r1 < r2 of |sum over r1 < d <= r2 of K mu|.
inline double annulus(const nd::KernelSpec& k, const MetricMeasureSpace& s) {
    const auto radii = distinct_distances(s);
    std::vector<double> inner{0.0};
    inner.insert(inner.end(), radii.begin(), radii.end());
    double best = 0;
    for (PointId x = 0; x < s.size(); ++x)
        for (double r1 : inner)
            for (double r2 : radii) {
                if (!(r1 < r2)) continue;
                LComplex acc = 0;
                for (PointId y = 0; y < s.size(); ++y) {
                    const double d = s.distance(x, y);
                    if (y != x && r1 < d && d <= r2) acc += LComplex(k(s, x, y)) * (long double)s.weight(y);
                }
                best = std::max(best, static_cast<double>(std::abs(acc)));
            }
    return best;
}

// Lemma left-hand sides at one center and radius, by direct summation.
inline long double lemma_part1(const MetricMeasureSpace& s, PointId x, double r, double n, double delta, bool closed) {
    long double acc = 0;
    for (PointId y = 0; y < s.size(); ++y) {
        const double d = s.distance(x, y);
        if (y != x && (closed ? d <= r : d < r)) acc += std::pow((long double)d, (long double)(delta - n)) * s.weight(y);
    }
    return acc;
}

inline long double lemma_part2(const MetricMeasureSpace& s, PointId x, double r, double n, double delta) {
    long double acc = 0;
    for (PointId y = 0; y < s.size(); ++y) {
        const double d = s.distance(x, y);
        if (y != x && d >= r) acc += std::pow((long double)d, (long double)(-(n + delta))) * s.weight(y);
    }
    return acc;
}

inline long double lemma_part3(const MetricMeasureSpace& s, PointId x, double r, double n) {
    long double acc = 0;
    for (PointId y = 0; y < s.size(); ++y) {
        const double d = s.distance(x, y);
        if (y != x && r / 2 <= d && d < r) acc += std::pow((long double)d, (long double)(-n)) * s.weight(y);
    }
    return acc;
}

// Worst lemma ratio per part over every center and the candidate radii.
inline std::array<double, 3> lemma_ratios(const MetricMeasureSpace& s, double n, double delta, double r_min, double a) {
    const double c1 = a * std::pow(2.0, n) / (std::pow(2.0, delta) - 1);
    const double c2 = a * std::pow(2.0, n) * std::pow(2.0, delta) / (std::pow(2.0, delta) - 1);
    const double c3 = a * std::pow(2.0, n);
    std::array<double, 3> worst{0, 0, 0};
    const auto radii = distinct_distances(s);
    for (PointId x = 0; x < s.size(); ++x) {
        std::vector<double> cand{r_min};
        for (double d : radii) {
            if (d >= r_min) cand.push_back(d);
            if (2 * d >= r_min) cand.push_back(2 * d);
        }
        for (double r : cand) {
            const long double rd = std::pow((long double)r, (long double)delta);
            const bool listed = r >= r_min && std::find(radii.begin(), radii.end(), r) != radii.end();
            long double p1 = lemma_part1(s, x, r, n, delta, false) / (c1 * rd);
            if (listed) p1 = std::max(p1, lemma_part1(s, x, r, n, delta, true) / (c1 * rd));
            worst[0] = std::max(worst[0], (double)p1);
            worst[1] = std::max(worst[1], (double)(lemma_part2(s, x, r, n, delta) * rd / c2));
            worst[2] = std::max(worst[2], (double)(lemma_part3(s, x, r, n) / c3));
        }
    }
    return worst;
}

}  // namespace oracle
