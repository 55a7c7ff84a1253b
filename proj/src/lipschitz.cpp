#include "nd/lipschitz.hpp"

#include <cmath>

#include "nd/error.hpp"
#include "nd/parallel.hpp"
#include "nd/random.hpp"

namespace nd {

namespace {

void require_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw InvalidArgument("Hoelder exponent beta must lie in (0, 1]");
    }
}

void require_pairs(const SampledFunction& f) {
    if (f.size() < 2) {
        throw DegenerateSpace("Hoelder seminorm needs at least 2 points");
    }
}

// The one expression both scans use, so pruned and reference agree bitwise.
inline double pair_quotient(const SampledFunction& f, const MetricMeasureSpace& space, PointId x,
                            PointId y, double beta) {
    return std::abs(f[x] - f[y]) / std::pow(space.distance(x, y), beta);
}

struct RowBest {
    double value = -1.0;
    PointId partner = 0;
};

RowBest scan_row(const SampledFunction& f, const MetricMeasureSpace& space, PointId x, double beta) {
    RowBest best;
    for (PointId y = x + 1; y < f.size(); ++y) {
        const double q = pair_quotient(f, space, x, y, beta);
        if (q > best.value) {
            best = {q, y};
        }
    }
    return best;
}

SampledFunction scaled(const SampledFunction& f, double factor) {
    std::vector<Complex> values(f.values().begin(), f.values().end());
    for (auto& v : values) {
        v *= factor;
    }
    return SampledFunction(f.space(), std::move(values));
}

}  // namespace

SampledFunction::SampledFunction(SpacePtr space, std::vector<Complex> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) {
        throw InvalidArgument("sampled function needs a space");
    }
    if (values_.size() != space_->size()) {
        throw InvalidArgument("function has " + std::to_string(values_.size()) +
                              " values, space has " + std::to_string(space_->size()) + " points");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            throw InvalidArgument("function value at index " + std::to_string(i) + " is not finite");
        }
    }
}

SampledFunction constant_function(SpacePtr space, Complex value) {
    const std::size_t count = space->size();
    return SampledFunction(std::move(space), std::vector<Complex>(count, value));
}

SampledFunction distance_power(SpacePtr space, PointId anchor, double beta) {
    space->require_point(anchor);
    std::vector<Complex> values(space->size());
    for (PointId x = 0; x < values.size(); ++x) {
        values[x] = std::pow(space->distance(x, anchor), beta);
    }
    return SampledFunction(std::move(space), std::move(values));
}

SampledFunction linear_combination(Complex a, const SampledFunction& f, Complex b,
                                   const SampledFunction& g) {
    if (!f.same_space(g)) {
        throw SpaceMismatch("linear combination of functions on different spaces");
    }
    std::vector<Complex> values(f.size());
    for (PointId x = 0; x < values.size(); ++x) {
        values[x] = a * f[x] + b * g[x];
    }
    return SampledFunction(f.space(), std::move(values));
}

HolderSeminorm holder_seminorm(const SampledFunction& f, double beta) {
    require_beta(beta);
    require_pairs(f);
    const auto& space = *f.space();
    std::vector<RowBest> rows(f.size());
    parallel_for(f.size() - 1, [&](std::size_t x) { rows[x] = scan_row(f, space, x, beta); });

    HolderSeminorm result;
    result.value = 0.0;
    for (PointId x = 0; x + 1 < f.size(); ++x) {
        if (rows[x].value > result.value) {
            result.value = rows[x].value;
            result.witness = {x, rows[x].partner};
        }
    }
    return result;
}

HolderSeminorm holder_seminorm_pruned(const SampledFunction& f, double beta) {
    require_beta(beta);
    require_pairs(f);
    const auto& space = *f.space();
    double sup = 0.0;
    for (const auto& v : f.values()) {
        sup = std::max(sup, std::abs(v));
    }

    HolderSeminorm result;
    result.value = 0.0;
    for (PointId x = 0; x + 1 < f.size(); ++x) {
        const double envelope =
            (std::abs(f[x]) + sup) / std::pow(space.nearest_distance(x), beta) * (1.0 + 1e-12);
        if (envelope < result.value) {
            continue;
        }
        const RowBest row = scan_row(f, space, x, beta);
        if (row.value > result.value) {
            result.value = row.value;
            result.witness = {x, row.partner};
        }
    }
    return result;
}

LipschitzNorm lambda_norm(const SampledFunction& f, double beta) {
    const HolderSeminorm semi = holder_seminorm(f, beta);
    LipschitzNorm norm;
    norm.beta = beta;
    norm.seminorm_part = semi.value;
    norm.witness = semi.witness;
    for (const auto& v : f.values()) {
        norm.sup_part = std::max(norm.sup_part, std::abs(v));
    }
    return norm;
}

std::optional<FamilyKind> parse_family_kind(const std::string& text) {
    if (text == "distance_powers") return FamilyKind::DistancePowers;
    if (text == "coordinate_waves") return FamilyKind::CoordinateWaves;
    if (text == "anchored_mix") return FamilyKind::AnchoredMix;
    return std::nullopt;
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::DistancePowers: return "distance_powers";
    case FamilyKind::CoordinateWaves: return "coordinate_waves";
    case FamilyKind::AnchoredMix: return "anchored_mix";
    }
    return "unknown";
}

std::vector<SampledFunction> test_family(const SpacePtr& space, double beta, FamilyKind kind,
                                         std::size_t count, std::uint64_t seed) {
    require_beta(beta);
    if (count < 1) {
        throw InvalidArgument("test family needs count >= 1");
    }
    if (kind == FamilyKind::CoordinateWaves && !space->has_coordinates()) {
        throw InvalidArgument("coordinate_waves needs a space with coordinates");
    }

    Rng rng(seed);
    std::vector<SampledFunction> family;
    family.reserve(count);
    const std::size_t points = space->size();

    switch (kind) {
    case FamilyKind::DistancePowers:
        for (std::size_t j = 0; j < count; ++j) {
            family.push_back(distance_power(space, uniform_index(rng, points), beta));
        }
        break;
    case FamilyKind::CoordinateWaves: {
        constexpr double kMaxFrequency = 8.0 * 3.14159265358979323846;
        const std::size_t dim = space->coordinate_dimension();
        for (std::size_t j = 0; j < count; ++j) {
            std::vector<double> wave(dim);
            for (auto& k : wave) {
                k = uniform_real(rng, -kMaxFrequency, kMaxFrequency);
            }
            std::vector<Complex> values(points);
            for (PointId x = 0; x < points; ++x) {
                double phase = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    phase += wave[c] * space->coordinates(x)[c];
                }
                values[x] = std::cos(phase);
            }
            SampledFunction f(space, std::move(values));
            family.push_back(scaled(f, 1.0 / lambda_norm(f, beta).total()));
        }
        break;
    }
    case FamilyKind::AnchoredMix: {
        const std::size_t anchors = std::min<std::size_t>(3, points);
        while (family.size() < count) {
            std::vector<Complex> coeffs(anchors);
            double l1 = 0.0;
            for (auto& c : coeffs) {
                c = Complex(standard_normal(rng), standard_normal(rng));
                l1 += std::abs(c);
            }
            std::vector<Complex> values(points, Complex(0.0, 0.0));
            for (std::size_t a = 0; a < anchors; ++a) {
                const PointId anchor = uniform_index(rng, points);
                const Complex c = coeffs[a] / l1;
                for (PointId x = 0; x < points; ++x) {
                    values[x] += c * std::pow(space->distance(x, anchor), beta);
                }
            }
            SampledFunction f(space, std::move(values));
            const double norm = lambda_norm(f, beta).total();
            if (norm > 0.0) {
                family.push_back(scaled(f, 1.0 / norm));
            }
        }
        break;
    }
    }
    return family;
}

}  // namespace nd
