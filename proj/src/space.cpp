#include "nd/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nd/error.hpp"
#include "nd/random.hpp"
#include "nd/summation.hpp"

namespace nd {

namespace {

// Rounding slack for the triangle inequality on computed distances.
constexpr double kTriangleRelativeSlack = 1e-12;

void require_finite(double value, const std::string& what) {
    if (!std::isfinite(value)) {
        throw InvalidArgument(what + " is not finite");
    }
}

void validate_weights(const std::vector<double>& weights) {
    if (weights.empty()) {
        throw InvalidArgument("space has no points");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        require_finite(weights[i], "weight " + std::to_string(i));
        if (weights[i] <= 0.0) {
            throw InvalidArgument("weight at index " + std::to_string(i) + " is not positive");
        }
    }
}

bool matches_uniform_circle(const std::vector<std::vector<double>>& coords) {
    if (coords.empty() || coords.front().size() != 2) {
        return false;
    }
    const double count = static_cast<double>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / count;
        if (std::abs(coords[i][0] - std::cos(angle)) > 1e-12 ||
            std::abs(coords[i][1] - std::sin(angle)) > 1e-12) {
            return false;
        }
    }
    return true;
}

// Neighbours of `center` sorted by (distance, id), center included at distance 0.
std::vector<PointId> sorted_neighbours(const MetricMeasureSpace& space, PointId center) {
    std::vector<PointId> order(space.size());
    for (PointId y = 0; y < order.size(); ++y) {
        order[y] = y;
    }
    const auto row = space.distance_row(center);
    std::sort(order.begin(), order.end(), [&](PointId a, PointId b) {
        return row[a] < row[b] || (row[a] == row[b] && a < b);
    });
    return order;
}

std::vector<double> distinct_distances(const MetricMeasureSpace& space) {
    std::vector<double> values;
    const std::size_t count = space.size();
    values.reserve(count * (count - 1) / 2);
    for (PointId x = 0; x < count; ++x) {
        for (PointId y = x + 1; y < count; ++y) {
            values.push_back(space.distance(x, y));
        }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

}  // namespace

MetricMeasureSpace MetricMeasureSpace::from_coordinates(std::string name,
                                                        std::vector<std::vector<double>> coords,
                                                        std::vector<double> weights, double n,
                                                        std::optional<double> h) {
    validate_weights(weights);
    if (coords.size() != weights.size()) {
        throw InvalidArgument("coordinate count does not match weight count");
    }
    const std::size_t dim = coords.front().size();
    if (dim == 0) {
        throw InvalidArgument("coordinates must have at least one component");
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i].size() != dim) {
            throw InvalidArgument("coordinate row " + std::to_string(i) + " has wrong dimension");
        }
        for (double c : coords[i]) {
            require_finite(c, "coordinate of point " + std::to_string(i));
        }
    }

    MetricMeasureSpace space;
    space.name_ = std::move(name);
    space.n_ = n;
    space.metric_source_ = MetricSource::Euclidean;
    space.weights_ = std::move(weights);
    space.coords_ = std::move(coords);
    const std::size_t count = space.weights_.size();
    space.distances_.assign(count * count, 0.0);
    for (PointId x = 0; x < count; ++x) {
        for (PointId y = x + 1; y < count; ++y) {
            double sq = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = space.coords_[x][k] - space.coords_[y][k];
                sq += diff * diff;
            }
            const double d = std::sqrt(sq);
            space.distances_[x * count + y] = d;
            space.distances_[y * count + x] = d;
        }
    }
    space.finalize(h);
    return space;
}

MetricMeasureSpace MetricMeasureSpace::from_table(std::string name,
                                                  std::vector<std::vector<double>> distances,
                                                  std::vector<double> weights, double n,
                                                  std::optional<double> h,
                                                  std::vector<std::vector<double>> coords) {
    validate_weights(weights);
    const std::size_t count = weights.size();
    if (distances.size() != count) {
        throw InvalidArgument("distance table has " + std::to_string(distances.size()) +
                              " rows, expected " + std::to_string(count));
    }
    if (!coords.empty() && coords.size() != count) {
        throw InvalidArgument("coordinate count does not match weight count");
    }

    MetricMeasureSpace space;
    space.name_ = std::move(name);
    space.n_ = n;
    space.metric_source_ = MetricSource::Table;
    space.weights_ = std::move(weights);
    space.coords_ = std::move(coords);
    space.distances_.resize(count * count);
    for (PointId x = 0; x < count; ++x) {
        if (distances[x].size() != count) {
            throw InvalidArgument("distance row " + std::to_string(x) + " has wrong length");
        }
        for (PointId y = 0; y < count; ++y) {
            require_finite(distances[x][y],
                           "distance (" + std::to_string(x) + "," + std::to_string(y) + ")");
            space.distances_[x * count + y] = distances[x][y];
        }
    }
    space.finalize(h);
    return space;
}

void MetricMeasureSpace::finalize(std::optional<double> h) {
    if (!(n_ > 0.0) || !std::isfinite(n_)) {
        throw InvalidArgument("dimension n must be a positive real");
    }
    const std::size_t count = size();
    CompensatedSum mass;
    for (double w : weights_) {
        mass.add(w);
    }
    total_mass_ = mass.value();

    nearest_.assign(count, 0.0);
    diameter_ = 0.0;
    min_distance_ = 0.0;
    for (PointId x = 0; x < count; ++x) {
        double nearest = INFINITY;
        for (PointId y = 0; y < count; ++y) {
            if (y == x) {
                continue;
            }
            const double d = distance(x, y);
            diameter_ = std::max(diameter_, d);
            if (d > 0.0) {
                nearest = std::min(nearest, d);
            }
        }
        nearest_[x] = std::isfinite(nearest) ? nearest : 0.0;
        if (nearest_[x] > 0.0 && (min_distance_ == 0.0 || nearest_[x] < min_distance_)) {
            min_distance_ = nearest_[x];
        }
    }

    if (h) {
        if (!(*h > 0.0) || !std::isfinite(*h)) {
            throw InvalidArgument("resolution scale h must be a positive real");
        }
        h_ = *h;
    } else {
        h_ = default_resolution();
    }
    uniform_circle_ = matches_uniform_circle(coords_);
}

double MetricMeasureSpace::default_resolution() const {
    double h = 0.0;
    for (double d : nearest_) {
        h = std::max(h, d);
    }
    return h > 0.0 ? h : 1.0;
}

void MetricMeasureSpace::require_point(PointId x) const {
    if (x >= size()) {
        throw InvalidArgument("unknown point id " + std::to_string(x));
    }
}

SpacePtr builtin_space(BuiltinKind kind, long size) {
    if (size < 1) {
        throw InvalidArgument("builtin space size parameter must be >= 1");
    }
    const auto count = static_cast<std::size_t>(size);
    switch (kind) {
    case BuiltinKind::UniformInterval: {
        std::vector<std::vector<double>> coords(count);
        std::vector<std::vector<double>> table(count, std::vector<double>(count));
        for (std::size_t i = 0; i < count; ++i) {
            coords[i] = {(static_cast<double>(i) + 0.5) / static_cast<double>(count)};
            for (std::size_t j = 0; j < count; ++j) {
                const auto offset = i > j ? i - j : j - i;
                table[i][j] = static_cast<double>(offset) / static_cast<double>(count);
            }
        }
        return std::make_shared<const MetricMeasureSpace>(MetricMeasureSpace::from_table(
            "uniform_interval(" + std::to_string(size) + ")", std::move(table),
            std::vector<double>(count, 1.0 / static_cast<double>(count)), 1.0, std::nullopt,
            std::move(coords)));
    }
    case BuiltinKind::UniformCircle: {
        std::vector<std::vector<double>> coords(count);
        std::vector<std::vector<double>> table(count, std::vector<double>(count));
        const double total = static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / total;
            coords[i] = {std::cos(angle), std::sin(angle)};
            for (std::size_t j = 0; j < count; ++j) {
                const auto raw = i > j ? i - j : j - i;
                const auto offset = std::min(raw, count - raw);
                table[i][j] = 2.0 * std::sin(std::numbers::pi * static_cast<double>(offset) / total);
            }
        }
        return std::make_shared<const MetricMeasureSpace>(MetricMeasureSpace::from_table(
            "uniform_circle(" + std::to_string(size) + ")", std::move(table),
            std::vector<double>(count, 1.0 / total), 1.0, std::nullopt, std::move(coords)));
    }
    case BuiltinKind::Cantor4: {
        if (size > 10) {
            throw InvalidArgument("cantor4 generation above 10 is not supported");
        }
        // Lower-left corners of the kept squares, refined generation by generation.
        std::vector<std::vector<double>> corners{{0.0, 0.0}};
        double side = 1.0;
        for (long level = 0; level < size; ++level) {
            const double child = side / 4.0;
            std::vector<std::vector<double>> next;
            next.reserve(corners.size() * 4);
            for (const auto& c : corners) {
                for (int cx = 0; cx < 2; ++cx) {
                    for (int cy = 0; cy < 2; ++cy) {
                        next.push_back({c[0] + cx * 3.0 * child, c[1] + cy * 3.0 * child});
                    }
                }
            }
            corners = std::move(next);
            side = child;
        }
        for (auto& c : corners) {
            c[0] += side / 2.0;
            c[1] += side / 2.0;
        }
        const double weight = 1.0 / static_cast<double>(corners.size());
        std::vector<double> weights(corners.size(), weight);
        return std::make_shared<const MetricMeasureSpace>(MetricMeasureSpace::from_coordinates(
            "cantor4(" + std::to_string(size) + ")", std::move(corners), std::move(weights), 1.0));
    }
    case BuiltinKind::Islands: {
        if (size > 20) {
            throw InvalidArgument("islands level count above 20 is not supported");
        }
        constexpr int kPointsPerBlock = 8;
        const double normalizer = 1.0 - std::ldexp(1.0, -static_cast<int>(size));
        std::vector<std::vector<double>> coords;
        std::vector<double> weights;
        double start = 0.0;
        for (long k = 1; k <= size; ++k) {
            const double length = std::ldexp(1.0, -2 * static_cast<int>(k));
            const double block_mass = std::ldexp(1.0, -static_cast<int>(k)) / normalizer;
            for (int j = 0; j < kPointsPerBlock; ++j) {
                coords.push_back({start + (j + 0.5) * length / kPointsPerBlock});
                weights.push_back(block_mass / kPointsPerBlock);
            }
            start += length + 1.0;
        }
        return std::make_shared<const MetricMeasureSpace>(MetricMeasureSpace::from_coordinates(
            "islands(" + std::to_string(size) + ")", std::move(coords), std::move(weights), 1.0));
    }
    }
    throw InvalidArgument("unknown builtin space kind");
}

std::optional<BuiltinKind> parse_builtin_kind(const std::string& text) {
    if (text == "uniform_interval") return BuiltinKind::UniformInterval;
    if (text == "uniform_circle") return BuiltinKind::UniformCircle;
    if (text == "cantor4") return BuiltinKind::Cantor4;
    if (text == "islands") return BuiltinKind::Islands;
    return std::nullopt;
}

std::string to_string(BuiltinKind kind) {
    switch (kind) {
    case BuiltinKind::UniformInterval: return "uniform_interval";
    case BuiltinKind::UniformCircle: return "uniform_circle";
    case BuiltinKind::Cantor4: return "cantor4";
    case BuiltinKind::Islands: return "islands";
    }
    return "unknown";
}

double ball_mass(const MetricMeasureSpace& space, PointId center, double r, bool closed) {
    space.require_point(center);
    if (!(r > 0.0)) {
        throw InvalidArgument("ball radius must be positive");
    }
    const auto row = space.distance_row(center);
    CompensatedSum mass;
    for (PointId y : sorted_neighbours(space, center)) {
        const double d = row[y];
        if (closed ? d > r : d >= r) {
            break;
        }
        mass.add(space.weight(y));
    }
    return mass.value();
}

GrowthReport estimate_growth_constant(const MetricMeasureSpace& space, double n, double r_min) {
    if (space.size() < 2) {
        throw DegenerateSpace("growth scan needs at least 2 points");
    }
    if (!(n > 0.0)) {
        throw InvalidArgument("growth exponent n must be positive");
    }
    if (!(r_min > 0.0)) {
        throw InvalidArgument("r_min must be positive");
    }
    if (r_min > space.diameter()) {
        throw InvalidArgument("r_min exceeds the space diameter");
    }

    std::vector<double> radii{r_min};
    for (double d : distinct_distances(space)) {
        if (d > r_min) {
            radii.push_back(d);
        }
    }

    GrowthReport report;
    report.n = n;
    report.r_min = r_min;
    report.per_radius_profile.resize(radii.size());
    std::vector<double> radius_power(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        report.per_radius_profile[k].radius = radii[k];
        radius_power[k] = std::pow(radii[k], n);
    }
    std::vector<PointId> profile_center(radii.size(), 0);
    std::vector<double> profile_mass(radii.size(), 0.0);

    for (PointId x = 0; x < space.size(); ++x) {
        const auto row = space.distance_row(x);
        const auto order = sorted_neighbours(space, x);
        // Walk radii and neighbours together; mass is the closed-ball prefix sum.
        CompensatedSum prefix;
        std::size_t next = 0;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            while (next < order.size() && row[order[next]] <= radii[k]) {
                prefix.add(space.weight(order[next]));
                ++next;
            }
            const double mass = prefix.value();
            const double ratio = mass / radius_power[k];
            if (ratio > report.per_radius_profile[k].max_ratio) {
                report.per_radius_profile[k].max_ratio = ratio;
                profile_center[k] = x;
                profile_mass[k] = mass;
            }
        }
    }

    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double ratio = report.per_radius_profile[k].max_ratio;
        if (ratio > report.a_estimate) {
            report.a_estimate = ratio;
            report.worst = {profile_center[k], radii[k], profile_mass[k], ratio};
        }
    }
    return report;
}

DoublingReport estimate_doubling_ratio(const MetricMeasureSpace& space, double r_min) {
    if (space.size() < 2) {
        throw DegenerateSpace("doubling scan needs at least 2 points");
    }
    // Both closed-ball masses are right-continuous steps, so the supremum of
    // the quotient is attained at r = d or r = d/2 for some pairwise distance d.
    std::vector<double> candidates;
    for (double d : distinct_distances(space)) {
        candidates.push_back(d);
        candidates.push_back(d / 2.0);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    DoublingReport best;
    for (PointId x = 0; x < space.size(); ++x) {
        const auto row = space.distance_row(x);
        const auto order = sorted_neighbours(space, x);
        std::vector<double> prefix(order.size());
        CompensatedSum acc;
        for (std::size_t k = 0; k < order.size(); ++k) {
            acc.add(space.weight(order[k]));
            prefix[k] = acc.value();
        }
        auto closed_mass = [&](double r) {
            const auto it = std::upper_bound(order.begin(), order.end(), r,
                                             [&](double value, PointId y) { return value < row[y]; });
            return prefix[static_cast<std::size_t>(it - order.begin()) - 1];
        };
        for (double r : candidates) {
            if (r < r_min) {
                continue;
            }
            const double ratio = closed_mass(2.0 * r) / closed_mass(r);
            if (ratio > best.ratio) {
                best = {ratio, x, r};
            }
        }
    }
    return best;
}

MetricReport check_metric_axioms(const MetricMeasureSpace& space, std::uint64_t triple_budget) {
    MetricReport report;
    const std::size_t count = space.size();
    auto record = [&](AxiomViolation v) {
        ++report.violation_count;
        if (report.violations.size() < kMaxListedViolations) {
            report.violations.push_back(std::move(v));
        }
    };

    for (PointId x = 0; x < count; ++x) {
        if (space.distance(x, x) != 0.0) {
            record({AxiomViolationKind::NonzeroDiagonal, {x, x}, space.distance(x, x), 0.0});
        }
        for (PointId y = x + 1; y < count; ++y) {
            const double dxy = space.distance(x, y);
            const double dyx = space.distance(y, x);
            if (dxy != dyx) {
                record({AxiomViolationKind::Asymmetric, {x, y}, dxy, dyx});
            }
            if (!(dxy > 0.0) || !(dyx > 0.0)) {
                record({AxiomViolationKind::NonPositive, {x, y}, dxy, dyx});
            }
        }
    }

    auto check_triple = [&](PointId x, PointId y, PointId z) {
        const double direct = space.distance(x, z);
        const double detour = space.distance(x, y) + space.distance(y, z);
        if (direct > detour * (1.0 + kTriangleRelativeSlack)) {
            record({AxiomViolationKind::Triangle, {x, y, z}, direct, detour});
        }
    };

    const auto n3 = static_cast<std::uint64_t>(count) * count * count;
    if (count < 3) {
        report.triangle_exhaustive = true;
    } else if (n3 <= triple_budget) {
        report.triangle_exhaustive = true;
        for (PointId x = 0; x < count; ++x) {
            for (PointId z = x + 1; z < count; ++z) {
                for (PointId y = 0; y < count; ++y) {
                    if (y != x && y != z) {
                        check_triple(x, y, z);
                        ++report.triples_checked;
                    }
                }
            }
        }
    } else {
        report.triangle_exhaustive = false;
        Rng rng(0x5eed'7121'a9c3ull);
        for (std::uint64_t k = 0; k < triple_budget; ++k) {
            const PointId x = uniform_index(rng, count);
            const PointId y = uniform_index(rng, count);
            const PointId z = uniform_index(rng, count);
            if (x != y && y != z && x != z) {
                check_triple(x, y, z);
            }
            ++report.triples_checked;
        }
    }
    return report;
}

std::string describe(const AxiomViolation& violation) {
    std::ostringstream out;
    out.precision(17);
    switch (violation.kind) {
    case AxiomViolationKind::NonzeroDiagonal:
        out << "nonzero diagonal at point " << violation.points[0] << ": " << violation.lhs;
        break;
    case AxiomViolationKind::NonPositive:
        out << "non-positive distance for pair (" << violation.points[0] << "," << violation.points[1]
            << ")";
        break;
    case AxiomViolationKind::Asymmetric:
        out << "symmetry violated for pair (" << violation.points[0] << "," << violation.points[1]
            << "): " << violation.lhs << " != " << violation.rhs;
        break;
    case AxiomViolationKind::Triangle:
        out << "triangle inequality violated for (" << violation.points[0] << ","
            << violation.points[1] << "," << violation.points[2] << "): " << violation.lhs << " > "
            << violation.rhs;
        break;
    }
    return out.str();
}

}  // namespace nd
