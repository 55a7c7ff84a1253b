#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nd {

using PointId = std::size_t;

enum class MetricSource { Euclidean, Table };

/// Finite metric measure space: N points, a dense distance table and strictly
/// positive point masses. Immutable once built, so it can be shared freely
/// between threads through SpacePtr.
///
/// The growth exponent n is carried with the space; the growth constant A is
/// never stored, it is measured by estimate_growth_constant.
class MetricMeasureSpace {
public:
    /// Euclidean metric on the given coordinates (all rows of equal length).
    static MetricMeasureSpace from_coordinates(std::string name,
                                               std::vector<std::vector<double>> coords,
                                               std::vector<double> weights, double n,
                                               std::optional<double> h = std::nullopt);

    /// Explicit N x N distance table. Coordinates are optional geometry and are
    /// not used to compute distances.
    static MetricMeasureSpace from_table(std::string name,
                                         std::vector<std::vector<double>> distances,
                                         std::vector<double> weights, double n,
                                         std::optional<double> h = std::nullopt,
                                         std::vector<std::vector<double>> coords = {});

    const std::string& name() const { return name_; }
    std::size_t size() const { return weights_.size(); }
    double n() const { return n_; }
    /// Resolution scale: smallest trusted ball radius.
    double h() const { return h_; }
    MetricSource metric_source() const { return metric_source_; }

    double weight(PointId x) const { return weights_[x]; }
    std::span<const double> weights() const { return weights_; }
    double distance(PointId x, PointId y) const { return distances_[x * size() + y]; }
    std::span<const double> distance_row(PointId x) const {
        return {distances_.data() + x * size(), size()};
    }

    bool has_coordinates() const { return !coords_.empty(); }
    std::size_t coordinate_dimension() const { return coords_.empty() ? 0 : coords_.front().size(); }
    const std::vector<double>& coordinates(PointId x) const { return coords_.at(x); }
    const std::vector<std::vector<double>>& all_coordinates() const { return coords_; }

    double total_mass() const { return total_mass_; }
    double diameter() const { return diameter_; }
    /// Smallest positive distance between two points; 0 for a one-point space.
    double min_positive_distance() const { return min_distance_; }
    /// min over y != x of d(x, y); 0 for a one-point space.
    double nearest_distance(PointId x) const { return nearest_[x]; }
    /// max over x of nearest_distance(x), the default resolution scale.
    double default_resolution() const;

    /// True when coordinates are the equispaced unit-circle points
    /// (cos 2 pi i/N, sin 2 pi i/N) in index order.
    bool is_uniform_circle() const { return uniform_circle_; }

    void require_point(PointId x) const;

private:
    MetricMeasureSpace() = default;
    void finalize(std::optional<double> h);

    std::string name_;
    double n_ = 1.0;
    double h_ = 1.0;
    MetricSource metric_source_ = MetricSource::Table;
    std::vector<double> weights_;
    std::vector<double> distances_;
    std::vector<std::vector<double>> coords_;
    std::vector<double> nearest_;
    double total_mass_ = 0.0;
    double diameter_ = 0.0;
    double min_distance_ = 0.0;
    bool uniform_circle_ = false;
};

using SpacePtr = std::shared_ptr<const MetricMeasureSpace>;

enum class BuiltinKind { UniformInterval, UniformCircle, Cantor4, Islands };

/// Test-fixture spaces. `size` is the point count (interval, circle), the
/// generation g (cantor4, 4^g points) or the block count K (islands, 8K points).
SpacePtr builtin_space(BuiltinKind kind, long size);

std::optional<BuiltinKind> parse_builtin_kind(const std::string& text);
std::string to_string(BuiltinKind kind);

/// Sum of weights of points with d(center, .) <= r (closed) or < r (open).
/// Points are accumulated in ascending (distance, id) order.
double ball_mass(const MetricMeasureSpace& space, PointId center, double r, bool closed);

struct GrowthWitness {
    PointId center = 0;
    double radius = 0.0;
    double mass = 0.0;
    double ratio = 0.0;
};

struct RadiusRatio {
    double radius = 0.0;
    double max_ratio = 0.0;
};

struct GrowthReport {
    double a_estimate = 0.0;
    double n = 0.0;
    double r_min = 0.0;
    GrowthWitness worst;
    std::vector<RadiusRatio> per_radius_profile;
};

/// Best constant A with mu(B(x, r)) <= A r^n over all centers and all
/// r in [r_min, diameter], using closed balls.
GrowthReport estimate_growth_constant(const MetricMeasureSpace& space, double n, double r_min);

struct DoublingReport {
    double ratio = 0.0;
    PointId center = 0;
    double radius = 0.0;
};

/// max over centers and r >= r_min of mu(B(x, 2r)) / mu(B(x, r)) (closed balls).
DoublingReport estimate_doubling_ratio(const MetricMeasureSpace& space, double r_min);

enum class AxiomViolationKind { NonzeroDiagonal, NonPositive, Asymmetric, Triangle };

struct AxiomViolation {
    AxiomViolationKind kind;
    std::vector<PointId> points;  // pair (x, y) or triple (x, y, z) with y the midpoint
    double lhs = 0.0;             // offending value: d(x,y), or d(x,z) for triangles
    double rhs = 0.0;             // d(y,x) for symmetry, d(x,y) + d(y,z) for triangles
};

struct MetricReport {
    bool triangle_exhaustive = true;
    std::uint64_t triples_checked = 0;
    std::uint64_t violation_count = 0;
    std::vector<AxiomViolation> violations;  // at most kMaxListedViolations entries
    bool ok() const { return violation_count == 0; }
};

inline constexpr std::uint64_t kDefaultTripleBudget = 512ull * 512ull * 512ull;
inline constexpr std::size_t kMaxListedViolations = 10000;

/// Exhaustive pair checks; triangle inequality exhaustive when N^3 fits the
/// budget, otherwise `triple_budget` uniformly sampled triples (fixed seed).
MetricReport check_metric_axioms(const MetricMeasureSpace& space,
                                 std::uint64_t triple_budget = kDefaultTripleBudget);

std::string describe(const AxiomViolation& violation);

}  // namespace nd
