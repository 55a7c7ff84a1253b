#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nd/lipschitz.hpp"
#include "nd/space.hpp"

namespace nd {

enum class KernelClass { Fractional, Singular, Hypersingular };

enum class KernelSource { RieszFractional, RieszSingular, RieszHypersingular, OddCircle, Table };

/// A two-point kernel K(x, y) on Omega = X x X minus the diagonal, with its
/// declared class (size exponent n - alpha, n or n + alpha), smoothness
/// exponent gamma and optional smooth truncation eta(d/eps).
class KernelSpec {
public:
    /// 1 / d^(n - alpha).
    static KernelSpec riesz_fractional(double n, double alpha, double gamma = 1.0);
    /// 1 / d^n.
    static KernelSpec riesz_singular(double n, double gamma = 1.0);
    /// 1 / d^(n + alpha).
    static KernelSpec riesz_hypersingular(double n, double alpha, double gamma = 1.0);
    /// sigma(x, y) / d(x, y) on an even uniform circle: +1 when y is strictly
    /// inside the forward (counter-clockwise) half-circle from x, -1 when
    /// strictly inside the backward one, 0 at the antipode.
    static KernelSpec odd_circle(double n = 1.0, double gamma = 1.0);
    /// Row-major N x N values; diagonal entries are never read.
    static KernelSpec table(KernelClass kernel_class, double n, double gamma, double alpha,
                            std::size_t points, std::vector<Complex> entries,
                            std::string space_name = {});

    KernelClass kernel_class() const { return class_; }
    KernelSource source() const { return source_; }
    double n() const { return n_; }
    double gamma() const { return gamma_; }
    /// Order alpha; 0 for singular kernels.
    double alpha() const { return alpha_; }
    /// sigma in the size exponent n + sigma: -alpha, 0 or +alpha.
    double order_shift() const;
    std::optional<double> truncation() const { return truncation_; }
    bool is_adjoint() const { return adjoint_; }
    const std::string& table_space_name() const { return table_space_name_; }
    std::size_t table_points() const { return table_points_; }
    const std::vector<Complex>& table_entries() const;

    /// Evaluates the kernel. Base kernels throw on x == y; truncated kernels
    /// return 0 there.
    Complex operator()(const MetricMeasureSpace& space, PointId x, PointId y) const;

    /// Throws unless the kernel can be evaluated on `space`.
    void check_space(const MetricMeasureSpace& space) const;

    std::string describe() const;

private:
    friend KernelSpec truncate_kernel(const KernelSpec& kernel, double epsilon);
    friend KernelSpec adjoint_kernel(const KernelSpec& kernel);

    Complex base_value(const MetricMeasureSpace& space, PointId x, PointId y) const;

    KernelClass class_ = KernelClass::Singular;
    KernelSource source_ = KernelSource::RieszSingular;
    double n_ = 1.0;
    double gamma_ = 1.0;
    double alpha_ = 0.0;
    std::optional<double> truncation_;
    bool adjoint_ = false;
    std::shared_ptr<const std::vector<Complex>> table_;
    std::size_t table_points_ = 0;
    std::string table_space_name_;
};

std::optional<KernelSource> parse_kernel_source(const std::string& text);
std::string to_string(KernelSource source);
std::string to_string(KernelClass kernel_class);

inline Complex eval_kernel(const KernelSpec& kernel, const MetricMeasureSpace& space, PointId x,
                           PointId y) {
    return kernel(space, x, y);
}

/// C^1 cutoff: 0 on [0, 1/2], cubic smoothstep t^2 (3 - 2t) with t = 2s - 1 on
/// (1/2, 1), 1 on [1, inf).
double eta(double s);
double eta_derivative(double s);
/// sup |eta'|, attained at s = 3/4.
inline constexpr double kEtaDerivativeMax = 3.0;

/// Kernel eta(d(x, y) / epsilon) K(x, y), defined as 0 on the diagonal.
KernelSpec truncate_kernel(const KernelSpec& kernel, double epsilon);

/// Kernel conj(K(y, x)), the weighted-L2 adjoint kernel.
KernelSpec adjoint_kernel(const KernelSpec& kernel);

/// Odd line kernel sign(y - x) w(y) / |x - y| with taper w(y) = 4 t (1 - t),
/// t the coordinate of y, which must lie in [0, 1]. A standard singular kernel (gamma = 1)
/// whose action on 1 stays Hoelder-bounded under refinement of an interval.
KernelSpec tapered_hilbert(const MetricMeasureSpace& space);

/// Seeded complex Gaussian table kernel (singular class), for tests and checks.
KernelSpec random_table_kernel(const MetricMeasureSpace& space, std::uint64_t seed);

enum class ConditionId { Size, Smoothness };

struct ConditionReport {
    ConditionId condition = ConditionId::Size;
    double constant = 0.0;
    std::vector<PointId> witness;  // (x, y) for size, (x1, x2, y) for smoothness
    std::uint64_t admissible_count = 0;
};

std::string to_string(ConditionId id);

/// max over ordered pairs x != y of |K(x, y)| d^(n + sigma)(x, y).
ConditionReport verify_size_condition(const KernelSpec& kernel, const MetricMeasureSpace& space);

/// max over pairwise distinct (x1, x2, y) with 2 d(x1, x2) <= d(x1, y) of
/// |K(x1, y) - K(x2, y)| d^(n + sigma + gamma)(x1, y) / d^gamma(x1, x2).
ConditionReport verify_smoothness_condition(const KernelSpec& kernel,
                                            const MetricMeasureSpace& space);

}  // namespace nd
