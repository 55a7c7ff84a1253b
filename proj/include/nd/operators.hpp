#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nd/kernels.hpp"
#include "nd/lipschitz.hpp"

namespace nd {

struct OperatorDiagnostics {
    std::vector<std::size_t> terms;       // nonzero-weight terms summed per output point
    std::optional<double> epsilon;        // truncation parameter, if any
    std::vector<double> epsilon_star;     // PV only: below this the limit is exact
    std::optional<PointId> normalization_point;
    // Normalized operators drop y = x0 as well as y = x.
    bool excludes_normalization_point = false;
};

struct OperatorResult {
    SampledFunction output;
    OperatorDiagnostics diagnostics;
};

// Every operator sums its terms K * f * mu per output point with compensated
// summation in ascending id order. Threads only split the output points, so
// results are bit-identical for every thread count.

/// L_alpha f(x) = sum over y != x of K(x, y) f(y) mu(y).
OperatorResult apply_fractional(const KernelSpec& kernel, const SampledFunction& f);

/// T_eps f(x) = sum over y of eta(d(x, y)/eps) K(x, y) f(y) mu(y).
OperatorResult apply_truncated(const KernelSpec& kernel, double epsilon, const SampledFunction& f);

/// Principal value as the stabilized finite sum over y != x.
OperatorResult apply_pv(const KernelSpec& kernel, const SampledFunction& f);

/// D^alpha f(x) = sum over y != x of D(x, y) (f(y) - f(x)) mu(y).
OperatorResult apply_hypersingular(const KernelSpec& kernel, const SampledFunction& f);

/// sum over y outside {x, x0} of (K(x, y) - K(x0, y)) f(y) mu(y).
OperatorResult normalized_fractional(const KernelSpec& kernel, PointId x0, const SampledFunction& f);
OperatorResult normalized_pv(const KernelSpec& kernel, PointId x0, const SampledFunction& f);

struct AnnulusReport {
    double max_modulus = 0.0;
    PointId center = 0;
    double inner_radius = 0.0;  // 0 stands for any radius below the nearest point
    double outer_radius = 0.0;
    std::uint64_t annuli_checked = 0;
};

/// max over x and critical radii r1 < r2 of |sum over r1 < d(x, y) <= r2 of
/// K(x, y) mu(y)|. Annulus sums are differences of cumulative per-distance sums.
AnnulusReport check_annulus_cancellation(const KernelSpec& kernel, const MetricMeasureSpace& space);

struct S4Report {
    double r0 = 0.0;
    std::vector<Complex> values;       // sum over 0 < d(x, y) < R0 of K(x, y) mu(y)
    std::vector<double> epsilon_star;  // nearest distance from x
};

double default_s4_radius(const MetricMeasureSpace& space);
S4Report check_s4_limit(const KernelSpec& kernel, const MetricMeasureSpace& space, double r0);

using Operator = std::function<SampledFunction(const SampledFunction&)>;

Operator fractional_operator(KernelSpec kernel);
Operator truncated_operator(KernelSpec kernel, double epsilon);
Operator pv_operator(KernelSpec kernel);
Operator hypersingular_operator(KernelSpec kernel);
Operator identity_operator();
Operator zero_operator();

/// outer(inner(f)).
OperatorResult compose(const Operator& outer, const Operator& inner, const SampledFunction& f);

/// <f, g> = sum f conj(g) mu, compensated in id order.
Complex weighted_inner_product(const SampledFunction& f, const SampledFunction& g);

}  // namespace nd
