#include "nd/operators.hpp"

#include <algorithm>
#include <cmath>

#include "nd/error.hpp"
#include "nd/parallel.hpp"
#include "nd/summation.hpp"

namespace nd {

namespace {

void require_class(const KernelSpec& kernel, KernelClass expected, const char* operation) {
    if (kernel.kernel_class() != expected) {
        throw KernelMismatch(std::string(operation) + " needs a " + to_string(expected) +
                             " kernel, got " + to_string(kernel.kernel_class()));
    }
}

const MetricMeasureSpace& checked_space(const KernelSpec& kernel, const SampledFunction& f) {
    const MetricMeasureSpace& space = *f.space();
    if (space.size() < 2) {
        throw DegenerateSpace("operator evaluation needs at least 2 points");
    }
    kernel.check_space(space);
    return space;
}

// Calls term(x, y, value) for y in ascending order; term returns false to skip y.
template <class Term>
OperatorResult evaluate(const SampledFunction& f, Term term) {
    const std::size_t count = f.size();
    std::vector<Complex> out(count);
    OperatorDiagnostics diagnostics;
    diagnostics.terms.assign(count, 0);
    parallel_for(count, [&](std::size_t x) {
        ComplexCompensatedSum sum;
        std::size_t terms = 0;
        Complex value;
        for (PointId y = 0; y < count; ++y) {
            if (term(x, y, value)) {
                sum.add(value);
                ++terms;
            }
        }
        out[x] = sum.value();
        diagnostics.terms[x] = terms;
    });
    return {SampledFunction(f.space(), std::move(out)), std::move(diagnostics)};
}

OperatorResult off_diagonal_sum(const KernelSpec& kernel, const SampledFunction& f) {
    const MetricMeasureSpace& space = *f.space();
    return evaluate(f, [&](PointId x, PointId y, Complex& value) {
        if (y == x) {
            return false;
        }
        value = kernel(space, x, y) * f[y] * space.weight(y);
        return true;
    });
}

OperatorResult normalized_sum(const KernelSpec& kernel, PointId x0, const SampledFunction& f) {
    const MetricMeasureSpace& space = *f.space();
    space.require_point(x0);
    OperatorResult result = evaluate(f, [&](PointId x, PointId y, Complex& value) {
        if (y == x || y == x0) {
            return false;
        }
        value = (kernel(space, x, y) - kernel(space, x0, y)) * f[y] * space.weight(y);
        return true;
    });
    result.diagnostics.normalization_point = x0;
    result.diagnostics.excludes_normalization_point = true;
    return result;
}

struct AnnulusBest {
    double value = -1.0;
    double inner = 0.0;
    double outer = 0.0;
    std::uint64_t checked = 0;
};

}  // namespace

OperatorResult apply_fractional(const KernelSpec& kernel, const SampledFunction& f) {
    require_class(kernel, KernelClass::Fractional, "fractional integral");
    checked_space(kernel, f);
    return off_diagonal_sum(kernel, f);
}

OperatorResult apply_truncated(const KernelSpec& kernel, double epsilon, const SampledFunction& f) {
    require_class(kernel, KernelClass::Singular, "truncated operator");
    const KernelSpec truncated = truncate_kernel(kernel, epsilon);
    const MetricMeasureSpace& space = checked_space(kernel, f);
    OperatorResult result = evaluate(f, [&](PointId x, PointId y, Complex& value) {
        if (y == x || eta(space.distance(x, y) / epsilon) == 0.0) {
            return false;
        }
        value = truncated(space, x, y) * f[y] * space.weight(y);
        return true;
    });
    result.diagnostics.epsilon = epsilon;
    return result;
}

OperatorResult apply_pv(const KernelSpec& kernel, const SampledFunction& f) {
    require_class(kernel, KernelClass::Singular, "principal value");
    const MetricMeasureSpace& space = checked_space(kernel, f);
    OperatorResult result = off_diagonal_sum(kernel, f);
    result.diagnostics.epsilon_star.resize(space.size());
    for (PointId x = 0; x < space.size(); ++x) {
        result.diagnostics.epsilon_star[x] = space.nearest_distance(x);
    }
    return result;
}

OperatorResult apply_hypersingular(const KernelSpec& kernel, const SampledFunction& f) {
    require_class(kernel, KernelClass::Hypersingular, "hypersingular integral");
    const MetricMeasureSpace& space = checked_space(kernel, f);
    return evaluate(f, [&](PointId x, PointId y, Complex& value) {
        if (y == x) {
            return false;
        }
        value = kernel(space, x, y) * (f[y] - f[x]) * space.weight(y);
        return true;
    });
}

OperatorResult normalized_fractional(const KernelSpec& kernel, PointId x0, const SampledFunction& f) {
    require_class(kernel, KernelClass::Fractional, "normalized fractional integral");
    checked_space(kernel, f);
    return normalized_sum(kernel, x0, f);
}

OperatorResult normalized_pv(const KernelSpec& kernel, PointId x0, const SampledFunction& f) {
    require_class(kernel, KernelClass::Singular, "normalized principal value");
    checked_space(kernel, f);
    return normalized_sum(kernel, x0, f);
}

AnnulusReport check_annulus_cancellation(const KernelSpec& kernel, const MetricMeasureSpace& space) {
    if (space.size() < 2) {
        throw DegenerateSpace("annulus check needs at least 2 points");
    }
    kernel.check_space(space);
    const std::size_t count = space.size();
    std::vector<AnnulusBest> rows(count);

    parallel_for(count, [&](std::size_t x) {
        std::vector<std::pair<double, PointId>> order;
        order.reserve(count - 1);
        for (PointId y = 0; y < count; ++y) {
            if (y != x) {
                order.emplace_back(space.distance(x, y), y);
            }
        }
        std::sort(order.begin(), order.end());

        // Cumulative sums over the distinct distance levels; index 0 is the empty ball.
        std::vector<double> radii;
        std::vector<Complex> cumulative{Complex(0.0)};
        ComplexCompensatedSum running;
        for (std::size_t i = 0; i < order.size();) {
            const double level = order[i].first;
            ComplexCompensatedSum level_sum;
            for (; i < order.size() && order[i].first == level; ++i) {
                const PointId y = order[i].second;
                level_sum.add(kernel(space, x, y) * space.weight(y));
            }
            running.add(level_sum.value());
            radii.push_back(level);
            cumulative.push_back(running.value());
        }

        AnnulusBest best;
        const std::size_t levels = radii.size();
        for (std::size_t i = 0; i < levels; ++i) {
            for (std::size_t j = i + 1; j <= levels; ++j) {
                const double v = std::abs(cumulative[j] - cumulative[i]);
                if (v > best.value) {
                    best.value = v;
                    best.inner = i == 0 ? 0.0 : radii[i - 1];
                    best.outer = radii[j - 1];
                }
            }
        }
        best.checked = static_cast<std::uint64_t>(levels) * (levels + 1) / 2;
        rows[x] = best;
    });

    AnnulusReport report;
    double running = -1.0;
    for (PointId x = 0; x < count; ++x) {
        report.annuli_checked += rows[x].checked;
        if (rows[x].value > running) {
            running = rows[x].value;
            report.max_modulus = rows[x].value;
            report.center = x;
            report.inner_radius = rows[x].inner;
            report.outer_radius = rows[x].outer;
        }
    }
    return report;
}

double default_s4_radius(const MetricMeasureSpace& space) {
    return std::min(1.0, space.diameter());
}

S4Report check_s4_limit(const KernelSpec& kernel, const MetricMeasureSpace& space, double r0) {
    if (!(r0 > 0.0)) {
        throw InvalidArgument("R0 must be positive");
    }
    kernel.check_space(space);
    const std::size_t count = space.size();
    S4Report report;
    report.r0 = r0;
    report.values.resize(count);
    report.epsilon_star.resize(count);
    parallel_for(count, [&](std::size_t x) {
        ComplexCompensatedSum sum;
        for (PointId y = 0; y < count; ++y) {
            if (y != x && space.distance(x, y) < r0) {
                sum.add(kernel(space, x, y) * space.weight(y));
            }
        }
        report.values[x] = sum.value();
        report.epsilon_star[x] = space.nearest_distance(x);
    });
    return report;
}

Operator fractional_operator(KernelSpec kernel) {
    return [kernel](const SampledFunction& f) { return apply_fractional(kernel, f).output; };
}

Operator truncated_operator(KernelSpec kernel, double epsilon) {
    return [kernel, epsilon](const SampledFunction& f) {
        return apply_truncated(kernel, epsilon, f).output;
    };
}

Operator pv_operator(KernelSpec kernel) {
    return [kernel](const SampledFunction& f) { return apply_pv(kernel, f).output; };
}

Operator hypersingular_operator(KernelSpec kernel) {
    return [kernel](const SampledFunction& f) { return apply_hypersingular(kernel, f).output; };
}

Operator identity_operator() {
    return [](const SampledFunction& f) { return f; };
}

Operator zero_operator() {
    return [](const SampledFunction& f) { return constant_function(f.space(), 0.0); };
}

OperatorResult compose(const Operator& outer, const Operator& inner, const SampledFunction& f) {
    SampledFunction middle = inner(f);
    if (!middle.same_space(f)) {
        throw SpaceMismatch("inner operator changed the space");
    }
    SampledFunction out = outer(middle);
    if (!out.same_space(f)) {
        throw SpaceMismatch("outer operator changed the space");
    }
    return {std::move(out), {}};
}

Complex weighted_inner_product(const SampledFunction& f, const SampledFunction& g) {
    if (!f.same_space(g)) {
        throw SpaceMismatch("inner product of functions on different spaces");
    }
    const MetricMeasureSpace& space = *f.space();
    ComplexCompensatedSum sum;
    for (PointId x = 0; x < f.size(); ++x) {
        sum.add(f[x] * std::conj(g[x]) * space.weight(x));
    }
    return sum.value();
}

}  // namespace nd
