#include "nd/kernels.hpp"

#include <cmath>
#include <sstream>

#include "nd/error.hpp"
#include "nd/parallel.hpp"
#include "nd/random.hpp"

namespace nd {

namespace {

void require_order(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("kernel order alpha must lie in (0, 1)");
    }
}

void require_shape(double n, double gamma) {
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InvalidArgument("kernel dimension n must be positive");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw InvalidArgument("smoothness exponent gamma must lie in (0, 1]");
    }
}

int odd_circle_sign(std::size_t points, PointId x, PointId y) {
    const std::size_t offset = (y + points - x) % points;
    const std::size_t half = points / 2;
    if (offset == 0 || offset == half) {
        return 0;
    }
    return offset < half ? 1 : -1;
}

struct TripleBest {
    double value = -1.0;
    PointId x2 = 0;
    PointId y = 0;
    std::uint64_t admissible = 0;
};

}  // namespace

KernelSpec KernelSpec::riesz_fractional(double n, double alpha, double gamma) {
    require_shape(n, gamma);
    require_order(alpha);
    KernelSpec k;
    k.class_ = KernelClass::Fractional;
    k.source_ = KernelSource::RieszFractional;
    k.n_ = n;
    k.gamma_ = gamma;
    k.alpha_ = alpha;
    return k;
}

KernelSpec KernelSpec::riesz_singular(double n, double gamma) {
    require_shape(n, gamma);
    KernelSpec k;
    k.class_ = KernelClass::Singular;
    k.source_ = KernelSource::RieszSingular;
    k.n_ = n;
    k.gamma_ = gamma;
    return k;
}

KernelSpec KernelSpec::riesz_hypersingular(double n, double alpha, double gamma) {
    require_shape(n, gamma);
    require_order(alpha);
    KernelSpec k;
    k.class_ = KernelClass::Hypersingular;
    k.source_ = KernelSource::RieszHypersingular;
    k.n_ = n;
    k.gamma_ = gamma;
    k.alpha_ = alpha;
    return k;
}

KernelSpec KernelSpec::odd_circle(double n, double gamma) {
    require_shape(n, gamma);
    KernelSpec k;
    k.class_ = KernelClass::Singular;
    k.source_ = KernelSource::OddCircle;
    k.n_ = n;
    k.gamma_ = gamma;
    return k;
}

KernelSpec KernelSpec::table(KernelClass kernel_class, double n, double gamma, double alpha,
                             std::size_t points, std::vector<Complex> entries,
                             std::string space_name) {
    require_shape(n, gamma);
    if (kernel_class == KernelClass::Singular) {
        alpha = 0.0;
    } else {
        require_order(alpha);
    }
    if (entries.size() != points * points) {
        throw InvalidArgument("table kernel needs N*N entries");
    }
    for (std::size_t x = 0; x < points; ++x) {
        for (std::size_t y = 0; y < points; ++y) {
            const Complex v = entries[x * points + y];
            if (x != y && (!std::isfinite(v.real()) || !std::isfinite(v.imag()))) {
                throw InvalidArgument("table kernel entry (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") is not finite");
            }
        }
    }
    KernelSpec k;
    k.class_ = kernel_class;
    k.source_ = KernelSource::Table;
    k.n_ = n;
    k.gamma_ = gamma;
    k.alpha_ = alpha;
    k.table_ = std::make_shared<const std::vector<Complex>>(std::move(entries));
    k.table_points_ = points;
    k.table_space_name_ = std::move(space_name);
    return k;
}

double KernelSpec::order_shift() const {
    switch (class_) {
    case KernelClass::Fractional: return -alpha_;
    case KernelClass::Singular: return 0.0;
    case KernelClass::Hypersingular: return alpha_;
    }
    return 0.0;
}

const std::vector<Complex>& KernelSpec::table_entries() const {
    if (!table_) {
        throw KernelMismatch("kernel is not table-backed");
    }
    return *table_;
}

void KernelSpec::check_space(const MetricMeasureSpace& space) const {
    if (source_ == KernelSource::OddCircle) {
        if (!space.is_uniform_circle()) {
            throw KernelMismatch("odd_circle kernel needs a uniform circle space");
        }
        if (space.size() % 2 != 0) {
            throw KernelMismatch("odd_circle kernel needs an even number of points");
        }
    }
    if (source_ == KernelSource::Table && table_points_ != space.size()) {
        throw KernelMismatch("table kernel has " + std::to_string(table_points_) +
                             " points, space has " + std::to_string(space.size()));
    }
    if (source_ == KernelSource::Table && !table_space_name_.empty() &&
        table_space_name_ != space.name()) {
        throw KernelMismatch("table kernel belongs to space '" + table_space_name_ +
                             "', not '" + space.name() + "'");
    }
}

Complex KernelSpec::base_value(const MetricMeasureSpace& space, PointId x, PointId y) const {
    const double d = space.distance(x, y);
    switch (source_) {
    case KernelSource::RieszFractional:
    case KernelSource::RieszSingular:
    case KernelSource::RieszHypersingular:
        return 1.0 / std::pow(d, n_ + order_shift());
    case KernelSource::OddCircle:
        return static_cast<double>(odd_circle_sign(space.size(), x, y)) / d;
    case KernelSource::Table:
        return (*table_)[x * table_points_ + y];
    }
    return 0.0;
}

Complex KernelSpec::operator()(const MetricMeasureSpace& space, PointId x, PointId y) const {
    if (x == y) {
        if (truncation_) {
            return 0.0;
        }
        throw InvalidArgument("kernel is undefined on the diagonal");
    }
    const Complex raw = adjoint_ ? std::conj(base_value(space, y, x)) : base_value(space, x, y);
    if (truncation_) {
        return eta(space.distance(x, y) / *truncation_) * raw;
    }
    return raw;
}

std::string KernelSpec::describe() const {
    std::ostringstream out;
    out.precision(17);
    out << to_string(source_) << "[" << to_string(class_) << ", n=" << n_ << ", gamma=" << gamma_;
    if (class_ != KernelClass::Singular) {
        out << ", alpha=" << alpha_;
    }
    if (truncation_) {
        out << ", epsilon=" << *truncation_;
    }
    if (adjoint_) {
        out << ", adjoint";
    }
    out << "]";
    return out.str();
}

std::optional<KernelSource> parse_kernel_source(const std::string& text) {
    if (text == "riesz_fractional") return KernelSource::RieszFractional;
    if (text == "riesz_singular") return KernelSource::RieszSingular;
    if (text == "riesz_hypersingular") return KernelSource::RieszHypersingular;
    if (text == "odd_circle") return KernelSource::OddCircle;
    if (text == "table") return KernelSource::Table;
    return std::nullopt;
}

std::string to_string(KernelSource source) {
    switch (source) {
    case KernelSource::RieszFractional: return "riesz_fractional";
    case KernelSource::RieszSingular: return "riesz_singular";
    case KernelSource::RieszHypersingular: return "riesz_hypersingular";
    case KernelSource::OddCircle: return "odd_circle";
    case KernelSource::Table: return "table";
    }
    return "unknown";
}

std::string to_string(KernelClass kernel_class) {
    switch (kernel_class) {
    case KernelClass::Fractional: return "fractional";
    case KernelClass::Singular: return "singular";
    case KernelClass::Hypersingular: return "hypersingular";
    }
    return "unknown";
}

std::string to_string(ConditionId id) {
    return id == ConditionId::Size ? "size" : "smoothness";
}

double eta(double s) {
    if (!(s >= 0.0)) {
        throw InvalidArgument("eta is defined for s >= 0");
    }
    if (s <= 0.5) {
        return 0.0;
    }
    if (s >= 1.0) {
        return 1.0;
    }
    const double t = 2.0 * s - 1.0;
    return t * t * (3.0 - 2.0 * t);
}

double eta_derivative(double s) {
    if (!(s >= 0.0)) {
        throw InvalidArgument("eta is defined for s >= 0");
    }
    if (s <= 0.5 || s >= 1.0) {
        return 0.0;
    }
    const double t = 2.0 * s - 1.0;
    return 12.0 * t * (1.0 - t);
}

KernelSpec truncate_kernel(const KernelSpec& kernel, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw InvalidArgument("truncation epsilon must be positive");
    }
    if (kernel.truncation_) {
        throw InvalidArgument("kernel is already truncated");
    }
    KernelSpec truncated = kernel;
    truncated.truncation_ = epsilon;
    return truncated;
}

KernelSpec adjoint_kernel(const KernelSpec& kernel) {
    KernelSpec adjoint = kernel;
    adjoint.adjoint_ = !kernel.adjoint_;
    return adjoint;
}

KernelSpec tapered_hilbert(const MetricMeasureSpace& space) {
    if (space.coordinate_dimension() != 1) {
        throw InvalidArgument("tapered_hilbert needs one-dimensional coordinates");
    }
    const std::size_t points = space.size();
    std::vector<Complex> entries(points * points, 0.0);
    for (PointId x = 0; x < points; ++x) {
        for (PointId y = 0; y < points; ++y) {
            if (x == y) {
                continue;
            }
            const double t = space.coordinates(y)[0];
            if (t < 0.0 || t > 1.0) {
                throw InvalidArgument("tapered_hilbert needs coordinates in [0, 1]");
            }
            const double sign = t > space.coordinates(x)[0] ? 1.0 : -1.0;
            entries[x * points + y] = sign * 4.0 * t * (1.0 - t) / space.distance(x, y);
        }
    }
    return KernelSpec::table(KernelClass::Singular, space.n(), 1.0, 0.0, points, std::move(entries),
                             space.name());
}

KernelSpec random_table_kernel(const MetricMeasureSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t points = space.size();
    std::vector<Complex> entries(points * points, 0.0);
    for (PointId x = 0; x < points; ++x) {
        for (PointId y = 0; y < points; ++y) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            if (x != y) {
                entries[x * points + y] = Complex(re, im);
            }
        }
    }
    return KernelSpec::table(KernelClass::Singular, space.n(), 1.0, 0.0, points, std::move(entries),
                             space.name());
}

ConditionReport verify_size_condition(const KernelSpec& kernel, const MetricMeasureSpace& space) {
    if (space.size() < 2) {
        throw DegenerateSpace("size condition needs at least 2 points");
    }
    kernel.check_space(space);
    const double exponent = kernel.n() + kernel.order_shift();
    const std::size_t count = space.size();

    std::vector<std::pair<double, PointId>> rows(count, {-1.0, 0});
    parallel_for(count, [&](std::size_t x) {
        for (PointId y = 0; y < count; ++y) {
            if (y == x) {
                continue;
            }
            const double v = std::abs(kernel(space, x, y)) * std::pow(space.distance(x, y), exponent);
            if (v > rows[x].first) {
                rows[x] = {v, y};
            }
        }
    });

    ConditionReport report;
    report.condition = ConditionId::Size;
    report.admissible_count = static_cast<std::uint64_t>(count) * (count - 1);
    report.constant = -1.0;
    for (PointId x = 0; x < count; ++x) {
        if (rows[x].first > report.constant) {
            report.constant = rows[x].first;
            report.witness = {x, rows[x].second};
        }
    }
    return report;
}

ConditionReport verify_smoothness_condition(const KernelSpec& kernel,
                                            const MetricMeasureSpace& space) {
    if (space.size() < 2) {
        throw DegenerateSpace("smoothness condition needs at least 2 points");
    }
    kernel.check_space(space);
    const std::size_t count = space.size();
    const double gamma = kernel.gamma();
    const double outer_exponent = kernel.n() + kernel.order_shift() + gamma;

    std::vector<Complex> values(count * count, 0.0);
    std::vector<double> outer(count * count, 0.0);
    std::vector<double> inner(count * count, 0.0);
    parallel_for(count, [&](std::size_t x) {
        for (PointId y = 0; y < count; ++y) {
            if (y == x) {
                continue;
            }
            values[x * count + y] = kernel(space, x, y);
            outer[x * count + y] = std::pow(space.distance(x, y), outer_exponent);
            inner[x * count + y] = std::pow(space.distance(x, y), gamma);
        }
    });

    std::vector<TripleBest> rows(count);
    parallel_for(count, [&](std::size_t x1) {
        TripleBest best;
        for (PointId x2 = 0; x2 < count; ++x2) {
            if (x2 == x1) {
                continue;
            }
            const double d12 = space.distance(x1, x2);
            for (PointId y = 0; y < count; ++y) {
                if (y == x1 || y == x2 || !(2.0 * d12 <= space.distance(x1, y))) {
                    continue;
                }
                ++best.admissible;
                const double v = std::abs(values[x1 * count + y] - values[x2 * count + y]) *
                                 outer[x1 * count + y] / inner[x1 * count + x2];
                if (v > best.value) {
                    best.value = v;
                    best.x2 = x2;
                    best.y = y;
                }
            }
        }
        rows[x1] = best;
    });

    ConditionReport report;
    report.condition = ConditionId::Smoothness;
    report.constant = 0.0;
    double running = -1.0;
    for (PointId x1 = 0; x1 < count; ++x1) {
        report.admissible_count += rows[x1].admissible;
        if (rows[x1].admissible > 0 && rows[x1].value > running) {
            running = rows[x1].value;
            report.constant = rows[x1].value;
            report.witness = {x1, rows[x1].x2, rows[x1].y};
        }
    }
    return report;
}

}  // namespace nd
