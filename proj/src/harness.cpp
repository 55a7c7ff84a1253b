#include "nd/harness.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "nd/error.hpp"
#include "nd/parallel.hpp"
#include "nd/random.hpp"
#include "nd/summation.hpp"

namespace nd {

namespace {

void require_hypotheses(const HypothesisCheck& check, TheoremId theorem) {
    if (check.ok()) {
        return;
    }
    std::string message = to_string(theorem) + " hypotheses fail:";
    for (const auto& v : check.violations) {
        message += " " + v + ";";
    }
    message.pop_back();
    throw InvalidArgument(message);
}

void require_kernel_class(const KernelSpec& kernel, KernelClass expected) {
    if (kernel.kernel_class() != expected) {
        throw KernelMismatch("expected a " + to_string(expected) + " kernel, got " +
                             to_string(kernel.kernel_class()));
    }
}

// Candidate bookkeeping for one lemma part at one center.
struct PartBest {
    double ratio = -1.0;
    double radius = 0.0;

    void offer(double candidate_ratio, double r) {
        if (candidate_ratio > ratio) {
            ratio = candidate_ratio;
            radius = r;
        }
    }
};

struct CenterLemma {
    std::array<PartBest, 3> parts;
};

// Prefix sums of terms in sorted order, prefix[k] = sum of the first k terms.
std::vector<double> prefix_sums(const std::vector<double>& terms) {
    std::vector<double> prefix(terms.size() + 1, 0.0);
    CompensatedSum sum;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        sum.add(terms[k]);
        prefix[k + 1] = sum.value();
    }
    return prefix;
}

// suffix[k] = sum of terms k..end, accumulated from the small far-field end.
std::vector<double> suffix_sums(const std::vector<double>& terms) {
    std::vector<double> suffix(terms.size() + 1, 0.0);
    CompensatedSum sum;
    for (std::size_t k = terms.size(); k-- > 0;) {
        sum.add(terms[k]);
        suffix[k] = sum.value();
    }
    return suffix;
}

Eigen::MatrixXcd weighted_matrix(const Operator& op, const SpacePtr& space) {
    const std::size_t count = space->size();
    Eigen::MatrixXcd b(count, count);
    for (std::size_t j = 0; j < count; ++j) {
        std::vector<Complex> basis(count, 0.0);
        basis[j] = 1.0;
        const SampledFunction column = op(SampledFunction(space, std::move(basis)));
        if (column.space() != space) {
            throw SpaceMismatch("operator changed the space");
        }
        const double scale = 1.0 / std::sqrt(space->weight(j));
        for (std::size_t i = 0; i < count; ++i) {
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(space->weight(i)) * column[i] * scale;
        }
    }
    return b;
}

double largest_singular_value(const Eigen::MatrixXcd& b) {
    if (b.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
    return svd.singularValues()(0);
}

}  // namespace

std::optional<TheoremId> parse_theorem_id(const std::string& text) {
    if (text == "1" || text == "T1") return TheoremId::T1;
    if (text == "2" || text == "T2") return TheoremId::T2;
    if (text == "3" || text == "T3") return TheoremId::T3;
    if (text == "4" || text == "T4") return TheoremId::T4;
    return std::nullopt;
}

std::string to_string(TheoremId id) {
    switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    }
    return "T?";
}

HypothesisCheck validate_hypotheses(TheoremId theorem, double alpha, double beta, double gamma,
                                    double n) {
    HypothesisCheck check;
    auto need = [&](bool condition, const char* name) {
        if (!condition) {
            check.violations.emplace_back(std::string(name) + " fails");
        }
    };
    need(n > 0.0, "n>0");
    switch (theorem) {
    case TheoremId::T1:
        need(alpha > 0.0, "0<α");
        need(alpha < gamma, "α<γ");
        need(gamma <= 1.0, "γ≤1");
        need(beta > 0.0, "0<β");
        need(beta < 1.0, "β<1");
        if (n > 1.0) {
            need(alpha + beta <= 1.0, "α+β≤1");
        } else {
            need(alpha + beta < n, "α+β<n");
        }
        break;
    case TheoremId::T2:
    case TheoremId::T3:
        need(beta > 0.0, "0<β");
        need(beta < std::min(n, gamma), "β < min(n,γ)");
        break;
    case TheoremId::T4:
        need(alpha > 0.0, "0<α");
        need(alpha < beta, "α<β");
        need(beta <= 1.0, "β≤1");
        need(beta - alpha < n, "β−α<n");
        break;
    }
    return check;
}

std::vector<double> epsilon_grid(const MetricMeasureSpace& space, std::size_t count) {
    if (space.size() < 2) {
        throw DegenerateSpace("epsilon grid needs at least 2 points");
    }
    if (count < 2) {
        throw InvalidArgument("epsilon grid needs at least 2 values");
    }
    const double lo = space.min_positive_distance() / 2.0;
    const double hi = 2.0 * space.diameter();
    std::vector<double> grid(count);
    const double log_ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = lo * std::exp(log_ratio * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

LemmaReport verify_lemma(const MetricMeasureSpace& space, double n, double delta,
                         std::optional<double> r_min) {
    if (!(n > 0.0)) {
        throw InvalidArgument("growth exponent n must be positive");
    }
    if (!(delta > 0.0 && delta < n)) {
        throw InvalidArgument("lemma needs 0 < delta < n");
    }
    LemmaReport report;
    report.n = n;
    report.delta = delta;
    report.r_min = r_min.value_or(space.h());
    report.a = estimate_growth_constant(space, n, report.r_min).a_estimate;

    const double a = report.a;
    const double two_n = std::pow(2.0, n);
    const double two_delta = std::pow(2.0, delta);
    report.parts[0].bound_constant = a * two_n / (two_delta - 1.0);
    report.parts[1].bound_constant = a * two_n * two_delta / (two_delta - 1.0);
    report.parts[2].bound_constant = a * two_n;
    const double c1 = report.parts[0].bound_constant;
    const double c2 = report.parts[1].bound_constant;
    const double c3 = report.parts[2].bound_constant;
    const double rmin = report.r_min;
    const std::size_t count = space.size();

    std::vector<CenterLemma> centers(count);
    parallel_for(count, [&](std::size_t x) {
        std::vector<std::pair<double, PointId>> order;
        order.reserve(count - 1);
        for (PointId y = 0; y < count; ++y) {
            if (y != x) {
                order.emplace_back(space.distance(x, y), y);
            }
        }
        std::sort(order.begin(), order.end());
        std::vector<double> dist(order.size());
        std::vector<double> t1(order.size()), t2(order.size()), t3(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            const double d = order[k].first;
            const double w = space.weight(order[k].second);
            dist[k] = d;
            t1[k] = std::pow(d, delta - n) * w;
            t2[k] = std::pow(d, -(n + delta)) * w;
            t3[k] = std::pow(d, -n) * w;
        }
        const auto p1 = prefix_sums(t1);
        const auto s2 = suffix_sums(t2);
        const auto p3 = prefix_sums(t3);
        // Number of sorted distances < r, and <= r.
        auto below = [&](double r) {
            return static_cast<std::size_t>(std::lower_bound(dist.begin(), dist.end(), r) -
                                            dist.begin());
        };
        auto at_most = [&](double r) {
            return static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), r) -
                                            dist.begin());
        };
        auto part3 = [&](double r) {
            return (p3[below(r)] - p3[below(r / 2.0)]) / c3;
        };

        CenterLemma& c = centers[x];
        c.parts[0].offer(p1[below(rmin)] / (c1 * std::pow(rmin, delta)), rmin);
        c.parts[1].offer(s2[below(rmin)] * std::pow(rmin, delta) / c2, rmin);
        c.parts[2].offer(part3(rmin), rmin);
        for (std::size_t k = 0; k < dist.size(); ++k) {
            if (k > 0 && dist[k] == dist[k - 1]) {
                continue;
            }
            const double r = dist[k];
            if (r >= rmin) {
                // Right limit of the open sum at r: everything at distance <= r.
                c.parts[0].offer(p1[at_most(r)] / (c1 * std::pow(r, delta)), r);
                c.parts[1].offer(s2[below(r)] * std::pow(r, delta) / c2, r);
                c.parts[2].offer(part3(r), r);
            }
            if (2.0 * r >= rmin) {
                c.parts[2].offer(part3(2.0 * r), 2.0 * r);
            }
        }
    });

    for (std::size_t p = 0; p < 3; ++p) {
        LemmaPart& part = report.parts[p];
        double running = -1.0;
        for (PointId x = 0; x < count; ++x) {
            if (centers[x].parts[p].ratio > running) {
                running = centers[x].parts[p].ratio;
                part.max_ratio = running;
                part.center = x;
                part.radius = centers[x].parts[p].radius;
            }
        }
        part.pass = part.max_ratio <= 1.0 + kLemmaTolerance;
    }
    return report;
}

NormEstimate estimate_operator_norm(const Operator& op, const std::vector<SampledFunction>& family,
                                    double source_beta, double target_beta) {
    if (family.empty()) {
        throw InvalidArgument("test family is empty");
    }
    NormEstimate estimate;
    estimate.source_beta = source_beta;
    estimate.target_beta = target_beta;
    estimate.ratios.reserve(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double source = lambda_norm(family[i], source_beta).total();
        if (source == 0.0) {
            throw InvalidArgument("test function " + std::to_string(i) + " has zero norm");
        }
        const double ratio = lambda_norm(op(family[i]), target_beta).total() / source;
        estimate.ratios.push_back(ratio);
        if (i == 0 || ratio > estimate.estimate) {
            estimate.estimate = ratio;
            estimate.witness = i;
        }
    }
    return estimate;
}

std::vector<SampledFunction> with_constant_one(const SpacePtr& space,
                                               std::vector<SampledFunction> family) {
    family.push_back(constant_function(space, 1.0));
    return family;
}

Theorem1Report verify_theorem1(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               std::vector<SampledFunction> family) {
    require_kernel_class(kernel, KernelClass::Fractional);
    Theorem1Report report;
    report.alpha = kernel.alpha();
    report.beta = beta;
    report.hypotheses =
        validate_hypotheses(TheoremId::T1, kernel.alpha(), beta, kernel.gamma(), space->n());
    require_hypotheses(report.hypotheses, TheoremId::T1);

    const double target = kernel.alpha() + beta;
    const Operator op = fractional_operator(kernel);
    report.one_image = lambda_norm(op(constant_function(space, 1.0)), target);
    family = with_constant_one(space, std::move(family));
    report.one_index = family.size() - 1;
    report.estimate = estimate_operator_norm(op, family, beta, target);
    return report;
}

namespace {

S3Assembly assemble_s3(const KernelSpec& kernel, const SpacePtr& space, double sup_one_image) {
    S3Assembly s3;
    s3.annulus = check_annulus_cancellation(kernel, *space);
    s3.size_constant = verify_size_condition(kernel, *space).constant;
    s3.growth_constant =
        estimate_growth_constant(*space, space->n(), space->min_positive_distance()).a_estimate;
    s3.sup_one_image = sup_one_image;
    s3.bound = 2.0 * sup_one_image +
               2.0 * s3.size_constant * s3.growth_constant * std::pow(2.0, space->n());
    s3.holds = s3.annulus.max_modulus <= s3.bound;
    return s3;
}

}  // namespace

S3Assembly check_s3_assembly(const KernelSpec& kernel, const SpacePtr& space,
                             const std::vector<double>& grid) {
    require_kernel_class(kernel, KernelClass::Singular);
    const SampledFunction one = constant_function(space, 1.0);
    double sup = 0.0;
    for (double epsilon : grid) {
        const SampledFunction image = apply_truncated(kernel, epsilon, one).output;
        for (PointId x = 0; x < image.size(); ++x) {
            sup = std::max(sup, std::abs(image[x]));
        }
    }
    return assemble_s3(kernel, space, sup);
}

Theorem2Report verify_theorem2(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               const std::vector<double>& grid, std::vector<SampledFunction> family) {
    require_kernel_class(kernel, KernelClass::Singular);
    if (grid.empty()) {
        throw InvalidArgument("epsilon grid is empty");
    }
    Theorem2Report report;
    report.beta = beta;
    report.hypotheses = validate_hypotheses(TheoremId::T2, 0.0, beta, kernel.gamma(), space->n());
    require_hypotheses(report.hypotheses, TheoremId::T2);

    family = with_constant_one(space, std::move(family));
    report.one_index = family.size() - 1;
    const SampledFunction one = constant_function(space, 1.0);
    double sup_image = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EpsilonEntry entry;
        entry.epsilon = grid[i];
        const Operator op = truncated_operator(kernel, grid[i]);
        entry.one_image = lambda_norm(op(one), beta);
        entry.one_image_sup = entry.one_image.sup_part;
        entry.estimate = estimate_operator_norm(op, family, beta, beta);
        report.sup_one_norm = std::max(report.sup_one_norm, entry.one_image.total());
        sup_image = std::max(sup_image, entry.one_image_sup);
        if (i == 0 || entry.estimate.estimate > report.sup_estimate) {
            report.sup_estimate = entry.estimate.estimate;
            report.sup_estimate_index = i;
        }
        report.entries.push_back(std::move(entry));
    }
    report.s3 = assemble_s3(kernel, space, sup_image);
    return report;
}

Theorem3Report verify_theorem3(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               std::vector<SampledFunction> family, std::optional<double> r0) {
    require_kernel_class(kernel, KernelClass::Singular);
    Theorem3Report report;
    report.beta = beta;
    report.hypotheses = validate_hypotheses(TheoremId::T3, 0.0, beta, kernel.gamma(), space->n());
    require_hypotheses(report.hypotheses, TheoremId::T3);

    report.annulus = check_annulus_cancellation(kernel, *space);
    report.s4 = check_s4_limit(kernel, *space, r0.value_or(default_s4_radius(*space)));
    const Operator op = pv_operator(kernel);
    report.one_image = lip_norm(op(constant_function(space, 1.0)), beta);
    family = with_constant_one(space, std::move(family));
    report.one_index = family.size() - 1;
    report.estimate = estimate_operator_norm(op, family, beta, beta);
    return report;
}

Theorem4Report verify_theorem4(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               const std::vector<SampledFunction>& family) {
    require_kernel_class(kernel, KernelClass::Hypersingular);
    Theorem4Report report;
    report.alpha = kernel.alpha();
    report.beta = beta;
    report.hypotheses =
        validate_hypotheses(TheoremId::T4, kernel.alpha(), beta, kernel.gamma(), space->n());
    require_hypotheses(report.hypotheses, TheoremId::T4);
    report.estimate =
        estimate_operator_norm(hypersingular_operator(kernel), family, beta, beta - kernel.alpha());
    return report;
}

L2NormResult weighted_l2_norm(const Operator& op, const SpacePtr& space, double tolerance,
                              std::uint64_t seed) {
    if (!(tolerance > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    const Eigen::MatrixXcd b = weighted_matrix(op, space);
    L2NormResult result;
    if (b.norm() == 0.0) {
        result.converged = true;
        return result;
    }

    Rng rng(seed);
    Eigen::VectorXcd v(b.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        v(i) = Complex(re, im);
    }
    v.normalize();

    double rho = 0.0;
    for (std::size_t it = 1; it <= kPowerIterationCap; ++it) {
        const Eigen::VectorXcd u = b * v;
        const Eigen::VectorXcd mv = b.adjoint() * u;
        rho = u.squaredNorm();
        result.iterations = it;
        if ((mv - rho * v).norm() <= tolerance * rho) {
            result.converged = true;
            break;
        }
        const double length = mv.norm();
        if (length == 0.0) {
            break;
        }
        v = mv / length;
    }
    if (result.converged) {
        result.norm = std::sqrt(rho);
    } else {
        result.used_oracle = true;
        result.norm = largest_singular_value(b);
    }
    return result;
}

double weighted_l2_norm_oracle(const Operator& op, const SpacePtr& space) {
    return largest_singular_value(weighted_matrix(op, space));
}

double adjoint_identity_gap(const KernelSpec& kernel, double epsilon, const SampledFunction& f,
                            const SampledFunction& g) {
    if (!f.same_space(g)) {
        throw SpaceMismatch("adjoint identity needs functions on one space");
    }
    const Complex lhs = weighted_inner_product(apply_truncated(kernel, epsilon, f).output, g);
    const Complex rhs =
        weighted_inner_product(f, apply_truncated(adjoint_kernel(kernel), epsilon, g).output);

    const MetricMeasureSpace& space = *f.space();
    const KernelSpec truncated = truncate_kernel(kernel, epsilon);
    CompensatedSum scale;
    for (PointId x = 0; x < space.size(); ++x) {
        for (PointId y = 0; y < space.size(); ++y) {
            scale.add(std::abs(truncated(space, x, y)) * std::abs(f[y]) * std::abs(g[x]) *
                      space.weight(x) * space.weight(y));
        }
    }
    if (scale.value() == 0.0) {
        return 0.0;
    }
    return std::abs(lhs - rhs) / scale.value();
}

KreinReport krein_check(const SpacePtr& space, const KernelSpec& kernel, double beta,
                        const std::vector<double>& grid, const std::vector<SampledFunction>& family,
                        double tolerance) {
    require_kernel_class(kernel, KernelClass::Singular);
    KreinReport report;
    report.beta = beta;
    const KernelSpec adjoint = adjoint_kernel(kernel);
    for (double epsilon : grid) {
        KreinEntry entry;
        entry.epsilon = epsilon;
        const Operator op = truncated_operator(kernel, epsilon);
        entry.c_a = estimate_operator_norm(op, family, beta, beta).estimate;
        entry.c_b =
            estimate_operator_norm(truncated_operator(adjoint, epsilon), family, beta, beta).estimate;
        const L2NormResult l2 = weighted_l2_norm(op, space, tolerance);
        entry.l2_norm = l2.norm;
        entry.used_oracle = l2.used_oracle;
        entry.bound = std::sqrt(entry.c_a * entry.c_b);
        entry.holds = entry.l2_norm <= entry.bound;
        if (!entry.holds) {
            ++report.soft_violations;
        }
        report.entries.push_back(entry);
    }
    return report;
}

CompositionReport verify_composition(const SpacePtr& space, double alpha, double beta,
                                     const std::vector<SampledFunction>& family, double gamma) {
    CompositionReport report;
    report.alpha = alpha;
    report.beta = beta;
    const double n = space->n();
    const KernelSpec fractional = KernelSpec::riesz_fractional(n, alpha, gamma);
    const KernelSpec hypersingular = KernelSpec::riesz_hypersingular(n, alpha, gamma);
    const Operator i_alpha = fractional_operator(fractional);
    const Operator d_alpha = hypersingular_operator(hypersingular);

    if (alpha + beta <= 1.0) {
        report.i_alpha_one = lambda_norm(i_alpha(constant_function(space, 1.0)), alpha + beta);
    }

    auto gate = [&](CompositionEntry& entry, TheoremId first, double first_beta, TheoremId second,
                    double second_beta) {
        for (auto [theorem, b] : {std::pair{first, first_beta}, std::pair{second, second_beta}}) {
            for (const auto& v : validate_hypotheses(theorem, alpha, b, gamma, n).violations) {
                entry.gate_failures.push_back(to_string(theorem) + ": " + v);
            }
        }
        entry.run = entry.gate_failures.empty();
    };

    gate(report.d_after_i, TheoremId::T1, beta, TheoremId::T4, alpha + beta);
    if (report.d_after_i.run) {
        const Operator op = [&](const SampledFunction& f) {
            return compose(d_alpha, i_alpha, f).output;
        };
        report.d_after_i.estimate = estimate_operator_norm(op, family, beta, beta);
    }
    gate(report.i_after_d, TheoremId::T4, beta, TheoremId::T1, beta - alpha);
    if (report.i_after_d.run) {
        const Operator op = [&](const SampledFunction& f) {
            return compose(i_alpha, d_alpha, f).output;
        };
        report.i_after_d.estimate = estimate_operator_norm(op, family, beta, beta);
    }
    return report;
}

}  // namespace nd
