#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nd/kernels.hpp"
#include "nd/lipschitz.hpp"
#include "nd/operators.hpp"
#include "nd/space.hpp"

namespace nd {

enum class TheoremId { T1, T2, T3, T4 };

std::optional<TheoremId> parse_theorem_id(const std::string& text);
std::string to_string(TheoremId id);

struct HypothesisCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Parameter ranges of each theorem. Every failing inequality is named.
HypothesisCheck validate_hypotheses(TheoremId theorem, double alpha, double beta, double gamma,
                                    double n);

/// `count` log-spaced values from (min positive distance)/2 to 2 * diameter.
/// The endpoints are exact, so the first entry reproduces the PV and the last
/// one makes every truncated kernel vanish.
std::vector<double> epsilon_grid(const MetricMeasureSpace& space, std::size_t count = 16);

inline constexpr double kLemmaTolerance = 1e-9;

struct LemmaPart {
    double bound_constant = 0.0;
    double max_ratio = 0.0;
    PointId center = 0;
    double radius = 0.0;
    bool pass = false;
};

struct LemmaReport {
    double n = 0.0;
    double delta = 0.0;
    double r_min = 0.0;
    double a = 0.0;  // measured growth constant
    std::array<LemmaPart, 3> parts;
    bool pass() const { return parts[0].pass && parts[1].pass && parts[2].pass; }
};

/// Checks, for every center and every radius r >= r_min,
///   (1) sum over 0 < d < r of d^(delta-n) mu       <= A 2^n / (2^delta - 1) r^delta
///   (2) sum over d >= r of d^-(n+delta) mu         <= A 2^n 2^delta / (2^delta - 1) r^-delta
///   (3) sum over r/2 <= d < r of d^-n mu           <= A 2^n
/// with A measured at r_min (default: the space's h). Part 1 is checked on
/// the supremum over all real r, via right limits at each distance.
LemmaReport verify_lemma(const MetricMeasureSpace& space, double n, double delta,
                         std::optional<double> r_min = std::nullopt);

struct NormEstimate {
    double source_beta = 0.0;
    double target_beta = 0.0;
    std::vector<double> ratios;
    double estimate = 0.0;
    std::size_t witness = 0;  // first index attaining the estimate
};

/// max over the family of ||T f||_target / ||f||_source. A lower bound for
/// the operator norm.
NormEstimate estimate_operator_norm(const Operator& op, const std::vector<SampledFunction>& family,
                                    double source_beta, double target_beta);

/// The family with f = 1 appended as its last member.
std::vector<SampledFunction> with_constant_one(const SpacePtr& space,
                                               std::vector<SampledFunction> family);

struct Theorem1Report {
    HypothesisCheck hypotheses;
    double alpha = 0.0;
    double beta = 0.0;
    LipschitzNorm one_image;  // ||I_alpha 1|| in Lambda_(alpha + beta)
    NormEstimate estimate;    // Lambda_beta -> Lambda_(alpha + beta)
    std::size_t one_index = 0;
};

/// `kernel` must be fractional. Throws InvalidArgument when the hypotheses fail.
Theorem1Report verify_theorem1(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               std::vector<SampledFunction> family);

struct EpsilonEntry {
    double epsilon = 0.0;
    LipschitzNorm one_image;  // ||T_eps 1||_beta
    double one_image_sup = 0.0;
    NormEstimate estimate;
};

struct S3Assembly {
    AnnulusReport annulus;
    double size_constant = 0.0;    // C1 of the untruncated kernel
    double growth_constant = 0.0;  // A at r_min = minimum positive distance
    double sup_one_image = 0.0;    // sup over eps of sup |T_eps 1|
    double bound = 0.0;            // 2 sup_one_image + 2 C1 A 2^n
    bool holds = false;
};

/// Annulus maximum against the bound assembled from uniform T_eps 1 bounds.
S3Assembly check_s3_assembly(const KernelSpec& kernel, const SpacePtr& space,
                             const std::vector<double>& grid);

struct Theorem2Report {
    HypothesisCheck hypotheses;
    double beta = 0.0;
    std::vector<EpsilonEntry> entries;
    double sup_one_norm = 0.0;
    double sup_estimate = 0.0;
    std::size_t sup_estimate_index = 0;  // grid index
    S3Assembly s3;
    std::size_t one_index = 0;
};

Theorem2Report verify_theorem2(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               const std::vector<double>& grid, std::vector<SampledFunction> family);

struct Theorem3Report {
    HypothesisCheck hypotheses;
    double beta = 0.0;
    AnnulusReport annulus;
    S4Report s4;
    LipschitzNorm one_image;  // ||K 1||_Lip_beta
    NormEstimate estimate;
    std::size_t one_index = 0;
};

Theorem3Report verify_theorem3(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               std::vector<SampledFunction> family,
                               std::optional<double> r0 = std::nullopt);

struct Theorem4Report {
    HypothesisCheck hypotheses;
    double alpha = 0.0;
    double beta = 0.0;
    NormEstimate estimate;  // Lambda_beta -> Lambda_(beta - alpha)
};

/// `kernel` must be hypersingular. The family is used as given.
Theorem4Report verify_theorem4(const SpacePtr& space, const KernelSpec& kernel, double beta,
                               const std::vector<SampledFunction>& family);

struct L2NormResult {
    double norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool used_oracle = false;  // power iteration hit its cap
};

inline constexpr std::size_t kPowerIterationCap = 20000;

/// Norm on L2(mu): power iteration on B* B with B = W^(1/2) A W^(-1/2), A the
/// materialized operator matrix. Stops when ||B*B v - rho v|| <= tolerance * rho.
L2NormResult weighted_l2_norm(const Operator& op, const SpacePtr& space, double tolerance,
                              std::uint64_t seed = 1);

/// Largest singular value of B from a full SVD.
double weighted_l2_norm_oracle(const Operator& op, const SpacePtr& space);

/// |<T_eps f, g> - <f, T*_eps g>| relative to the absolute double sum
/// sum |K_eps(x, y) f(y) g(x)| mu(x) mu(y), the scale both orderings share.
/// 0 when that scale is 0.
double adjoint_identity_gap(const KernelSpec& kernel, double epsilon, const SampledFunction& f,
                            const SampledFunction& g);

struct KreinEntry {
    double epsilon = 0.0;
    double c_a = 0.0;
    double c_b = 0.0;
    double l2_norm = 0.0;
    double bound = 0.0;  // sqrt(c_a c_b)
    bool holds = false;
    bool used_oracle = false;
};

struct KreinReport {
    double beta = 0.0;
    std::vector<KreinEntry> entries;
    std::size_t soft_violations = 0;
};

/// ||T_eps||_L2 against sqrt(C_A C_B), C_A and C_B the empirical Lambda_beta
/// norms of T_eps and its adjoint. Violations are soft: the empirical C's are
/// lower bounds, so a violation may only mean the family is too small.
KreinReport krein_check(const SpacePtr& space, const KernelSpec& kernel, double beta,
                        const std::vector<double>& grid, const std::vector<SampledFunction>& family,
                        double tolerance = 1e-10);

struct CompositionEntry {
    bool run = false;
    std::vector<std::string> gate_failures;
    NormEstimate estimate;  // Lambda_beta -> Lambda_beta
};

struct CompositionReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<LipschitzNorm> i_alpha_one;  // ||I_alpha 1|| in Lambda_(alpha + beta)
    CompositionEntry d_after_i;  // D^alpha I_alpha
    CompositionEntry i_after_d;  // I_alpha D^alpha
};

/// D^alpha I_alpha needs Theorem 1 at beta and Theorem 4 at alpha + beta;
/// I_alpha D^alpha needs Theorem 4 at beta and Theorem 1 at beta - alpha.
/// A composition whose gate fails is reported but not evaluated.
CompositionReport verify_composition(const SpacePtr& space, double alpha, double beta,
                                     const std::vector<SampledFunction>& family,
                                     double gamma = 1.0);

}  // namespace nd
