#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nd/space.hpp"

namespace nd {

using Complex = std::complex<double>;

/// Complex values aligned with the points of a space.
class SampledFunction {
public:
    SampledFunction(SpacePtr space, std::vector<Complex> values);

    const SpacePtr& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    Complex operator[](PointId x) const { return values_[x]; }
    std::span<const Complex> values() const { return values_; }

    bool same_space(const SampledFunction& other) const { return space_ == other.space_; }

private:
    SpacePtr space_;
    std::vector<Complex> values_;
};

SampledFunction constant_function(SpacePtr space, Complex value);
/// d^beta(., anchor).
SampledFunction distance_power(SpacePtr space, PointId anchor, double beta);
/// a f + b g.
SampledFunction linear_combination(Complex a, const SampledFunction& f, Complex b,
                                   const SampledFunction& g);

struct HolderSeminorm {
    double value = 0.0;
    std::pair<PointId, PointId> witness{0, 1};
};

/// sup over x != y of |f(x) - f(y)| / d^beta(x, y) by exhaustive pair scan.
/// Ties keep the lexicographically smallest (x, y) with x < y.
HolderSeminorm holder_seminorm(const SampledFunction& f, double beta);

/// Same result as holder_seminorm, bit for bit, but skips rows whose upper
/// envelope (|f(x)| + sup|f|) / nearest(x)^beta cannot reach the running max.
HolderSeminorm holder_seminorm_pruned(const SampledFunction& f, double beta);

struct LipschitzNorm {
    double beta = 0.0;
    double sup_part = 0.0;
    double seminorm_part = 0.0;
    std::pair<PointId, PointId> witness{0, 1};

    double total() const { return sup_part + seminorm_part; }
};

/// Inhomogeneous Lipschitz norm: sup|f| + |f|_beta.
LipschitzNorm lambda_norm(const SampledFunction& f, double beta);

/// Norm of the a.e.-class space. Every point carries positive mass, so the
/// exceptional null set is empty and this is lambda_norm itself.
inline LipschitzNorm lip_norm(const SampledFunction& f, double beta) { return lambda_norm(f, beta); }

enum class FamilyKind { DistancePowers, CoordinateWaves, AnchoredMix };

std::optional<FamilyKind> parse_family_kind(const std::string& text);
std::string to_string(FamilyKind kind);

/// Seeded probe functions for operator-norm estimates. Deterministic in
/// (space, beta, kind, count, seed).
std::vector<SampledFunction> test_family(const SpacePtr& space, double beta, FamilyKind kind,
                                         std::size_t count, std::uint64_t seed);

}  // namespace nd
