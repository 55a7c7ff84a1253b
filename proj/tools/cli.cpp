#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nd/error.hpp"
#include "nd/harness.hpp"
#include "nd/operators.hpp"
#include "nd/parallel.hpp"

namespace ndcli {

using nd::Json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- config <-> json ------------------------------------------------------

template <class T>
Json optional_json(const std::optional<T>& value) {
    return value ? Json(*value) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& doc, const char* key) {
    if (!doc.contains(key) || doc[key].is_null()) {
        return std::nullopt;
    }
    return doc[key].get<T>();
}

template <class T>
void read_field(const Json& doc, const char* key, T& target) {
    if (doc.contains(key) && !doc[key].is_null()) {
        target = doc[key].get<T>();
    }
}

// ---- small formatting helpers -------------------------------------------

std::string csv_number(double value) {
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

bool finite(double value) { return std::isfinite(value); }

Json witness_json(std::pair<nd::PointId, nd::PointId> pair) {
    return Json::array({pair.first, pair.second});
}

Json lip_json(const nd::LipschitzNorm& norm) {
    Json doc;
    doc["beta"] = norm.beta;
    doc["sup"] = norm.sup_part;
    doc["seminorm"] = norm.seminorm_part;
    doc["total"] = norm.total();
    doc["witness"] = witness_json(norm.witness);
    return doc;
}

Json norm_json(const nd::NormEstimate& estimate) {
    Json doc;
    doc["source_beta"] = estimate.source_beta;
    doc["target_beta"] = estimate.target_beta;
    doc["estimate"] = estimate.estimate;
    doc["witness"] = estimate.witness;
    doc["ratios"] = estimate.ratios;
    return doc;
}

Json annulus_json(const nd::AnnulusReport& report) {
    Json doc;
    doc["max_modulus"] = report.max_modulus;
    doc["center"] = report.center;
    doc["inner_radius"] = report.inner_radius;
    doc["outer_radius"] = report.outer_radius;
    doc["annuli_checked"] = report.annuli_checked;
    return doc;
}

Json condition_json(const nd::ConditionReport& report) {
    Json doc;
    doc["condition"] = nd::to_string(report.condition);
    doc["constant"] = report.constant;
    doc["witness"] = report.witness;
    doc["admissible_count"] = report.admissible_count;
    return doc;
}

Json hypotheses_json(const nd::HypothesisCheck& check) {
    Json doc;
    doc["ok"] = check.ok();
    doc["violations"] = check.violations;
    return doc;
}

Json complex_list(std::span<const nd::Complex> values) {
    Json list = Json::array();
    for (const auto v : values) {
        list.push_back(nd::complex_to_json(v));
    }
    return list;
}

std::string ratios_csv(const nd::NormEstimate& estimate) {
    std::string csv = "index,ratio\n";
    for (std::size_t i = 0; i < estimate.ratios.size(); ++i) {
        csv += std::to_string(i) + "," + csv_number(estimate.ratios[i]) + "\n";
    }
    return csv;
}

// ---- resolving inputs ----------------------------------------------------

nd::SpacePtr builtin_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw UsageError("--builtin expects kind:param, got '" + spec + "'");
    }
    const auto kind = nd::parse_builtin_kind(spec.substr(0, colon));
    if (!kind) {
        throw UsageError("unknown builtin space kind '" + spec.substr(0, colon) + "'");
    }
    long param = 0;
    try {
        std::size_t used = 0;
        param = std::stol(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) {
            throw std::invalid_argument("trailing text");
        }
    } catch (const std::logic_error&) {
        throw UsageError("--builtin parameter must be an integer, got '" + spec + "'");
    }
    return nd::builtin_space(*kind, param);
}

nd::SpacePtr resolve_space(const RunConfig& config, bool check_axioms = true) {
    if (!config.builtin.empty() && !config.space_file.empty()) {
        throw UsageError("give either --space or --builtin, not both");
    }
    if (!config.builtin.empty()) {
        return builtin_from_spec(config.builtin);
    }
    if (!config.space_file.empty()) {
        return nd::load_space(config.space_file, check_axioms);
    }
    throw UsageError("a space is required (--space FILE or --builtin kind:param)");
}

nd::KernelSpec resolve_kernel(const RunConfig& config, const nd::SpacePtr& space,
                              const std::string& fallback) {
    const std::string name = config.kernel.empty() ? fallback : config.kernel;
    const double n = config.n.value_or(space->n());
    if (name == "riesz_fractional") return nd::KernelSpec::riesz_fractional(n, config.alpha, config.gamma);
    if (name == "riesz_singular") return nd::KernelSpec::riesz_singular(n, config.gamma);
    if (name == "riesz_hypersingular")
        return nd::KernelSpec::riesz_hypersingular(n, config.alpha, config.gamma);
    if (name == "odd_circle") return nd::KernelSpec::odd_circle(n, config.gamma);
    if (name == "tapered_hilbert") return nd::tapered_hilbert(*space);
    if (name == "random_table") return nd::random_table_kernel(*space, config.seed);
    if (name == "table") {
        if (config.table_file.empty()) {
            throw UsageError("--kernel table needs --table FILE");
        }
        return nd::kernel_table_from_json(nd::read_json_file(config.table_file), *space);
    }
    if (name.empty()) {
        throw UsageError("--kernel is required");
    }
    throw UsageError("unknown kernel '" + name + "'");
}

std::vector<nd::SampledFunction> resolve_family(const RunConfig& config, const nd::SpacePtr& space,
                                                double beta) {
    const auto kind = nd::parse_family_kind(config.family);
    if (!kind) {
        throw UsageError("unknown family '" + config.family + "'");
    }
    if (config.count < 0) {
        throw UsageError("--count must be non-negative");
    }
    if (config.count == 0) {
        return {};
    }
    return nd::test_family(space, beta, *kind, static_cast<std::size_t>(config.count), config.seed);
}

std::vector<double> resolve_grid(const RunConfig& config, const nd::MetricMeasureSpace& space) {
    if (config.grid_count < 2) {
        throw UsageError("--grid-count must be at least 2");
    }
    return nd::epsilon_grid(space, static_cast<std::size_t>(config.grid_count));
}

Json space_summary(const nd::MetricMeasureSpace& space) {
    Json doc;
    doc["name"] = space.name();
    doc["points"] = space.size();
    doc["n"] = space.n();
    doc["hash"] = nd::space_hash(space);
    return doc;
}

Json report_header(const RunConfig& config) {
    Json doc;
    doc["command"] = config.verb;
    doc["config"] = config_to_json(config);
    return doc;
}

// ---- verbs ---------------------------------------------------------------

Outcome space_gen(const RunConfig& config) {
    const auto kind = nd::parse_builtin_kind(config.kind);
    if (!kind) {
        throw UsageError("unknown space kind '" + config.kind + "'");
    }
    const nd::SpacePtr space = nd::builtin_space(*kind, config.size);
    Outcome outcome;
    outcome.report = nd::space_to_json(*space);
    outcome.report["config"] = config_to_json(config);
    outcome.csv = "id,weight";
    for (std::size_t k = 0; k < space->coordinate_dimension(); ++k) {
        outcome.csv += ",x" + std::to_string(k);
    }
    outcome.csv += "\n";
    for (nd::PointId x = 0; x < space->size(); ++x) {
        outcome.csv += std::to_string(x) + "," + csv_number(space->weight(x));
        if (space->has_coordinates()) {
            for (double c : space->coordinates(x)) {
                outcome.csv += "," + csv_number(c);
            }
        }
        outcome.csv += "\n";
    }
    return outcome;
}

Outcome space_check(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config, false);
    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);

    const nd::MetricReport axioms = nd::check_metric_axioms(*space, config.triple_budget);
    Json ax;
    ax["ok"] = axioms.ok();
    ax["triangle_exhaustive"] = axioms.triangle_exhaustive;
    ax["triples_checked"] = axioms.triples_checked;
    ax["violation_count"] = axioms.violation_count;
    Json listed = Json::array();
    for (const auto& v : axioms.violations) {
        listed.push_back(nd::describe(v));
    }
    ax["violations"] = std::move(listed);
    report["axioms"] = std::move(ax);

    report["total_mass"] = space->total_mass();
    report["diameter"] = space->diameter();
    report["h"] = space->h();
    report["min_positive_distance"] = space->min_positive_distance();

    outcome.csv = "radius,max_ratio\n";
    if (axioms.ok() && space->size() >= 2) {
        const double n = config.n.value_or(space->n());
        const double r_min = config.r_min.value_or(space->h());
        const nd::GrowthReport growth = nd::estimate_growth_constant(*space, n, r_min);
        Json g;
        g["a_estimate"] = growth.a_estimate;
        g["n"] = growth.n;
        g["r_min"] = growth.r_min;
        g["witness"] = {{"center", growth.worst.center},
                        {"radius", growth.worst.radius},
                        {"mass", growth.worst.mass},
                        {"ratio", growth.worst.ratio}};
        Json profile = Json::array();
        for (const auto& row : growth.per_radius_profile) {
            profile.push_back(Json::array({row.radius, row.max_ratio}));
            outcome.csv += csv_number(row.radius) + "," + csv_number(row.max_ratio) + "\n";
        }
        g["profile"] = std::move(profile);
        report["growth"] = std::move(g);

        const nd::DoublingReport doubling = nd::estimate_doubling_ratio(*space, r_min);
        report["doubling"] = {{"ratio", doubling.ratio},
                              {"center", doubling.center},
                              {"radius", doubling.radius}};
    }
    report["pass"] = axioms.ok();
    if (!axioms.ok()) {
        outcome.exit_code = kExitFailure;
        outcome.messages.push_back(nd::describe(axioms.violations.front()));
    }
    return outcome;
}

Outcome kernel_check(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config);
    nd::KernelSpec kernel = resolve_kernel(config, space, "");
    if (config.epsilon) {
        kernel = nd::truncate_kernel(kernel, *config.epsilon);
    }
    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);
    report["kernel"] = kernel.describe();
    const auto size = nd::verify_size_condition(kernel, *space);
    const auto smooth = nd::verify_smoothness_condition(kernel, *space);
    report["size"] = condition_json(size);
    report["smoothness"] = condition_json(smooth);
    const bool ok = finite(size.constant) && finite(smooth.constant);
    report["pass"] = ok;
    outcome.exit_code = ok ? kExitPass : kExitFailure;
    outcome.csv = "condition,constant,admissible_count\n";
    for (const auto* r : {&size, &smooth}) {
        outcome.csv += nd::to_string(r->condition) + "," + csv_number(r->constant) + "," +
                       std::to_string(r->admissible_count) + "\n";
    }
    return outcome;
}

nd::SampledFunction resolve_input(const RunConfig& config, const nd::SpacePtr& space) {
    if (!config.function_file.empty()) {
        return nd::function_from_json(nd::read_json_file(config.function_file), space);
    }
    if (config.function_index) {
        if (*config.function_index < 0) {
            throw UsageError("--index must be non-negative");
        }
        const auto kind = nd::parse_family_kind(config.family);
        if (!kind) {
            throw UsageError("unknown family '" + config.family + "'");
        }
        const auto index = static_cast<std::size_t>(*config.function_index);
        return nd::test_family(space, config.beta, *kind, index + 1, config.seed)[index];
    }
    return nd::constant_function(space, config.constant);
}

Outcome op_apply(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config);
    const nd::SampledFunction f = resolve_input(config, space);
    auto need_x0 = [&] {
        if (!config.x0 || *config.x0 < 0) {
            throw UsageError("--x0 is required for normalized operators");
        }
        return static_cast<nd::PointId>(*config.x0);
    };

    std::optional<nd::OperatorResult> result;
    std::string kernel_text;
    if (config.op == "fractional") {
        const auto kernel = resolve_kernel(config, space, "riesz_fractional");
        kernel_text = kernel.describe();
        result = nd::apply_fractional(kernel, f);
    } else if (config.op == "truncated") {
        if (!config.epsilon) {
            throw UsageError("--op truncated needs --epsilon");
        }
        const auto kernel = resolve_kernel(config, space, "");
        kernel_text = kernel.describe();
        result = nd::apply_truncated(kernel, *config.epsilon, f);
    } else if (config.op == "pv") {
        const auto kernel = resolve_kernel(config, space, "");
        kernel_text = kernel.describe();
        result = nd::apply_pv(kernel, f);
    } else if (config.op == "hypersingular") {
        const auto kernel = resolve_kernel(config, space, "riesz_hypersingular");
        kernel_text = kernel.describe();
        result = nd::apply_hypersingular(kernel, f);
    } else if (config.op == "normalized_fractional") {
        const auto kernel = resolve_kernel(config, space, "riesz_fractional");
        kernel_text = kernel.describe();
        result = nd::normalized_fractional(kernel, need_x0(), f);
    } else if (config.op == "normalized_pv") {
        const auto kernel = resolve_kernel(config, space, "");
        kernel_text = kernel.describe();
        result = nd::normalized_pv(kernel, need_x0(), f);
    } else {
        throw UsageError("unknown operator '" + config.op + "'");
    }

    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);
    report["kernel"] = kernel_text;
    report["output"] = nd::function_to_json(result->output);
    Json diag;
    diag["epsilon"] = optional_json(result->diagnostics.epsilon);
    diag["epsilon_star"] = result->diagnostics.epsilon_star;
    diag["terms"] = result->diagnostics.terms;
    diag["normalization_point"] = optional_json(result->diagnostics.normalization_point);
    diag["excludes_normalization_point"] = result->diagnostics.excludes_normalization_point;
    report["diagnostics"] = std::move(diag);
    report["pass"] = true;
    outcome.csv = "id,re,im,terms\n";
    for (nd::PointId x = 0; x < space->size(); ++x) {
        outcome.csv += std::to_string(x) + "," + csv_number(result->output[x].real()) + "," +
                       csv_number(result->output[x].imag()) + "," +
                       std::to_string(result->diagnostics.terms[x]) + "\n";
    }
    return outcome;
}

Outcome verify_lemma(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config);
    const double n = config.n.value_or(space->n());
    const nd::LemmaReport lemma = nd::verify_lemma(*space, n, config.delta, config.r_min);
    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);
    report["n"] = lemma.n;
    report["delta"] = lemma.delta;
    report["r_min"] = lemma.r_min;
    report["a_estimate"] = lemma.a;
    Json parts = Json::array();
    outcome.csv = "part,bound_constant,max_ratio,center,radius,pass\n";
    for (std::size_t p = 0; p < 3; ++p) {
        const auto& part = lemma.parts[p];
        parts.push_back({{"part", p + 1},
                         {"bound_constant", part.bound_constant},
                         {"max_ratio", part.max_ratio},
                         {"center", part.center},
                         {"radius", part.radius},
                         {"pass", part.pass}});
        outcome.csv += std::to_string(p + 1) + "," + csv_number(part.bound_constant) + "," +
                       csv_number(part.max_ratio) + "," + std::to_string(part.center) + "," +
                       csv_number(part.radius) + "," + (part.pass ? "true" : "false") + "\n";
    }
    report["parts"] = std::move(parts);
    report["pass"] = lemma.pass();
    if (!lemma.pass()) {
        outcome.exit_code = kExitFailure;
        outcome.messages.push_back("lemma bound exceeded");
    }
    return outcome;
}

Outcome hypothesis_failure(Json report, const nd::HypothesisCheck& check) {
    Outcome outcome;
    report["hypotheses"] = hypotheses_json(check);
    report["pass"] = false;
    outcome.report = std::move(report);
    outcome.exit_code = kExitFailure;
    for (const auto& v : check.violations) {
        outcome.messages.push_back("hypothesis violation: " + v);
    }
    outcome.csv = "violation\n";
    for (const auto& v : check.violations) {
        outcome.csv += v + "\n";
    }
    return outcome;
}

Outcome verify_theorem(const RunConfig& config) {
    const auto id = nd::parse_theorem_id(std::to_string(config.theorem));
    if (!id) {
        throw UsageError("--id must be 1, 2, 3 or 4");
    }
    const nd::SpacePtr space = resolve_space(config);
    Json report = report_header(config);
    report["space"] = space_summary(*space);
    report["theorem"] = nd::to_string(*id);

    const std::string fallback = *id == nd::TheoremId::T1   ? "riesz_fractional"
                                 : *id == nd::TheoremId::T4 ? "riesz_hypersingular"
                                                            : "";
    // Ranges are validated before the kernel or any sum is built.
    {
        const bool riesz = config.kernel.empty() || config.kernel.rfind("riesz_", 0) == 0 ||
                           config.kernel == "odd_circle";
        if (riesz) {
            const double alpha = (*id == nd::TheoremId::T1 || *id == nd::TheoremId::T4) ? config.alpha : 0.0;
            const auto check = nd::validate_hypotheses(*id, alpha, config.beta, config.gamma, space->n());
            if (!check.ok()) {
                return hypothesis_failure(std::move(report), check);
            }
        }
    }
    const nd::KernelSpec kernel = resolve_kernel(config, space, fallback);
    const double alpha = (*id == nd::TheoremId::T1 || *id == nd::TheoremId::T4) ? kernel.alpha() : 0.0;
    const auto check = nd::validate_hypotheses(*id, alpha, config.beta, kernel.gamma(), space->n());
    if (!check.ok()) {
        return hypothesis_failure(std::move(report), check);
    }
    report["kernel"] = kernel.describe();
    report["hypotheses"] = hypotheses_json(check);

    Outcome outcome;
    bool ok = true;
    switch (*id) {
    case nd::TheoremId::T1: {
        const auto t = nd::verify_theorem1(space, kernel, config.beta, resolve_family(config, space, config.beta));
        report["one_image"] = lip_json(t.one_image);
        report["estimate"] = norm_json(t.estimate);
        report["one_index"] = t.one_index;
        ok = finite(t.estimate.estimate) && finite(t.one_image.total());
        outcome.csv = ratios_csv(t.estimate);
        break;
    }
    case nd::TheoremId::T2: {
        const auto grid = resolve_grid(config, *space);
        const auto t = nd::verify_theorem2(space, kernel, config.beta, grid,
                                           resolve_family(config, space, config.beta));
        Json entries = Json::array();
        outcome.csv = "epsilon,one_image_norm,one_image_sup,estimate\n";
        for (const auto& e : t.entries) {
            entries.push_back({{"epsilon", e.epsilon},
                               {"one_image", lip_json(e.one_image)},
                               {"estimate", norm_json(e.estimate)}});
            outcome.csv += csv_number(e.epsilon) + "," + csv_number(e.one_image.total()) + "," +
                           csv_number(e.one_image_sup) + "," + csv_number(e.estimate.estimate) + "\n";
        }
        report["entries"] = std::move(entries);
        report["sup_one_norm"] = t.sup_one_norm;
        report["sup_estimate"] = t.sup_estimate;
        report["sup_estimate_index"] = t.sup_estimate_index;
        report["one_index"] = t.one_index;
        report["s3"] = {{"annulus", annulus_json(t.s3.annulus)},
                        {"size_constant", t.s3.size_constant},
                        {"growth_constant", t.s3.growth_constant},
                        {"sup_one_image", t.s3.sup_one_image},
                        {"bound", t.s3.bound},
                        {"holds", t.s3.holds}};
        ok = t.s3.holds && finite(t.sup_estimate) && finite(t.sup_one_norm);
        if (!t.s3.holds) {
            outcome.messages.push_back("annulus bound assembled from T_eps 1 fails");
        }
        break;
    }
    case nd::TheoremId::T3: {
        const auto t = nd::verify_theorem3(space, kernel, config.beta,
                                           resolve_family(config, space, config.beta), config.r0);
        report["annulus"] = annulus_json(t.annulus);
        report["s4"] = {{"r0", t.s4.r0},
                        {"values", complex_list(t.s4.values)},
                        {"epsilon_star", t.s4.epsilon_star}};
        report["one_image"] = lip_json(t.one_image);
        report["estimate"] = norm_json(t.estimate);
        report["one_index"] = t.one_index;
        bool s4_finite = true;
        for (const auto v : t.s4.values) {
            s4_finite = s4_finite && finite(v.real()) && finite(v.imag());
        }
        ok = finite(t.annulus.max_modulus) && s4_finite && finite(t.estimate.estimate);
        outcome.csv = ratios_csv(t.estimate);
        break;
    }
    case nd::TheoremId::T4: {
        const auto family = resolve_family(config, space, config.beta);
        if (family.empty()) {
            throw UsageError("theorem 4 needs --count >= 1");
        }
        const auto t = nd::verify_theorem4(space, kernel, config.beta, family);
        report["estimate"] = norm_json(t.estimate);
        ok = finite(t.estimate.estimate);
        outcome.csv = ratios_csv(t.estimate);
        break;
    }
    }
    report["pass"] = ok;
    outcome.report = std::move(report);
    outcome.exit_code = ok ? kExitPass : kExitFailure;
    return outcome;
}

Outcome verify_krein(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config);
    const nd::KernelSpec kernel = resolve_kernel(config, space, "");
    const auto grid = resolve_grid(config, *space);
    const auto family =
        nd::with_constant_one(space, resolve_family(config, space, config.beta));
    const auto krein = nd::krein_check(space, kernel, config.beta, grid, family, config.tolerance);

    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);
    report["kernel"] = kernel.describe();
    Json entries = Json::array();
    outcome.csv = "epsilon,c_a,c_b,l2_norm,bound,holds\n";
    for (const auto& e : krein.entries) {
        entries.push_back({{"epsilon", e.epsilon},
                           {"c_a", e.c_a},
                           {"c_b", e.c_b},
                           {"l2_norm", e.l2_norm},
                           {"bound", e.bound},
                           {"holds", e.holds},
                           {"used_oracle", e.used_oracle}});
        outcome.csv += csv_number(e.epsilon) + "," + csv_number(e.c_a) + "," + csv_number(e.c_b) +
                       "," + csv_number(e.l2_norm) + "," + csv_number(e.bound) + "," +
                       (e.holds ? "true" : "false") + "\n";
    }
    report["entries"] = std::move(entries);
    report["soft_violations"] = krein.soft_violations;
    report["note"] =
        "C_A and C_B are empirical lower bounds; a violation can mean the test family is too "
        "small rather than a defect";
    report["pass"] = krein.soft_violations == 0;
    if (krein.soft_violations > 0) {
        outcome.exit_code = kExitSoftViolation;
        outcome.messages.push_back(std::to_string(krein.soft_violations) +
                                   " soft L2 bound violation(s)");
    }
    return outcome;
}

Outcome verify_composition(const RunConfig& config) {
    const nd::SpacePtr space = resolve_space(config);
    const auto family = resolve_family(config, space, config.beta);
    if (family.empty()) {
        throw UsageError("composition needs --count >= 1");
    }
    const auto comp = nd::verify_composition(space, config.alpha, config.beta, family, config.gamma);

    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    report["space"] = space_summary(*space);
    report["i_alpha_one"] = comp.i_alpha_one ? lip_json(*comp.i_alpha_one) : Json(nullptr);
    auto entry_json = [](const nd::CompositionEntry& entry) {
        Json doc;
        doc["run"] = entry.run;
        doc["gate_failures"] = entry.gate_failures;
        doc["estimate"] = entry.run ? norm_json(entry.estimate) : Json(nullptr);
        return doc;
    };
    report["d_after_i"] = entry_json(comp.d_after_i);
    report["i_after_d"] = entry_json(comp.i_after_d);
    const bool any = comp.d_after_i.run || comp.i_after_d.run;
    report["pass"] = any;
    outcome.csv = "composition,index,ratio\n";
    for (auto [label, entry] : {std::pair{"d_after_i", &comp.d_after_i},
                                std::pair{"i_after_d", &comp.i_after_d}}) {
        if (!entry->run) {
            continue;
        }
        for (std::size_t i = 0; i < entry->estimate.ratios.size(); ++i) {
            outcome.csv += std::string(label) + "," + std::to_string(i) + "," +
                           csv_number(entry->estimate.ratios[i]) + "\n";
        }
    }
    if (!any) {
        outcome.exit_code = kExitFailure;
        outcome.messages.push_back("no composition passes its hypothesis gate");
    }
    return outcome;
}

std::string checksum(const nd::SampledFunction& f) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const auto v : f.values()) {
        for (const double part : {v.real(), v.imag()}) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &part, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                hash ^= (bits >> (8 * b)) & 0xffu;
                hash *= 0x100000001b3ull;
            }
        }
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

Outcome bench(const RunConfig& config) {
    if (config.bench_sizes.empty() || config.bench_threads.empty() || config.repeats < 1) {
        throw UsageError("bench needs sizes, thread counts and --repeats >= 1");
    }
    const std::size_t saved_threads = nd::thread_count();
    Outcome outcome;
    Json& report = outcome.report = report_header(config);
    Json rows = Json::array();
    bool consistent = true;
    outcome.csv = "points,threads,checksum\n";
    outcome.timings_csv = "points,threads,repeat,seconds\n";
    for (const long size : config.bench_sizes) {
        const nd::SpacePtr space = nd::builtin_space(nd::BuiltinKind::UniformInterval, size);
        const auto kernel = nd::KernelSpec::riesz_fractional(space->n(), config.alpha, config.gamma);
        const auto f = nd::distance_power(space, 0, config.beta);
        std::string reference;
        for (const long threads : config.bench_threads) {
            if (threads < 1) {
                throw UsageError("thread counts must be positive");
            }
            nd::set_thread_count(static_cast<std::size_t>(threads));
            std::string sum;
            for (long r = 0; r < config.repeats; ++r) {
                const auto start = std::chrono::steady_clock::now();
                const auto result = nd::apply_fractional(kernel, f);
                const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
                sum = checksum(result.output);
                outcome.timings_csv += std::to_string(size) + "," + std::to_string(threads) + "," +
                                       std::to_string(r) + "," + csv_number(took.count()) + "\n";
            }
            if (reference.empty()) {
                reference = sum;
            }
            consistent = consistent && sum == reference;
            rows.push_back({{"points", size}, {"threads", threads}, {"checksum", sum}});
            outcome.csv += std::to_string(size) + "," + std::to_string(threads) + "," + sum + "\n";
        }
    }
    nd::set_thread_count(saved_threads);
    report["rows"] = std::move(rows);
    report["consistent_across_threads"] = consistent;
    report["pass"] = consistent;
    if (!consistent) {
        outcome.exit_code = kExitFailure;
        outcome.messages.push_back("checksums differ across thread counts");
    }
    return outcome;
}

Outcome replay(const RunConfig& config) {
    if (config.report_file.empty()) {
        throw UsageError("replay needs --report FILE");
    }
    const Json original = nd::read_json_file(config.report_file);
    if (!original.contains("config")) {
        throw nd::SchemaError("report has no embedded config");
    }
    const RunConfig embedded = config_from_json(original["config"]);
    if (embedded.verb == "replay") {
        throw UsageError("cannot replay a replay report");
    }
    const Outcome again = execute(embedded);
    const bool identical = again.report.dump(2) == original.dump(2);
    Outcome outcome;
    outcome.report = report_header(config);
    outcome.report["replayed"] = embedded.verb;
    outcome.report["identical"] = identical;
    outcome.report["pass"] = identical;
    outcome.csv = "replayed,identical\n" + embedded.verb + "," + (identical ? "true" : "false") + "\n";
    if (!identical) {
        outcome.exit_code = kExitFailure;
        outcome.messages.push_back("replayed report differs from the original");
    }
    return outcome;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string resolve_output_path(const std::string& path) {
    const std::filesystem::path p(path);
    const char* dir = std::getenv("ND_OUTPUT_DIR");
    if (p.is_relative() && dir != nullptr && *dir != '\0') {
        return (std::filesystem::path(dir) / p).string();
    }
    return path;
}

}  // namespace

Json config_to_json(const RunConfig& c) {
    Json doc;
    doc["verb"] = c.verb;
    doc["space_file"] = c.space_file;
    doc["builtin"] = c.builtin;
    doc["kind"] = c.kind;
    doc["size"] = c.size;
    doc["n"] = optional_json(c.n);
    doc["alpha"] = c.alpha;
    doc["beta"] = c.beta;
    doc["gamma"] = c.gamma;
    doc["delta"] = c.delta;
    doc["r_min"] = optional_json(c.r_min);
    doc["epsilon"] = optional_json(c.epsilon);
    doc["r0"] = optional_json(c.r0);
    doc["tolerance"] = c.tolerance;
    doc["triple_budget"] = c.triple_budget;
    doc["kernel"] = c.kernel;
    doc["table_file"] = c.table_file;
    doc["op"] = c.op;
    doc["function_file"] = c.function_file;
    doc["function_index"] = optional_json(c.function_index);
    doc["constant"] = c.constant;
    doc["x0"] = optional_json(c.x0);
    doc["family"] = c.family;
    doc["count"] = c.count;
    doc["seed"] = c.seed;
    doc["grid_count"] = c.grid_count;
    doc["theorem"] = c.theorem;
    doc["bench_sizes"] = c.bench_sizes;
    doc["bench_threads"] = c.bench_threads;
    doc["repeats"] = c.repeats;
    doc["report_file"] = c.report_file;
    return doc;
}

RunConfig config_from_json(const Json& doc) {
    if (!doc.is_object()) {
        throw nd::SchemaError("config must be an object");
    }
    RunConfig c;
    try {
        read_field(doc, "verb", c.verb);
        read_field(doc, "space_file", c.space_file);
        read_field(doc, "builtin", c.builtin);
        read_field(doc, "kind", c.kind);
        read_field(doc, "size", c.size);
        c.n = optional_from<double>(doc, "n");
        read_field(doc, "alpha", c.alpha);
        read_field(doc, "beta", c.beta);
        read_field(doc, "gamma", c.gamma);
        read_field(doc, "delta", c.delta);
        c.r_min = optional_from<double>(doc, "r_min");
        c.epsilon = optional_from<double>(doc, "epsilon");
        c.r0 = optional_from<double>(doc, "r0");
        read_field(doc, "tolerance", c.tolerance);
        read_field(doc, "triple_budget", c.triple_budget);
        read_field(doc, "kernel", c.kernel);
        read_field(doc, "table_file", c.table_file);
        read_field(doc, "op", c.op);
        read_field(doc, "function_file", c.function_file);
        c.function_index = optional_from<long>(doc, "function_index");
        read_field(doc, "constant", c.constant);
        c.x0 = optional_from<long>(doc, "x0");
        read_field(doc, "family", c.family);
        read_field(doc, "count", c.count);
        read_field(doc, "seed", c.seed);
        read_field(doc, "grid_count", c.grid_count);
        read_field(doc, "theorem", c.theorem);
        read_field(doc, "bench_sizes", c.bench_sizes);
        read_field(doc, "bench_threads", c.bench_threads);
        read_field(doc, "repeats", c.repeats);
        read_field(doc, "report_file", c.report_file);
    } catch (const nlohmann::json::exception& e) {
        throw nd::SchemaError(std::string("malformed config: ") + e.what());
    }
    return c;
}

Outcome execute(const RunConfig& config) {
    if (config.verb == "space gen") return space_gen(config);
    if (config.verb == "space check") return space_check(config);
    if (config.verb == "kernel check") return kernel_check(config);
    if (config.verb == "op apply") return op_apply(config);
    if (config.verb == "verify lemma") return verify_lemma(config);
    if (config.verb == "verify theorem") return verify_theorem(config);
    if (config.verb == "verify krein") return verify_krein(config);
    if (config.verb == "verify composition") return verify_composition(config);
    if (config.verb == "bench") return bench(config);
    if (config.verb == "replay") return replay(config);
    throw UsageError("unknown command '" + config.verb + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"ndtool: integral operators on finite metric measure spaces"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig c;
    std::size_t threads = 1;
    std::string emit = "json";
    std::string out_path;
    std::string timings_path;
    app.add_option("--threads", threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_option("--emit", emit, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out_path, "output file (relative paths go under $ND_OUTPUT_DIR)");

    auto add_space = [&](CLI::App* sub) {
        sub->add_option("--space", c.space_file, "space file");
        sub->add_option("--builtin", c.builtin, "builtin space kind:param, e.g. cantor4:3");
    };
    auto add_kernel = [&](CLI::App* sub) {
        sub->add_option("--kernel", c.kernel,
                        "riesz_fractional|riesz_singular|riesz_hypersingular|odd_circle|"
                        "tapered_hilbert|random_table|table");
        sub->add_option("--table", c.table_file, "table kernel file");
        sub->add_option("--alpha", c.alpha);
        sub->add_option("--gamma", c.gamma);
        sub->add_option("--n", c.n, "dimension n (default: the space's)");
    };
    auto add_family = [&](CLI::App* sub) {
        sub->add_option("--family", c.family, "distance_powers|coordinate_waves|anchored_mix");
        sub->add_option("--count", c.count, "test functions (1 is appended where relevant)");
        sub->add_option("--seed", c.seed);
    };

    CLI::App* space = app.add_subcommand("space", "generate or check spaces")->require_subcommand(1);
    CLI::App* space_gen_cmd = space->add_subcommand("gen", "write a builtin space file");
    space_gen_cmd->add_option("--kind", c.kind, "uniform_interval|uniform_circle|cantor4|islands")
        ->required();
    space_gen_cmd->add_option("--size,--points,--generation,--levels", c.size, "size parameter")
        ->required();
    CLI::App* space_check_cmd = space->add_subcommand("check", "metric axioms and growth scan");
    add_space(space_check_cmd);
    space_check_cmd->add_option("--n", c.n);
    space_check_cmd->add_option("--r-min", c.r_min);
    space_check_cmd->add_option("--triple-budget", c.triple_budget);

    CLI::App* kernel = app.add_subcommand("kernel", "kernel conditions")->require_subcommand(1);
    CLI::App* kernel_check_cmd = kernel->add_subcommand("check", "size and smoothness constants");
    add_space(kernel_check_cmd);
    add_kernel(kernel_check_cmd);
    kernel_check_cmd->add_option("--epsilon", c.epsilon, "check the truncated kernel");
    kernel_check_cmd->add_option("--seed", c.seed, "seed for random_table");

    CLI::App* op = app.add_subcommand("op", "operators")->require_subcommand(1);
    CLI::App* op_apply_cmd = op->add_subcommand("apply", "apply an operator to a function");
    add_space(op_apply_cmd);
    add_kernel(op_apply_cmd);
    add_family(op_apply_cmd);
    op_apply_cmd
        ->add_option("--op", c.op,
                     "fractional|truncated|pv|hypersingular|normalized_fractional|normalized_pv")
        ->required();
    op_apply_cmd->add_option("--epsilon", c.epsilon);
    op_apply_cmd->add_option("--x0", c.x0, "normalization point");
    op_apply_cmd->add_option("--function", c.function_file, "function file");
    op_apply_cmd->add_option("--index", c.function_index, "use member INDEX of the test family");
    op_apply_cmd->add_option("--constant", c.constant, "constant input (default 1)");
    op_apply_cmd->add_option("--beta", c.beta, "family exponent");

    CLI::App* verify = app.add_subcommand("verify", "lemma, theorem and bridge checks")
                           ->require_subcommand(1);
    CLI::App* lemma_cmd = verify->add_subcommand("lemma", "ball-sum bounds with explicit constants");
    add_space(lemma_cmd);
    lemma_cmd->add_option("--n", c.n);
    lemma_cmd->add_option("--delta", c.delta);
    lemma_cmd->add_option("--r-min", c.r_min);

    CLI::App* theorem_cmd = verify->add_subcommand("theorem", "empirical operator norms");
    add_space(theorem_cmd);
    add_kernel(theorem_cmd);
    add_family(theorem_cmd);
    theorem_cmd->add_option("--id", c.theorem, "1, 2, 3 or 4")->required();
    theorem_cmd->add_option("--beta", c.beta);
    theorem_cmd->add_option("--grid-count", c.grid_count);
    theorem_cmd->add_option("--r0", c.r0);

    CLI::App* krein_cmd = verify->add_subcommand("krein", "L2 bound from Lambda_beta bounds");
    add_space(krein_cmd);
    add_kernel(krein_cmd);
    add_family(krein_cmd);
    krein_cmd->add_option("--beta", c.beta);
    krein_cmd->add_option("--grid-count", c.grid_count);
    krein_cmd->add_option("--tolerance", c.tolerance);

    CLI::App* composition_cmd = verify->add_subcommand("composition", "D^alpha I_alpha and I_alpha D^alpha");
    add_space(composition_cmd);
    add_family(composition_cmd);
    composition_cmd->add_option("--alpha", c.alpha);
    composition_cmd->add_option("--beta", c.beta);
    composition_cmd->add_option("--gamma", c.gamma);

    CLI::App* bench_cmd = app.add_subcommand("bench", "time operator application");
    bench_cmd->add_option("--sizes", c.bench_sizes)->delimiter(',');
    bench_cmd->add_option("--thread-list", c.bench_threads)->delimiter(',');
    bench_cmd->add_option("--repeats", c.repeats);
    bench_cmd->add_option("--alpha", c.alpha);
    bench_cmd->add_option("--beta", c.beta);
    bench_cmd->add_option("--gamma", c.gamma);
    bench_cmd->add_option("--timings", timings_path, "timing CSV (default: OUT.timings.csv)");

    CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a report from its embedded config");
    replay_cmd->add_option("--report", c.report_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    const std::pair<CLI::App*, const char*> verbs[] = {
        {space_gen_cmd, "space gen"},      {space_check_cmd, "space check"},
        {kernel_check_cmd, "kernel check"}, {op_apply_cmd, "op apply"},
        {lemma_cmd, "verify lemma"},       {theorem_cmd, "verify theorem"},
        {krein_cmd, "verify krein"},       {composition_cmd, "verify composition"},
        {bench_cmd, "bench"},              {replay_cmd, "replay"}};
    for (const auto& [sub, name] : verbs) {
        if (sub->parsed()) {
            c.verb = name;
        }
    }

    try {
        nd::set_thread_count(threads);
        Outcome outcome = execute(c);
        for (const auto& m : outcome.messages) {
            err << "ndtool: " << m << "\n";
        }
        const std::string text = emit == "csv" ? outcome.csv : outcome.report.dump(2) + "\n";
        if (out_path.empty()) {
            out << text;
        } else {
            const std::string path = resolve_output_path(out_path);
            nd::write_text_file(path, text);
            Json meta;
            meta["report"] = std::filesystem::path(path).filename().string();
            meta["timestamp"] = utc_timestamp();
            meta["threads"] = threads;
            nd::write_text_file(path + ".meta.json", meta.dump(2) + "\n");
        }
        if (!outcome.timings_csv.empty()) {
            if (!timings_path.empty()) {
                nd::write_text_file(resolve_output_path(timings_path), outcome.timings_csv);
            } else if (!out_path.empty()) {
                nd::write_text_file(resolve_output_path(out_path) + ".timings.csv",
                                    outcome.timings_csv);
            } else {
                err << outcome.timings_csv;
            }
        }
        return outcome.exit_code;
    } catch (const UsageError& e) {
        err << "ndtool: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const nd::FileError& e) {
        err << "ndtool: " << e.what() << "\n";
        return kExitFileError;
    } catch (const std::exception& e) {
        err << "ndtool: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace ndcli
