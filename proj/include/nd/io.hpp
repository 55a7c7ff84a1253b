#pragma once

#include <string>

#include <json.hpp>

#include "nd/kernels.hpp"
#include "nd/lipschitz.hpp"
#include "nd/space.hpp"

namespace nd {

/// Insertion-ordered JSON, so emitted documents keep a stable, readable layout.
/// Doubles are written in shortest round-trip form.
using Json = nlohmann::ordered_json;

Json space_to_json(const MetricMeasureSpace& space);
/// Validates the schema and, unless `check_axioms` is false, the metric axioms
/// (exhaustive up to 512 points).
SpacePtr space_from_json(const Json& document, bool check_axioms = true);

Json function_to_json(const SampledFunction& f);
SampledFunction function_from_json(const Json& document, const SpacePtr& space);

/// {space_name, class, n, gamma, alpha?, entries, diagonal_ignored}.
Json kernel_table_to_json(const KernelSpec& kernel);
/// Fields other than entries are optional; missing ones default to a
/// singular kernel with the space's n and gamma = 1.
KernelSpec kernel_table_from_json(const Json& document, const MetricMeasureSpace& space);

Json complex_to_json(Complex value);
Complex complex_from_json(const Json& value);

/// FNV-1a 64 of the canonical space document, as 16 hex digits.
std::string space_hash(const MetricMeasureSpace& space);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

SpacePtr load_space(const std::string& path, bool check_axioms = true);
void save_space(const std::string& path, const MetricMeasureSpace& space);

}  // namespace nd
