#include "nd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nd/error.hpp"

namespace nd {

namespace {

const Json& field(const Json& document, const char* key) {
    if (!document.is_object()) {
        throw SchemaError("document must be an object");
    }
    const auto it = document.find(key);
    if (it == document.end()) {
        throw SchemaError(std::string("missing field '") + key + "'");
    }
    return *it;
}

double number(const Json& value, const std::string& what) {
    if (!value.is_number()) {
        throw SchemaError(what + " must be a number");
    }
    return value.get<double>();
}

std::vector<double> number_list(const Json& value, const std::string& what) {
    if (!value.is_array()) {
        throw SchemaError(what + " must be an array");
    }
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(number(value[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> number_matrix(const Json& value, const std::string& what) {
    if (!value.is_array()) {
        throw SchemaError(what + " must be an array of arrays");
    }
    std::vector<std::vector<double>> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(number_list(value[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string text(const Json& value, const std::string& what) {
    if (!value.is_string()) {
        throw SchemaError(what + " must be a string");
    }
    return value.get<std::string>();
}

Json matrix_json(const MetricMeasureSpace& space) {
    Json rows = Json::array();
    for (PointId x = 0; x < space.size(); ++x) {
        const auto row = space.distance_row(x);
        rows.push_back(Json(std::vector<double>(row.begin(), row.end())));
    }
    return rows;
}

}  // namespace

Json complex_to_json(Complex value) {
    return Json::array({value.real(), value.imag()});
}

Complex complex_from_json(const Json& value) {
    if (value.is_number()) {
        return {value.get<double>(), 0.0};
    }
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        throw SchemaError("complex value must be [re, im]");
    }
    return {value[0].get<double>(), value[1].get<double>()};
}

Json space_to_json(const MetricMeasureSpace& space) {
    Json doc;
    doc["name"] = space.name();
    doc["n"] = space.n();
    if (space.metric_source() == MetricSource::Euclidean) {
        doc["metric"] = "euclidean";
        doc["coords"] = space.all_coordinates();
    } else {
        doc["metric"] = "table";
        if (space.has_coordinates()) {
            doc["coords"] = space.all_coordinates();
        }
        doc["distances"] = matrix_json(space);
    }
    doc["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
    doc["h"] = space.h();
    return doc;
}

SpacePtr space_from_json(const Json& document, bool check_axioms) {
    const std::string name = text(field(document, "name"), "name");
    const double n = number(field(document, "n"), "n");
    const std::string metric = text(field(document, "metric"), "metric");
    std::vector<double> weights = number_list(field(document, "weights"), "weights");
    std::optional<double> h;
    if (document.contains("h") && !document["h"].is_null()) {
        h = number(document["h"], "h");
    }
    std::vector<std::vector<double>> coords;
    if (document.contains("coords") && !document["coords"].is_null()) {
        coords = number_matrix(document["coords"], "coords");
    }

    std::optional<MetricMeasureSpace> space;
    if (metric == "euclidean") {
        if (coords.empty()) {
            throw SchemaError("euclidean metric needs 'coords'");
        }
        space = MetricMeasureSpace::from_coordinates(name, std::move(coords), std::move(weights), n, h);
    } else if (metric == "table") {
        auto distances = number_matrix(field(document, "distances"), "distances");
        space = MetricMeasureSpace::from_table(name, std::move(distances), std::move(weights), n, h,
                                               std::move(coords));
    } else {
        throw SchemaError("metric must be 'euclidean' or 'table', got '" + metric + "'");
    }

    if (check_axioms) {
        const MetricReport axioms = check_metric_axioms(*space);
        if (!axioms.ok()) {
            throw MetricAxiomError(describe(axioms.violations.front()));
        }
    }
    return std::make_shared<const MetricMeasureSpace>(std::move(*space));
}

Json function_to_json(const SampledFunction& f) {
    Json doc;
    doc["space_name"] = f.space()->name();
    Json values = Json::array();
    for (const Complex v : f.values()) {
        values.push_back(complex_to_json(v));
    }
    doc["values"] = std::move(values);
    return doc;
}

SampledFunction function_from_json(const Json& document, const SpacePtr& space) {
    const std::string name = text(field(document, "space_name"), "space_name");
    if (name != space->name()) {
        throw SpaceMismatch("function belongs to space '" + name + "', not '" + space->name() + "'");
    }
    const Json& values = field(document, "values");
    if (!values.is_array()) {
        throw SchemaError("values must be an array");
    }
    std::vector<Complex> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        out.push_back(complex_from_json(v));
    }
    return SampledFunction(space, std::move(out));
}

Json kernel_table_to_json(const KernelSpec& kernel) {
    const std::size_t points = kernel.table_points();
    const auto& entries = kernel.table_entries();
    Json doc;
    doc["space_name"] = kernel.table_space_name();
    doc["class"] = to_string(kernel.kernel_class());
    doc["n"] = kernel.n();
    doc["gamma"] = kernel.gamma();
    if (kernel.kernel_class() != KernelClass::Singular) {
        doc["alpha"] = kernel.alpha();
    }
    Json rows = Json::array();
    for (std::size_t x = 0; x < points; ++x) {
        Json row = Json::array();
        for (std::size_t y = 0; y < points; ++y) {
            row.push_back(complex_to_json(entries[x * points + y]));
        }
        rows.push_back(std::move(row));
    }
    doc["entries"] = std::move(rows);
    doc["diagonal_ignored"] = true;
    return doc;
}

KernelSpec kernel_table_from_json(const Json& document, const MetricMeasureSpace& space) {
    const std::string name = text(field(document, "space_name"), "space_name");
    KernelClass kernel_class = KernelClass::Singular;
    if (document.contains("class")) {
        const std::string c = text(document["class"], "class");
        if (c == "fractional") {
            kernel_class = KernelClass::Fractional;
        } else if (c == "hypersingular") {
            kernel_class = KernelClass::Hypersingular;
        } else if (c != "singular") {
            throw SchemaError("unknown kernel class '" + c + "'");
        }
    }
    const double n = document.contains("n") ? number(document["n"], "n") : space.n();
    const double gamma = document.contains("gamma") ? number(document["gamma"], "gamma") : 1.0;
    const double alpha = document.contains("alpha") ? number(document["alpha"], "alpha") : 0.0;

    const Json& rows = field(document, "entries");
    if (!rows.is_array()) {
        throw SchemaError("entries must be an N x N array");
    }
    const std::size_t points = rows.size();
    std::vector<Complex> entries(points * points, 0.0);
    for (std::size_t x = 0; x < points; ++x) {
        if (!rows[x].is_array() || rows[x].size() != points) {
            throw SchemaError("entries row " + std::to_string(x) + " has wrong length");
        }
        for (std::size_t y = 0; y < points; ++y) {
            if (x != y) {
                entries[x * points + y] = complex_from_json(rows[x][y]);
            }
        }
    }
    KernelSpec kernel =
        KernelSpec::table(kernel_class, n, gamma, alpha, points, std::move(entries), name);
    kernel.check_space(space);
    return kernel;
}

std::string space_hash(const MetricMeasureSpace& space) {
    const std::string canonical = space_to_json(space).dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw FileError("error while reading '" + path + "'");
    }
    return buffer.str();
}

Json read_json_file(const std::string& path) {
    const std::string content = read_text_file(path);
    try {
        return Json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FileError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw FileError("error while writing '" + path + "'");
    }
}

SpacePtr load_space(const std::string& path, bool check_axioms) {
    return space_from_json(read_json_file(path), check_axioms);
}

void save_space(const std::string& path, const MetricMeasureSpace& space) {
    write_text_file(path, space_to_json(space).dump() + "\n");
}

}  // namespace nd
