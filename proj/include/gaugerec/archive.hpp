#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaugerec/field.hpp"

namespace gaugerec {

using json = nlohmann::json;

json grid_to_json(const Grid& g);
Grid grid_from_json(const json& j);

/// Field archive: {"grid": {...}, "kind": "scalar"|"vector"|"symtensor", "values": [[re, im], ...]}
/// with values flattened node-major, components innermost.
json field_to_json(const Field& f);
ScalarField scalar_from_json(const json& j);
VectorField vector_from_json(const json& j);
SymTensorField symtensor_from_json(const json& j);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

void write_archive(const std::filesystem::path& path, const Field& f);
ScalarField read_scalar_archive(const std::filesystem::path& path);
VectorField read_vector_archive(const std::filesystem::path& path);
SymTensorField read_symtensor_archive(const std::filesystem::path& path);

/// One row per node: coordinates, then re/im of each component.
void write_csv(const std::filesystem::path& path, const Field& f, const std::string& name = "f");

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);
json matrix_to_json(const SmallMat& m);
SmallMat matrix_from_json(const json& j);
json vector_to_json(const SmallVec& v);
SmallVec vector_from_json_value(const json& j);

}  // namespace gaugerec
