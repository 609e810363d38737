#pragma once

#include <json.hpp>
#include <string>

#include "nlqc/qcore.hpp"

namespace nlqc {
namespace serialize {

using nlohmann::json;

// Matrix schema: { "dims": [..], "rows": [[[re, im], ..], ..] }
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// POVM schema: { "elements": [matrix, ..], "labels": [..] }
json povm_to_json(const Povm& p);
Povm povm_from_json(const json& j);

json load_json_file(const std::string& path);
// Atomic write: temp file in the target directory, then rename.
void write_json_atomic(const std::string& path, const json& j);

}  // namespace serialize
}  // namespace nlqc
