#pragma once

#include "bsl/circle_map.hpp"
#include "bsl/combinatorics.hpp"
#include "json.hpp"

#include <string>

namespace bsl::io {

using json = nlohmann::ordered_json;

// Serialized forms use 1-based labels.
json to_json(const Combinatorics& c);
Combinatorics combinatorics_from_json(const json& j);

json to_json(const CircleMap& m);
CircleMap map_from_json(const json& j);

json to_json(const ValidationReport& r);

json read_file(const std::string& path);
void write_file(const std::string& path, const json& j);

} // namespace bsl::io
