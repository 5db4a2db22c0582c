#pragma once

#include <string>
#include <string_view>

#include "bcn/network.hpp"

namespace bcn {

enum class ModelFormat { table, formula };

// Parses a model in "bcn 1" table syntax or "bcn 1 formula" syntax.
// Throws ParseError (with line and column) on malformed input.
NetworkDef parse_model(std::string_view text);

// Table form is canonical: parse_model(serialize_model(net)) == net, and
// serializing the result again reproduces the same bytes.
std::string serialize_model(const NetworkDef& net, ModelFormat format = ModelFormat::table);

NetworkDef load_model(const std::string& path);
void save_model(const NetworkDef& net, const std::string& path, ModelFormat format = ModelFormat::table);

}  // namespace bcn
