#pragma once

#include <string>

#include <json.hpp>

namespace kdv {

/// Number formatting shared by every artifact: 17 significant digits.
std::string format_number(double v);

/// Two-space indented JSON with floats in format_number() form and object
/// keys sorted. Identical input gives identical bytes.
std::string dump_json(const nlohmann::json& j);

}  // namespace kdv
