#pragma once

#include <string>

#include <json.hpp>

#include "ww/core/types.h"

namespace ww {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kInstanceSchemaVersion = 1;
inline constexpr int kPlanSchemaVersion = 1;

// Canonical UTF-8 JSON with stable key order. Seeds are decimal strings so
// 64-bit values survive consumers that parse numbers as doubles.
OrderedJson instance_to_json(const Instance& instance);
Instance instance_from_json(const OrderedJson& j);

OrderedJson action_to_json(const Action& a);
Action action_from_json(const OrderedJson& j);

OrderedJson plan_to_json(const Plan& plan);
Plan plan_from_json(const OrderedJson& j);

OrderedJson difficulty_to_json(const DifficultyVector& d);
DifficultyVector difficulty_from_json(const OrderedJson& j);

OrderedJson ladder_to_json(const DifficultyLadder& ladder);
DifficultyLadder ladder_from_json(const OrderedJson& j);

std::string dump_canonical(const OrderedJson& j);  // 2-space indent + trailing newline

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::uint64_t parse_seed(const std::string& s);
std::string seed_to_string(std::uint64_t seed);

}  // namespace ww
