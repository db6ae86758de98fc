#ifndef HEATGUIDE_JSON_CANONICAL_HPP
#define HEATGUIDE_JSON_CANONICAL_HPP

#include <json.hpp>

#include <string>

namespace heatguide {

/// Canonical JSON text: keys sorted, 2-space indent, floating-point values
/// at 17 significant digits via to_chars (locale-free). Identical values
/// always serialize to identical bytes, which is what the determinism
/// guarantees and the config hash rest on. Throws std::invalid_argument on
/// non-finite numbers.
std::string canonical_json_dump(const nlohmann::json& j);

/// FNV-1a 64-bit over the canonical serialization, as a fixed-width hex
/// string. Stable across platforms.
std::string canonical_json_hash(const nlohmann::json& j);

} // namespace heatguide

#endif
