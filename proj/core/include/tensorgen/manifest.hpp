#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorgen/tensor.hpp"

namespace tensorgen {

/// Bumped only on breaking layout changes; importers reject anything else.
inline constexpr const char* kFormatVersion = "1";

/// Engine plus seed-derivation scheme; part of the reproducibility contract.
inline constexpr const char* kRngAlgorithm = "xoshiro256++/splitmix64";

/// One applied effect, in application order: the requested parameters, the
/// exact coordinates it touched, and the quantities it actually achieved
/// (noise sigma, norms, classification, ...).
struct EffectRecord {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json touched;
  nlohmann::json achieved;
};

/// Machine-readable ground truth stored next to every exported dataset.
/// Holds everything needed to regenerate the dataset bit-identically:
/// seed, generator specs, and the ordered effect log.
struct Manifest {
  std::string format_version = kFormatVersion;
  std::string rng_algorithm = kRngAlgorithm;
  std::uint64_t seed = 0;
  std::vector<Index> shape;
  std::string model_type = "cp";  // "cp" or "tucker"
  std::vector<Index> ranks;       // one entry for cp, one per mode for tucker
  std::optional<Index> temporal_mode;
  nlohmann::json factors = nlohmann::json::array();  // per-mode generator specs
  nlohmann::json weights = nlohmann::json::object(); // weight / core spec
  std::vector<EffectRecord> effects;
  std::string representation = "dense";  // "dense" or "sparse"
  std::string created;                   // RFC 3339 UTC export timestamp
  nlohmann::json overrides;              // command-line overrides, if any
};

nlohmann::json effect_record_to_json(const EffectRecord& record);
EffectRecord effect_record_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const Manifest& manifest);

/// Throws IoError on missing fields or an unrecognized format_version.
Manifest manifest_from_json(const nlohmann::json& j);

/// Current UTC time as RFC 3339. Honors the SOURCE_DATE_EPOCH environment
/// variable (seconds since the epoch) so exports can be made byte-reproducible.
std::string current_timestamp();

}  // namespace tensorgen
