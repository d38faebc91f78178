#include "tensorgen/manifest.hpp"

#include <cstdlib>
#include <ctime>

#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(std::string("manifest is missing the '") + key + "' field");
  return *it;
}

std::vector<Index> index_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw IoError(std::string("manifest field '") + key + "' must be an array");
  std::vector<Index> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw IoError(std::string("manifest field '") + key + "' must hold integers");
    out.push_back(v.get<Index>());
  }
  return out;
}

}  // namespace

nlohmann::json effect_record_to_json(const EffectRecord& record) {
  nlohmann::json j;
  j["kind"] = record.kind;
  j["params"] = record.params;
  if (!record.touched.is_null()) j["touched"] = record.touched;
  if (!record.achieved.is_null()) j["achieved"] = record.achieved;
  return j;
}

EffectRecord effect_record_from_json(const nlohmann::json& j) {
  EffectRecord record;
  record.kind = require_field(j, "kind").get<std::string>();
  record.params = require_field(j, "params");
  if (j.contains("touched")) record.touched = j.at("touched");
  if (j.contains("achieved")) record.achieved = j.at("achieved");
  return record;
}

nlohmann::json manifest_to_json(const Manifest& manifest) {
  nlohmann::json j;
  j["format_version"] = manifest.format_version;
  j["rng_algorithm"] = manifest.rng_algorithm;
  j["seed"] = manifest.seed;
  j["shape"] = manifest.shape;
  j["model_type"] = manifest.model_type;
  if (manifest.model_type == "cp" && manifest.ranks.size() == 1)
    j["rank"] = manifest.ranks.front();
  else
    j["ranks"] = manifest.ranks;
  if (manifest.temporal_mode) j["temporal_mode"] = *manifest.temporal_mode;
  j["factors"] = manifest.factors;
  j["weights"] = manifest.weights;
  j["effects"] = nlohmann::json::array();
  for (const EffectRecord& record : manifest.effects)
    j["effects"].push_back(effect_record_to_json(record));
  j["representation"] = manifest.representation;
  j["created"] = manifest.created;
  if (!manifest.overrides.is_null() && !manifest.overrides.empty())
    j["overrides"] = manifest.overrides;
  return j;
}

Manifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IoError("manifest must be a JSON object");
  Manifest manifest;
  manifest.format_version = require_field(j, "format_version").get<std::string>();
  if (manifest.format_version != kFormatVersion)
    throw IoError("unsupported manifest format_version '" + manifest.format_version +
                  "' (this build reads version " + kFormatVersion + ")");
  manifest.rng_algorithm = require_field(j, "rng_algorithm").get<std::string>();
  manifest.seed = require_field(j, "seed").get<std::uint64_t>();
  manifest.shape = index_list(require_field(j, "shape"), "shape");
  manifest.model_type = require_field(j, "model_type").get<std::string>();
  if (manifest.model_type != "cp" && manifest.model_type != "tucker")
    throw IoError("manifest model_type must be 'cp' or 'tucker'");
  if (j.contains("rank"))
    manifest.ranks = {require_field(j, "rank").get<Index>()};
  else
    manifest.ranks = index_list(require_field(j, "ranks"), "ranks");
  if (j.contains("temporal_mode")) manifest.temporal_mode = j.at("temporal_mode").get<Index>();
  manifest.factors = require_field(j, "factors");
  manifest.weights = require_field(j, "weights");
  for (const auto& e : require_field(j, "effects"))
    manifest.effects.push_back(effect_record_from_json(e));
  manifest.representation = require_field(j, "representation").get<std::string>();
  manifest.created = require_field(j, "created").get<std::string>();
  if (j.contains("overrides")) manifest.overrides = j.at("overrides");
  return manifest;
}

std::string current_timestamp() {
  std::time_t now = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(epoch, &end, 10);
    if (end == epoch || *end != '\0' || parsed < 0)
      throw ParameterError("SOURCE_DATE_EPOCH must be a non-negative integer");
    now = static_cast<std::time_t>(parsed);
  } else {
    now = std::time(nullptr);
  }
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace tensorgen
