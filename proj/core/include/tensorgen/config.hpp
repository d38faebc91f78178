#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorgen/factor_gen.hpp"
#include "tensorgen/manifest.hpp"
#include "tensorgen/temporal_gen.hpp"
#include "tensorgen/tensor.hpp"

namespace tensorgen {

enum class FileFormat { csv, hdf5 };

std::string to_string(FileFormat format);
FileFormat file_format_from_string(const std::string& name);

/// Deduce the format from a path's extension (.csv / .h5 / .hdf5).
FileFormat file_format_from_path(const std::string& path);

// ---------------------------------------------------------------------------
// One mode of the generated tensor: either a random factor method or one of
// the temporal constructions.

enum class ModeKind { random, periodic, seasonal, streaming };

/// One column of a seasonal temporal factor. The pattern is materialized at
/// parse time; the preset name (if one was used) is kept for the manifest.
struct SeasonalColumn {
  std::string preset;  // empty when an explicit pattern vector was given
  SeasonalSpec spec;
};

struct StreamingConfig {
  double epsilon = 0.1;
  FactorParams init{FactorMethod::multi_normal};  // generates row 0
};

struct ModeConfig {
  ModeKind kind = ModeKind::random;
  FactorParams random{};               // kind == random
  std::vector<WaveSpec> waves;         // kind == periodic, one per column
  std::vector<SeasonalColumn> cycles;  // kind == seasonal, one per column
  StreamingConfig streaming{};         // kind == streaming
};

struct WeightsConfig {
  WeightMethod method = WeightMethod::ones;
  std::vector<double> values;  // WeightMethod::custom only
};

struct ModelConfig {
  std::string type = "cp";     // "cp" or "tucker"
  std::vector<Index> ranks;    // one entry for cp, one per mode for tucker
  WeightsConfig weights{};
};

// ---------------------------------------------------------------------------
// Effects are listed in application order and partition into three pipeline
// stages. A config must list them stage-monotonically (factor effects, then
// model effects, then tensor effects); poisson_count can only appear last.

enum class EffectStage { factor, model, tensor };

struct EffectConfig {
  std::string kind;
  EffectStage stage = EffectStage::factor;
  nlohmann::json params = nlohmann::json::object();
};

/// The pipeline stage a given effect kind runs in; unknown kinds throw.
EffectStage effect_stage(const std::string& kind);

struct OutputConfig {
  std::string path;  // empty: generation only, no export
  std::optional<FileFormat> format;
  bool overwrite = false;
};

/// A fully validated, fully materialized description of one dataset.
struct GenConfig {
  std::uint64_t seed = 0;
  Shape shape;
  ModelConfig model{};
  std::optional<Index> temporal_mode;
  std::vector<ModeConfig> modes;  // one per mode
  std::vector<EffectConfig> effects;
  std::string representation = "dense";  // "dense" or "sparse"
  OutputConfig output{};

  /// Column count of mode n's factor: the CP rank, or the Tucker mode rank.
  Index mode_columns(Index mode) const;
};

/// Parse and validate a config document. Rejects unknown keys and
/// out-of-range values with ConfigError naming the offending field.
GenConfig parse_config(const nlohmann::json& j);

/// Read a JSON file and parse_config it.
GenConfig load_config(const std::string& path);

/// Serialize with every default made explicit. parse_config(config_to_json(c))
/// reproduces c.
nlohmann::json config_to_json(const GenConfig& config);

/// Rebuild the generating config from a manifest (for replay). The output
/// section is empty; callers choose where the replayed dataset goes.
GenConfig config_from_manifest(const Manifest& manifest);

/// Parse one non-temporal factor spec ({"method": ..., ...parameters}).
/// `columns` is the width of the matrix the spec will generate.
FactorParams factor_params_from_json(const nlohmann::json& j, const std::string& path,
                                     Index columns);
nlohmann::json factor_params_to_json(const FactorParams& params, Index columns);

}  // namespace tensorgen
