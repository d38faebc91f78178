#include "tensorgen/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace {

// Wraps one JSON object: typed field access with path-prefixed errors plus
// detection of unknown keys.
class Fields {
 public:
  Fields(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be a JSON object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(key_path(key), "is required");
    return *it;
  }

  std::string get_string(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "must be a string");
    return v.get<std::string>();
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
  }

  bool get_bool_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key), "must be a boolean");
    return v.get<bool>();
  }

  double get_number(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(key_path(key), "must be a number");
    return v.get<double>();
  }

  double get_number_or(const std::string& key, double fallback) {
    return has(key) ? get_number(key) : fallback;
  }

  Index get_index(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "must be an integer");
    return v.get<Index>();
  }

  Index get_index_or(const std::string& key, Index fallback) {
    return has(key) ? get_index(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError(key_path(key), "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> get_number_list(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key_path(key), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  /// Call last: rejects any key not consumed by the accessors above.
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown field");
  }

  const nlohmann::json& json() const { return j_; }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// Factor specs (non-temporal methods)

FactorParams factor_params_from_json(const nlohmann::json& j, const std::string& path,
                                     Index columns) {
  Fields f(j, path);
  FactorParams params;
  const std::string method = f.get_string("method");
  try {
    params.method = factor_method_from_string(method);
  } catch (const ParameterError&) {
    throw ConfigError(f.key_path("method"), "unknown factor method '" + method + "'");
  }
  switch (params.method) {
    case FactorMethod::gamma:
      params.gamma.mu = f.get_number_or("mu", params.gamma.mu);
      params.gamma.sigma2 = f.get_number_or("sigma2", params.gamma.sigma2);
      params.gamma.theta = f.get_number_or("theta", params.gamma.theta);
      require_finite(params.gamma.mu, f.key_path("mu"));
      require_finite(params.gamma.sigma2, f.key_path("sigma2"));
      require_finite(params.gamma.theta, f.key_path("theta"));
      if (params.gamma.sigma2 < 0.0) throw ConfigError(f.key_path("sigma2"), "must be >= 0");
      if (params.gamma.theta <= 0.0) throw ConfigError(f.key_path("theta"), "must be > 0");
      break;
    case FactorMethod::multi_normal:
      if (f.has("mus")) params.mus = f.get_number_list("mus");
      if (f.has("sigmas")) params.sigmas = f.get_number_list("sigmas");
      if (!params.mus.empty() && static_cast<Index>(params.mus.size()) != columns)
        throw ConfigError(f.key_path("mus"), "needs one entry per column");
      if (!params.sigmas.empty() && static_cast<Index>(params.sigmas.size()) != columns)
        throw ConfigError(f.key_path("sigmas"), "needs one entry per column");
      for (double s : params.sigmas)
        if (!std::isfinite(s) || s < 0.0)
          throw ConfigError(f.key_path("sigmas"), "entries must be finite and >= 0");
      for (double m : params.mus) require_finite(m, f.key_path("mus"));
      break;
    default:
      break;  // uniform, orthogonal, stochastic, binary take no parameters
  }
  f.done();
  return params;
}

nlohmann::json factor_params_to_json(const FactorParams& params, Index columns) {
  nlohmann::json j;
  j["method"] = to_string(params.method);
  switch (params.method) {
    case FactorMethod::gamma:
      j["mu"] = params.gamma.mu;
      j["sigma2"] = params.gamma.sigma2;
      j["theta"] = params.gamma.theta;
      break;
    case FactorMethod::multi_normal: {
      j["mus"] = params.mus.empty() ? std::vector<double>(static_cast<std::size_t>(columns), 0.0)
                                    : params.mus;
      j["sigmas"] = params.sigmas.empty()
                        ? std::vector<double>(static_cast<std::size_t>(columns), 1.0)
                        : params.sigmas;
      break;
    }
    default:
      break;
  }
  return j;
}

namespace {

// ---------------------------------------------------------------------------
// Temporal specs

WaveSpec parse_wave(const nlohmann::json& j, const std::string& path) {
  Fields f(j, path);
  WaveSpec wave;
  const std::string waveform = f.get_string("waveform");
  try {
    wave.waveform = waveform_from_string(waveform);
  } catch (const ParameterError&) {
    throw ConfigError(f.key_path("waveform"), "unknown waveform '" + waveform + "'");
  }
  wave.frequency = f.get_number_or("frequency", 1.0);
  wave.amplitude = f.get_number_or("amplitude", 1.0);
  wave.phase = f.get_number_or("phase", 0.0);
  require_finite(wave.frequency, f.key_path("frequency"));
  require_finite(wave.amplitude, f.key_path("amplitude"));
  require_finite(wave.phase, f.key_path("phase"));
  if (wave.frequency <= 0.0) throw ConfigError(f.key_path("frequency"), "must be > 0");
  f.done();
  return wave;
}

nlohmann::json wave_to_json(const WaveSpec& wave) {
  return {{"waveform", to_string(wave.waveform)},
          {"frequency", wave.frequency},
          {"amplitude", wave.amplitude},
          {"phase", wave.phase}};
}

SeasonalColumn parse_seasonal_column(const nlohmann::json& j, const std::string& path,
                                     Index t_len) {
  Fields f(j, path);
  SeasonalColumn column;
  const Index length = f.get_index("length");
  if (length < 1) throw ConfigError(f.key_path("length"), "must be >= 1");
  if (length > t_len)
    throw ConfigError(f.key_path("length"), "cannot exceed the temporal mode size");
  column.spec.cycle_length = length;
  column.spec.growth_rate = f.get_number_or("growth", 0.0);
  require_finite(column.spec.growth_rate, f.key_path("growth"));
  if (!f.has("pattern")) {
    column.preset = "single_peak";
    column.spec.pattern = seasonal_preset(column.preset, length);
  } else if (f.raw("pattern").is_string()) {
    column.preset = f.get_string("pattern");
    try {
      column.spec.pattern = seasonal_preset(column.preset, length);
    } catch (const ParameterError&) {
      throw ConfigError(f.key_path("pattern"), "unknown preset '" + column.preset + "'");
    }
  } else {
    column.spec.pattern = f.get_number_list("pattern");
    if (static_cast<Index>(column.spec.pattern.size()) != length)
      throw ConfigError(f.key_path("pattern"), "length must equal 'length'");
    for (double v : column.spec.pattern) require_finite(v, f.key_path("pattern"));
  }
  f.done();
  return column;
}

nlohmann::json seasonal_column_to_json(const SeasonalColumn& column) {
  nlohmann::json j;
  j["length"] = column.spec.cycle_length;
  if (!column.preset.empty())
    j["pattern"] = column.preset;
  else
    j["pattern"] = column.spec.pattern;
  j["growth"] = column.spec.growth_rate;
  return j;
}

bool is_temporal_method(const std::string& method) {
  return method == "periodic" || method == "seasonal" || method == "streaming";
}

/// Accept either a single spec object (replicated `count` times) or an array
/// with exactly `count` entries.
std::vector<nlohmann::json> spec_list(const nlohmann::json& j, const std::string& path,
                                      Index count, const char* unit) {
  std::vector<nlohmann::json> out;
  if (j.is_object()) {
    out.assign(static_cast<std::size_t>(count), j);
  } else if (j.is_array()) {
    if (static_cast<Index>(j.size()) != count)
      throw ConfigError(path, std::string("needs one entry per ") + unit);
    out.assign(j.begin(), j.end());
  } else {
    throw ConfigError(path, "must be an object or an array");
  }
  return out;
}

ModeConfig parse_mode_config(const nlohmann::json& j, const std::string& path, Index dim,
                             Index columns, bool temporal_position) {
  Fields probe(j, path);
  const std::string method = probe.get_string("method");

  ModeConfig mode;
  if (!is_temporal_method(method)) {
    if (temporal_position)
      throw ConfigError(path + ".method",
                        "the declared temporal_mode must use a temporal method "
                        "(periodic, seasonal, streaming)");
    mode.kind = ModeKind::random;
    mode.random = factor_params_from_json(j, path, columns);
    if (mode.random.method == FactorMethod::orthogonal && dim < columns)
      throw ConfigError(path, "orthogonal factors require rows >= columns");
    return mode;
  }

  if (!temporal_position)
    throw ConfigError(path + ".method",
                      "temporal factors are only allowed on the declared temporal_mode");

  Fields f(j, path);
  f.get_string("method");
  if (method == "periodic") {
    mode.kind = ModeKind::periodic;
    if (dim < 2) throw ConfigError(path, "periodic factors require the mode size >= 2");
    const auto waves = spec_list(f.raw("waves"), f.key_path("waves"), columns, "factor column");
    for (std::size_t i = 0; i < waves.size(); ++i)
      mode.waves.push_back(
          parse_wave(waves[i], f.key_path("waves") + "[" + std::to_string(i) + "]"));
  } else if (method == "seasonal") {
    mode.kind = ModeKind::seasonal;
    const auto cycles = spec_list(f.raw("cycles"), f.key_path("cycles"), columns, "factor column");
    for (std::size_t i = 0; i < cycles.size(); ++i)
      mode.cycles.push_back(parse_seasonal_column(
          cycles[i], f.key_path("cycles") + "[" + std::to_string(i) + "]", dim));
  } else {
    mode.kind = ModeKind::streaming;
    mode.streaming.epsilon = f.get_number_or("epsilon", 0.1);
    require_finite(mode.streaming.epsilon, f.key_path("epsilon"));
    if (mode.streaming.epsilon < 0.0 || mode.streaming.epsilon > 1.0)
      throw ConfigError(f.key_path("epsilon"), "must be within [0, 1]");
    if (f.has("init")) {
      mode.streaming.init = factor_params_from_json(f.raw("init"), f.key_path("init"), columns);
      if (mode.streaming.init.method == FactorMethod::orthogonal && columns > 1)
        throw ConfigError(f.key_path("init") + ".method",
                          "orthogonal cannot generate a single row");
    }
  }
  f.done();
  return mode;
}

nlohmann::json mode_config_to_json(const ModeConfig& mode, Index columns) {
  switch (mode.kind) {
    case ModeKind::random:
      return factor_params_to_json(mode.random, columns);
    case ModeKind::periodic: {
      nlohmann::json j{{"method", "periodic"}};
      j["waves"] = nlohmann::json::array();
      for (const WaveSpec& wave : mode.waves) j["waves"].push_back(wave_to_json(wave));
      return j;
    }
    case ModeKind::seasonal: {
      nlohmann::json j{{"method", "seasonal"}};
      j["cycles"] = nlohmann::json::array();
      for (const SeasonalColumn& column : mode.cycles)
        j["cycles"].push_back(seasonal_column_to_json(column));
      return j;
    }
    case ModeKind::streaming: {
      nlohmann::json j{{"method", "streaming"}};
      j["epsilon"] = mode.streaming.epsilon;
      j["init"] = factor_params_to_json(mode.streaming.init, columns);
      return j;
    }
  }
  throw ConfigError("factors", "unknown mode kind");
}

// ---------------------------------------------------------------------------
// Effects

struct EffectContext {
  const Shape& shape;
  const ModelConfig& model;
  std::optional<Index> temporal_mode;
};

Index context_columns(const EffectContext& ctx, Index mode) {
  return ctx.model.type == "cp" ? ctx.model.ranks.front()
                                : ctx.model.ranks[static_cast<std::size_t>(mode)];
}

Index parse_mode_field(Fields& f, const EffectContext& ctx, const std::string& key) {
  const Index mode = f.get_index(key);
  if (mode < 0 || mode >= ctx.shape.order())
    throw ConfigError(f.key_path(key), "mode index out of range");
  return mode;
}

EffectConfig parse_effect(const nlohmann::json& j, const std::string& path,
                          const EffectContext& ctx) {
  Fields f(j, path);
  EffectConfig effect;
  effect.kind = f.get_string("kind");
  try {
    effect.stage = effect_stage(effect.kind);
  } catch (const ParameterError&) {
    throw ConfigError(f.key_path("kind"), "unknown effect '" + effect.kind + "'");
  }
  nlohmann::json& p = effect.params;

  if (effect.kind == "change_point") {
    Index mode;
    if (f.has("mode")) {
      mode = parse_mode_field(f, ctx, "mode");
    } else if (ctx.temporal_mode) {
      mode = *ctx.temporal_mode;
    } else {
      throw ConfigError(f.key_path("mode"),
                        "is required when no temporal_mode is declared");
    }
    const Index column = f.get_index("column");
    if (column < 0 || column >= context_columns(ctx, mode))
      throw ConfigError(f.key_path("column"), "column index out of range");
    const Index start = f.get_index("start");
    const Index end = f.get_index("end");
    if (start < 0 || end >= ctx.shape.dim(mode) || start > end)
      throw ConfigError(path, "window must satisfy 0 <= start <= end < mode size");
    p["mode"] = mode;
    p["column"] = column;
    p["start"] = start;
    p["end"] = end;
    if (f.has("magnitude")) {
      const double magnitude = f.get_number("magnitude");
      require_finite(magnitude, f.key_path("magnitude"));
      p["magnitude"] = magnitude;
    }
  } else if (effect.kind == "factor_noise") {
    const double eta = f.get_number("eta");
    require_finite(eta, f.key_path("eta"));
    if (eta < 0.0) throw ConfigError(f.key_path("eta"), "must be >= 0");
    p["eta"] = eta;
  } else if (effect.kind == "sparsify_factors" || effect.kind == "sparsify_tensor") {
    const double fraction = f.get_number("fraction");
    require_finite(fraction, f.key_path("fraction"));
    if (fraction < 0.0 || fraction >= 1.0)
      throw ConfigError(f.key_path("fraction"), "must be within [0, 1)");
    p["fraction"] = fraction;
    if (effect.kind == "sparsify_factors" && f.has("mode"))
      p["mode"] = parse_mode_field(f, ctx, "mode");
  } else if (effect.kind == "column_congruence" || effect.kind == "column_correlation") {
    const Index mode = parse_mode_field(f, ctx, "mode");
    if (ctx.temporal_mode && mode == *ctx.temporal_mode)
      throw ConfigError(f.key_path("mode"),
                        "cannot rebuild the temporal mode's factor");
    const double c = f.get_number("c");
    require_finite(c, f.key_path("c"));
    const Index cols = context_columns(ctx, mode);
    if (cols >= 2 && (c <= -1.0 / static_cast<double>(cols - 1) || c >= 1.0))
      throw ConfigError(f.key_path("c"),
                        "must lie in (-1/(R-1), 1) for a positive definite Gram matrix");
    if (effect.kind == "column_congruence" && ctx.shape.dim(mode) < cols)
      throw ConfigError(f.key_path("mode"), "congruent columns require rows >= columns");
    if (effect.kind == "column_correlation" && ctx.shape.dim(mode) < 2)
      throw ConfigError(f.key_path("mode"), "correlated columns require rows >= 2");
    p["mode"] = mode;
    p["c"] = c;
  } else if (effect.kind == "sign_fix" || effect.kind == "normalize_cp") {
    if (ctx.model.type != "cp")
      throw ConfigError(f.key_path("kind"), effect.kind + " requires a cp model");
  } else if (effect.kind == "anomaly") {
    const auto& block = f.raw("block");
    if (!block.is_array() || static_cast<Index>(block.size()) != ctx.shape.order())
      throw ConfigError(f.key_path("block"), "needs one [begin, end) pair per mode");
    std::vector<Index> block_dims;
    for (Index n = 0; n < ctx.shape.order(); ++n) {
      const auto& pair = block[static_cast<std::size_t>(n)];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer())
        throw ConfigError(f.key_path("block"), "needs one [begin, end) pair per mode");
      const Index begin = pair[0].get<Index>();
      const Index end = pair[1].get<Index>();
      if (begin < 0 || end > ctx.shape.dim(n) || begin >= end)
        throw ConfigError(f.key_path("block") + "[" + std::to_string(n) + "]",
                          "range is empty or outside the tensor");
      block_dims.push_back(end - begin);
    }
    const Index rank = f.get_index_or("rank", 1);
    if (rank < 1) throw ConfigError(f.key_path("rank"), "must be >= 1");
    const double amplitude = f.get_number_or("amplitude", 1.0);
    require_finite(amplitude, f.key_path("amplitude"));
    if (amplitude <= 0.0) throw ConfigError(f.key_path("amplitude"), "must be > 0");
    FactorParams generator;
    if (f.has("generator")) {
      generator = factor_params_from_json(f.raw("generator"), f.key_path("generator"), rank);
      if (generator.method == FactorMethod::orthogonal)
        for (Index d : block_dims)
          if (d < rank)
            throw ConfigError(f.key_path("generator"),
                              "orthogonal factors require every block extent >= rank");
    }
    WeightsConfig weights;
    if (f.has("weights")) {
      Fields w(f.raw("weights"), f.key_path("weights"));
      const std::string method = w.get_string("method");
      try {
        weights.method = weight_method_from_string(method);
      } catch (const ParameterError&) {
        throw ConfigError(w.key_path("method"), "unknown weight method '" + method + "'");
      }
      if (weights.method == WeightMethod::custom) {
        weights.values = w.get_number_list("values");
        if (static_cast<Index>(weights.values.size()) != rank)
          throw ConfigError(w.key_path("values"), "needs one entry per component");
      } else if (w.has("values")) {
        throw ConfigError(w.key_path("values"), "only valid with the custom method");
      }
      w.done();
    }
    p["block"] = block;
    p["rank"] = rank;
    p["amplitude"] = amplitude;
    p["generator"] = factor_params_to_json(generator, rank);
    p["weights"] = nlohmann::json{{"method", to_string(weights.method)}};
    if (weights.method == WeightMethod::custom) p["weights"]["values"] = weights.values;
  } else if (effect.kind == "awgn" || effect.kind == "sparse_noise") {
    const double snr_db = f.get_number("snr_db");
    require_finite(snr_db, f.key_path("snr_db"));
    p["snr_db"] = snr_db;
    if (effect.kind == "sparse_noise") {
      const double density = f.get_number("density");
      require_finite(density, f.key_path("density"));
      if (density <= 0.0 || density > 1.0)
        throw ConfigError(f.key_path("density"), "must be within (0, 1]");
      p["density"] = density;
    }
  }
  // nonneg_factors, nonneg_tensor, normalize_tensor, poisson_count: no params

  f.done();
  return effect;
}

nlohmann::json effect_to_json(const EffectConfig& effect) {
  nlohmann::json j{{"kind", effect.kind}};
  for (auto it = effect.params.begin(); it != effect.params.end(); ++it) j[it.key()] = *it;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(FileFormat format) {
  return format == FileFormat::csv ? "csv" : "hdf5";
}

FileFormat file_format_from_string(const std::string& name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "hdf5") return FileFormat::hdf5;
  throw ParameterError("unknown file format '" + name + "' (expected csv or hdf5)");
}

FileFormat file_format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "csv") return FileFormat::csv;
  if (ext == "h5" || ext == "hdf5") return FileFormat::hdf5;
  throw ConfigError("output.path", "cannot deduce the file format from '" + path +
                                       "' (use .csv, .h5 or .hdf5, or set output.format)");
}

EffectStage effect_stage(const std::string& kind) {
  if (kind == "change_point" || kind == "factor_noise" || kind == "nonneg_factors" ||
      kind == "sparsify_factors" || kind == "column_congruence" ||
      kind == "column_correlation")
    return EffectStage::factor;
  if (kind == "sign_fix" || kind == "normalize_cp") return EffectStage::model;
  if (kind == "anomaly" || kind == "awgn" || kind == "sparse_noise" ||
      kind == "nonneg_tensor" || kind == "normalize_tensor" || kind == "sparsify_tensor" ||
      kind == "poisson_count")
    return EffectStage::tensor;
  throw ParameterError("unknown effect kind '" + kind + "'");
}

Index GenConfig::mode_columns(Index mode) const {
  return model.type == "cp" ? model.ranks.front()
                            : model.ranks[static_cast<std::size_t>(mode)];
}

GenConfig parse_config(const nlohmann::json& j) {
  Fields f(j, "");
  GenConfig config;

  if (f.has("format_version")) {
    const std::string version = f.get_string("format_version");
    if (version != kFormatVersion)
      throw ConfigError("format_version", "unsupported version '" + version +
                                              "' (this build reads version " +
                                              kFormatVersion + ")");
  }
  config.seed = f.get_u64("seed");

  {
    const auto& shape = f.raw("shape");
    if (!shape.is_array() || shape.size() < 2)
      throw ConfigError("shape", "must be an array of at least two sizes");
    std::vector<Index> dims;
    for (const auto& d : shape) {
      if (!d.is_number_integer() || d.get<Index>() < 1)
        throw ConfigError("shape", "sizes must be integers >= 1");
      dims.push_back(d.get<Index>());
    }
    try {
      config.shape = Shape(dims);
    } catch (const Error& e) {
      throw ConfigError("shape", e.what());
    }
  }
  const Index order = config.shape.order();

  if (f.has("model")) {
    Fields m(f.raw("model"), "model");
    config.model.type = m.get_string_or("type", "cp");
    if (config.model.type == "cp") {
      const Index rank = m.get_index_or("rank", 1);
      if (rank < 1) throw ConfigError("model.rank", "must be >= 1");
      config.model.ranks = {rank};
    } else if (config.model.type == "tucker") {
      const auto& ranks = m.raw("ranks");
      if (!ranks.is_array() || static_cast<Index>(ranks.size()) != order)
        throw ConfigError("model.ranks", "needs one rank per mode");
      for (const auto& r : ranks) {
        if (!r.is_number_integer() || r.get<Index>() < 1)
          throw ConfigError("model.ranks", "ranks must be integers >= 1");
        config.model.ranks.push_back(r.get<Index>());
      }
    } else {
      throw ConfigError("model.type", "must be 'cp' or 'tucker'");
    }
    if (m.has("weights")) {
      Fields w(m.raw("weights"), "model.weights");
      const std::string method = w.get_string("method");
      try {
        config.model.weights.method = weight_method_from_string(method);
      } catch (const ParameterError&) {
        throw ConfigError("model.weights.method", "unknown weight method '" + method + "'");
      }
      Index expected = 1;
      for (Index r : config.model.ranks) expected *= r;
      if (config.model.type == "cp") expected = config.model.ranks.front();
      if (config.model.weights.method == WeightMethod::custom) {
        config.model.weights.values = w.get_number_list("values");
        if (static_cast<Index>(config.model.weights.values.size()) != expected)
          throw ConfigError("model.weights.values",
                            config.model.type == "cp"
                                ? "needs one entry per component"
                                : "needs one entry per core element (row-major)");
        for (double v : config.model.weights.values)
          require_finite(v, "model.weights.values");
      } else if (w.has("values")) {
        throw ConfigError("model.weights.values", "only valid with the custom method");
      }
      w.done();
    }
    m.done();
  } else {
    config.model.ranks = {1};
  }

  if (f.has("temporal_mode")) {
    const Index mode = f.get_index("temporal_mode");
    if (mode < 0 || mode >= order)
      throw ConfigError("temporal_mode", "mode index out of range");
    config.temporal_mode = mode;
  }

  {
    const auto specs = spec_list(f.raw("factors"), "factors", order, "mode");
    for (Index n = 0; n < order; ++n) {
      const std::string path = "factors[" + std::to_string(n) + "]";
      const bool temporal_position = config.temporal_mode && *config.temporal_mode == n;
      config.modes.push_back(parse_mode_config(specs[static_cast<std::size_t>(n)], path,
                                               config.shape.dim(n), config.mode_columns(n),
                                               temporal_position));
    }
  }

  if (f.has("effects")) {
    const auto& effects = f.raw("effects");
    if (!effects.is_array()) throw ConfigError("effects", "must be an array");
    const EffectContext ctx{config.shape, config.model, config.temporal_mode};
    for (std::size_t i = 0; i < effects.size(); ++i) {
      const std::string path = "effects[" + std::to_string(i) + "]";
      config.effects.push_back(parse_effect(effects[i], path, ctx));
      if (i > 0 && config.effects[i].stage < config.effects[i - 1].stage)
        throw ConfigError(path,
                          "effects must be ordered by stage: factor effects, then model "
                          "effects, then tensor effects");
    }
    for (std::size_t i = 0; i < config.effects.size(); ++i)
      if (config.effects[i].kind == "poisson_count" && i + 1 != config.effects.size())
        throw ConfigError("effects[" + std::to_string(i) + "]",
                          "poisson_count must be the last effect");
  }

  const bool poisson = !config.effects.empty() && config.effects.back().kind == "poisson_count";
  config.representation = f.get_string_or("representation", poisson ? "sparse" : "dense");
  if (config.representation != "dense" && config.representation != "sparse")
    throw ConfigError("representation", "must be 'dense' or 'sparse'");

  if (f.has("output")) {
    Fields o(f.raw("output"), "output");
    config.output.path = o.get_string("path");
    if (config.output.path.empty()) throw ConfigError("output.path", "must not be empty");
    if (o.has("format")) {
      const std::string format = o.get_string("format");
      try {
        config.output.format = file_format_from_string(format);
      } catch (const ParameterError& e) {
        throw ConfigError("output.format", e.what());
      }
    } else {
      config.output.format = file_format_from_path(config.output.path);
    }
    config.output.overwrite = o.get_bool_or("overwrite", false);
    o.done();
  }

  f.done();
  return config;
}

GenConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const GenConfig& config) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = config.seed;
  j["shape"] = config.shape.dims();

  nlohmann::json model{{"type", config.model.type}};
  if (config.model.type == "cp")
    model["rank"] = config.model.ranks.front();
  else
    model["ranks"] = config.model.ranks;
  model["weights"] = nlohmann::json{{"method", to_string(config.model.weights.method)}};
  if (config.model.weights.method == WeightMethod::custom)
    model["weights"]["values"] = config.model.weights.values;
  j["model"] = model;

  if (config.temporal_mode) j["temporal_mode"] = *config.temporal_mode;

  j["factors"] = nlohmann::json::array();
  for (Index n = 0; n < config.shape.order(); ++n)
    j["factors"].push_back(
        mode_config_to_json(config.modes[static_cast<std::size_t>(n)], config.mode_columns(n)));

  j["effects"] = nlohmann::json::array();
  for (const EffectConfig& effect : config.effects) j["effects"].push_back(effect_to_json(effect));

  j["representation"] = config.representation;

  if (!config.output.path.empty()) {
    nlohmann::json out{{"path", config.output.path}, {"overwrite", config.output.overwrite}};
    if (config.output.format) out["format"] = to_string(*config.output.format);
    j["output"] = out;
  }
  return j;
}

GenConfig config_from_manifest(const Manifest& manifest) {
  nlohmann::json j;
  j["format_version"] = manifest.format_version;
  j["seed"] = manifest.seed;
  j["shape"] = manifest.shape;
  nlohmann::json model{{"type", manifest.model_type}};
  if (manifest.model_type == "cp")
    model["rank"] = manifest.ranks.front();
  else
    model["ranks"] = manifest.ranks;
  model["weights"] = manifest.weights;
  j["model"] = model;
  if (manifest.temporal_mode) j["temporal_mode"] = *manifest.temporal_mode;
  j["factors"] = manifest.factors;
  j["effects"] = nlohmann::json::array();
  for (const EffectRecord& record : manifest.effects) {
    nlohmann::json e{{"kind", record.kind}};
    for (auto it = record.params.begin(); it != record.params.end(); ++it) e[it.key()] = *it;
    j["effects"].push_back(e);
  }
  j["representation"] = manifest.representation;
  return parse_config(j);
}

}  // namespace tensorgen
