#include "tensorgen/pipeline.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "tensorgen/effects.hpp"
#include "tensorgen/errors.hpp"
#include "tensorgen/factor_gen.hpp"
#include "tensorgen/rng.hpp"
#include "tensorgen/temporal_gen.hpp"

namespace tensorgen {

namespace {

// Substream derivation tags. Frozen: changing any of these changes every
// generated dataset and would require a format_version bump.
constexpr std::uint64_t kFactorTag = 0x66616374ULL;
constexpr std::uint64_t kWeightsTag = 0x77676874ULL;
constexpr std::uint64_t kEffectTag = 0x65666665ULL;
constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kModeTag = 0x6d6f6465ULL;

Matrix generate_mode_factor(const GenConfig& config, Index n, const RngStream& rng) {
  const ModeConfig& mode = config.modes[static_cast<std::size_t>(n)];
  const Index rows = config.shape.dim(n);
  const Index cols = config.mode_columns(n);
  switch (mode.kind) {
    case ModeKind::random:
      return gen_factor(rows, cols, mode.random, rng);
    case ModeKind::periodic:
      return gen_periodic(rows, mode.waves);
    case ModeKind::seasonal: {
      Matrix m(rows, cols);
      for (Index c = 0; c < cols; ++c)
        m.col(c) = gen_seasonal(rows, mode.cycles[static_cast<std::size_t>(c)].spec);
      return m;
    }
    case ModeKind::streaming: {
      const Matrix init =
          gen_factor(1, cols, mode.streaming.init, rng.substream({kInitTag}));
      return gen_streaming(rows, cols, mode.streaming.epsilon, init.row(0), rng);
    }
  }
  throw StructuralError("unknown mode kind");
}

void apply_factor_effect(const EffectConfig& effect, const RngStream& rng,
                         const GenConfig& config, std::vector<Matrix>& factors,
                         EffectRecord& record) {
  const nlohmann::json& p = effect.params;
  if (effect.kind == "change_point") {
    const Index mode = p.at("mode").get<Index>();
    Matrix& factor = factors[static_cast<std::size_t>(mode)];
    ChangePointSpec spec;
    spec.column = p.at("column").get<Index>();
    spec.start = p.at("start").get<Index>();
    spec.end = p.at("end").get<Index>();
    spec.magnitude = p.contains("magnitude") ? p.at("magnitude").get<double>()
                                             : default_change_magnitude(factor, spec.column);
    record.params["magnitude"] = spec.magnitude;
    ChangePointResult result = apply_change_point(factor, spec);
    factor = result.factor;
    record.touched = {{"mode", mode},
                      {"column", spec.column},
                      {"start", spec.start},
                      {"end", spec.end}};
    record.achieved = {{"classification", to_string(result.classification)},
                       {"magnitude", spec.magnitude}};
  } else if (effect.kind == "factor_noise") {
    FactorNoiseResult result = add_factor_noise(factors, p.at("eta").get<double>(), rng);
    factors = std::move(result.factors);
    record.touched = {{"scope", "factors"}};
    record.achieved = {{"sigmas", result.sigmas}};
  } else if (effect.kind == "nonneg_factors") {
    Index flipped = 0;
    for (const Matrix& u : factors) flipped += (u.array() < 0.0).count();
    factors = apply_nonneg(factors);
    record.touched = {{"scope", "factors"}};
    record.achieved = {{"flipped_count", flipped}};
  } else if (effect.kind == "sparsify_factors") {
    const double fraction = p.at("fraction").get<double>();
    std::vector<Index> targets;
    if (p.contains("mode"))
      targets.push_back(p.at("mode").get<Index>());
    else
      for (Index n = 0; n < static_cast<Index>(factors.size()); ++n) targets.push_back(n);
    nlohmann::json touched_modes = nlohmann::json::array();
    for (Index n : targets) {
      SparsifyMatrixResult result =
          sparsify(factors[static_cast<std::size_t>(n)], fraction,
                   rng.substream({kModeTag, static_cast<std::uint64_t>(n)}));
      factors[static_cast<std::size_t>(n)] = std::move(result.matrix);
      touched_modes.push_back({{"mode", n}, {"positions", result.positions}});
    }
    record.touched = {{"modes", touched_modes}};
  } else if (effect.kind == "column_congruence" || effect.kind == "column_correlation") {
    const Index mode = p.at("mode").get<Index>();
    const double c = p.at("c").get<double>();
    const Index rows = config.shape.dim(mode);
    const Index cols = config.mode_columns(mode);
    Matrix& factor = factors[static_cast<std::size_t>(mode)];
    record.touched = {{"scope", "factor"}, {"mode", mode}};
    if (effect.kind == "column_congruence") {
      factor = impose_congruence(rows, cols, c, rng);
      Matrix gram_error = factor.transpose() * factor;
      gram_error.diagonal().array() -= 1.0;
      if (cols >= 2) {
        for (Index a = 0; a < cols; ++a)
          for (Index b = 0; b < cols; ++b)
            if (a != b) gram_error(a, b) -= c;
      }
      record.achieved = {{"max_gram_error", gram_error.cwiseAbs().maxCoeff()}};
    } else {
      factor = impose_correlation(rows, cols, c, rng);
    }
  } else {
    throw StructuralError("unknown factor-stage effect '" + effect.kind + "'");
  }
}

AnomalySpec anomaly_spec_from_params(const nlohmann::json& p) {
  AnomalySpec spec;
  for (const auto& pair : p.at("block"))
    spec.block.push_back({pair[0].get<Index>(), pair[1].get<Index>()});
  spec.rank = p.at("rank").get<Index>();
  spec.amplitude = p.at("amplitude").get<double>();
  spec.generator = factor_params_from_json(p.at("generator"), "anomaly.generator", spec.rank);
  const nlohmann::json& w = p.at("weights");
  spec.weight_method = weight_method_from_string(w.at("method").get<std::string>());
  if (spec.weight_method == WeightMethod::custom)
    spec.weight_values = w.at("values").get<std::vector<double>>();
  return spec;
}

/// Returns the count tensor when the effect replaces values with Poisson
/// counts; all other effects update `t` in place.
std::optional<SparseTensor> apply_tensor_effect(const EffectConfig& effect,
                                                const RngStream& rng, DenseTensor& t,
                                                EffectRecord& record) {
  const nlohmann::json& p = effect.params;
  if (effect.kind == "anomaly") {
    AnomalyResult result = inject_anomaly(t, anomaly_spec_from_params(p), rng);
    t = std::move(result.tensor);
    record.touched = {{"block", p.at("block")}};
    record.achieved = {{"replaced_norm", result.replaced_norm},
                       {"injected_norm", result.injected_norm},
                       {"scale", result.scale}};
  } else if (effect.kind == "awgn") {
    AwgnResult result = add_awgn(t, p.at("snr_db").get<double>(), rng);
    t = std::move(result.tensor);
    record.touched = {{"scope", "all"}};
    record.achieved = {{"sigma", result.sigma}, {"signal_power", result.signal_power}};
  } else if (effect.kind == "sparse_noise") {
    SparseNoiseResult result =
        add_sparse_noise(t, p.at("snr_db").get<double>(), p.at("density").get<double>(), rng);
    t = std::move(result.tensor);
    record.touched = {{"positions", result.positions}};
    record.achieved = {{"sigma", result.sigma}, {"signal_power", result.signal_power}};
  } else if (effect.kind == "nonneg_tensor") {
    Index clamped = 0;
    for (Index i = 0; i < t.numel(); ++i) clamped += t[i] < 0.0 ? 1 : 0;
    t = apply_nonneg(t);
    record.touched = {{"scope", "all"}};
    record.achieved = {{"clamped_count", clamped}};
  } else if (effect.kind == "normalize_tensor") {
    NormalizeResult result = normalize_tensor(t);
    t = std::move(result.tensor);
    record.touched = {{"scope", "all"}};
    record.achieved = {{"original_norm", result.original_norm}, {"scale", result.scale}};
  } else if (effect.kind == "sparsify_tensor") {
    SparsifyTensorResult result = sparsify(t, p.at("fraction").get<double>(), rng);
    t = std::move(result.tensor);
    record.touched = {{"positions", result.positions}};
    record.achieved = {{"dropped_count", result.positions.size()}};
  } else if (effect.kind == "poisson_count") {
    SparseTensor counts = poisson_sample(t, rng);
    record.touched = {{"scope", "all"}};
    record.achieved = {{"nnz", counts.nnz()}};
    return counts;
  } else {
    throw StructuralError("unknown tensor-stage effect '" + effect.kind + "'");
  }
  return std::nullopt;
}

}  // namespace

const Shape& Dataset::shape() const {
  if (dense) return dense->shape();
  if (sparse) return sparse->shape();
  throw StructuralError("dataset holds no tensor");
}

Index Dataset::nnz() const {
  if (sparse) return sparse->nnz();
  if (!dense) throw StructuralError("dataset holds no tensor");
  Index count = 0;
  for (Index i = 0; i < dense->numel(); ++i) count += (*dense)[i] != 0.0 ? 1 : 0;
  return count;
}

double Dataset::norm() const {
  if (dense) return frobenius_norm(*dense);
  if (sparse) return frobenius_norm(*sparse);
  throw StructuralError("dataset holds no tensor");
}

Dataset generate(const GenConfig& config) {
  const RngStream root(config.seed);
  const Index order = config.shape.order();

  std::vector<Matrix> factors;
  factors.reserve(static_cast<std::size_t>(order));
  for (Index n = 0; n < order; ++n)
    factors.push_back(generate_mode_factor(
        config, n, root.substream({kFactorTag, static_cast<std::uint64_t>(n)})));

  std::vector<EffectRecord> records;
  records.reserve(config.effects.size());
  std::size_t i = 0;

  auto effect_stream = [&root](std::size_t index) {
    return root.substream({kEffectTag, static_cast<std::uint64_t>(index)});
  };
  auto start_record = [&records](const EffectConfig& effect) -> EffectRecord& {
    records.push_back(EffectRecord{effect.kind, effect.params, {}, {}});
    return records.back();
  };

  for (; i < config.effects.size() && config.effects[i].stage == EffectStage::factor; ++i)
    apply_factor_effect(config.effects[i], effect_stream(i), config, factors,
                        start_record(config.effects[i]));

  const bool is_cp = config.model.type == "cp";
  CpModel cp;
  TuckerModel tucker;
  {
    const auto weights_rng = root.substream({kWeightsTag});
    const WeightsConfig& w = config.model.weights;
    if (is_cp) {
      cp.factors = std::move(factors);
      cp.lambda = gen_weights(w.method, config.model.ranks.front(), w.values, weights_rng);
      cp.validate();
    } else {
      tucker.factors = std::move(factors);
      Index core_len = 1;
      for (Index r : config.model.ranks) core_len *= r;
      const Vector core = gen_weights(w.method, core_len, w.values, weights_rng);
      tucker.core = DenseTensor(Shape(config.model.ranks),
                                std::vector<double>(core.data(), core.data() + core_len));
      tucker.validate();
    }
  }

  for (; i < config.effects.size() && config.effects[i].stage == EffectStage::model; ++i) {
    const EffectConfig& effect = config.effects[i];
    EffectRecord& record = start_record(effect);
    record.touched = {{"scope", "model"}};
    if (effect.kind == "sign_fix") {
      cp = sign_fix(cp);
    } else if (effect.kind == "normalize_cp") {
      cp = normalize_cp(cp);
      record.achieved = {{"lambda", std::vector<double>(cp.lambda.data(),
                                                        cp.lambda.data() + cp.lambda.size())}};
    } else {
      throw StructuralError("unknown model-stage effect '" + effect.kind + "'");
    }
  }

  DenseTensor tensor = is_cp ? cp_reconstruct(cp) : tucker_reconstruct(tucker);

  std::optional<SparseTensor> counts;
  for (; i < config.effects.size(); ++i) {
    counts = apply_tensor_effect(config.effects[i], effect_stream(i), tensor,
                                 start_record(config.effects[i]));
  }

  if (!counts && !tensor.all_finite())
    throw NumericalError("the generated tensor contains non-finite values");

  Dataset dataset;
  if (counts) {
    if (config.representation == "dense")
      dataset.dense = counts->to_dense();
    else
      dataset.sparse = std::move(*counts);
  } else if (config.representation == "sparse") {
    dataset.sparse = to_sparse(tensor);
  } else {
    dataset.dense = std::move(tensor);
  }
  if (is_cp)
    dataset.cp = std::move(cp);
  else
    dataset.tucker = std::move(tucker);

  const nlohmann::json config_json = config_to_json(config);
  Manifest& manifest = dataset.manifest;
  manifest.seed = config.seed;
  manifest.shape = config.shape.dims();
  manifest.model_type = config.model.type;
  manifest.ranks = config.model.ranks;
  manifest.temporal_mode = config.temporal_mode;
  manifest.factors = config_json.at("factors");
  manifest.weights = config_json.at("model").at("weights");
  manifest.effects = std::move(records);
  manifest.representation = config.representation;
  manifest.created = current_timestamp();
  return dataset;
}

}  // namespace tensorgen
