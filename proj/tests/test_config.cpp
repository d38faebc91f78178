#include <string>

#include <doctest.h>
#include <json.hpp>

#include "tensorgen/config.hpp"
#include "tensorgen/errors.hpp"
#include "tensorgen/pipeline.hpp"

using namespace tensorgen;
using nlohmann::json;

namespace {

/// Runs fn, expecting it to throw E; returns the message ("" if it did not).
template <typename E, typename Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  } catch (...) {
    return "(wrong exception type)";
  }
  return "";
}

bool mentions(const std::string& message, const std::string& needle) {
  return message.find(needle) != std::string::npos;
}

json minimal_config() {
  return json{{"seed", 1},
              {"shape", {4, 3}},
              {"factors", {{{"method", "uniform"}}, {{"method", "uniform"}}}}};
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
  const GenConfig config = parse_config(minimal_config());
  CHECK(config.seed == 1);
  CHECK(config.shape == Shape({4, 3}));
  CHECK(config.model.type == "cp");
  CHECK(config.model.ranks == std::vector<Index>{1});
  CHECK(config.model.weights.method == WeightMethod::ones);
  CHECK_FALSE(config.temporal_mode.has_value());
  CHECK(config.representation == "dense");
  CHECK(config.output.path.empty());
  CHECK(config.mode_columns(0) == 1);
}

TEST_CASE("a single factor spec is replicated across modes") {
  json j = minimal_config();
  j["factors"] = {{"method", "gamma"}};
  const GenConfig config = parse_config(j);
  REQUIRE(config.modes.size() == 2);
  CHECK(config.modes[0].random.method == FactorMethod::gamma);
  CHECK(config.modes[1].random.method == FactorMethod::gamma);
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = minimal_config();
  j["sead"] = 2;
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "sead"));

  j = minimal_config();
  j["factors"][0]["spread"] = 1.0;
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "factors[0]"));
}

TEST_CASE("shape and seed validation") {
  json j = minimal_config();
  j["shape"] = {4};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "shape"));
  j["shape"] = {4, 0};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "shape"));
  j = minimal_config();
  j["seed"] = -1;
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "seed"));
}

TEST_CASE("tucker configs need one rank per mode") {
  json j = minimal_config();
  j["model"] = {{"type", "tucker"}, {"ranks", {2, 2, 2}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "ranks"));
  j["model"]["ranks"] = {2, 2};
  const GenConfig config = parse_config(j);
  CHECK(config.model.ranks == std::vector<Index>{2, 2});
  CHECK(config.mode_columns(1) == 2);
}

TEST_CASE("custom weights must match the component count") {
  json j = minimal_config();
  j["model"] = {{"type", "cp"},
                {"rank", 2},
                {"weights", {{"method", "custom"}, {"values", {1.0, 2.0, 3.0}}}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "values"));
  j["model"]["weights"]["values"] = {1.0, 2.0};
  CHECK(parse_config(j).model.weights.values == std::vector<double>{1.0, 2.0});
}

TEST_CASE("streaming epsilon outside the unit interval names the field") {
  json j{{"seed", 1},
         {"shape", {8, 4}},
         {"temporal_mode", 0},
         {"factors",
          {{{"method", "streaming"}, {"epsilon", 1.5}}, {{"method", "uniform"}}}}};
  const std::string message = error_message<ConfigError>([&] { parse_config(j); });
  CHECK(mentions(message, "epsilon"));
  CHECK(mentions(message, "[0, 1]"));
}

TEST_CASE("temporal methods and the temporal mode must agree") {
  json j{{"seed", 1},
         {"shape", {8, 4}},
         {"factors", {{{"method", "periodic"}, {"waves", {{{"waveform", "sine"}}}}},
                      {{"method", "uniform"}}}}};
  // periodic factor without a declared temporal mode
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "temporal"));

  j["temporal_mode"] = 1;  // declared on the other mode
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "temporal"));

  j["temporal_mode"] = 0;
  const GenConfig config = parse_config(j);
  CHECK(config.modes[0].kind == ModeKind::periodic);

  j["temporal_mode"] = 5;
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "temporal_mode"));
}

TEST_CASE("orthogonal factors need at least as many rows as columns") {
  json j = minimal_config();
  j["model"] = {{"type", "cp"}, {"rank", 5}};
  j["factors"] = {{{"method", "orthogonal"}}, {{"method", "uniform"}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }),
                 "rows >= columns"));
}

TEST_CASE("congruence effect rejects values outside the pd range") {
  json j = minimal_config();
  j["model"] = {{"type", "cp"}, {"rank", 3}};
  j["effects"] = {{{"kind", "column_congruence"}, {"mode", 0}, {"c", -0.6}}};
  const std::string message = error_message<ConfigError>([&] { parse_config(j); });
  CHECK(mentions(message, "positive definite"));
  j["effects"][0]["c"] = 0.4;
  CHECK(parse_config(j).effects.size() == 1);
}

TEST_CASE("effects must be listed in pipeline stage order") {
  json j = minimal_config();
  j["effects"] = {{{"kind", "awgn"}, {"snr_db", 10.0}}, {{"kind", "factor_noise"}, {"eta", 0.1}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "ordered by stage"));
}

TEST_CASE("count sampling can only be the last effect") {
  json j = minimal_config();
  j["effects"] = {{{"kind", "poisson_count"}}, {{"kind", "awgn"}, {"snr_db", 10.0}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "last"));
  j["effects"] = {{{"kind", "poisson_count"}}};
  CHECK(parse_config(j).representation == "sparse");
}

TEST_CASE("model stage effects require a cp model") {
  json j = minimal_config();
  j["model"] = {{"type", "tucker"}, {"ranks", {2, 2}}};
  j["effects"] = {{{"kind", "sign_fix"}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "cp"));
}

TEST_CASE("change point defaults to the temporal mode") {
  json j{{"seed", 1},
         {"shape", {10, 4}},
         {"temporal_mode", 0},
         {"factors",
          {{{"method", "streaming"}, {"epsilon", 0.2}}, {{"method", "uniform"}}}},
         {"effects", {{{"kind", "change_point"}, {"column", 0}, {"start", 3}, {"end", 7}}}}};
  const GenConfig config = parse_config(j);
  CHECK(config.effects[0].params.at("mode") == 0);

  json no_mode = minimal_config();
  no_mode["effects"] = {{{"kind", "change_point"}, {"column", 0}, {"start", 1}, {"end", 2}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(no_mode); }), "mode"));
}

TEST_CASE("change point window must fit the mode extent") {
  json j = minimal_config();
  j["effects"] = {
      {{"kind", "change_point"}, {"mode", 1}, {"column", 0}, {"start", 2}, {"end", 5}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "end"));
}

TEST_CASE("anomaly blocks are validated per mode") {
  json j = minimal_config();
  j["effects"] = {{{"kind", "anomaly"}, {"block", {{0, 2}}}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "block"));
  j["effects"] = {{{"kind", "anomaly"}, {"block", {{0, 2}, {1, 1}}}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "block"));
  j["effects"] = {{{"kind", "anomaly"}, {"block", {{0, 2}, {1, 3}}}}};
  const GenConfig config = parse_config(j);
  CHECK(config.effects[0].params.at("rank") == 1);
  CHECK(config.effects[0].params.at("amplitude") == 1.0);
}

TEST_CASE("snr must be a finite number in configs") {
  json j = minimal_config();
  j["effects"] = {{{"kind", "awgn"}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "snr_db"));
  j["effects"] = {{{"kind", "sparse_noise"}, {"snr_db", 10.0}, {"density", 0.0}}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "density"));
}

TEST_CASE("output format is deduced from the extension when omitted") {
  json j = minimal_config();
  j["output"] = {{"path", "x.h5"}};
  CHECK(*parse_config(j).output.format == FileFormat::hdf5);
  j["output"] = {{"path", "x.csv"}};
  CHECK(*parse_config(j).output.format == FileFormat::csv);
  j["output"] = {{"path", "x.bin"}};
  CHECK(mentions(error_message<ConfigError>([&] { parse_config(j); }), "format"));
  j["output"] = {{"path", "x.bin"}, {"format", "hdf5"}};
  CHECK(*parse_config(j).output.format == FileFormat::hdf5);
}

TEST_CASE("materialized configs parse back to the same document") {
  json j{{"seed", 9},
         {"shape", {6, 5, 12}},
         {"temporal_mode", 2},
         {"model",
          {{"type", "cp"}, {"rank", 2}, {"weights", {{"method", "uniform"}}}}},
         {"factors",
          {{{"method", "gamma"}, {"mu", 0.5}},
           {{"method", "orthogonal"}},
           {{"method", "seasonal"},
            {"cycles", {{{"length", 4}}, {{"length", 6}, {"growth", 0.05}}}}}}},
         {"effects",
          {{{"kind", "factor_noise"}, {"eta", 0.05}},
           {{"kind", "sign_fix"}},
           {{"kind", "awgn"}, {"snr_db", 15.0}}}}};
  const GenConfig config = parse_config(j);
  const json materialized = config_to_json(config);
  const GenConfig reparsed = parse_config(materialized);
  CHECK(config_to_json(reparsed) == materialized);
}

TEST_CASE("a manifest rebuilds the config that generated it") {
  json j{{"seed", 77},
         {"shape", {5, 4, 9}},
         {"temporal_mode", 2},
         {"model", {{"type", "cp"}, {"rank", 2}, {"weights", {{"method", "normal"}}}}},
         {"factors",
          {{{"method", "multi_normal"}, {"mus", {0.0, 1.0}}, {"sigmas", {1.0, 0.5}}},
           {{"method", "uniform"}},
           {{"method", "periodic"},
            {"waves", {{{"waveform", "sine"}, {"frequency", 2.0}},
                       {{"waveform", "square"}}}}}}},
         {"effects",
          {{{"kind", "change_point"}, {"column", 1}, {"start", 3}, {"end", 6},
            {"magnitude", 1.5}},
           {{"kind", "awgn"}, {"snr_db", 20.0}}}}};
  const GenConfig config = parse_config(j);
  const Dataset dataset = generate(config);
  const GenConfig replay = config_from_manifest(dataset.manifest);

  json original = config_to_json(config);
  original.erase("output");
  json rebuilt = config_to_json(replay);
  rebuilt.erase("output");
  CHECK(rebuilt == original);
}
