#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tensorgen/config.hpp"
#include "tensorgen/errors.hpp"
#include "tensorgen/io.hpp"
#include "tensorgen/pipeline.hpp"

namespace {

using nlohmann::json;

// Exit codes: 1 bad config or parameters, 2 I/O, 3 numerical failure.
int fail(const std::string& message, int code) {
  std::cerr << "tensorgen: error: " << message << "\n";
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const tensorgen::ConfigError& e) {
    return fail(e.what(), 1);
  } catch (const tensorgen::ParameterError& e) {
    return fail(e.what(), 1);
  } catch (const tensorgen::StructuralError& e) {
    return fail(e.what(), 1);
  } catch (const tensorgen::IoError& e) {
    return fail(e.what(), 2);
  } catch (const tensorgen::NumericalError& e) {
    return fail(e.what(), 3);
  } catch (const tensorgen::DegenerateModelError& e) {
    return fail(e.what(), 3);
  } catch (const std::exception& e) {
    return fail(e.what(), 1);
  }
}

std::string shape_string(const std::vector<tensorgen::Index>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(dims[i]);
  }
  return out;
}

std::string ranks_string(const std::string& model_type, const std::vector<tensorgen::Index>& ranks) {
  if (model_type == "cp") return "cp rank " + std::to_string(ranks.empty() ? 0 : ranks.front());
  return "tucker ranks " + shape_string(ranks);
}

struct GenerateArgs {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  bool overwrite = false;
  bool as_json = false;
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tensorgen::IoError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw tensorgen::ConfigError(path, std::string("not valid JSON: ") + e.what());
  }
}

/// Fold the command-line overrides into the raw config document so that
/// parse_config validates the combination the run will actually use.
json apply_overrides(json raw, const GenerateArgs& args, json& overrides) {
  overrides = json::object();
  if (args.seed) {
    raw["seed"] = *args.seed;
    overrides["seed"] = *args.seed;
  }
  if (!args.out_path.empty()) {
    raw["output"]["path"] = args.out_path;
    overrides["output.path"] = args.out_path;
  }
  if (!args.format.empty()) {
    raw["output"]["format"] = args.format;
    overrides["output.format"] = args.format;
  }
  if (args.overwrite) {
    raw["output"]["overwrite"] = true;
    overrides["output.overwrite"] = true;
  }
  return raw;
}

int run_generate(const GenerateArgs& args, bool verbose) {
  json overrides;
  const json raw = apply_overrides(load_json_file(args.config_path), args, overrides);
  const tensorgen::GenConfig config = tensorgen::parse_config(raw);

  if (verbose) std::cerr << "tensorgen: generating (seed " << config.seed << ")\n";
  tensorgen::Dataset dataset = tensorgen::generate(config);
  dataset.manifest.overrides = overrides;

  std::vector<std::string> files;
  if (!config.output.path.empty()) {
    const tensorgen::FileFormat format = config.output.format
                                             ? *config.output.format
                                             : tensorgen::file_format_from_path(config.output.path);
    if (verbose) std::cerr << "tensorgen: writing " << config.output.path << "\n";
    files = tensorgen::export_dataset(dataset, config.output.path, format,
                                      config.output.overwrite);
  } else if (verbose) {
    std::cerr << "tensorgen: no output path configured, skipping export\n";
  }

  const tensorgen::Manifest& m = dataset.manifest;
  std::vector<std::string> effect_kinds;
  for (const auto& record : m.effects) effect_kinds.push_back(record.kind);

  if (args.as_json) {
    json summary{{"seed", m.seed},
                 {"shape", m.shape},
                 {"model_type", m.model_type},
                 {"ranks", m.ranks},
                 {"representation", m.representation},
                 {"numel", dataset.shape().numel()},
                 {"nnz", dataset.nnz()},
                 {"norm", dataset.norm()},
                 {"effects", effect_kinds},
                 {"files", files}};
    if (m.temporal_mode) summary["temporal_mode"] = *m.temporal_mode;
    std::cout << summary.dump(2) << "\n";
    return 0;
  }

  std::cout << "seed:           " << m.seed << "\n";
  std::cout << "shape:          " << shape_string(m.shape) << "\n";
  std::cout << "model:          " << ranks_string(m.model_type, m.ranks) << "\n";
  if (m.temporal_mode) std::cout << "temporal mode:  " << *m.temporal_mode << "\n";
  if (!effect_kinds.empty()) {
    std::cout << "effects:        ";
    for (std::size_t i = 0; i < effect_kinds.size(); ++i)
      std::cout << (i ? ", " : "") << effect_kinds[i];
    std::cout << "\n";
  }
  std::cout << "representation: " << m.representation << " (" << dataset.nnz() << " of "
            << dataset.shape().numel() << " entries stored)\n";
  std::cout << "frobenius norm: " << dataset.norm() << "\n";
  for (std::size_t i = 0; i < files.size(); ++i)
    std::cout << (i == 0 ? "wrote:          " : "                ") << files[i] << "\n";
  return 0;
}

int run_validate(const std::string& config_path, bool as_json, bool verbose) {
  const tensorgen::GenConfig config = tensorgen::parse_config(load_json_file(config_path));
  const json materialized = tensorgen::config_to_json(config);
  if (as_json) {
    std::cout << json{{"status", "ok"}, {"config", materialized}}.dump(2) << "\n";
  } else {
    std::cout << "OK\n";
    if (verbose) std::cout << materialized.dump(2) << "\n";
  }
  return 0;
}

int run_inspect(const std::string& path, bool as_json) {
  const tensorgen::Dataset dataset = tensorgen::import_dataset(path, /*require_manifest=*/false);
  const tensorgen::Manifest& m = dataset.manifest;
  const bool degraded = m.created.empty();
  if (degraded)
    std::cerr << "tensorgen: warning: '" << path
              << "' has no manifest; reporting tensor statistics only\n";

  const tensorgen::Index numel = dataset.shape().numel();
  const tensorgen::Index nnz = dataset.nnz();
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto fold = [&](double v) {
    lo = first ? v : std::min(lo, v);
    hi = first ? v : std::max(hi, v);
    first = false;
  };
  if (dataset.dense)
    for (double v : dataset.dense->values()) fold(v);
  else
    for (const auto& entry : dataset.sparse->entries()) fold(entry.value);

  std::vector<std::string> effect_kinds;
  for (const auto& record : m.effects) effect_kinds.push_back(record.kind);

  if (as_json) {
    json summary{{"file", path},
                 {"shape", m.shape},
                 {"representation", dataset.dense ? "dense" : "sparse"},
                 {"numel", numel},
                 {"nnz", nnz},
                 {"density", numel > 0 ? static_cast<double>(nnz) / static_cast<double>(numel) : 0.0},
                 {"norm", dataset.norm()},
                 {"has_manifest", !degraded}};
    if (!first) {
      summary["min"] = lo;
      summary["max"] = hi;
    }
    if (!degraded) summary["manifest"] = tensorgen::manifest_to_json(m);
    std::cout << summary.dump(2) << "\n";
    return 0;
  }

  std::cout << "file:           " << path << "\n";
  std::cout << "shape:          " << shape_string(m.shape) << " (" << numel << " entries)\n";
  std::cout << "representation: " << (dataset.dense ? "dense" : "sparse") << "\n";
  std::cout << "nonzeros:       " << nnz;
  if (numel > 0)
    std::cout << " (density " << static_cast<double>(nnz) / static_cast<double>(numel) << ")";
  std::cout << "\n";
  std::cout << "frobenius norm: " << dataset.norm() << "\n";
  if (!first) std::cout << "value range:    [" << lo << ", " << hi << "]\n";
  if (!degraded) {
    std::cout << "seed:           " << m.seed << "\n";
    std::cout << "model:          " << ranks_string(m.model_type, m.ranks) << "\n";
    if (m.temporal_mode) std::cout << "temporal mode:  " << *m.temporal_mode << "\n";
    if (!effect_kinds.empty()) {
      std::cout << "effects:        ";
      for (std::size_t i = 0; i < effect_kinds.size(); ++i)
        std::cout << (i ? ", " : "") << effect_kinds[i];
      std::cout << "\n";
    }
    std::cout << "created:        " << m.created << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seedable generator of synthetic tensor datasets with known structure"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print progress to stderr");

  GenerateArgs gen_args;
  bool gen_json = false;
  CLI::App* gen = app.add_subcommand("generate", "Generate a dataset from a config file");
  gen->fallthrough();
  gen->add_option("-c,--config", gen_args.config_path, "Config file (JSON)")->required();
  gen->add_option("-o,--out", gen_args.out_path, "Output path (overrides the config)");
  gen->add_option("--format", gen_args.format, "Output format (overrides the config)")
      ->check(CLI::IsMember({"csv", "hdf5"}));
  gen->add_option("--seed", gen_args.seed, "Seed (overrides the config)");
  gen->add_flag("--overwrite", gen_args.overwrite, "Replace existing output files");
  gen->add_flag("--json", gen_json, "Print a JSON summary to stdout");

  std::string validate_config;
  bool validate_json = false;
  CLI::App* validate = app.add_subcommand("validate", "Check a config file without generating");
  validate->fallthrough();
  validate->add_option("-c,--config", validate_config, "Config file (JSON)")->required();
  validate->add_flag("--json", validate_json, "Print the materialized config as JSON");

  std::string inspect_path;
  bool inspect_json = false;
  CLI::App* inspect = app.add_subcommand("inspect", "Summarize a previously written dataset");
  inspect->fallthrough();
  inspect->add_option("file", inspect_path, "Dataset file (.csv, .h5, .hdf5)")->required();
  inspect->add_flag("--json", inspect_json, "Print a JSON summary to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    gen_args.as_json = gen_json;
    return guarded([&] { return run_generate(gen_args, verbose); });
  }
  if (validate->parsed())
    return guarded([&] { return run_validate(validate_config, validate_json, verbose); });
  return guarded([&] { return run_inspect(inspect_path, inspect_json); });
}
