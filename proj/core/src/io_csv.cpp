#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "io_detail.hpp"
#include "tensorgen/errors.hpp"

namespace tensorgen::detail {

namespace {

constexpr Index kDenseCsvWarnThreshold = 10'000'000;

std::string mode_file(const std::string& stem, Index n) {
  return stem + ".mode" + std::to_string(n + 1) + ".csv";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string tensor_header(Index order, char prefix) {
  std::string header;
  for (Index n = 0; n < order; ++n) {
    header += prefix;
    header += std::to_string(n + 1);
    header += ',';
  }
  header += "value";
  return header;
}

void append_row(std::string& body, std::span<const Index> index, double value) {
  for (Index i : index) {
    body += std::to_string(i + 1);
    body += ',';
  }
  body += format_double(value);
  body += '\n';
}

std::string dense_coordinate_body(const DenseTensor& t, char prefix) {
  std::string body = tensor_header(t.shape().order(), prefix);
  body += '\n';
  std::vector<Index> index(static_cast<std::size_t>(t.shape().order()), 0);
  for (Index p = 0; p < t.numel(); ++p) {
    append_row(body, index, t[p]);
    for (Index n = t.shape().order() - 1; n >= 0; --n) {
      auto& i = index[static_cast<std::size_t>(n)];
      if (++i < t.shape().dim(n)) break;
      i = 0;
    }
  }
  return body;
}

std::string matrix_body(const Matrix& m) {
  std::string body;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) body += ',';
      body += format_double(m(r, c));
    }
    body += '\n';
  }
  return body;
}

// -- reading ----------------------------------------------------------------

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (in.bad()) throw IoError("read from '" + path + "' failed");
  return lines;
}

std::vector<std::string_view> split_fields(const std::string& line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.emplace_back(line.data() + start, line.size() - start);
      return fields;
    }
    fields.emplace_back(line.data() + start, comma - start);
    start = comma + 1;
  }
}

[[noreturn]] void malformed(const std::string& path, std::size_t line_no,
                            const std::string& what) {
  throw IoError("'" + path + "' line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view field, const std::string& path, std::size_t line_no) {
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
    malformed(path, line_no, "'" + std::string(field) + "' is not a number");
  return value;
}

Index parse_one_based_index(std::string_view field, const std::string& path,
                            std::size_t line_no) {
  Index value = 0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
    malformed(path, line_no, "'" + std::string(field) + "' is not an index");
  if (value < 1)
    malformed(path, line_no, "index " + std::to_string(value) + " out of range (indices are 1-based)");
  return value - 1;
}

struct CoordinateFile {
  Index order = 0;
  std::vector<std::vector<Index>> indices;  // 0-based
  std::vector<double> values;
};

CoordinateFile read_coordinate_file(const std::string& path, char prefix) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError("'" + path + "' is empty");
  CoordinateFile file;
  const auto header = split_fields(lines[0]);
  if (header.size() < 3 || header.back() != "value")
    malformed(path, 1, "expected a header like " + tensor_header(2, prefix));
  file.order = static_cast<Index>(header.size()) - 1;
  if (lines[0] != tensor_header(file.order, prefix))
    malformed(path, 1, "expected the header " + tensor_header(file.order, prefix));
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty() && k + 1 == lines.size()) break;  // trailing newline
    const auto fields = split_fields(lines[k]);
    if (static_cast<Index>(fields.size()) != file.order + 1)
      malformed(path, k + 1, "expected " + std::to_string(file.order + 1) + " fields");
    std::vector<Index> index;
    index.reserve(static_cast<std::size_t>(file.order));
    for (Index n = 0; n < file.order; ++n)
      index.push_back(parse_one_based_index(fields[static_cast<std::size_t>(n)], path, k + 1));
    file.indices.push_back(std::move(index));
    file.values.push_back(parse_double(fields.back(), path, k + 1));
  }
  return file;
}

Matrix read_matrix_file(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty() && k + 1 == lines.size()) break;
    const auto fields = split_fields(lines[k]);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& field : fields) row.push_back(parse_double(field, path, k + 1));
    if (!rows.empty() && rows.front().size() != row.size())
      malformed(path, k + 1, "inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("'" + path + "' is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

DenseTensor dense_from_coordinates(const CoordinateFile& file, const Shape& shape,
                                   const std::string& path) {
  if (static_cast<Index>(file.values.size()) != shape.numel())
    throw IoError("'" + path + "': dense data must list every entry exactly once");
  std::vector<double> values(static_cast<std::size_t>(shape.numel()), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(shape.numel()), false);
  for (std::size_t k = 0; k < file.values.size(); ++k) {
    Index linear = 0;
    try {
      linear = shape.linear_index(file.indices[k]);
    } catch (const Error&) {
      throw IoError("'" + path + "': index out of range for shape in manifest");
    }
    if (seen[static_cast<std::size_t>(linear)])
      throw IoError("'" + path + "': duplicate index tuple in dense data");
    seen[static_cast<std::size_t>(linear)] = true;
    values[static_cast<std::size_t>(linear)] = file.values[k];
  }
  return DenseTensor(shape, std::move(values));
}

SparseTensor sparse_from_coordinates(const CoordinateFile& file, const Shape& shape,
                                     const std::string& path) {
  std::vector<SparseEntry> entries;
  entries.reserve(file.values.size());
  for (std::size_t k = 0; k < file.values.size(); ++k)
    entries.push_back({file.indices[k], file.values[k]});
  try {
    return SparseTensor(shape, std::move(entries));
  } catch (const Error& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

}  // namespace

std::vector<std::string> export_csv(const Dataset& dataset, const std::string& path,
                                    bool overwrite) {
  const std::string stem = path_stem(path);
  const Shape& shape = dataset.shape();
  const Index order = shape.order();
  const bool has_model = dataset.cp.has_value() || dataset.tucker.has_value();

  std::vector<std::string> paths{path};
  if (has_model) {
    for (Index n = 0; n < order; ++n) paths.push_back(mode_file(stem, n));
    paths.push_back(stem + (dataset.cp ? ".lambda.csv" : ".core.csv"));
  }
  paths.push_back(stem + ".manifest.json");
  check_collisions(paths, overwrite);

  if (dataset.dense) {
    if (dataset.dense->numel() > kDenseCsvWarnThreshold)
      std::fprintf(stderr,
                   "warning: writing %lld dense entries to CSV; HDF5 is recommended at this "
                   "size\n",
                   static_cast<long long>(dataset.dense->numel()));
    write_file(path, dense_coordinate_body(*dataset.dense, 'i'));
  } else {
    std::string body = tensor_header(order, 'i');
    body += '\n';
    for (const SparseEntry& entry : dataset.sparse->entries())
      append_row(body, entry.index, entry.value);
    write_file(path, body);
  }

  if (has_model) {
    const auto& factors = dataset.cp ? dataset.cp->factors : dataset.tucker->factors;
    for (Index n = 0; n < order; ++n)
      write_file(mode_file(stem, n), matrix_body(factors[static_cast<std::size_t>(n)]));
    if (dataset.cp) {
      std::string body;
      for (Index r = 0; r < dataset.cp->lambda.size(); ++r) {
        body += format_double(dataset.cp->lambda[r]);
        body += '\n';
      }
      write_file(stem + ".lambda.csv", body);
    } else {
      write_file(stem + ".core.csv", dense_coordinate_body(dataset.tucker->core, 'r'));
    }
  }

  nlohmann::json manifest_json = manifest_to_json(dataset.manifest);
  manifest_json["index_base"] = 1;
  write_file(stem + ".manifest.json", manifest_json.dump(2) + "\n");
  return paths;
}

Dataset import_csv(const std::string& path, bool require_manifest) {
  const std::string stem = path_stem(path);
  const std::string manifest_path = stem + ".manifest.json";

  Dataset dataset;
  std::error_code ec;
  const bool have_manifest = std::filesystem::exists(manifest_path, ec);
  if (!have_manifest && require_manifest)
    throw IoError("manifest sidecar '" + manifest_path + "' not found");

  const CoordinateFile file = read_coordinate_file(path, 'i');

  if (!have_manifest) {
    // Inspection fallback: infer the shape from the largest index seen.
    std::vector<Index> dims(static_cast<std::size_t>(file.order), 1);
    for (const auto& index : file.indices)
      for (Index n = 0; n < file.order; ++n)
        dims[static_cast<std::size_t>(n)] =
            std::max(dims[static_cast<std::size_t>(n)], index[static_cast<std::size_t>(n)] + 1);
    const Shape shape(dims);
    if (static_cast<Index>(file.values.size()) == shape.numel()) {
      dataset.dense = dense_from_coordinates(file, shape, path);
      dataset.manifest.representation = "dense";
    } else {
      dataset.sparse = sparse_from_coordinates(file, shape, path);
      dataset.manifest.representation = "sparse";
    }
    dataset.manifest.shape = shape.dims();
    dataset.manifest.created.clear();
    return dataset;
  }

  nlohmann::json manifest_json;
  {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open '" + manifest_path + "'");
    try {
      manifest_json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("'" + manifest_path + "' is not valid JSON: " + e.what());
    }
  }
  if (manifest_json.contains("index_base") && manifest_json.at("index_base").get<Index>() != 1)
    throw IoError("'" + manifest_path + "': CSV files written by this tool are 1-based");
  dataset.manifest = manifest_from_json(manifest_json);

  const Shape shape(dataset.manifest.shape);
  if (file.order != shape.order())
    throw IoError("'" + path + "': column count disagrees with the manifest shape");
  if (dataset.manifest.representation == "dense")
    dataset.dense = dense_from_coordinates(file, shape, path);
  else
    dataset.sparse = sparse_from_coordinates(file, shape, path);

  const std::string weights_path =
      stem + (dataset.manifest.model_type == "cp" ? ".lambda.csv" : ".core.csv");
  if (std::filesystem::exists(weights_path, ec)) {
    std::vector<Matrix> factors;
    for (Index n = 0; n < shape.order(); ++n) {
      const Matrix factor = read_matrix_file(mode_file(stem, n));
      if (factor.rows() != shape.dim(n))
        throw IoError("'" + mode_file(stem, n) + "': row count disagrees with the manifest");
      factors.push_back(factor);
    }
    if (dataset.manifest.model_type == "cp") {
      const Matrix lambda = read_matrix_file(weights_path);
      if (lambda.cols() != 1)
        throw IoError("'" + weights_path + "': expected a single value per line");
      CpModel model;
      model.factors = std::move(factors);
      model.lambda = lambda.col(0);
      try {
        model.validate();
      } catch (const Error& e) {
        throw IoError("'" + path + "': inconsistent model files: " + e.what());
      }
      dataset.cp = std::move(model);
    } else {
      const CoordinateFile core_file = read_coordinate_file(weights_path, 'r');
      const Shape core_shape(dataset.manifest.ranks);
      TuckerModel model;
      model.factors = std::move(factors);
      model.core = dense_from_coordinates(core_file, core_shape, weights_path);
      try {
        model.validate();
      } catch (const Error& e) {
        throw IoError("'" + path + "': inconsistent model files: " + e.what());
      }
      dataset.tucker = std::move(model);
    }
  }
  return dataset;
}

}  // namespace tensorgen::detail
