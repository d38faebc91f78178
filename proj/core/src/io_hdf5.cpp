#include <cstdint>
#include <string>
#include <vector>

#include <hdf5.h>

#include "io_detail.hpp"
#include "tensorgen/errors.hpp"

namespace tensorgen::detail {

namespace {

// Failures surface as IoError; the library's default print-to-stderr
// handler would only duplicate that.
void silence_hdf5_errors() {
  static const bool once = [] {
    H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
    return true;
  }();
  (void)once;
}

void check(herr_t status, const char* what) {
  if (status < 0) throw IoError(std::string(what) + " failed");
}

class Handle {
 public:
  Handle(hid_t id, herr_t (*closer)(hid_t), const std::string& what)
      : id_(id), closer_(closer) {
    if (id_ < 0) throw IoError(what + " failed");
  }
  Handle(Handle&& other) noexcept : id_(other.id_), closer_(other.closer_) { other.id_ = -1; }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle& operator=(Handle&&) = delete;
  ~Handle() {
    if (id_ >= 0 && closer_) closer_(id_);
  }
  operator hid_t() const { return id_; }

 private:
  hid_t id_;
  herr_t (*closer_)(hid_t);
};

Handle no_track_times(hid_t pclass, const char* what) {
  Handle plist(H5Pcreate(pclass), H5Pclose, what);
  // Object timestamps are the one nondeterministic byte source in the file.
  check(H5Pset_obj_track_times(plist, 0), "H5Pset_obj_track_times");
  return plist;
}

Handle make_group(hid_t loc, const char* name, hid_t gcpl) {
  return Handle(H5Gcreate2(loc, name, H5P_DEFAULT, gcpl, H5P_DEFAULT), H5Gclose,
                std::string("creating group ") + name);
}

void write_f64_dataset(hid_t loc, const char* name, const std::vector<hsize_t>& dims,
                       const double* data, hid_t dcpl) {
  Handle space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose,
               "H5Screate_simple");
  Handle dset(H5Dcreate2(loc, name, H5T_IEEE_F64LE, space, H5P_DEFAULT, dcpl, H5P_DEFAULT),
              H5Dclose, std::string("creating dataset ") + name);
  hsize_t count = 1;
  for (hsize_t d : dims) count *= d;
  if (count > 0)
    check(H5Dwrite(dset, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, data), "H5Dwrite");
}

void write_i64_dataset(hid_t loc, const char* name, const std::vector<hsize_t>& dims,
                       const std::int64_t* data, hid_t dcpl) {
  Handle space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose,
               "H5Screate_simple");
  Handle dset(H5Dcreate2(loc, name, H5T_STD_I64LE, space, H5P_DEFAULT, dcpl, H5P_DEFAULT),
              H5Dclose, std::string("creating dataset ") + name);
  hsize_t count = 1;
  for (hsize_t d : dims) count *= d;
  if (count > 0)
    check(H5Dwrite(dset, H5T_NATIVE_INT64, H5S_ALL, H5S_ALL, H5P_DEFAULT, data), "H5Dwrite");
}

void write_string_dataset(hid_t loc, const char* name, const std::string& value, hid_t dcpl) {
  Handle type(H5Tcopy(H5T_C_S1), H5Tclose, "H5Tcopy");
  check(H5Tset_size(type, value.size() + 1), "H5Tset_size");
  check(H5Tset_cset(type, H5T_CSET_UTF8), "H5Tset_cset");
  Handle space(H5Screate(H5S_SCALAR), H5Sclose, "H5Screate");
  Handle dset(H5Dcreate2(loc, name, type, space, H5P_DEFAULT, dcpl, H5P_DEFAULT), H5Dclose,
              std::string("creating dataset ") + name);
  check(H5Dwrite(dset, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, value.c_str()), "H5Dwrite");
}

void write_string_attr(hid_t loc, const char* name, const std::string& value) {
  Handle type(H5Tcopy(H5T_C_S1), H5Tclose, "H5Tcopy");
  check(H5Tset_size(type, value.size() + 1), "H5Tset_size");
  check(H5Tset_cset(type, H5T_CSET_UTF8), "H5Tset_cset");
  Handle space(H5Screate(H5S_SCALAR), H5Sclose, "H5Screate");
  Handle attr(H5Acreate2(loc, name, type, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose,
              std::string("creating attribute ") + name);
  check(H5Awrite(attr, type, value.c_str()), "H5Awrite");
}

void write_u64_attr(hid_t loc, const char* name, std::uint64_t value) {
  Handle space(H5Screate(H5S_SCALAR), H5Sclose, "H5Screate");
  Handle attr(H5Acreate2(loc, name, H5T_STD_U64LE, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose,
              std::string("creating attribute ") + name);
  check(H5Awrite(attr, H5T_NATIVE_UINT64, &value), "H5Awrite");
}

void write_i64_attr(hid_t loc, const char* name, std::int64_t value) {
  Handle space(H5Screate(H5S_SCALAR), H5Sclose, "H5Screate");
  Handle attr(H5Acreate2(loc, name, H5T_STD_I64LE, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose,
              std::string("creating attribute ") + name);
  check(H5Awrite(attr, H5T_NATIVE_INT64, &value), "H5Awrite");
}

void write_shape_attr(hid_t loc, const char* name, const std::vector<Index>& dims) {
  const hsize_t len = dims.size();
  Handle space(H5Screate_simple(1, &len, nullptr), H5Sclose, "H5Screate_simple");
  Handle attr(H5Acreate2(loc, name, H5T_STD_I64LE, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose,
              std::string("creating attribute ") + name);
  static_assert(sizeof(Index) == sizeof(std::int64_t));
  check(H5Awrite(attr, H5T_NATIVE_INT64, dims.data()), "H5Awrite");
}

bool link_exists(hid_t loc, const char* path) {
  return H5Lexists(loc, path, H5P_DEFAULT) > 0;
}

std::vector<hsize_t> dataset_dims(hid_t dset, const std::string& what) {
  Handle space(H5Dget_space(dset), H5Sclose, "H5Dget_space");
  const int rank = H5Sget_simple_extent_ndims(space);
  if (rank < 0) throw IoError("reading the extent of " + what + " failed");
  std::vector<hsize_t> dims(static_cast<std::size_t>(rank));
  H5Sget_simple_extent_dims(space, dims.data(), nullptr);
  return dims;
}

struct F64Data {
  std::vector<hsize_t> dims;
  std::vector<double> values;
};

F64Data read_f64_dataset(hid_t loc, const char* name) {
  Handle dset(H5Dopen2(loc, name, H5P_DEFAULT), H5Dclose, std::string("opening dataset ") + name);
  F64Data data;
  data.dims = dataset_dims(dset, name);
  hsize_t count = 1;
  for (hsize_t d : data.dims) count *= d;
  data.values.resize(count);
  if (count > 0)
    check(H5Dread(dset, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, data.values.data()),
          "H5Dread");
  return data;
}

struct I64Data {
  std::vector<hsize_t> dims;
  std::vector<std::int64_t> values;
};

I64Data read_i64_dataset(hid_t loc, const char* name) {
  Handle dset(H5Dopen2(loc, name, H5P_DEFAULT), H5Dclose, std::string("opening dataset ") + name);
  I64Data data;
  data.dims = dataset_dims(dset, name);
  hsize_t count = 1;
  for (hsize_t d : data.dims) count *= d;
  data.values.resize(count);
  if (count > 0)
    check(H5Dread(dset, H5T_NATIVE_INT64, H5S_ALL, H5S_ALL, H5P_DEFAULT, data.values.data()),
          "H5Dread");
  return data;
}

std::string read_string_dataset(hid_t loc, const char* name) {
  Handle dset(H5Dopen2(loc, name, H5P_DEFAULT), H5Dclose, std::string("opening dataset ") + name);
  Handle type(H5Dget_type(dset), H5Tclose, "H5Dget_type");
  if (H5Tget_class(type) != H5T_STRING || H5Tis_variable_str(type) > 0)
    throw IoError(std::string(name) + " is not a fixed-length string dataset");
  const std::size_t size = H5Tget_size(type);
  std::string buffer(size, '\0');
  check(H5Dread(dset, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, buffer.data()), "H5Dread");
  buffer.resize(buffer.find('\0') == std::string::npos ? size : buffer.find('\0'));
  return buffer;
}

std::uint64_t read_u64_attr(hid_t loc, const char* name) {
  Handle attr(H5Aopen(loc, name, H5P_DEFAULT), H5Aclose, std::string("opening attribute ") + name);
  std::uint64_t value = 0;
  check(H5Aread(attr, H5T_NATIVE_UINT64, &value), "H5Aread");
  return value;
}

std::vector<Index> read_shape_attr(hid_t loc, const char* name) {
  Handle attr(H5Aopen(loc, name, H5P_DEFAULT), H5Aclose, std::string("opening attribute ") + name);
  Handle space(H5Aget_space(attr), H5Sclose, "H5Aget_space");
  hsize_t len = 0;
  if (H5Sget_simple_extent_ndims(space) != 1) throw IoError("malformed shape attribute");
  H5Sget_simple_extent_dims(space, &len, nullptr);
  std::vector<Index> dims(len);
  check(H5Aread(attr, H5T_NATIVE_INT64, dims.data()), "H5Aread");
  return dims;
}

std::vector<double> row_major(const Matrix& m) {
  std::vector<double> buffer(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      buffer[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return buffer;
}

Matrix matrix_from(const F64Data& data, const std::string& what) {
  if (data.dims.size() != 2) throw IoError(what + " is not two-dimensional");
  const Index rows = static_cast<Index>(data.dims[0]);
  const Index cols = static_cast<Index>(data.dims[1]);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      m(r, c) = data.values[static_cast<std::size_t>(r * cols + c)];
  return m;
}

}  // namespace

std::vector<std::string> export_hdf5(const Dataset& dataset, const std::string& path,
                                     bool overwrite) {
  silence_hdf5_errors();
  check_collisions({path}, overwrite);
  const Shape& shape = dataset.shape();
  const Index order = shape.order();

  Handle fcpl = no_track_times(H5P_FILE_CREATE, "H5Pcreate(file)");
  Handle gcpl = no_track_times(H5P_GROUP_CREATE, "H5Pcreate(group)");
  Handle dcpl = no_track_times(H5P_DATASET_CREATE, "H5Pcreate(dataset)");
  Handle file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, fcpl, H5P_DEFAULT), H5Fclose,
              "creating '" + path + "'");

  write_string_attr(file, "format_version", dataset.manifest.format_version);
  write_u64_attr(file, "seed", dataset.manifest.seed);
  write_shape_attr(file, "shape", shape.dims());
  write_i64_attr(file, "index_base", 0);

  if (dataset.dense) {
    std::vector<hsize_t> dims;
    for (Index d : shape.dims()) dims.push_back(static_cast<hsize_t>(d));
    write_f64_dataset(file, "tensor", dims, dataset.dense->data(), dcpl);
  } else {
    Handle group = make_group(file, "sparse", gcpl);
    const auto& entries = dataset.sparse->entries();
    const hsize_t nnz = entries.size();
    std::vector<std::int64_t> coords;
    std::vector<double> values;
    coords.reserve(nnz * static_cast<hsize_t>(order));
    values.reserve(nnz);
    for (const SparseEntry& entry : entries) {
      coords.insert(coords.end(), entry.index.begin(), entry.index.end());
      values.push_back(entry.value);
    }
    write_i64_dataset(group, "coords", {nnz, static_cast<hsize_t>(order)}, coords.data(), dcpl);
    write_f64_dataset(group, "values", {nnz}, values.data(), dcpl);
  }

  if (dataset.cp || dataset.tucker) {
    Handle model = make_group(file, "model", gcpl);
    Handle factors_group = make_group(model, "factors", gcpl);
    const auto& factors = dataset.cp ? dataset.cp->factors : dataset.tucker->factors;
    for (Index n = 0; n < order; ++n) {
      const Matrix& factor = factors[static_cast<std::size_t>(n)];
      const std::string name = "mode" + std::to_string(n + 1);
      write_f64_dataset(factors_group, name.c_str(),
                        {static_cast<hsize_t>(factor.rows()), static_cast<hsize_t>(factor.cols())},
                        row_major(factor).data(), dcpl);
    }
    if (dataset.cp) {
      write_f64_dataset(model, "lambda", {static_cast<hsize_t>(dataset.cp->lambda.size())},
                        dataset.cp->lambda.data(), dcpl);
    } else {
      std::vector<hsize_t> dims;
      for (Index d : dataset.tucker->core.shape().dims()) dims.push_back(static_cast<hsize_t>(d));
      write_f64_dataset(model, "core", dims, dataset.tucker->core.data(), dcpl);
    }
  }

  Handle meta = make_group(file, "meta", gcpl);
  write_string_dataset(meta, "manifest", manifest_to_json(dataset.manifest).dump(2), dcpl);
  return {path};
}

Dataset import_hdf5(const std::string& path, bool require_manifest) {
  silence_hdf5_errors();
  Handle file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose,
              "opening '" + path + "'");

  const bool have_manifest = link_exists(file, "meta") && link_exists(file, "meta/manifest");
  if (!have_manifest && require_manifest)
    throw IoError("'" + path + "' has no /meta/manifest dataset");

  Dataset dataset;
  if (have_manifest) {
    nlohmann::json manifest_json;
    try {
      manifest_json = nlohmann::json::parse(read_string_dataset(file, "meta/manifest"));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("'" + path + "': /meta/manifest is not valid JSON: " + e.what());
    }
    dataset.manifest = manifest_from_json(manifest_json);
    if (H5Aexists(file, "seed") > 0 && read_u64_attr(file, "seed") != dataset.manifest.seed)
      throw IoError("'" + path + "': the root seed attribute disagrees with the manifest");
  }

  if (link_exists(file, "tensor")) {
    const F64Data data = read_f64_dataset(file, "tensor");
    std::vector<Index> dims(data.dims.begin(), data.dims.end());
    if (have_manifest && dims != dataset.manifest.shape)
      throw IoError("'" + path + "': /tensor extent disagrees with the manifest shape");
    dataset.dense = DenseTensor(Shape(dims), data.values);
    if (!have_manifest) {
      dataset.manifest.shape = dims;
      dataset.manifest.representation = "dense";
      dataset.manifest.created.clear();
    }
  } else if (link_exists(file, "sparse")) {
    std::vector<Index> dims;
    if (have_manifest)
      dims = dataset.manifest.shape;
    else if (H5Aexists(file, "shape") > 0)
      dims = read_shape_attr(file, "shape");
    else
      throw IoError("'" + path + "': sparse data without a shape attribute or manifest");
    const Shape shape(dims);
    const I64Data coords = read_i64_dataset(file, "sparse/coords");
    const F64Data values = read_f64_dataset(file, "sparse/values");
    if (coords.dims.size() != 2 || coords.dims[1] != static_cast<hsize_t>(shape.order()) ||
        coords.dims[0] != values.dims.at(0))
      throw IoError("'" + path + "': /sparse/coords and /sparse/values extents disagree");
    std::vector<SparseEntry> entries;
    entries.reserve(values.values.size());
    for (std::size_t k = 0; k < values.values.size(); ++k) {
      SparseEntry entry;
      entry.index.assign(coords.values.begin() + static_cast<std::ptrdiff_t>(k * dims.size()),
                         coords.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * dims.size()));
      entry.value = values.values[k];
      entries.push_back(std::move(entry));
    }
    try {
      dataset.sparse = SparseTensor(shape, std::move(entries));
    } catch (const Error& e) {
      throw IoError("'" + path + "': malformed sparse data: " + e.what());
    }
    if (!have_manifest) {
      dataset.manifest.shape = dims;
      dataset.manifest.representation = "sparse";
      dataset.manifest.created.clear();
    }
  } else {
    throw IoError("'" + path + "' holds neither /tensor nor /sparse data");
  }

  if (have_manifest && link_exists(file, "model")) {
    const Shape shape(dataset.manifest.shape);
    std::vector<Matrix> factors;
    for (Index n = 0; n < shape.order(); ++n) {
      const std::string name = "model/factors/mode" + std::to_string(n + 1);
      const Matrix factor = matrix_from(read_f64_dataset(file, name.c_str()), name);
      if (factor.rows() != shape.dim(n))
        throw IoError("'" + path + "': " + name + " row count disagrees with the manifest");
      factors.push_back(factor);
    }
    if (dataset.manifest.model_type == "cp") {
      const F64Data lambda = read_f64_dataset(file, "model/lambda");
      if (lambda.dims.size() != 1)
        throw IoError("'" + path + "': /model/lambda is not one-dimensional");
      CpModel model;
      model.factors = std::move(factors);
      model.lambda = Eigen::Map<const Vector>(lambda.values.data(),
                                              static_cast<Index>(lambda.values.size()));
      try {
        model.validate();
      } catch (const Error& e) {
        throw IoError("'" + path + "': inconsistent model: " + e.what());
      }
      dataset.cp = std::move(model);
    } else {
      const F64Data core = read_f64_dataset(file, "model/core");
      std::vector<Index> core_dims(core.dims.begin(), core.dims.end());
      if (core_dims != dataset.manifest.ranks)
        throw IoError("'" + path + "': /model/core extent disagrees with the manifest ranks");
      TuckerModel model;
      model.factors = std::move(factors);
      model.core = DenseTensor(Shape(core_dims), core.values);
      try {
        model.validate();
      } catch (const Error& e) {
        throw IoError("'" + path + "': inconsistent model: " + e.what());
      }
      dataset.tucker = std::move(model);
    }
  }
  return dataset;
}

}  // namespace tensorgen::detail
