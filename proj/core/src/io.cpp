#include "tensorgen/io.hpp"

#include <charconv>
#include <filesystem>
#include <system_error>

#include <hdf5.h>

#include "io_detail.hpp"
#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace detail {

std::string format_double(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string path_stem(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

void check_collisions(const std::vector<std::string>& paths, bool overwrite) {
  if (overwrite) return;
  for (const std::string& p : paths) {
    std::error_code ec;
    if (std::filesystem::exists(p, ec))
      throw IoError("refusing to overwrite existing file '" + p +
                    "' (pass the overwrite flag to allow it)");
  }
}

}  // namespace detail

std::vector<std::string> export_dataset(const Dataset& dataset, const std::string& path,
                                        FileFormat format, bool overwrite) {
  if (path.empty()) throw IoError("export path is empty");
  if (!dataset.dense && !dataset.sparse) throw StructuralError("dataset holds no tensor");
  return format == FileFormat::csv ? detail::export_csv(dataset, path, overwrite)
                                   : detail::export_hdf5(dataset, path, overwrite);
}

Dataset import_dataset(const std::string& path, bool require_manifest) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw IoError("no such file: '" + path + "'");
  htri_t is_hdf5 = 0;
  H5E_BEGIN_TRY { is_hdf5 = H5Fis_hdf5(path.c_str()); }
  H5E_END_TRY
  if (is_hdf5 > 0) return detail::import_hdf5(path, require_manifest);
  return detail::import_csv(path, require_manifest);
}

}  // namespace tensorgen
