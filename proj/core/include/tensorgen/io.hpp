#pragma once

#include <string>
#include <vector>

#include "tensorgen/config.hpp"
#include "tensorgen/pipeline.hpp"

namespace tensorgen {

/// Write a dataset to `path` plus its sidecar files (CSV: per-mode factor
/// files, weights/core file, manifest JSON; HDF5: everything in one file).
/// Returns every path written. Existing files are an error unless
/// `overwrite` is set; collisions are checked before anything is written.
std::vector<std::string> export_dataset(const Dataset& dataset, const std::string& path,
                                        FileFormat format, bool overwrite = false);

/// Read back a dataset written by export_dataset; the format is detected
/// from the file itself. With `require_manifest` (the default) a missing or
/// unreadable manifest is an error. Without it, a tensor-only import is
/// performed for inspection purposes: the returned manifest is a placeholder
/// with an empty `created` field and no model is loaded.
Dataset import_dataset(const std::string& path, bool require_manifest = true);

}  // namespace tensorgen
