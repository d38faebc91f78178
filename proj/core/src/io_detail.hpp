#pragma once

#include <string>
#include <vector>

#include "tensorgen/io.hpp"

namespace tensorgen::detail {

std::vector<std::string> export_csv(const Dataset& dataset, const std::string& path,
                                    bool overwrite);
Dataset import_csv(const std::string& path, bool require_manifest);

std::vector<std::string> export_hdf5(const Dataset& dataset, const std::string& path,
                                     bool overwrite);
Dataset import_hdf5(const std::string& path, bool require_manifest);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// `path` without its extension (the part after the last dot of the last
/// component); used to derive CSV sidecar file names.
std::string path_stem(const std::string& path);

/// Throws IoError unless every path is absent or `overwrite` is set.
void check_collisions(const std::vector<std::string>& paths, bool overwrite);

}  // namespace tensorgen::detail
