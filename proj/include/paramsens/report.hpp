#pragma once

#include <filesystem>

#include "paramsens/preprocess.hpp"

namespace paramsens {

/// Static summary as data files in `out_dir`:
///   matrix.csv    normalized in-out matrix, rows in default order
///   globals.csv   raw global sensitivity per parameter and measure
///   regional.csv  regional curves per parameter and measure
///   mds.csv       embedded coordinates per result
///   summary.txt   human-readable overview
void write_report(const Analysis& analysis, const std::filesystem::path& out_dir);

}  // namespace paramsens
