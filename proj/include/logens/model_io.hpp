#pragma once

// Model persistence: line-based text dumps, one file per model, each
// starting with `logens-model <version> <kind>`. Doubles are written with
// round-trip precision; the layout is stable within a major version.

#include <string>

#include "logens/decision_tree.hpp"
#include "logens/knn.hpp"
#include "logens/slfn.hpp"

namespace logens {

inline constexpr int kModelFormatVersion = 1;

void save_knn(const KnnModel& m, const std::string& path);
KnnModel load_knn(const std::string& path);

void save_dt(const TreeModel& m, const std::string& path);
TreeModel load_dt(const std::string& path);

void save_slfn(const SlfnModel& m, const std::string& path);
SlfnModel load_slfn(const std::string& path);

}  // namespace logens
