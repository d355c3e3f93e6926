#pragma once

#include <filesystem>
#include <string>

#include "ltvwc/ltv.hpp"

namespace ltvwc {

// On-disk model bundle: one CSV per matrix (A.csv, B.csv, C.csv, D.csv) with
// a time column followed by row-major entries, plus manifest.json declaring
// dimensions and channel partitions.

void save_model(const TimeVaryingStateSpace& sys, const std::filesystem::path& dir);
TimeVaryingStateSpace load_model(const std::filesystem::path& dir);

/// Write a matrix function as CSV: t, then row-major entries named "M[i][j]".
void save_matrix_csv(const MatrixFunction& f, const std::string& name,
                     const std::filesystem::path& file);
MatrixFunction load_matrix_csv(const std::filesystem::path& file, Eigen::Index rows,
                               Eigen::Index cols);

}  // namespace ltvwc
