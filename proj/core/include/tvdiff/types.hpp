#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tvdiff {

// Row-major dense matrices: batch rows (one user per row) stay contiguous,
// which keeps per-row operations cache-friendly and reduction order fixed.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

// Per-batch-row index lists (e.g. positives / sampled negatives per user row).
using IndexRows = std::vector<std::vector<Index>>;

}  // namespace tvdiff
