#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdiff/types.hpp"

namespace tvdiff::thermo {

// How raw reconstruction scores become per-user probability rows: L1
// normalization of absolute scores (the diffusion genre) or a row softmax
// (the embedding-model genre).
enum class Genre { kDiffusionNorm, kSoftmax };

struct ProbabilityMatrix {
  Mat rows;
  Genre genre = Genre::kDiffusionNorm;
  std::vector<std::uint8_t> flagged;  // degenerate rows, excluded from aggregates
};

ProbabilityMatrix normalize_reconstruction(const Mat& raw, Genre genre);

// Energy U: over observed interactions (u,i) the reconstruction earns 1 when
// p'(u,i) >= p(u,i) and the ratio p'/p otherwise. P is the original
// row-stochastic interaction matrix (rows of R_hat); R supplies the observed
// pattern. Flagged rows of P_prime are skipped.
double energy(const ProbabilityMatrix& p_prime, const ProbabilityMatrix& p,
              const SpMat& R);

// Shannon entropy S = sum_u sum_i -p log p with 0 log 0 = 0; flagged rows skipped.
double entropy(const ProbabilityMatrix& p);

// S(R_hat_L) - S(R_hat_B) where R_hat_B = D_U^-1 R and R_hat_L is the
// row-normalized D_U^-1/2 R D_I^-1/2, computed directly from degrees. The
// value is <= 0 for every binary bipartite graph, with equality when all item
// degrees touched by a user coincide. Zero-degree users are skipped.
double theorem1_delta_S(const SpMat& R);

// Entropy of the user-to-item mass after k propagation rounds with R_bar:
// X_k = (R_bar R_bar^T)^{k-1} R_bar, rows L1-normalized; returns S_1..S_K.
// Rows of users with zero degree are skipped.
std::vector<double> multilayer_entropy_probe(const SpMat& R, int K);

struct ThermoReport {
  std::string phase;
  double U = 0.0;
  double S = 0.0;
  double dU = 0.0;  // this phase minus the initial phase
  double dS = 0.0;
};

// Two-phase report (initial, final) with deltas on the final row.
std::vector<ThermoReport> pilot_report(double u_initial, double s_initial,
                                       double u_final, double s_final);

}  // namespace tvdiff::thermo
