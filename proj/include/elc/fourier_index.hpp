#pragma once

// Sign bookkeeping of the loop-space Hessian on the Fourier blocks
// H_k = { a cos kt + b sin kt }. On H_k, an eigendirection of the potential
// Hessian with eigenvalue mu contributes (k^2 - lambda^2 mu) / (1 + k^2),
// twice for k >= 1.

#include <cstdint>
#include <vector>

#include "elc/symmetry_analysis.hpp"

namespace elc {

struct BlockEntry {
    double mu = 0.0;
    double block_eig = 0.0;
    int sign = 0;
    int multiplicity = 0;  // Hessian multiplicity times 2 for k >= 1
};

struct BlockSpectrum {
    int k = 0;
    double lambda = 0.0;
    std::vector<BlockEntry> entries;
};

inline constexpr double kBlockZeroCutoff = 1e-10;

BlockSpectrum block_spectrum(const std::vector<HessianCluster>& hessian, int k, double lambda);

struct IndexWindow {
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    int modes = 0;  // N
    int n0 = 0;
    std::int64_t dim_plus_minus = 0;
    std::int64_t dim_plus_plus = 0;
    std::int64_t jump = 0;
    std::vector<std::int64_t> per_mode_minus;  // index k = 0..N
    std::vector<std::int64_t> per_mode_plus;

    friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

/// Smallest n >= 1 with n^2 > lambda_plus^2 * max_mu.
int stabilization_mode(double max_mu, double lambda_plus);

/// Counts the positive directions of the negated loop Hessian on the modes
/// k <= N at both window ends. Zero-mu directions (orbit tangent and Null) are
/// left out of the static block.
IndexWindow index_window(const std::vector<HessianCluster>& hessian, double beta_j0, double epsilon, int modes);

}  // namespace elc
