#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "elc/euler_ring.hpp"

namespace elc {

/// Matrix exponential (scaling and squaring with Pade approximants).
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a);

struct RankRevealed {
    Eigen::MatrixXd range;   // orthonormal basis of the column space
    Eigen::MatrixXd kernel;  // orthonormal basis of the null space
    int rank = 0;
};

/// SVD split with singular values below rel_cutoff * sigma_max treated as zero.
RankRevealed rank_reveal(const Eigen::MatrixXd& a, double rel_cutoff);

/// Best rational approximation p/q with q <= max_den, if within `tol` of x.
std::optional<std::pair<std::int64_t, std::int64_t>> rationalize(double x, std::int64_t max_den, double tol);

/// Lattice basis of { x in Z^cols : a x = 0 } for an integer matrix given as
/// rows. Uses unimodular column reduction.
std::vector<Weight> integer_kernel(const std::vector<Weight>& rows, int cols);

/// Basis of Z^l intersected with the real span of `vectors` (given as rows),
/// after rationalizing them. Returns nullopt when a vector cannot be
/// rationalized within the denominator bound.
std::optional<std::vector<Weight>> saturated_lattice(const Eigen::MatrixXd& rows, std::int64_t max_den);

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& basis, int n);

}  // namespace elc
