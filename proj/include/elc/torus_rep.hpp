#pragma once

// Orthogonal representations of a torus T^l, described by their isotypic
// signature R[k0,0] + R[k1,m1] + ... + R[kr,mr], together with the sphere
// invariants frak_S(S^V) and the truncated chi_H(S^V).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "elc/euler_ring.hpp"

namespace elc {

struct WeightTerm {
    Weight m;
    std::int64_t k;

    friend bool operator==(const WeightTerm&, const WeightTerm&) = default;
};

/// Canonical isotypic signature: trivial multiplicity plus a list of
/// (normalized weight, multiplicity) sorted by weight, pairwise distinct.
class ReprSignature {
public:
    explicit ReprSignature(int rank = 0, std::int64_t k0 = 0);

    int rank() const noexcept { return rank_; }
    std::int64_t k0() const noexcept { return k0_; }
    const std::vector<WeightTerm>& weights() const noexcept { return weights_; }
    /// Sum of the weight multiplicities, kept up to date by add_weight.
    std::int64_t nontrivial_multiplicity() const noexcept { return nontrivial_; }

    /// Real dimension k0 + 2 * sum k_i.
    std::int64_t dimension() const;

    void add_trivial(std::int64_t k);
    /// Normalizes m and merges it into an existing line when m = +-m'.
    void add_weight(Weight m, std::int64_t k);

    friend bool operator==(const ReprSignature&, const ReprSignature&) = default;

private:
    int rank_;
    std::int64_t k0_;
    std::int64_t nontrivial_ = 0;
    std::vector<WeightTerm> weights_;
};

ReprSignature direct_sum(const ReprSignature& a, const ReprSignature& b);

/// Sum of multiplicities of the nontrivial irreducibles.
std::int64_t frak_S(const ReprSignature& sig);

/// (-1)^k0 (Full - sum k_i H_{m_i}), with the lower-stratum flag raised when
/// l >= 2 and at least two distinct weight lines occur.
EulerElem chi_sphere(const ReprSignature& sig);

enum class Verdict { Distinct, Equal, EqualAsChi, UndecidableAtTruncation };

struct Distinguishability {
    Verdict verdict;
    std::string_view reason;
};

/// Decides whether chi_H(S^a) and chi_H(S^b) differ, using only the
/// coefficient-level facts: frak_S, the codimension-one weight multiset and the
/// parity of k0. Same weights with an even k0 difference means equal chi.
Distinguishability distinguishable(const ReprSignature& a, const ReprSignature& b);

std::string to_string(Verdict v);

/// True iff `extra` is a nontrivial representation, which separates
/// chi_G(G+ ^_H S^V) from chi_G(G+ ^_H S^{V+W}) for any ambient G.
bool suspension_distinct(const ReprSignature& base, const ReprSignature& extra);

/// Signature of {a cos t + b sin t : a, b in V} under T^{l0} x S^1. Every
/// trivial copy becomes the weight (0,...,0,1); every R[1,m] becomes
/// R[1,(m,1)] + R[1,(m,-1)]. The result has no trivial summand.
ReprSignature time_suspend(const ReprSignature& eig);

/// Restriction from T^{l0} x S^1 to the last (time) circle.
ReprSignature restrict_to_time_circle(const ReprSignature& sig);

/// "k0 + k·[m] + ..." with weights in canonical order, e.g. "0 + 1·[1]".
std::string to_string(const ReprSignature& sig);
ReprSignature parse_signature(std::string_view text, int rank);

/// Commuting, integral, skew-symmetric generators of a torus action on R^n.
class SkewGeneratorSet {
public:
    SkewGeneratorSet() = default;
    /// Validates skew-symmetry, commutation and exp(2 pi A) = I.
    SkewGeneratorSet(int n, std::vector<Eigen::MatrixXd> generators);

    int dimension() const noexcept { return n_; }
    int rank() const noexcept { return static_cast<int>(gens_.size()); }
    const Eigen::MatrixXd& operator[](int i) const { return gens_[static_cast<std::size_t>(i)]; }
    const std::vector<Eigen::MatrixXd>& generators() const noexcept { return gens_; }

    /// sum_i xi_i A_i
    Eigen::MatrixXd combination(std::span<const double> xi) const;
    /// exp(sum_i phi_i A_i)
    Eigen::MatrixXd group_element(std::span<const double> phi) const;

    /// Generators of the subtorus spanned by integer vectors (rows of `basis`).
    SkewGeneratorSet subtorus(const std::vector<Weight>& basis) const;

private:
    int n_ = 0;
    std::vector<Eigen::MatrixXd> gens_;
};

struct Decomposition {
    ReprSignature signature;
    double rounding_residual = 0.0;      // max |m_raw - round(m_raw)|
    double verification_residual = 0.0;  // max ||B_j - m_j J|| after rounding
};

/// Isotypic decomposition of the restriction of `gens` to span(basis).
Decomposition decompose_with_diagnostics(const SkewGeneratorSet& gens, const Eigen::MatrixXd& basis,
                                         double tol = 1e-8);

inline ReprSignature decompose(const SkewGeneratorSet& gens, const Eigen::MatrixXd& basis, double tol = 1e-8)
{
    return decompose_with_diagnostics(gens, basis, tol).signature;
}

}  // namespace elc
