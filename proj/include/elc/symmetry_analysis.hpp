#pragma once

// Hypothesis checks at a critical orbit Gamma(q0) of an invariant potential,
// the spectral report of the Hessian there, and the bifurcation certificate.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elc/potential.hpp"
#include "elc/torus_rep.hpp"

namespace elc {

/// One distinct eigenvalue of the Hessian.
struct HessianCluster {
    double mu = 0.0;
    int multiplicity = 0;
};

struct BetaCluster {
    double beta = 0.0;  // sqrt(mu)
    double mu = 0.0;
    int multiplicity = 0;
    Eigen::MatrixXd eigenbasis;   // n x multiplicity, orthonormal
    ReprSignature eig_signature;  // under the isotropy torus T^{l0}
};

struct SpectralOptions {
    double zero_cutoff = 1e-8;     // relative to ||Hessian||
    double ambiguity_factor = 100;  // eigenvalues in (cutoff, factor * cutoff) are ambiguous
    double cluster_gap = 1e-7;     // relative gap merging eigenvalues
    double cluster_ambiguity = 1e-5;
    double critical_tol = 1e-9;    // ||grad U|| <= critical_tol * (1 + ||Hessian||)
    std::int64_t isotropy_max_den = 1000000;
    std::optional<std::vector<Weight>> isotropy_basis;  // overrides auto-rationalization
};

struct SpectralReport {
    Eigen::VectorXd q0;
    double grad_residual = 0.0;
    double hessian_norm = 0.0;
    int orbit_dim = 0;
    Eigen::MatrixXd orbit_tangent;
    int isotropy_dim = 0;
    std::vector<Weight> isotropy_basis;
    int kernel_dim = 0;
    std::vector<BetaCluster> betas;        // strictly decreasing beta
    std::vector<HessianCluster> spectrum;  // every cluster, ascending; the zero cluster has mu = 0
    bool nondegenerate = false;
    int null_excess_dim = 0;

    std::vector<double> beta_values() const;
};

/// ||grad U(q0)||
double verify_critical(const Expr& u, const Eigen::VectorXd& q0);

struct OrbitTangent {
    Eigen::MatrixXd basis;  // orthonormal, n x dim
    int dim = 0;
};

OrbitTangent orbit_tangent(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0);

struct Isotropy {
    int dim = 0;
    std::vector<Weight> basis;  // integer generators of the isotropy subtorus
};

/// Dimension and integer lattice basis of the isotropy torus Lie algebra.
/// A supplied basis is verified instead of being reconstructed.
Isotropy isotropy(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, std::int64_t max_den = 1000000,
                  const std::optional<std::vector<Weight>>& supplied = std::nullopt);

SpectralReport spectral_report(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0,
                               const SpectralOptions& opt = {});

/// True iff beta_j / beta_j0 is at distance > 1e-8 from every natural number
/// for all j != j0.
bool resonance_filter(const std::vector<double>& betas, std::size_t j0);

/// Sorted set { k / beta_j : 1 <= k <= K }.
std::vector<double> bifurcation_levels(const std::vector<double>& betas, int k_max);

struct ProbeResult {
    bool pass = true;
    std::string witness_kind;  // "", "below_minimum" or "critical_point"
    Eigen::VectorXd witness;
    double witness_value = 0.0;
    int points = 0;
};

/// Sampling probe of "Gamma(q0) consists of minima and is isolated among
/// critical points". Necessary conditions only.
ProbeResult minimality_probe(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, double radius,
                             int samples, std::mt19937_64& rng);

enum class Branch { Nondegenerate, MinimalOrbit };
std::string to_string(Branch b);

struct HypothesisFlags {
    bool invariance = false;
    bool criticality = false;
    bool resonance = false;
    bool nondegeneracy_or_minimality = false;
    bool isolation = false;
};

/// Results of the checks that need the potential itself.
struct HypothesisInputs {
    bool invariance = false;
    std::optional<ProbeResult> probe;  // required for the MinimalOrbit branch
};

struct Certificate {
    std::size_t j0 = 0;
    double beta = 0.0;
    double lambda_star = 0.0;
    double epsilon = 0.0;
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    ReprSignature u_signature;
    ReprSignature time_restriction;
    std::int64_t frakS_jump = 0;
    Branch branch = Branch::Nondegenerate;
    HypothesisFlags flags;
    std::vector<std::string> justification;
    bool null_factor_cancels = false;
};

/// Epsilon isolating 1/beta_j0 in Lambda: beta_j0 * (min gap around 1/beta_j0) / 3.
double isolating_epsilon(const std::vector<double>& betas, std::size_t j0);

/// Throws HypothesisError with a distinct code for each failed hypothesis.
Certificate certify(const SpectralReport& report, std::size_t j0, Branch branch, const HypothesisInputs& inputs);

/// Largest beta passing the resonance filter.
std::optional<std::size_t> auto_j0(const std::vector<double>& betas);

}  // namespace elc
