#include "elc/symmetry_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "elc/errors.hpp"
#include "elc/linalg.hpp"

namespace elc {

std::vector<double> SpectralReport::beta_values() const
{
    std::vector<double> out;
    for (const auto& b : betas) out.push_back(b.beta);
    return out;
}

double verify_critical(const Expr& u, const Eigen::VectorXd& q0) { return u.gradient(q0).norm(); }

namespace {

Eigen::MatrixXd tangent_matrix(const SkewGeneratorSet& gens, const Eigen::VectorXd& q)
{
    Eigen::MatrixXd m(q.size(), gens.rank());
    for (int i = 0; i < gens.rank(); ++i) m.col(i) = gens[i] * q;
    return m;
}

void check_point(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0)
{
    if (gens.rank() > 0 && gens.dimension() != q0.size())
        throw Error("dimension_mismatch", "q0 has dimension " + std::to_string(q0.size()) +
                                              ", generators act on R^" + std::to_string(gens.dimension()));
}

}  // namespace

OrbitTangent orbit_tangent(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0)
{
    check_point(gens, q0);
    const RankRevealed rr = rank_reveal(tangent_matrix(gens, q0), 1e-10);
    return {rr.range, rr.rank};
}

Isotropy isotropy(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, std::int64_t max_den,
                  const std::optional<std::vector<Weight>>& supplied)
{
    check_point(gens, q0);
    const int l = gens.rank();
    const Eigen::MatrixXd m = tangent_matrix(gens, q0);
    const RankRevealed rr = rank_reveal(m, 1e-10);
    const int l0 = l - rr.rank;

    std::vector<Weight> basis;
    if (supplied) {
        basis = *supplied;
        if (static_cast<int>(basis.size()) != l0)
            throw Error("isotropy_basis_invalid", "supplied isotropy basis has " + std::to_string(basis.size()) +
                                                      " vectors, isotropy dimension is " + std::to_string(l0));
        Eigen::MatrixXd b(l, l0);
        for (int j = 0; j < l0; ++j) {
            if (static_cast<int>(basis[static_cast<std::size_t>(j)].size()) != l)
                throw Error("isotropy_basis_invalid", "isotropy basis vector has wrong length");
            for (int i = 0; i < l; ++i) b(i, j) = static_cast<double>(basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        }
        if (l0 > 0 && rank_reveal(b, 1e-10).rank != l0)
            throw Error("isotropy_basis_invalid", "supplied isotropy basis is linearly dependent");
    } else if (l0 > 0) {
        auto lattice = saturated_lattice(rr.kernel.transpose(), max_den);
        if (!lattice) throw Error("isotropy_basis_required", "isotropy subtorus basis must be supplied in config");
        basis = std::move(*lattice);
    }

    const double scale = 1.0 + q0.norm();
    for (const auto& xi : basis) {
        std::vector<double> phi(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) phi[i] = static_cast<double>(xi[i]);
        const Eigen::VectorXd moved_inf = gens.combination(phi) * q0;
        for (auto& p : phi) p *= 2.0 * std::numbers::pi;
        const Eigen::VectorXd moved = gens.group_element(phi) * q0;
        if (moved_inf.norm() > 1e-8 * scale || (moved - q0).norm() > 1e-8 * scale)
            throw Error("isotropy_basis_invalid", "isotropy basis vector " + weight_to_string(xi) + " does not fix q0");
    }
    return {l0, std::move(basis)};
}

SpectralReport spectral_report(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0,
                               const SpectralOptions& opt)
{
    check_point(gens, q0);
    SpectralReport rep;
    rep.q0 = q0;
    const Jet2<double> jet = u.jet2(q0);
    const Eigen::MatrixXd& h = jet.hess;
    const auto n = q0.size();
    rep.grad_residual = jet.grad.norm();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd& mu = es.eigenvalues();
    rep.hessian_norm = n ? mu.cwiseAbs().maxCoeff() : 0.0;
    if (rep.grad_residual > opt.critical_tol * (1.0 + rep.hessian_norm))
        throw HypothesisError("not_critical", "q0 is not a critical point: |grad U(q0)| = " +
                                                  std::to_string(rep.grad_residual));

    const OrbitTangent tangent = orbit_tangent(gens, q0);
    rep.orbit_dim = tangent.dim;
    rep.orbit_tangent = tangent.basis;
    const Isotropy iso = isotropy(gens, q0, opt.isotropy_max_den, opt.isotropy_basis);
    rep.isotropy_dim = iso.dim;
    rep.isotropy_basis = iso.basis;
    const SkewGeneratorSet iso_gens = gens.rank() ? gens.subtorus(iso.basis) : SkewGeneratorSet(static_cast<int>(n), {});

    const double cutoff = opt.zero_cutoff * rep.hessian_norm;
    std::vector<bool> is_zero(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::abs(mu(i));
        if (a > cutoff && a < opt.ambiguity_factor * cutoff)
            throw Error("eigen_cluster_ambiguity", "Hessian eigenvalue " + std::to_string(mu(i)) +
                                                       " lies between the zero cutoff bands; set tolerances.zero_cutoff explicitly");
        is_zero[static_cast<std::size_t>(i)] = a <= cutoff;
    }

    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i + 1;
        if (is_zero[static_cast<std::size_t>(i)]) {
            while (j < n && is_zero[static_cast<std::size_t>(j)]) ++j;
        } else {
            while (j < n && !is_zero[static_cast<std::size_t>(j)]) {
                const double gap = std::abs(mu(j) - mu(j - 1));
                const double scale = std::max(std::abs(mu(j)), std::abs(mu(j - 1)));
                if (gap > opt.cluster_gap * scale) {
                    if (gap < opt.cluster_ambiguity * scale)
                        throw Error("eigen_cluster_ambiguity",
                                    "Hessian eigenvalues " + std::to_string(mu(j - 1)) + " and " + std::to_string(mu(j)) +
                                        " are neither clearly equal nor clearly distinct; set tolerances.cluster_gap explicitly");
                    break;
                }
                ++j;
            }
        }
        const int mult = static_cast<int>(j - i);
        if (is_zero[static_cast<std::size_t>(i)]) {
            rep.kernel_dim = mult;
            rep.spectrum.push_back({0.0, mult});
        } else {
            const double mean = mu.segment(i, mult).mean();
            rep.spectrum.push_back({mean, mult});
            if (mean > 0.0) {
                BetaCluster b;
                b.mu = mean;
                b.beta = std::sqrt(mean);
                b.multiplicity = mult;
                b.eigenbasis = es.eigenvectors().middleCols(i, mult);
                b.eig_signature = decompose(iso_gens, b.eigenbasis);
                rep.betas.push_back(std::move(b));
            }
        }
        i = j;
    }
    std::reverse(rep.betas.begin(), rep.betas.end());

    if (rep.kernel_dim < rep.orbit_dim)
        throw Error("numerical_inconsistency", "Hessian kernel dimension " + std::to_string(rep.kernel_dim) +
                                                   " is smaller than the orbit dimension " + std::to_string(rep.orbit_dim));
    rep.null_excess_dim = rep.kernel_dim - rep.orbit_dim;
    rep.nondegenerate = rep.null_excess_dim == 0;
    return rep;
}

bool resonance_filter(const std::vector<double>& betas, std::size_t j0)
{
    if (j0 >= betas.size()) throw Error("j0_out_of_range", "j0 does not index a positive eigenvalue cluster");
    for (std::size_t j = 0; j < betas.size(); ++j) {
        if (j == j0) continue;
        const double r = betas[j] / betas[j0];
        const double nearest = std::max(1.0, std::round(r));
        if (std::abs(r - nearest) <= 1e-8) return false;
    }
    return true;
}

std::vector<double> bifurcation_levels(const std::vector<double>& betas, int k_max)
{
    if (k_max < 1) throw Error("invalid_mode", "mode cutoff must be at least 1");
    std::vector<double> all;
    for (double b : betas)
        for (int k = 1; k <= k_max; ++k) all.push_back(k / b);
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double v : all)
        if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, v)) out.push_back(v);
    return out;
}

ProbeResult minimality_probe(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, double radius,
                             int samples, std::mt19937_64& rng)
{
    if (!(radius > 0.0)) throw Error("invalid_radius", "probe radius must be positive");
    ProbeResult out;
    const auto n = q0.size();
    const double u0 = u.eval(q0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss;
    constexpr int kPerRay = 16;
    const int rays = std::max(1, samples / kPerRay);
    std::vector<double> phi(static_cast<std::size_t>(gens.rank()));

    for (int r = 0; r < rays; ++r) {
        for (auto& a : phi) a = angle(rng);
        const Eigen::VectorXd p = gens.rank() ? Eigen::VectorXd(gens.group_element(phi) * q0) : q0;
        const Eigen::MatrixXd normal = orthogonal_complement(orbit_tangent(gens, p).basis, static_cast<int>(n));
        if (normal.cols() == 0) break;
        Eigen::VectorXd c(normal.cols());
        for (auto& x : c) x = gauss(rng);
        const Eigen::VectorXd d = (normal * c).normalized();

        auto directional = [&](double s) { return u.gradient(p + s * d).dot(d); };
        double prev_s = 0.0, prev_g = 0.0;
        bool have_prev = false;
        for (int k = 0; k < kPerRay; ++k) {
            const double s = radius / 100.0 + (radius - radius / 100.0) * k / (kPerRay - 1);
            const Eigen::VectorXd q = p + s * d;
            ++out.points;
            const double value = u.eval(q);
            if (value < u0 - 1e-12) {
                out.pass = false;
                out.witness_kind = "below_minimum";
                out.witness = q;
                out.witness_value = value;
                return out;
            }
            if (s <= radius / 10.0) continue;
            const Eigen::VectorXd grad = u.gradient(q);
            if (grad.norm() == 0.0) {
                out.pass = false;
                out.witness_kind = "critical_point";
                out.witness = q;
                out.witness_value = 0.0;
                return out;
            }
            const double g = grad.dot(d);
            if (have_prev && (prev_g > 0.0) != (g > 0.0)) {
                double lo = prev_s, hi = s, glo = prev_g;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = directional(mid);
                    if ((gm > 0.0) == (glo > 0.0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                const Eigen::VectorXd star = p + 0.5 * (lo + hi) * d;
                const double gnorm = u.gradient(star).norm();
                if (gnorm <= 1e-6) {
                    out.pass = false;
                    out.witness_kind = "critical_point";
                    out.witness = star;
                    out.witness_value = gnorm;
                    return out;
                }
            }
            prev_s = s;
            prev_g = g;
            have_prev = true;
        }
    }
    return out;
}

std::string to_string(Branch b) { return b == Branch::Nondegenerate ? "nondegenerate" : "minimal"; }

double isolating_epsilon(const std::vector<double>& betas, std::size_t j0)
{
    if (j0 >= betas.size()) throw Error("j0_out_of_range", "j0 does not index a positive eigenvalue cluster");
    const double bj = betas[j0];
    const double bmax = *std::max_element(betas.begin(), betas.end());
    const int k_max = static_cast<int>(std::ceil(2.0 * bmax / bj - 1e-12));
    const std::vector<double> levels = bifurcation_levels(betas, std::max(k_max, 2));
    const double star = 1.0 / bj;
    double below = star;  // distance to 0 when nothing lies below
    double above = star;
    for (double v : levels) {
        if (std::abs(v - star) <= 1e-12 * std::max(1.0, star)) continue;
        if (v < star) below = std::min(below, star - v);
        if (v > star) above = std::min(above, v - star);
    }
    return bj * std::min(below, above) / 3.0;
}

Certificate certify(const SpectralReport& report, std::size_t j0, Branch branch, const HypothesisInputs& inputs)
{
    Certificate c;
    c.branch = branch;
    if (!inputs.invariance) throw HypothesisError("invariance_failed", "potential is not invariant under the action");
    c.flags.invariance = true;
    c.flags.criticality = true;  // spectral_report refuses non-critical points
    if (report.betas.empty())
        throw HypothesisError("no_positive_eigenvalue", "m \xE2\x89\xA5 1 violated: the Hessian has no positive eigenvalue");
    if (j0 >= report.betas.size())
        throw HypothesisError("j0_out_of_range", "j0 = " + std::to_string(j0) + " but only " +
                                                     std::to_string(report.betas.size()) + " positive eigenvalue clusters");

    if (branch == Branch::Nondegenerate) {
        if (!report.nondegenerate)
            throw HypothesisError("degenerate_orbit", "orbit is degenerate: dim ker Hessian = " +
                                                          std::to_string(report.kernel_dim) + " > orbit dimension " +
                                                          std::to_string(report.orbit_dim));
        c.flags.nondegeneracy_or_minimality = true;
        c.flags.isolation = true;  // nondegenerate critical orbits are isolated
    } else {
        if (!inputs.probe) throw HypothesisError("probe_missing", "minimal branch requires the minimality probe");
        const ProbeResult& p = *inputs.probe;
        if (!p.pass && p.witness_kind == "below_minimum")
            throw HypothesisError("not_minimal", "orbit does not consist of minima (probe witness found)");
        c.flags.nondegeneracy_or_minimality = true;
        if (!p.pass) throw HypothesisError("not_isolated", "orbit is not isolated among critical points (probe witness found)");
        c.flags.isolation = true;
        c.null_factor_cancels = true;
    }

    const std::vector<double> betas = report.beta_values();
    if (!resonance_filter(betas, j0))
        throw HypothesisError("resonance_violated", "resonance condition violated: some beta_j / beta_j0 is a natural number");
    c.flags.resonance = true;

    const BetaCluster& cluster = report.betas[j0];
    c.j0 = j0;
    c.beta = cluster.beta;
    c.lambda_star = 1.0 / cluster.beta;
    c.epsilon = isolating_epsilon(betas, j0);
    c.lambda_minus = (1.0 - c.epsilon) / cluster.beta;
    c.lambda_plus = (1.0 + c.epsilon) / cluster.beta;
    c.u_signature = time_suspend(cluster.eig_signature);
    c.time_restriction = restrict_to_time_circle(c.u_signature);
    c.frakS_jump = frak_S(c.u_signature);

    for (const auto& t : c.u_signature.weights())
        if (std::all_of(t.m.begin(), t.m.end(), [](auto x) { return x == 0; }))
            throw Error("internal", "suspended representation has a zero weight");
    if (c.u_signature.k0() != 0) throw Error("internal", "suspended representation has a trivial summand");
    if (c.frakS_jump < 1) throw Error("internal", "frak_S of the suspended eigenspace is zero");

    // Gamma is generated by commuting matrices, hence abelian: restricting to
    // the time circle sees the jump directly.
    if (frak_S(c.time_restriction) >= 1)
        c.justification.push_back("abelian: restriction to the time circle is nontrivial");
    if (report.isotropy_dim >= 1 && suspension_distinct(ReprSignature(c.u_signature.rank(), 0), c.u_signature))
        c.justification.push_back("torus isotropy: suspension by a nontrivial representation changes frak_S");
    if (c.null_factor_cancels) c.justification.push_back("Null factor is common to both sides and cancels");
    return c;
}

std::optional<std::size_t> auto_j0(const std::vector<double>& betas)
{
    for (std::size_t j = 0; j < betas.size(); ++j)
        if (resonance_filter(betas, j)) return j;
    return std::nullopt;
}

}  // namespace elc
