#include "elc/torus_rep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "elc/errors.hpp"
#include "elc/linalg.hpp"
#include "text_cursor.hpp"

namespace elc {

ReprSignature::ReprSignature(int rank, std::int64_t k0) : rank_(rank), k0_(k0)
{
    if (rank < 0) throw Error("invalid_rank", "torus rank must be nonnegative");
    if (k0 < 0) throw Error("invalid_multiplicity", "trivial multiplicity must be nonnegative");
}

std::int64_t ReprSignature::dimension() const
{
    std::int64_t d = k0_;
    for (const auto& t : weights_) d = checked_add(d, checked_mul(2, t.k));
    return d;
}

void ReprSignature::add_trivial(std::int64_t k)
{
    if (k < 0) throw Error("invalid_multiplicity", "multiplicity must be nonnegative");
    k0_ = checked_add(k0_, k);
}

void ReprSignature::add_weight(Weight m, std::int64_t k)
{
    if (m.size() != static_cast<std::size_t>(rank_))
        throw Error("rank_mismatch", "weight length " + std::to_string(m.size()) + " differs from rank " +
                                         std::to_string(rank_));
    if (k < 0) throw Error("invalid_multiplicity", "multiplicity must be nonnegative");
    if (k == 0) return;
    m = normalize_weight(std::move(m));
    nontrivial_ = checked_add(nontrivial_, k);
    auto it = std::lower_bound(weights_.begin(), weights_.end(), m,
                               [](const WeightTerm& t, const Weight& w) { return t.m < w; });
    if (it != weights_.end() && it->m == m) {
        it->k = checked_add(it->k, k);
    } else {
        weights_.insert(it, WeightTerm{std::move(m), k});
    }
}

ReprSignature direct_sum(const ReprSignature& a, const ReprSignature& b)
{
    if (a.rank() != b.rank()) throw Error("rank_mismatch", "direct sum of representations of different tori");
    ReprSignature out = a;
    out.add_trivial(b.k0());
    for (const auto& t : b.weights()) out.add_weight(t.m, t.k);
    return out;
}

std::int64_t frak_S(const ReprSignature& sig)
{
    return sig.nontrivial_multiplicity();
}

EulerElem chi_sphere(const ReprSignature& sig)
{
    EulerElem chi(sig.rank());
    const std::int64_t sign = (sig.k0() % 2 == 0) ? 1 : -1;
    chi.add_term(SubgroupLabel::full(), sign);
    for (const auto& t : sig.weights()) chi.add_term(SubgroupLabel{t.m}, checked_mul(-sign, t.k));
    chi.set_lower_unknown(sig.rank() >= 2 && sig.weights().size() >= 2);
    return chi;
}

Distinguishability distinguishable(const ReprSignature& a, const ReprSignature& b)
{
    if (a.rank() != b.rank()) throw Error("rank_mismatch", "signatures of different tori");
    if (frak_S(a) != frak_S(b)) return {Verdict::Distinct, "frak_S"};
    if (a.weights() != b.weights()) return {Verdict::Distinct, "weight multiset"};
    if (a.k0() == b.k0()) return {Verdict::Equal, "identical signatures"};
    if ((a.k0() - b.k0()) % 2 != 0) return {Verdict::Distinct, "k0 parity"};
    // Same weights, k0 differing by an even number: the difference is a
    // trivial even-dimensional representation.
    return {Verdict::EqualAsChi, "trivial even-dimensional difference"};
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Distinct: return "Distinct";
    case Verdict::Equal: return "Equal";
    case Verdict::EqualAsChi: return "EqualAsChi";
    case Verdict::UndecidableAtTruncation: return "UndecidableAtTruncation";
    }
    return "?";
}

bool suspension_distinct(const ReprSignature& base, const ReprSignature& extra)
{
    if (base.rank() != extra.rank()) throw Error("rank_mismatch", "signatures of different tori");
    return frak_S(extra) >= 1;
}

ReprSignature time_suspend(const ReprSignature& eig)
{
    const int l = eig.rank() + 1;
    ReprSignature out(l, 0);
    Weight time_only(static_cast<std::size_t>(l), 0);
    time_only.back() = 1;
    out.add_weight(time_only, eig.k0());
    for (const auto& t : eig.weights()) {
        Weight plus = t.m, minus = t.m;
        plus.push_back(1);
        minus.push_back(-1);
        out.add_weight(std::move(plus), t.k);
        out.add_weight(std::move(minus), t.k);
    }
    return out;
}

ReprSignature restrict_to_time_circle(const ReprSignature& sig)
{
    if (sig.rank() == 0) throw Error("invalid_rank", "no time circle in a rank-0 signature");
    ReprSignature out(1, sig.k0());
    for (const auto& t : sig.weights()) {
        const std::int64_t j = t.m.back();
        if (j == 0) {
            out.add_trivial(checked_mul(2, t.k));
        } else {
            out.add_weight(Weight{j}, t.k);
        }
    }
    return out;
}

std::string to_string(const ReprSignature& sig)
{
    std::string s = std::to_string(sig.k0());
    for (const auto& t : sig.weights()) {
        s += " + ";
        s += std::to_string(t.k);
        s += detail::kDot;
        s += weight_to_string(t.m);
    }
    return s;
}

ReprSignature parse_signature(std::string_view text, int rank)
{
    detail::TextCursor cur(text, "signature");
    if (cur.done()) cur.fail("empty input");
    ReprSignature sig(rank, 0);
    bool first = true;
    while (!cur.done()) {
        if (!first) cur.expect("+");
        first = false;
        const std::int64_t k = cur.integer();
        if (cur.accept_times()) {
            cur.expect("[");
            Weight m;
            do {
                m.push_back(cur.signed_integer());
            } while (cur.accept(","));
            cur.expect("]");
            if (static_cast<int>(m.size()) != rank) cur.fail("weight length differs from rank");
            if (std::all_of(m.begin(), m.end(), [](auto x) { return x == 0; })) cur.fail("zero weight");
            sig.add_weight(std::move(m), k);
        } else {
            sig.add_trivial(k);
        }
    }
    return sig;
}

// ---------------------------------------------------------------------------

SkewGeneratorSet::SkewGeneratorSet(int n, std::vector<Eigen::MatrixXd> generators) : n_(n), gens_(std::move(generators))
{
    if (n < 0) throw Error("invalid_dimension", "ambient dimension must be nonnegative");
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const auto& a = gens_[i];
        const std::string tag = "generator " + std::to_string(i);
        if (a.rows() != n || a.cols() != n) throw Error("generator_shape", tag + " is not " + std::to_string(n) + "x" + std::to_string(n));
        if (!a.allFinite()) throw Error("generator_not_finite", tag + " has non-finite entries");
        const double norm = a.norm();
        if ((a + a.transpose()).norm() > 1e-12 * norm) throw Error("generator_not_skew", tag + " is not skew-symmetric");
        const Eigen::MatrixXd period = matrix_exp(2.0 * std::numbers::pi * a);
        if ((period - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-8)
            throw Error("generator_not_integral", tag + " does not satisfy exp(2 pi A) = I");
    }
    for (std::size_t i = 0; i < gens_.size(); ++i)
        for (std::size_t j = i + 1; j < gens_.size(); ++j) {
            const auto& a = gens_[i];
            const auto& b = gens_[j];
            if ((a * b - b * a).norm() > 1e-10 * a.norm() * b.norm())
                throw Error("generators_not_commuting",
                            "generators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
        }
}

Eigen::MatrixXd SkewGeneratorSet::combination(std::span<const double> xi) const
{
    if (xi.size() != gens_.size()) throw Error("rank_mismatch", "coefficient count differs from torus rank");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_, n_);
    for (std::size_t i = 0; i < gens_.size(); ++i) c += xi[i] * gens_[i];
    return c;
}

Eigen::MatrixXd SkewGeneratorSet::group_element(std::span<const double> phi) const
{
    return matrix_exp(combination(phi));
}

SkewGeneratorSet SkewGeneratorSet::subtorus(const std::vector<Weight>& basis) const
{
    std::vector<Eigen::MatrixXd> sub;
    for (const auto& xi : basis) {
        if (xi.size() != gens_.size()) throw Error("rank_mismatch", "subtorus vector length differs from torus rank");
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_, n_);
        for (std::size_t i = 0; i < gens_.size(); ++i) c += static_cast<double>(xi[i]) * gens_[i];
        sub.push_back(std::move(c));
    }
    return SkewGeneratorSet(n_, std::move(sub));
}

namespace {

struct Attempt {
    bool ok = false;
    std::string failure;
    Decomposition result;
};

// One splitting attempt with the generic combination xi . B.
Attempt split_with(const std::vector<Eigen::MatrixXd>& b, const std::vector<double>& xi, int rank, Eigen::Index joint_kernel)
{
    Attempt out;
    const auto d = b.front().rows();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < b.size(); ++i) c += xi[i] * b[i];

    // C^T C has eigenvalues (xi . m)^2 on each isotypic block.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.transpose() * c);
    Eigen::VectorXd omega = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();

    Eigen::Index zero = 0;
    while (zero < d && omega(zero) < 1e-6) ++zero;
    if (zero != joint_kernel) {
        out.failure = "combination is not generic (accidental kernel)";
        return out;
    }
    if (zero < d && omega(zero) < 1e-3) {
        out.failure = "combination is not generic (tiny frequency)";
        return out;
    }

    ReprSignature sig(rank, zero);
    double rounding = 0.0, verification = 0.0;
    Eigen::Index start = zero;
    while (start < d) {
        Eigen::Index stop = start + 1;
        while (stop < d && omega(stop) - omega(stop - 1) <= 1e-7 * std::max(1.0, omega(stop))) ++stop;
        const Eigen::Index width = stop - start;
        if (stop < d && omega(stop) - omega(stop - 1) < 1e-3) {
            out.failure = "combination is not generic (clusters too close)";
            return out;
        }
        if (width % 2 != 0) {
            out.failure = "odd-dimensional isotypic block";
            return out;
        }
        const Eigen::MatrixXd q = es.eigenvectors().middleCols(start, width);
        const double freq = omega.segment(start, width).mean();
        const Eigen::MatrixXd j = (q.transpose() * c * q) / freq;
        if ((j * j + Eigen::MatrixXd::Identity(width, width)).norm() > 1e-6) {
            out.failure = "isotypic block is not a complex structure";
            return out;
        }
        Weight m;
        for (const auto& bj : b) {
            const Eigen::MatrixXd block = q.transpose() * bj * q;
            const double raw = -(block * j).trace() / static_cast<double>(width);
            const double rounded = std::round(raw);
            rounding = std::max(rounding, std::abs(raw - rounded));
            if (std::abs(raw - rounded) > 1e-6) {
                out.failure = "non-integer weight " + std::to_string(raw);
                return out;
            }
            const double resid = (block - rounded * j).norm();
            verification = std::max(verification, resid);
            if (resid > 1e-8 * std::max(1.0, bj.norm())) {
                out.failure = "weight verification failed (residual " + std::to_string(resid) + ")";
                return out;
            }
            m.push_back(static_cast<std::int64_t>(rounded));
        }
        sig.add_weight(std::move(m), width / 2);
        start = stop;
    }
    out.ok = true;
    out.result = Decomposition{std::move(sig), rounding, verification};
    return out;
}

}  // namespace

Decomposition decompose_with_diagnostics(const SkewGeneratorSet& gens, const Eigen::MatrixXd& basis, double tol)
{
    const int n = gens.dimension();
    const int l = gens.rank();
    if (basis.rows() != n) throw Error("rank_mismatch", "subspace basis has wrong ambient dimension");
    const auto d = basis.cols();
    if ((basis.transpose() * basis - Eigen::MatrixXd::Identity(d, d)).norm() > 1e-8)
        throw Error("basis_not_orthonormal", "subspace basis must have orthonormal columns");
    if (d == 0) return {ReprSignature(l, 0), 0.0, 0.0};

    std::vector<Eigen::MatrixXd> restricted;
    const Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose();
    for (int i = 0; i < l; ++i) {
        const Eigen::MatrixXd ap = gens[i] * basis;
        if ((projector * ap).norm() > tol * std::max(1.0, gens[i].norm()))
            throw Error("non_invariant_subspace", "subspace is not invariant under generator " + std::to_string(i));
        restricted.push_back(basis.transpose() * ap);
    }
    if (l == 0) return {ReprSignature(0, d), 0.0, 0.0};

    Eigen::MatrixXd stacked(l * d, d);
    for (int i = 0; i < l; ++i) stacked.middleRows(i * d, d) = restricted[static_cast<std::size_t>(i)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    Eigen::Index joint_kernel = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < 1e-6) ++joint_kernel;

    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> numerator(1009, 2018);
    std::string last_failure;
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<double> xi(static_cast<std::size_t>(l));
        for (auto& x : xi) x = numerator(rng) / 1009.0;
        Attempt a = split_with(restricted, xi, l, joint_kernel);
        if (a.ok) return std::move(a.result);
        last_failure = a.failure;
    }
    throw Error("decomposition_failed", "isotypic decomposition failed: " + last_failure);
}

}  // namespace elc
