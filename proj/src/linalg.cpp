#include "elc/linalg.hpp"

#include <array>
#include <cmath>
#include <tuple>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "elc/errors.hpp"

namespace elc {

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a)
{
    if (a.size() == 0) return a;
    return a.exp();
}

RankRevealed rank_reveal(const Eigen::MatrixXd& a, double rel_cutoff)
{
    RankRevealed out;
    const auto rows = a.rows();
    const auto cols = a.cols();
    if (rows == 0 || cols == 0) {
        out.range = Eigen::MatrixXd(rows, 0);
        out.kernel = Eigen::MatrixXd::Identity(cols, cols);
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    if (smax > 0.0) {
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_cutoff * smax) ++rank;
    }
    out.rank = rank;
    out.range = svd.matrixU().leftCols(rank);
    out.kernel = svd.matrixV().rightCols(cols - rank);
    return out;
}

std::optional<std::pair<std::int64_t, std::int64_t>> rationalize(double x, std::int64_t max_den, double tol)
{
    const double sign = x < 0 ? -1.0 : 1.0;
    const double target = std::abs(x);
    double r = target;
    // Convergents h/k of the continued fraction of |x|.
    std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(r));
    std::int64_t k_prev = 0, k = 1;
    double frac = r - std::floor(r);
    std::pair<std::int64_t, std::int64_t> best{h, k};
    while (std::abs(static_cast<double>(best.first) / best.second - target) > tol) {
        if (frac < 1e-15) break;
        r = 1.0 / frac;
        const auto a = static_cast<std::int64_t>(std::floor(r));
        frac = r - std::floor(r);
        const std::int64_t h_next = a * h + h_prev;
        const std::int64_t k_next = a * k + k_prev;
        if (k_next > max_den) break;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        best = {h, k};
    }
    if (std::abs(static_cast<double>(best.first) / best.second - target) > tol) return std::nullopt;
    return std::pair{static_cast<std::int64_t>(sign) * best.first, best.second};
}

namespace {

// Returns (g, x, y) with x a + y b = g = gcd(a, b) >= 0.
std::array<std::int64_t, 3> extended_gcd(std::int64_t a, std::int64_t b)
{
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::pair{r, checked_add(old_r, -checked_mul(q, r))};
        std::tie(old_s, s) = std::pair{s, checked_add(old_s, -checked_mul(q, s))};
        std::tie(old_t, t) = std::pair{t, checked_add(old_t, -checked_mul(q, t))};
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

}  // namespace

std::vector<Weight> integer_kernel(const std::vector<Weight>& rows, int cols)
{
    const auto ncols = static_cast<std::size_t>(cols);
    std::vector<Weight> n = rows;
    std::vector<Weight> u(ncols, Weight(ncols, 0));  // u[row][col]
    for (std::size_t i = 0; i < ncols; ++i) u[i][i] = 1;

    auto combine = [&](std::vector<Weight>& m, std::size_t p, std::size_t j, std::int64_t x, std::int64_t y,
                       std::int64_t z, std::int64_t w) {
        // col_p <- x col_p + y col_j ; col_j <- z col_p + w col_j
        for (auto& row : m) {
            const std::int64_t cp = row[p], cj = row[j];
            row[p] = checked_add(checked_mul(x, cp), checked_mul(y, cj));
            row[j] = checked_add(checked_mul(z, cp), checked_mul(w, cj));
        }
    };

    std::size_t pivot = 0;
    for (std::size_t i = 0; i < n.size() && pivot < ncols; ++i) {
        if (n[i].size() != ncols) throw Error("rank_mismatch", "integer_kernel: ragged row");
        for (std::size_t j = pivot + 1; j < ncols; ++j) {
            const std::int64_t a = n[i][pivot], b = n[i][j];
            if (b == 0) continue;
            auto [g, x, y] = extended_gcd(a, b);
            const std::int64_t z = -b / g, w = a / g;
            combine(n, pivot, j, x, y, z, w);
            combine(u, pivot, j, x, y, z, w);
        }
        if (n[i][pivot] != 0) ++pivot;
    }

    std::vector<Weight> kernel;
    for (std::size_t c = pivot; c < ncols; ++c) {
        Weight v(ncols);
        for (std::size_t r = 0; r < ncols; ++r) v[r] = u[r][c];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

std::optional<std::vector<Weight>> saturated_lattice(const Eigen::MatrixXd& rows_in, std::int64_t max_den)
{
    const auto k = rows_in.rows();
    const auto l = static_cast<int>(rows_in.cols());
    if (k == 0) return std::vector<Weight>{};

    // Reduced row echelon form with partial pivoting.
    Eigen::MatrixXd r = rows_in;
    Eigen::Index lead = 0;
    for (Eigen::Index row = 0; row < k && lead < l; ++row, ++lead) {
        Eigen::Index best = row;
        while (true) {
            r.col(lead).tail(k - row).cwiseAbs().maxCoeff(&best);
            best += row;
            if (std::abs(r(best, lead)) > 1e-10) break;
            if (++lead == l) break;
        }
        if (lead == l) break;
        r.row(row).swap(r.row(best));
        r.row(row) /= r(row, lead);
        for (Eigen::Index other = 0; other < k; ++other)
            if (other != row) r.row(other) -= r(other, lead) * r.row(row);
    }

    std::vector<Weight> integer_rows;
    for (Eigen::Index row = 0; row < k; ++row) {
        std::vector<std::pair<std::int64_t, std::int64_t>> fracs;
        std::int64_t lcm = 1;
        for (Eigen::Index c = 0; c < l; ++c) {
            auto q = rationalize(r(row, c), max_den, 1e-7);
            if (!q) return std::nullopt;
            fracs.push_back(*q);
            lcm = checked_mul(lcm / std::gcd(lcm, q->second), q->second);
            if (lcm > max_den) return std::nullopt;
        }
        Weight v;
        for (auto [p, q] : fracs) v.push_back(checked_mul(p, lcm / q));
        integer_rows.push_back(std::move(v));
    }

    auto complement = integer_kernel(integer_rows, l);
    auto lattice = integer_kernel(complement, l);
    if (static_cast<Eigen::Index>(lattice.size()) != k) return std::nullopt;
    return lattice;
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& basis, int n)
{
    if (basis.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * s(0)) ++rank;
    return svd.matrixU().rightCols(n - rank);
}

}  // namespace elc
