#pragma once

// Reference computations that share no code with the library: finite
// differences, a fixed-step RK4 for the radial Example A equation, explicit
// cell counts for circle-representation spheres, and signature synthesis.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "elc/euler_ring.hpp"
#include "elc/torus_rep.hpp"

namespace oracle {

using Fn = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const Fn& f, const Eigen::VectorXd& q)
{
    const double h = 1e-5 * (1.0 + q.norm());
    Eigen::VectorXd g(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        Eigen::VectorXd a = q, b = q;
        a(i) += h;
        b(i) -= h;
        g(i) = (f(a) - f(b)) / (2 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const Fn& f, const Eigen::VectorXd& q)
{
    const double h = 1e-4 * (1.0 + q.norm());
    const auto n = q.size();
    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            auto at = [&](double si, double sj) {
                Eigen::VectorXd p = q;
                p(i) += si * h;
                p(j) += sj * h;
                return f(p);
            };
            hess(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
        }
    return hess;
}

/// Period of r'' = -(r^2 - 1) r started at rest from r = 1 + a, by RK4 with
/// step ~1e-4 and bisection on the step that brings r' back through zero.
inline double radial_period(double a)
{
    auto rhs = [](const Eigen::Vector2d& y) { return Eigen::Vector2d(y(1), -(y(0) * y(0) - 1.0) * y(0)); };
    auto step = [&](const Eigen::Vector2d& y, double h) {
        const Eigen::Vector2d k1 = rhs(y);
        const Eigen::Vector2d k2 = rhs(y + 0.5 * h * k1);
        const Eigen::Vector2d k3 = rhs(y + 0.5 * h * k2);
        const Eigen::Vector2d k4 = rhs(y + h * k3);
        return Eigen::Vector2d(y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
    };
    const double h = 1e-4;
    Eigen::Vector2d y(1.0 + a, 0.0);
    double t = 0.0;
    // r' < 0 on the first half period, > 0 on the second; the period ends when
    // r' returns from positive to zero.
    bool seen_positive = false;
    while (true) {
        const Eigen::Vector2d next = step(y, h);
        if (next(1) > 0) seen_positive = true;
        if (seen_positive && next(1) <= 0.0) {
            double lo = 0.0, hi = h;
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (step(y, mid)(1) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return t + 0.5 * (lo + hi);
        }
        y = next;
        t += h;
    }
}

/// Based equivariant cells of S^V for V = R^k0 + R[1, m] over the circle:
/// the fixed 0-cell at the origin (isotropy S^1) and the ray (0, inf) times
/// the orbit S^1/Z_m, each shifted up by k0 dimensions. The base point at
/// infinity is not counted.
struct Cell {
    int dim;
    long isotropy_order;  // 0 encodes the whole circle
};

inline std::vector<Cell> circle_sphere_cells(int k0, long m)
{
    return {{k0, 0}, {k0 + 1, m}};
}

/// Sum of (-1)^dim [isotropy] as a map label -> coefficient, with the whole
/// circle stored under key 0.
inline std::map<long, long> euler_sum(const std::vector<Cell>& cells)
{
    std::map<long, long> out;
    for (const auto& c : cells) out[c.isotropy_order] += (c.dim % 2 == 0) ? 1 : -1;
    return out;
}

inline elc::ReprSignature random_signature(std::mt19937_64& rng, int rank, int max_k0, int max_lines, int max_mult,
                                           int max_entry)
{
    std::uniform_int_distribution<int> k0d(0, max_k0), lines(0, max_lines), mult(1, max_mult),
        entry(-max_entry, max_entry);
    elc::ReprSignature s(rank, k0d(rng));
    const int count = rank ? lines(rng) : 0;
    for (int i = 0; i < count; ++i) {
        elc::Weight m(static_cast<std::size_t>(rank));
        do {
            for (auto& x : m) x = entry(rng);
        } while (std::all_of(m.begin(), m.end(), [](auto x) { return x == 0; }));
        s.add_weight(m, mult(rng));
    }
    return s;
}

/// Block-diagonal generators realizing `sig` on R^dim, conjugated by a random
/// orthogonal matrix.
inline std::vector<Eigen::MatrixXd> realize(const elc::ReprSignature& sig, std::mt19937_64& rng)
{
    const auto n = static_cast<Eigen::Index>(sig.dimension());
    std::vector<Eigen::MatrixXd> gens(static_cast<std::size_t>(sig.rank()), Eigen::MatrixXd::Zero(n, n));
    Eigen::Index offset = sig.k0();
    for (const auto& t : sig.weights())
        for (std::int64_t c = 0; c < t.k; ++c) {
            for (int j = 0; j < sig.rank(); ++j) {
                const double w = static_cast<double>(t.m[static_cast<std::size_t>(j)]);
                gens[static_cast<std::size_t>(j)](offset, offset + 1) = -w;
                gens[static_cast<std::size_t>(j)](offset + 1, offset) = w;
            }
            offset += 2;
        }
    std::normal_distribution<double> g;
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = g(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r).householderQ();
    for (auto& a : gens) a = q * a * q.transpose();
    return gens;
}

}  // namespace oracle
