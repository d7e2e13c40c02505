#include "elc/fourier_index.hpp"

#include <algorithm>
#include <cmath>

#include "elc/errors.hpp"

namespace elc {

BlockSpectrum block_spectrum(const std::vector<HessianCluster>& hessian, int k, double lambda)
{
    if (k < 0) throw Error("invalid_mode", "Fourier mode must be nonnegative");
    if (!(lambda > 0.0)) throw Error("invalid_lambda", "lambda must be positive");
    BlockSpectrum out{k, lambda, {}};
    const double k2 = static_cast<double>(k) * k;
    for (const auto& c : hessian) {
        BlockEntry e;
        e.mu = c.mu;
        e.block_eig = (k2 - lambda * lambda * c.mu) / (1.0 + k2);
        e.sign = std::abs(e.block_eig) <= kBlockZeroCutoff ? 0 : (e.block_eig > 0 ? 1 : -1);
        e.multiplicity = (k == 0 ? 1 : 2) * c.multiplicity;
        out.entries.push_back(e);
    }
    return out;
}

int stabilization_mode(double max_mu, double lambda_plus)
{
    const double bound = lambda_plus * lambda_plus * max_mu;
    if (bound < 1.0) return 1;
    auto n = static_cast<int>(std::floor(std::sqrt(bound)));
    while (static_cast<double>(n) * n <= bound) ++n;
    while (n > 1 && static_cast<double>(n - 1) * (n - 1) > bound) --n;
    return n;
}

namespace {

std::int64_t positive_count(const BlockSpectrum& b)
{
    std::int64_t count = 0;
    for (const auto& e : b.entries) {
        if (b.k == 0 && e.mu == 0.0) continue;
        if (e.sign < 0) count += e.multiplicity;  // -block_eig > 0
    }
    return count;
}

}  // namespace

IndexWindow index_window(const std::vector<HessianCluster>& hessian, double beta_j0, double epsilon, int modes)
{
    if (!(beta_j0 > 0.0)) throw Error("invalid_beta", "beta_j0 must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("invalid_epsilon", "epsilon must lie in (0, 1)");
    IndexWindow w;
    w.lambda_minus = (1.0 - epsilon) / beta_j0;
    w.lambda_plus = (1.0 + epsilon) / beta_j0;
    w.modes = modes;

    double max_mu = 0.0;
    for (const auto& c : hessian) max_mu = std::max(max_mu, c.mu);
    w.n0 = stabilization_mode(max_mu, w.lambda_plus);
    if (modes < w.n0)
        throw Error("truncation_below_stabilization",
                    "mode cutoff " + std::to_string(modes) + " is below the stabilization mode " + std::to_string(w.n0));

    const double star = 1.0 / beta_j0;
    for (const auto& c : hessian) {
        if (c.mu <= 0.0) continue;
        const double beta = std::sqrt(c.mu);
        for (int k = 1; k <= modes; ++k) {
            const double level = k / beta;
            if (level < w.lambda_minus || level > w.lambda_plus) continue;
            if (std::abs(level - star) <= 1e-10 * std::max(1.0, star)) continue;
            throw Error("window_not_isolating", "window [" + std::to_string(w.lambda_minus) + ", " +
                                                    std::to_string(w.lambda_plus) + "] also contains the level " +
                                                    std::to_string(level));
        }
    }

    for (int k = 0; k <= modes; ++k) {
        const std::int64_t lo = positive_count(block_spectrum(hessian, k, w.lambda_minus));
        const std::int64_t hi = positive_count(block_spectrum(hessian, k, w.lambda_plus));
        w.per_mode_minus.push_back(lo);
        w.per_mode_plus.push_back(hi);
        w.dim_plus_minus += lo;
        w.dim_plus_plus += hi;
        if (k != 1 && lo != hi)
            throw Error("jump_outside_first_mode", "index changes in Fourier mode " + std::to_string(k));
    }
    w.jump = w.dim_plus_plus - w.dim_plus_minus;
    return w;
}

}  // namespace elc
