#include "elc/orbit_finder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "elc/errors.hpp"
#include "elc/integrator.hpp"
#include "elc/linalg.hpp"

namespace elc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double energy(const Expr& u, double lambda, const Eigen::VectorXd& q, const Eigen::VectorXd& v)
{
    return 0.5 * v.squaredNorm() + lambda * lambda * u.eval(q);
}

}  // namespace

Trajectory integrate(const Expr& u, double lambda, const Eigen::VectorXd& q, const Eigen::VectorXd& v, double T,
                     double tol, int samples)
{
    const auto n = q.size();
    if (v.size() != n || u.dimension() != n) throw Error("dimension_mismatch", "state dimension differs from potential");
    if (!(tol > 0.0)) throw Error("invalid_tolerance", "integrator tolerance must be positive");
    if (!(T >= 0.0)) throw Error("invalid_time", "integration time must be nonnegative");
    const double l2 = lambda * lambda;
    auto rhs = [&](double, const Eigen::VectorXd& y) {
        Eigen::VectorXd dy(2 * n);
        dy.head(n) = y.tail(n);
        dy.tail(n) = -l2 * u.gradient(y.head(n));
        return dy;
    };

    std::vector<double> times;
    for (int j = 1; j < samples; ++j) times.push_back(T * j / samples);
    times.push_back(T);

    Eigen::VectorXd y0(2 * n);
    y0 << q, v;
    StepStats<double> stats;
    const auto states = dopri5<double>(rhs, y0, times, tol, &stats);

    Trajectory tr;
    tr.q = states.back().head(n);
    tr.v = states.back().tail(n);
    tr.steps = stats.accepted;
    tr.energy0 = energy(u, lambda, q, v);
    tr.energy_drift = std::abs(energy(u, lambda, tr.q, tr.v) - tr.energy0);
    if (samples > 0) {
        tr.q_samples.resize(samples, n);
        tr.v_samples.resize(samples, n);
        tr.q_samples.row(0) = q.transpose();
        tr.v_samples.row(0) = v.transpose();
        for (int j = 1; j < samples; ++j) {
            const auto& s = states[static_cast<std::size_t>(j - 1)];
            tr.q_samples.row(j) = s.head(n).transpose();
            tr.v_samples.row(j) = s.tail(n).transpose();
            tr.energy_drift = std::max(tr.energy_drift, std::abs(energy(u, lambda, s.head(n), s.tail(n)) - tr.energy0));
        }
    }
    return tr;
}

Seed linear_seed(const Eigen::VectorXd& q0, const Eigen::VectorXd& xi, double amplitude, double lambda)
{
    if (xi.size() != q0.size() || xi.norm() == 0.0) throw Error("invalid_direction", "seed direction must be a nonzero n-vector");
    Seed s;
    s.direction = xi.normalized();
    s.q = q0 + amplitude * s.direction;
    s.v = Eigen::VectorXd::Zero(q0.size());
    s.lambda = lambda;
    s.amplitude = amplitude;
    return s;
}

namespace {

// Real DFT tables for M samples on [0, 2 pi).
struct Dft {
    int m;
    Eigen::MatrixXd cos_t, sin_t;  // (mode k, sample j)

    explicit Dft(int samples) : m(samples), cos_t(samples / 2 + 1, samples), sin_t(samples / 2 + 1, samples)
    {
        for (int k = 0; k <= m / 2; ++k)
            for (int j = 0; j < m; ++j) {
                const double a = kTwoPi * static_cast<double>((static_cast<long>(k) * j) % m) / m;
                cos_t(k, j) = std::cos(a);
                sin_t(k, j) = std::sin(a);
            }
    }
};

}  // namespace

double loop_residual(const Expr& u, double lambda, const Eigen::MatrixXd& q_samples, const Eigen::MatrixXd& v_samples)
{
    const auto m = static_cast<int>(v_samples.rows());
    if (m < 4 || q_samples.rows() != m || q_samples.cols() != v_samples.cols())
        throw Error("invalid_samples", "loop residual needs matching position and velocity samples");
    const Dft dft(m);
    const Eigen::MatrixXd a = dft.cos_t * v_samples * (2.0 / m);   // cosine coefficients
    const Eigen::MatrixXd b = dft.sin_t * v_samples * (2.0 / m);   // sine coefficients
    // v(t) = a0/2 + sum a_k cos kt + b_k sin kt, derivative sum k (b_k cos kt - a_k sin kt).
    Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(m, v_samples.cols());
    const int top = (m % 2 == 0) ? m / 2 - 1 : m / 2;  // Nyquist mode dropped
    for (int k = 1; k <= top; ++k)
        dv += k * (dft.cos_t.row(k).transpose() * b.row(k) - dft.sin_t.row(k).transpose() * a.row(k));
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
        const Eigen::VectorXd q = q_samples.row(j).transpose();
        const Eigen::VectorXd r = dv.row(j).transpose() + lambda * lambda * u.gradient(q);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

MinimalPeriod minimal_period(const Eigen::MatrixXd& samples, double lambda, double tol)
{
    const auto m = static_cast<int>(samples.rows());
    if (m < 4) throw Error("invalid_samples", "minimal period needs at least 4 samples");
    const Dft dft(m);
    const Eigen::MatrixXd a = dft.cos_t * samples;
    const Eigen::MatrixXd b = dft.sin_t * samples;
    const int top = (m % 2 == 0) ? m / 2 - 1 : m / 2;
    std::vector<double> e(static_cast<std::size_t>(top + 1), 0.0);
    double total = 0.0;
    for (int k = 1; k <= top; ++k) {
        e[static_cast<std::size_t>(k)] = a.row(k).squaredNorm() + b.row(k).squaredNorm();
        total += e[static_cast<std::size_t>(k)];
    }
    const double scale = a.row(0).squaredNorm() / m + static_cast<double>(m);
    if (total <= 1e-26 * scale * m) throw SolverError("stationary_loop", "loop has no active Fourier mode");
    int d = 0;
    for (int k = 1; k <= top; ++k)
        if (e[static_cast<std::size_t>(k)] > tol * total) d = std::gcd(d, k);
    return {kTwoPi * lambda / d, d};
}

namespace {

class OrbitGrid {
public:
    OrbitGrid(const SkewGeneratorSet& gens, const Eigen::VectorXd& q0) : gens_(gens), q0_(q0)
    {
        const int l = gens.rank();
        if (l == 0) return;
        int per = 16;
        while (per > 2 && std::pow(per, l) > 65536.0) --per;
        std::vector<int> idx(static_cast<std::size_t>(l), 0);
        std::vector<double> phi(static_cast<std::size_t>(l));
        while (true) {
            for (int i = 0; i < l; ++i) phi[static_cast<std::size_t>(i)] = kTwoPi * idx[static_cast<std::size_t>(i)] / per;
            angles_.push_back(phi);
            points_.push_back(gens.group_element(phi) * q0);
            int i = 0;
            while (i < l && ++idx[static_cast<std::size_t>(i)] == per) idx[static_cast<std::size_t>(i++)] = 0;
            if (i == l) break;
        }
    }

    double distance(const Eigen::VectorXd& q) const
    {
        if (gens_.rank() == 0) return (q - q0_).norm();
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double d = (points_[i] - q).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        std::vector<double> phi = angles_[best];
        Eigen::VectorXd p = points_[best];
        double dist = std::sqrt(best_d);
        const int l = gens_.rank();
        for (int it = 0; it < 30; ++it) {
            Eigen::MatrixXd j(q.size(), l);
            for (int i = 0; i < l; ++i) j.col(i) = gens_[i] * p;
            const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(q - p);
            std::vector<double> trial = phi;
            for (int i = 0; i < l; ++i) trial[static_cast<std::size_t>(i)] += step(i);
            const Eigen::VectorXd pt = gens_.group_element(trial) * q0_;
            const double dt = (pt - q).norm();
            if (!(dt < dist)) break;
            phi = std::move(trial);
            p = pt;
            const bool small = step.norm() < 1e-14;
            dist = dt;
            if (small) break;
        }
        return dist;
    }

private:
    const SkewGeneratorSet& gens_;
    Eigen::VectorXd q0_;
    std::vector<std::vector<double>> angles_;
    std::vector<Eigen::VectorXd> points_;
};

}  // namespace

double distance_to_orbit(const Eigen::VectorXd& q, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0)
{
    return OrbitGrid(gens, q0).distance(q);
}

double distance_to_orbit(const Eigen::MatrixXd& samples, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0)
{
    const OrbitGrid grid(gens, q0);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < samples.rows(); ++j) worst = std::max(worst, grid.distance(samples.row(j).transpose()));
    return worst;
}

PeriodicOrbit shoot(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, const Seed& seed,
                    const ShootOptions& opt)
{
    const auto n = q0.size();
    if (seed.q.size() != n || seed.v.size() != n || seed.direction.size() != n)
        throw Error("dimension_mismatch", "seed dimension differs from q0");
    if (std::abs(seed.amplitude) < 1e-12)
        throw SolverError("stationary_seed", "seed amplitude below 1e-12: only the stationary solution is pinned");
    if (!(seed.lambda > 0.0)) throw Error("invalid_lambda", "seed lambda must be positive");

    const Eigen::VectorXd xi = seed.direction.normalized();
    const Eigen::VectorXd q_ref = seed.q;
    const Eigen::MatrixXd tangents = gens.rank() ? orbit_tangent(gens, q_ref).basis : Eigen::MatrixXd(n, 0);
    const Eigen::Index r = tangents.cols();
    const Eigen::Index unknowns = 2 * n + 1;
    const Eigen::Index equations = 2 * n + 2 + r;

    auto residual = [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd q = z.head(n), v = z.segment(n, n);
        const double lambda = z(2 * n);
        if (!(lambda > 0.0)) throw SolverError("nonpositive_lambda", "Newton iterate left lambda > 0");
        const Trajectory tr = integrate(u, lambda, q, v, kTwoPi, opt.integrator_tol);
        Eigen::VectorXd f(equations);
        f.head(n) = tr.q - q;
        f.segment(n, n) = tr.v - v;
        f(2 * n) = v.dot(xi);
        f(2 * n + 1) = (q - q0).dot(xi) - seed.amplitude;
        if (r) f.tail(r) = tangents.transpose() * (q - q_ref);
        return f;
    };

    Eigen::VectorXd z(unknowns);
    z << seed.q, seed.v, seed.lambda;
    Eigen::VectorXd f = residual(z);
    int it = 0;
    for (; f.norm() >= opt.defect_tol; ++it) {
        if (it == opt.max_iterations)
            throw SolverError("newton_no_convergence", "shooting Newton did not converge in " +
                                                           std::to_string(opt.max_iterations) +
                                                           " iterations (defect " + std::to_string(f.norm()) + ")");
        Eigen::MatrixXd jac(equations, unknowns);
        for (Eigen::Index i = 0; i < unknowns; ++i) {
            const double h = opt.fd_step * (1.0 + std::abs(z(i)));
            Eigen::VectorXd zp = z, zm = z;
            zp(i) += h;
            zm(i) -= h;
            jac.col(i) = (residual(zp) - residual(zm)) / (2.0 * h);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
        cod.setThreshold(1e-6);
        const Eigen::VectorXd dz = cod.solve(-f);
        double t = 1.0;
        Eigen::VectorXd z_new, f_new;
        for (int half = 0; half < 12; ++half, t *= 0.5) {
            z_new = z + t * dz;
            if (!(z_new(2 * n) > 0.0)) continue;
            f_new = residual(z_new);
            if (f_new.norm() < f.norm()) break;
        }
        if (f_new.size() == 0 || !(f_new.norm() < f.norm()))
            throw SolverError("newton_stalled", "shooting Newton made no progress (defect " + std::to_string(f.norm()) + ")");
        z = std::move(z_new);
        f = std::move(f_new);
    }

    PeriodicOrbit orbit;
    orbit.iterations = it;
    orbit.lambda = z(2 * n);
    orbit.target_amplitude = seed.amplitude;
    const Trajectory tr = integrate(u, orbit.lambda, z.head(n), z.segment(n, n), kTwoPi, opt.integrator_tol, opt.samples);
    orbit.samples = tr.q_samples;
    orbit.velocities = tr.v_samples;
    orbit.energy_drift = tr.energy_drift / (1.0 + std::abs(tr.energy0));
    orbit.periodicity_defect = (tr.q - z.head(n)).norm() + (tr.v - z.segment(n, n)).norm();
    if (orbit.periodicity_defect > 1e-8 * (1.0 + z.head(n).norm()))
        throw SolverError("not_periodic", "accepted loop fails the periodicity check");
    orbit.residual = loop_residual(u, orbit.lambda, orbit.samples, orbit.velocities);
    if (orbit.residual > opt.residual_tol)
        throw SolverError("residual_too_large", "loop residual " + std::to_string(orbit.residual) + " exceeds " +
                                                    std::to_string(opt.residual_tol));

    const OrbitGrid grid(gens, q0);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < orbit.samples.rows(); ++j) {
        const double d = grid.distance(orbit.samples.row(j).transpose());
        orbit.orbit_distance = std::max(orbit.orbit_distance, d);
        sum += d * d + orbit.velocities.row(j).squaredNorm();
    }
    orbit.amplitude = std::sqrt(sum / static_cast<double>(orbit.samples.rows()));
    if (orbit.amplitude < 1e-12)
        throw SolverError("stationary_solution", "shooting converged to the stationary solution");
    const MinimalPeriod mp = minimal_period(orbit.samples, orbit.lambda, opt.mode_tol);
    orbit.minimal_period = mp.period;
    orbit.mode_divisor = mp.divisor;
    return orbit;
}

std::vector<FamilyMember> liapunov_family(const Expr& u, const SkewGeneratorSet& gens, const SpectralReport& report,
                                          const Certificate& cert, const std::vector<double>& amplitudes,
                                          const ShootOptions& opt)
{
    std::vector<FamilyMember> family;
    if (amplitudes.empty()) return family;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] > 0.0)) throw Error("invalid_amplitudes", "amplitudes must be positive");
        if (i && !(amplitudes[i] < amplitudes[i - 1])) throw Error("invalid_amplitudes", "amplitudes must be strictly decreasing");
    }
    if (cert.j0 >= report.betas.size()) throw Error("j0_out_of_range", "certificate does not match the spectral report");

    Eigen::VectorXd xi = report.betas[cert.j0].eigenbasis.col(0);
    Eigen::Index lead = 0;
    xi.cwiseAbs().maxCoeff(&lead);
    if (xi(lead) < 0) xi = -xi;

    const double star = cert.lambda_star;
    const double target = kTwoPi * star;
    Seed seed = linear_seed(report.q0, xi, amplitudes.front(), star);
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double a = amplitudes[i];
        PeriodicOrbit orbit;
        try {
            orbit = shoot(u, gens, report.q0, seed, opt);
        } catch (const SolverError& e) {
            throw SolverError(e.code(), "amplitude " + std::to_string(a) + ": " + e.what());
        }
        if (std::abs(orbit.lambda - star) > cert.epsilon * star)
            throw SolverError("family_left_window", "amplitude " + std::to_string(a) + ": lambda " +
                                                        std::to_string(orbit.lambda) + " left the isolating window");
        if (!family.empty()) {
            const PeriodicOrbit& prev = family.back().orbit;
            const double err = std::abs(orbit.minimal_period - target);
            const double prev_err = std::abs(prev.minimal_period - target);
            if (err > 1.1 * prev_err + 1e-9)
                throw SolverError("family_not_converging", "amplitude " + std::to_string(a) +
                                                               ": |T - 2 pi lambda*| grew from " + std::to_string(prev_err) +
                                                               " to " + std::to_string(err));
            if (orbit.orbit_distance > 1.1 * prev.orbit_distance + 1e-12)
                throw SolverError("family_not_converging",
                                  "amplitude " + std::to_string(a) + ": distance to the orbit grew");
        }
        family.push_back({a, orbit});

        if (i + 1 < amplitudes.size()) {
            const double ratio = amplitudes[i + 1] / a;
            const Eigen::VectorXd q_start = orbit.samples.row(0).transpose();
            const Eigen::VectorXd v_start = orbit.velocities.row(0).transpose();
            seed.q = report.q0 + ratio * (q_start - report.q0);
            seed.v = ratio * v_start;
            seed.lambda = star + ratio * ratio * (orbit.lambda - star);
            seed.amplitude = amplitudes[i + 1];
        }
    }
    return family;
}

}  // namespace elc
