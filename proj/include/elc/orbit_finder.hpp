#pragma once

// Periodic solutions of q'' = -lambda^2 grad U(q) on [0, 2 pi] near a critical
// orbit, found by bordered shooting and continued in amplitude.

#include <vector>

#include <Eigen/Dense>

#include "elc/potential.hpp"
#include "elc/symmetry_analysis.hpp"

namespace elc {

struct Trajectory {
    Eigen::VectorXd q;  // final state
    Eigen::VectorXd v;
    Eigen::MatrixXd q_samples;  // row j at time j T / M, j = 0..M-1
    Eigen::MatrixXd v_samples;
    double energy0 = 0.0;
    double energy_drift = 0.0;  // max |E(t_j) - E(0)| over the samples and the end point
    int steps = 0;
};

/// Integrates (q, v)' = (v, -lambda^2 grad U(q)) over [0, T] with local
/// tolerance `tol`, recording `samples` equally spaced states.
Trajectory integrate(const Expr& u, double lambda, const Eigen::VectorXd& q, const Eigen::VectorXd& v, double T,
                     double tol, int samples = 0);

struct ShootOptions {
    double integrator_tol = 1e-12;
    double defect_tol = 1e-10;
    int max_iterations = 50;
    int samples = 128;
    double fd_step = 1e-5;
    double residual_tol = 1e-8;
    double mode_tol = 1e-10;  // active-mode threshold for the minimal period
};

struct Seed {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    double lambda = 1.0;
    Eigen::VectorXd direction;  // unit vector pinned by the amplitude and phase constraints
    double amplitude = 0.0;     // <q(0) - q0, direction>
};

/// q0 + a xi, zero velocity.
Seed linear_seed(const Eigen::VectorXd& q0, const Eigen::VectorXd& xi, double amplitude, double lambda);

struct PeriodicOrbit {
    double lambda = 0.0;
    Eigen::MatrixXd samples;     // M x n positions over one rescaled period
    Eigen::MatrixXd velocities;  // M x n
    double target_amplitude = 0.0;
    double amplitude = 0.0;  // H^1 distance of the loop from the orbit
    double minimal_period = 0.0;
    int mode_divisor = 0;
    double residual = 0.0;
    double periodicity_defect = 0.0;
    double orbit_distance = 0.0;
    double energy_drift = 0.0;
    int iterations = 0;
};

PeriodicOrbit shoot(const Expr& u, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0, const Seed& seed,
                    const ShootOptions& opt = {});

/// max_j |v'(t_j) + lambda^2 grad U(q(t_j))| with v' from the discrete Fourier
/// derivative of the velocity samples.
double loop_residual(const Expr& u, double lambda, const Eigen::MatrixXd& q_samples, const Eigen::MatrixXd& v_samples);

struct MinimalPeriod {
    double period = 0.0;
    int divisor = 0;
};

/// gcd of the Fourier modes carrying more than tol of the loop's energy.
MinimalPeriod minimal_period(const Eigen::MatrixXd& samples, double lambda, double tol = 1e-10);

/// Distance from q to the orbit of q0, by a 16-per-circle grid and Gauss-Newton.
double distance_to_orbit(const Eigen::VectorXd& q, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0);
double distance_to_orbit(const Eigen::MatrixXd& samples, const SkewGeneratorSet& gens, const Eigen::VectorXd& q0);

struct FamilyMember {
    double amplitude = 0.0;
    PeriodicOrbit orbit;
};

/// Solves at each amplitude in turn, seeding each solve with the rescaled
/// previous solution, and checks that T_k and the orbit distance shrink.
std::vector<FamilyMember> liapunov_family(const Expr& u, const SkewGeneratorSet& gens, const SpectralReport& report,
                                          const Certificate& cert, const std::vector<double>& amplitudes,
                                          const ShootOptions& opt = {});

}  // namespace elc
