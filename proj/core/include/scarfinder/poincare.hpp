#pragma once

#include <cstdint>
#include <vector>

#include "scarfinder/mps.hpp"

namespace scarfinder {

/// Three angles of the chi=2 constrained ansatz on a 3-site unit cell,
/// interpreted modulo 2*pi.
struct AnsatzAngles {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;

    AnsatzAngles wrapped() const;  // canonical representative in [0, 2*pi)
    double distance(const AnsatzAngles& other) const;  // max-norm on the torus
};

/// chi=2, 3-site unit cell iMPS from the constrained ansatz matrices
/// A_up = [[0, i], [0, 0]], A_down(t) = [[cos t, 0], [sin t, 0]].
UniformMPS ansatz_mps(const AnsatzAngles& a);
std::vector<std::vector<ComplexMatrix>> ansatz_raw_tensors(const AnsatzAngles& a);

/// Local maximization of transfer_fidelity(psi, ansatz_mps(theta)) from `guess`
/// (simplex with restarts, parameter tolerance 1e-7). Throws ProjectionLostError
/// when the optimizer stagnates below fidelity 0.5.
AnsatzAngles project_to_ansatz(const UniformMPS& psi, const AnsatzAngles& guess,
                               double* fidelity = nullptr);

struct PoincarePoint {
    double theta1 = 0.0, theta3 = 0.0;  // at the theta2 = 0 plane, in [0, 2*pi)
    int crossing_index = 0;
    int trajectory_id = 0;
    int direction = +1;  // sign of d(theta2)/dstep at the crossing
};

struct PoincareOptions {
    double dt = 0.1;         // projection interval
    int n_steps = 400;
    double inner_dt = 0.01;  // iTEBD step inside each interval
    int chi_work = 12;
    double cutoff = 1e-10;
    double omega = 1.0;
    double mu = 100.0;
    bool early_stop = true;        // stop when late same-direction crossings settle
    double early_stop_eps = 1e-6;
    int min_crossings = 8;
};

struct PoincareRun {
    std::vector<PoincarePoint> points;
    AnsatzAngles final_angles;
    std::vector<AnsatzAngles> path;  // unwrapped angles per step
    bool lost = false;               // projection lost (partial results kept)
    std::vector<double> energies;    // energy density along the trajectory
};

PoincareRun poincare_run(const AnsatzAngles& theta0, const PoincareOptions& opts,
                         int trajectory_id = 0);

struct FixedPoint {
    AnsatzAngles angles;  // (theta1, 0, theta3)
    int basin_count = 0;
    double convergence_radius = 0.0;  // median angle distance of contributing starts
};

struct FixedPointSearch {
    std::vector<FixedPoint> all_clusters;
    std::vector<FixedPoint> in_domain;  // theta1 in [pi/2, 3pi/2], theta3 in [0, pi]
    int n_converged = 0;
};

/// Random starts, clustering of the terminal crossings with radius 0.02*pi.
FixedPointSearch find_fixed_points(int n_samples, const PoincareOptions& opts, std::uint64_t seed,
                                   int threads = 0);

} // namespace scarfinder
