#pragma once

#include <cstdint>
#include <optional>

#include "scarfinder/mps.hpp"

namespace scarfinder {

enum class SelectionKind { MinEntropyAtT, RevivalFrequencyWindow };

struct Selection {
    SelectionKind kind = SelectionKind::MinEntropyAtT;
    double t = 30.0;        // free-evolution horizon for scoring
    double f_lo = 0.0;      // accepted revival-frequency window
    double f_hi = 0.0;
};

struct ScarFinderConfig {
    double dt_projection = 0.2;  // Delta t between projections
    int n_steps = 100;
    int chi_target = 8;
    double e_target = 0.0;
    bool energy_correction = false;
    int n_imag_substeps = 10;
    double inner_dt = 0.01;
    int chi_work = 0;       // 0 -> max(3*chi_target, chi_target + 8)
    double cutoff = 1e-12;
    int sample_unit_cell = 0;  // unit cell of sampled random states; 0 -> Hamiltonian cell

    Selection selection;

    // instrumentation / stopping
    const ScarFamily* fidelity_family = nullptr;
    int fidelity_stride = 0;       // measure F_S every k iterations (0 = off)
    double stop_at_fidelity = 0.0; // stop once F_S exceeds this (0 = off)
    bool convergence_probe = false;
    double probe_time = 4.0;       // free-evolution probe length
    int probe_stride = 1;
    double probe_entropy_tol = 1e-3;
    int probe_stable_needed = 5;
};

int effective_chi_work(const ScarFinderConfig& cfg);

struct IterationRecord {
    int step = 0;                 // 1-based, contiguous
    double energy_pre = 0.0;      // after evolution, before projection
    double energy_post = 0.0;     // after projection (and correction)
    double discarded_weight = 0.0;
    double entropy = 0.0;         // unit-cell mean of the bond entropies
    std::optional<double> scar_fidelity;
};

struct RunResult {
    UniformMPS state;
    std::vector<IterationRecord> records;
    bool success = true;     // false when energy correction failed
    bool converged = false;  // entropy-probe or fidelity stopping criterion hit
    std::string message;
};

/// Truncate every bond to chi_target, re-canonicalize, normalize.
UniformMPS project_to_manifold(const UniformMPS& psi, int chi_target,
                               double* discarded_weight = nullptr);

/// Imaginary-time energy correction: up to n substeps of size dtau = dE/n,
/// returning the state whose energy is closest to the target. Throws
/// CorrectionFailedError when the deviation never improves.
UniformMPS energy_correct(const UniformMPS& psi, const HamiltonianSpec& h, double e_target, int n,
                          int chi_target, double cutoff = 1e-12);

/// The evolve-project-correct iteration.
RunResult scarfinder_run(const UniformMPS& psi0, const HamiltonianSpec& h,
                         const ScarFinderConfig& cfg);

struct SampleResult {
    bool any_success = false;
    int best_index = -1;
    UniformMPS best;
    std::vector<RunResult> runs;
    std::vector<double> scores;        // +inf for rejected/failed candidates
    std::vector<Trajectory> probe_trajectories;
};

/// Random-restart driver: n_samples seeded random states, one scarfinder_run
/// each, free-evolution scoring by the configured selection criterion.
SampleResult sample_and_select(const HamiltonianSpec& h, int n_samples,
                               const ScarFinderConfig& cfg, std::uint64_t seed, int threads = 0);

/// Dominant nonzero frequency of a uniformly sampled series (plain DFT peak);
/// returns (frequency, power). Used by revival-frequency selection.
std::pair<double, double> dominant_frequency(const std::vector<double>& series, double dt);

} // namespace scarfinder
