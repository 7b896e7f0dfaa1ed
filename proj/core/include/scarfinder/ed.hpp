#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "scarfinder/finite_hilbert.hpp"
#include "scarfinder/hamiltonian.hpp"
#include "scarfinder/mps.hpp"

namespace scarfinder {

/// Basis of the finite chain for a Hamiltonian spec (applies the constraint
/// projector when present).
std::shared_ptr<const FiniteHilbert> make_hilbert(const HamiltonianSpec& h, int L, bool pbc,
                                                  std::int64_t config_cap = 200000);

/// Dense Hermitian matrix over the allowed configurations; penalty terms are
/// excluded (Hermitian physics only). L must be a multiple of the unit cell.
ComplexMatrix build_finite_hamiltonian(const HamiltonianSpec& h, const FiniteHilbert& hilbert);
ComplexMatrix build_finite_hamiltonian(const HamiltonianSpec& h, int L, bool pbc);

/// Sparse application y = H x over the allowed configurations.
ComplexVector apply_finite(const HamiltonianSpec& h, const FiniteHilbert& hilbert,
                           const ComplexVector& x);

/// Extremal eigenvalues by seeded power iteration on shifted H (for spectra too
/// large to diagonalize densely).
std::pair<double, double> extremal_energies(const HamiltonianSpec& h, const FiniteHilbert& hilbert,
                                            double tol = 1e-10, long max_iter = 200000);

// ---------------------------------------------------------------------------
// translation-momentum sectors

struct SymmetrySector {
    std::shared_ptr<const FiniteHilbert> hilbert;
    int step = 1;      // translation step in sites
    double k = 0.0;    // momentum per step-translation (0 or pi in the figures)
    std::vector<std::int64_t> reps;   // orbit representatives (minimal config)
    std::vector<int> orbit_sizes;
    ComplexMatrix hamiltonian;        // Hermitian in the symmetrized basis

    Eigen::Index dim() const { return static_cast<Eigen::Index>(reps.size()); }
};

SymmetrySector sector_decompose(const std::shared_ptr<const FiniteHilbert>& hilbert,
                                const HamiltonianSpec& h, int step, double k);

/// Sector coordinates of a full-basis state (projection onto the sector).
ComplexVector sector_project(const SymmetrySector& sector, const FiniteState& psi);
/// Lift sector coordinates back to the configuration basis.
FiniteState sector_lift(const SymmetrySector& sector, const ComplexVector& coords);

struct SpectrumResult {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors;
    RealVector entropies;      // half-chain entropy per eigenstate (config-basis cut)
};

struct EigensystemOptions {
    Eigen::Index dense_cap = 6000;
    bool with_entropies = true;
};

SpectrumResult eigensystem(const SymmetrySector& sector, const EigensystemOptions& opts = {});

/// (energy, |overlap|^2) per eigenstate; the probe is projected into the sector
/// first and the projection weight is reported through `sector_weight`.
std::vector<std::pair<double, double>> overlaps(const FiniteState& psi,
                                                const SymmetrySector& sector,
                                                const SpectrumResult& spectrum,
                                                double* sector_weight = nullptr);

// ---------------------------------------------------------------------------
// scar towers and the finite-size projection loop

/// (Q+)^n |- ... ->, n = 0..L, normalized. Q+ = sum_j (-1)^j (S+_j)^2.
std::vector<FiniteState> scar_tower(int L);

/// Weight of psi outside the span of the (orthonormalized) tower.
double eta_decomposition(const FiniteState& psi, const std::vector<FiniteState>& tower);

/// Dense propagator exp(-i H t) via one-time eigendecomposition.
class DensePropagator {
public:
    DensePropagator(const HamiltonianSpec& h, std::shared_ptr<const FiniteHilbert> hilbert);
    FiniteState step(const FiniteState& psi, double dt) const;
    const std::shared_ptr<const FiniteHilbert>& hilbert() const { return hilbert_; }
    const RealVector& eigenvalues() const { return evals_; }

private:
    std::shared_ptr<const FiniteHilbert> hilbert_;
    RealVector evals_;
    ComplexMatrix evecs_;
};

/// One evolve-and-truncate step: exp(-i H dt) psi, then replace by the leading
/// Schmidt product across the middle cut, normalized. Near-degenerate leading
/// Schmidt values (within 1e-12) are broken by lexicographic order of the
/// phase-fixed left vectors.
FiniteState finite_scarfinder_step(const FiniteState& psi, const DensePropagator& prop, double dt);

/// || (H - E) psi ||.
double verify_eigenstate(const HamiltonianSpec& h, const FiniteState& psi, double E);

/// Von Neumann entropy of the half cut (sites 0..L/2-1 vs the rest).
double half_cut_entropy(const FiniteState& psi);

// ---------------------------------------------------------------------------
// iMPS -> finite bridge

/// Tile the unit cell L/n times, close the trace periodically, normalize.
FiniteState imps_to_finite(const UniformMPS& psi, int L);
FiniteState imps_to_finite(const UniformMPS& psi, std::shared_ptr<const FiniteHilbert> hilbert);

/// Same bridge for raw (non-canonical) site matrices; optionally skip the
/// normalization so linear structure in external parameters is preserved.
FiniteState raw_mps_to_finite(const std::vector<std::vector<ComplexMatrix>>& site_matrices,
                              std::shared_ptr<const FiniteHilbert> hilbert, bool normalize = true);

} // namespace scarfinder
