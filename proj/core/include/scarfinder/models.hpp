#pragma once

#include <cstdint>
#include <optional>

#include "scarfinder/finite_hilbert.hpp"
#include "scarfinder/hamiltonian.hpp"
#include "scarfinder/mps.hpp"

namespace scarfinder {

// ---------------------------------------------------------------------------
// Hamiltonians

enum class XyPerturbation { None, V1, V1prime, V2, V2prime };

/// Spin-1 XY chain: sum_j (Sx Sx + Sy Sy) - h sum_j Sz + V, on a 2-site unit
/// cell. V2prime requires a seed (random cluster operator).
HamiltonianSpec spin1_xy(double h, XyPerturbation pert,
                         std::optional<std::uint64_t> seed = std::nullopt);

/// Constrained spin-1/2 chain: Omega sum_j P sigma^x P, with an optional
/// -i*mu |up,up><up,up| pair penalty suppressing blockade violations.
HamiltonianSpec pxp(double omega, double mu);

/// -J sum sz sz - h sum sz - g sum sx on a 2-site unit cell.
HamiltonianSpec mixed_field_ising(double J, double h, double g);

/// Four-site circumference cylinder geometries for the blocked quasi-1D model.
struct LatticeGeometry {
    int sites_per_column = 4;
    std::vector<std::pair<int, int>> intra_column_links;
    std::vector<std::pair<int, int>> inter_column_links;  // (site in column j, site in column j+1)
    std::string name;

    static LatticeGeometry square_cylinder();
    static LatticeGeometry triangular_cylinder();
};

/// Allowed single-column configurations (bitmap per column, site 0 as the most
/// significant bit, bit value 0 = up) under the intra-column links.
struct CylinderBasis {
    LatticeGeometry geometry;
    std::vector<int> column_configs;  // ascending
    int dim() const { return static_cast<int>(column_configs.size()); }
    int index_of(int config) const;
    bool column_site_up(int config, int site) const;
};

CylinderBasis cylinder_basis(const LatticeGeometry& geometry);

/// Blocked 1D chain: one composite site per column (d = number of allowed
/// column configurations), single-block flip term with the within-block
/// constraint pre-applied, and the inter-column blockade handled by the pair
/// constraint projector / penalty assembled from the link list.
HamiltonianSpec pxp_cylinder(const LatticeGeometry& geometry, double omega = 1.0,
                             double mu = 100.0);

// ---------------------------------------------------------------------------
// Initial states

struct ScarFamilyParams {
    double theta = 0.0;
    double xi = 0.0;
    double phi = 0.0;  // Type-2 only
};

/// chi=1, 2-site cell: per site, normalize(|-> + xi (-1)^j e^{-2 i theta} |+>).
UniformMPS type1_scar_state(const ScarFamilyParams& p);

/// Staggered-z detuning of type1_scar_state(0, 1) by phases e^{\mp i alpha (-1)^j / 2}.
UniformMPS imperfect_state(double alpha);

/// chi=2, 2-site cell MPS scar family of the V2-perturbed model; energy
/// density h cos(phi).
UniformMPS type2_scar_mps(double phi, double theta);
/// Raw site matrices of the same state (A[site][s]), untouched by gauge fixing;
/// tiling these over a ring keeps the theta-coherence needed to Fourier-resolve
/// the tower.
std::vector<std::vector<ComplexMatrix>> type2_raw_tensors(double phi, double theta);

enum class NamedState { Z2, Z3, CdwSquare };
UniformMPS named_product_state(NamedState which);
/// cos(theta)|up> + sin(theta)|down> on every site (2-site cell).
UniformMPS theta_product_state(double theta);

/// Exact E=0 eigenstate of the triangular-cylinder model on L columns (PBC):
/// P prod_j (|0> - |Z2> - |Z2'>).
FiniteState triangular_S_state(int L_columns);

/// Type-2 tower on L sites (PBC), obtained by Fourier-resolving the theta
/// dependence of the raw chi=2 family at fixed phi0. States are normalized,
/// mutually orthogonal (distinct magnetization) and annihilated by the XY and
/// V2 parts of the Hamiltonian.
std::vector<FiniteState> type2_scar_tower(int L, double phi0 = 0.9);

/// Seeded complex-Gaussian tensors (mt19937_64; per site, per physical index,
/// column-major over the chi x chi block, real part then imaginary part),
/// canonicalized and normalized.
UniformMPS random_imps(int chi, int unit_cell, int local_dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scar families for fidelity maximization

/// (a, b) = (theta in [0, 2pi), beta in (-pi/2, pi/2)) with xi = tan(beta).
ScarFamily type1_family();
/// (a, b) = (theta, phi), both 2pi-periodic.
ScarFamily type2_family();

} // namespace scarfinder
