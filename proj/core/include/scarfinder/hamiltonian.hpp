#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scarfinder/linalg.hpp"

namespace scarfinder {

/// Named single-site operators for one local Hilbert space.
struct LocalOperatorSet {
    int local_dim = 0;
    std::map<std::string, ComplexMatrix> ops;

    const ComplexMatrix& at(const std::string& name) const;

    /// Spin-1 in the (|+>, |0>, |->) = Sz (+1, 0, -1) basis ordering used
    /// repo-wide. Provides Sx, Sy, Sz, Splus, Sminus, P0, Id and the
    /// Gell-Mann set gm1..gm8 in the standard ordering (Tr gm_i gm_j = 2 delta_ij).
    static LocalOperatorSet spin1();

    /// Spin-1/2 in the (|up>, |down>) basis: sigma_x/y/z, P_down, n_up, Id.
    static LocalOperatorSet spin_half();
};

/// One k-local term of a translation-invariant Hamiltonian, anchored at a site
/// offset inside the unit cell. `op` acts on `span` consecutive sites with the
/// leftmost site as the most significant tensor factor (kron order).
struct HamTerm {
    int start = 0;
    int span = 1;
    ComplexMatrix op;
    Complex coeff{1.0, 0.0};
};

/// Non-Hermitian constraint penalty: contributes -i*mu*op on every adjacent
/// pair of sites. Kept separate from the Hermitian terms so that energies and
/// finite-size diagonalization can exclude it.
struct PenaltyTerm {
    ComplexMatrix op;  // d^2 x d^2, acts on a pair of adjacent sites
    double mu = 0.0;
};

struct HamiltonianSpec {
    std::string name;
    int unit_cell = 1;
    int local_dim = 2;
    std::vector<HamTerm> terms;
    std::optional<ComplexMatrix> constraint_projector;  // d^2 x d^2 pair projector
    std::optional<PenaltyTerm> penalty;

    int max_span() const;
    /// Hermiticity of each stored term (coeff * op vs its adjoint), max abs deviation.
    double hermiticity_defect() const;
    void validate() const;
};

} // namespace scarfinder
