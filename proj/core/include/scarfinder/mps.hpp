#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scarfinder/hamiltonian.hpp"

namespace scarfinder {

inline ComplexMatrix scale_rows(ComplexMatrix m, const RealVector& s) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= s(i);
    return m;
}

inline ComplexMatrix scale_cols(ComplexMatrix m, const RealVector& s) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= s(j);
    return m;
}

/// Translation-invariant MPS with an n-site unit cell in Vidal form:
/// ... L[n-1] G[0] L[0] G[1] L[1] ... G[n-1] L[n-1] ...
/// G[site][s] is the chi_left x chi_right matrix for physical index s and
/// L[site] holds the bond weights on the bond to the *right* of `site`.
/// Bond weights are nonnegative, descending and 2-norm normalized.
class UniformMPS {
public:
    UniformMPS() = default;

    /// Product state from per-site kets (normalized internally); chi = 1.
    static UniformMPS product_state(const std::vector<ComplexVector>& site_kets);

    /// From raw site matrices A[site][s]; trivial bond weights are inserted and
    /// the state is brought to canonical form.
    static UniformMPS from_tensors(const std::vector<std::vector<ComplexMatrix>>& site_matrices);

    int unit_cell() const { return static_cast<int>(gammas_.size()); }
    int local_dim() const { return d_; }
    int bond_dim(int bond) const { return static_cast<int>(lambdas_[mod(bond)].size()); }
    int max_bond_dim() const;

    const ComplexMatrix& gamma(int site, int s) const { return gammas_[mod(site)][s]; }
    ComplexMatrix& gamma(int site, int s) { return gammas_[mod(site)][s]; }
    const RealVector& lambda(int bond) const { return lambdas_[mod(bond)]; }
    RealVector& lambda(int bond) { return lambdas_[mod(bond)]; }

    /// lambda_{site-1} Gamma_site (left form) and Gamma_site lambda_site (right form).
    ComplexMatrix left_form(int site, int s) const;
    ComplexMatrix right_form(int site, int s) const;

    /// Restore Vidal canonical form (per-bond fixed-point gauge fix); also
    /// normalizes the state so the cell transfer eigenvalue is 1.
    void canonicalize(double tol = 1e-12);

    /// Max deviation from the per-site orthonormality conditions.
    double canonical_defect() const;
    bool is_canonical(double tol = 1e-8) const { return canonical_defect() <= tol; }
    /// Residual recorded by the last canonicalize() call.
    double last_canonical_residual() const { return canonical_residual_; }

    /// Repeat the unit cell `factor` times (state unchanged).
    UniformMPS extended(int factor) const;

    /// Truncate every bond to at most chi_target (state must be canonical);
    /// returns the total discarded weight. Re-canonicalizes.
    double truncate_bonds(int chi_target);

    void mark_dirty() { canonical_residual_ = 1.0; }
    void set_tensors(std::vector<std::vector<ComplexMatrix>> g, std::vector<RealVector> l);

private:
    int mod(int i) const {
        int n = unit_cell();
        return ((i % n) + n) % n;
    }
    int d_ = 0;
    std::vector<std::vector<ComplexMatrix>> gammas_;  // [site][s]
    std::vector<RealVector> lambdas_;                 // [bond]
    double canonical_residual_ = 1.0;

    friend struct MixedTransfer;
};

/// Matrix-free transfer operator between two states (ket, bra) over one
/// aligned unit cell. X has shape (ket chi) x (bra chi).
struct MixedTransfer {
    const UniformMPS* ket;
    const UniformMPS* bra;
    ComplexMatrix apply(const ComplexMatrix& x) const;
    Eigen::Index dim() const;
    Complex dominant(double tol, long max_iter = 10000) const;
};

/// One layer of gates: `gate` acts on `span` sites starting at `offset`
/// (and all translates offset + k * plan cell).
struct GateLayer {
    int offset = 0;
    int span = 1;
    ComplexMatrix gate;
};

struct GatePlan {
    int unit_cell = 1;
    int local_dim = 2;
    int order = 2;
    Complex dt{0.0, 0.0};
    std::vector<GateLayer> layers;  // in application order; order-2 plans are palindromic
};

/// Build a Trotter gate plan. plan_cell == 0 chooses the smallest multiple of
/// the Hamiltonian unit cell that fits the largest term span (a 3-site term on
/// a 2-site cell tiles a 4-site cell). Penalty terms are folded into the same
/// gates as pure decay factors.
GatePlan trotter_plan(const HamiltonianSpec& h, Complex dt, int order, int plan_cell = 0);

/// One full Trotter step. Gates are applied by contracting the spanned site
/// tensors, applying the gate and re-splitting with truncated SVDs; the state
/// is re-canonicalized at the end. Returns the aggregated discarded weight.
double itebd_step(UniformMPS& psi, const GatePlan& plan, int chi_max, double cutoff);

/// Translation-averaged expectation of a `span`-site operator (canonical gauge
/// required; spans larger than the unit cell tile through it periodically).
Complex expectation_local(const UniformMPS& psi, const ComplexMatrix& op, int span);

/// Hermitian-part energy per site; the penalty term is excluded.
double energy_density(const UniformMPS& psi, const HamiltonianSpec& h);

/// Per-site logarithmic fidelity: |dominant eigenvalue of the generalized
/// transfer matrix|^(1/n) on the least-common-multiple cell.
double transfer_fidelity(const UniformMPS& psi1, const UniformMPS& psi2);

/// Von Neumann entropy of the bond weights at `bond` (natural log).
double half_chain_entropy(const UniformMPS& psi, int bond);

struct TrajectoryRecord {
    double time = 0.0;
    double energy = 0.0;
    RealVector entropies;      // one entry per bond of the unit cell
    double log_fidelity = 1.0; // vs the t=0 state
    std::vector<std::pair<std::string, double>> observables;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
};

struct ObservableSpec {
    std::string name;
    ComplexMatrix op;
    int span = 1;
};

struct EvolveOptions {
    double dt = 0.01;
    int chi_max = 16;
    double cutoff = 1e-12;
    int record_stride = 10;  // record every `stride` steps (plus t = 0)
    std::vector<ObservableSpec> observables;
    bool record_fidelity = true;
};

/// Real-time evolution to t_max recording a Trajectory; psi is evolved in place.
Trajectory free_evolve(UniformMPS& psi, const HamiltonianSpec& h, double t_max,
                       const EvolveOptions& opts);

/// A two-parameter family of reference states for fidelity maximization.
struct ScarFamily {
    std::function<UniformMPS(double, double)> make;
    double a_lo = 0, a_hi = 0;
    double b_lo = 0, b_hi = 0;
    bool wrap_a = false, wrap_b = false;
    int grid_a = 64, grid_b = 64;
};

struct ScarFidelityResult {
    double fidelity = 0.0;
    double a = 0.0, b = 0.0;
};

/// max over the family of transfer_fidelity(member, psi): coarse grid scan
/// followed by simplex refinement to parameter tolerance param_tol.
ScarFidelityResult scar_fidelity(const UniformMPS& psi, const ScarFamily& family,
                                 double param_tol = 1e-6);

} // namespace scarfinder
