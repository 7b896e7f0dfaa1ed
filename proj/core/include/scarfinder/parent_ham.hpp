#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarfinder/finite_hilbert.hpp"
#include "scarfinder/hamiltonian.hpp"

namespace scarfinder {

/// Hermitian k-site building blocks for translation-invariant Hamiltonian sums
/// H_a = sum_j h_a(j..j+k-1). The raw list may contain linear dependencies
/// between the summed operators (e.g. I*X and X*I); covariance_matrix works in a
/// symmetrically orthogonalized basis and keeps the mapping back to raw terms.
struct OperatorBasis {
    int local_dim = 3;
    int span = 2;
    std::vector<std::string> names;
    std::vector<ComplexMatrix> local_terms;

    /// {I,Sx,Sy,Sz,P0} x {I,Sx,Sy,Sz,P0} two-site products, pure identity excluded.
    static OperatorBasis xy_type1();
    /// All two-site couplings: (Gell-Mann + I) x (Gell-Mann + I), pure identity excluded.
    static OperatorBasis xy_all_two_site();
};

struct CovarianceMatrix {
    RealMatrix c;             // in the orthonormalized operator basis
    RealMatrix gram;          // raw Hilbert-Schmidt Gram matrix of the summed operators
    RealMatrix to_ortho;      // orthonormal op i = sum_a to_ortho(i,a) * raw_a
    int chain_length = 0;
};

/// Quantum covariance matrix (anticommutator covariance, expectation averaged
/// uniformly over the targets).
CovarianceMatrix covariance_matrix(const std::vector<FiniteState>& targets,
                                   const OperatorBasis& basis);

struct NullSpaceResult {
    RealVector eigenvalues;    // ascending eigenvalues of C
    RealMatrix null_ortho;     // columns: null vectors in the orthonormal basis
    RealMatrix null_raw;       // columns: the same vectors expressed in raw coefficients
    int dimension = 0;
};

/// Orthonormal basis of the eigenspace with eigenvalue < tol * lambda_max.
NullSpaceResult null_space(const CovarianceMatrix& c, double tol = 1e-8);

/// Coordinates of a raw-coefficient Hamiltonian in the orthonormal basis
/// (for projection-residual checks against the null space).
RealVector orthonormal_coords(const CovarianceMatrix& c, const RealVector& raw_coeffs);

/// Projective embedding (1-P) h_rand (1-P) on `cluster_size`-site clusters,
/// where P projects onto the span of all cluster-sized reduced supports of the
/// targets. h_rand is a seeded GUE-style matrix: M with independent standard
/// complex Gaussian entries, h = (M + M^dagger)/2.
HamiltonianSpec projective_embedding(const std::vector<FiniteState>& targets, int cluster_size,
                                     std::uint64_t seed);

} // namespace scarfinder
