#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "scarfinder/errors.hpp"

namespace scarfinder {

using Complex = std::complex<double>;

// Dense complex matrices are stored column-major (Eigen default) throughout the
// repository; every contraction and reshape assumes this order.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

constexpr Complex kImag{0.0, 1.0};

/// Thin SVD with truncation bookkeeping.
///
/// Reconstruction is left * values.asDiagonal() * right; `right` already holds
/// the adjoint factor (right * right^dagger == identity on the kept space).
struct TruncatedSVD {
    ComplexMatrix left;       // m x r, isometric columns
    RealVector values;        // r, nonnegative, descending
    ComplexMatrix right;      // r x n, isometric rows
    double discarded_weight;  // sum of squared dropped values / total sum of squares
};

/// Truncated SVD keeping at most chi_max values and dropping values below
/// cutoff * sigma_max. The phase of each kept left vector is fixed so that its
/// largest-magnitude entry is real positive, which makes tensors deterministic
/// across runs.
TruncatedSVD svd_truncate(const ComplexMatrix& m, int chi_max, double cutoff);

/// exp(scalar * h) for square h via Pade scaling-and-squaring.
ComplexMatrix matrix_exponential(const ComplexMatrix& h, Complex scalar);

/// Eigenvalue of largest magnitude. Uses a dense solve for dimension <= 256 and
/// seeded subspace iteration above; ties in magnitude (within tol, relative) are
/// broken toward the smallest phase angle |arg|, preferring arg >= 0.
Complex dominant_eigenvalue(const ComplexMatrix& m, double tol);

/// Matrix-free variant for linear operators; `apply` must implement y = M x.
/// Throws ConvergenceError when max_iter is exhausted.
Complex dominant_eigenvalue_linop(Eigen::Index dim,
                                  const std::function<ComplexVector(const ComplexVector&)>& apply,
                                  double tol, long max_iter = 10000);

/// As above but also returns the eigenvector (normalized).
std::pair<Complex, ComplexVector>
dominant_eigenpair_linop(Eigen::Index dim,
                         const std::function<ComplexVector(const ComplexVector&)>& apply,
                         double tol, long max_iter = 10000,
                         const ComplexVector* warm_start = nullptr);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Deterministic tie-break shared by all dominant-eigenvalue paths: larger
/// magnitude wins; within tol*|max| the smaller |arg| wins, then arg >= 0.
bool eig_preferred(Complex a, Complex b, double tol);

} // namespace scarfinder
