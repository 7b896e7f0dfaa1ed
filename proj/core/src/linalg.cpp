#include "scarfinder/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>

namespace scarfinder {

TruncatedSVD svd_truncate(const ComplexMatrix& m, int chi_max, double cutoff) {
    if (!m.allFinite()) throw InvalidInputError("svd_truncate: non-finite entries");
    if (chi_max < 1) throw InvalidInputError("svd_truncate: chi_max must be >= 1");
    if (cutoff < 0.0) throw InvalidInputError("svd_truncate: cutoff must be >= 0");

    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const Eigen::Index full = s.size();

    const double smax = full > 0 ? s(0) : 0.0;
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < full; ++i) {
        if (keep >= chi_max) break;
        if (s(i) < cutoff * smax) break;
        ++keep;
    }
    if (keep == 0) keep = 1;  // degenerate input: retain the leading (possibly zero) value

    double total = s.squaredNorm();
    double kept = s.head(keep).squaredNorm();
    double discarded = total > 0.0 ? std::max(0.0, (total - kept) / total) : 0.0;

    TruncatedSVD out;
    out.left = svd.matrixU().leftCols(keep);
    out.values = s.head(keep);
    out.right = svd.matrixV().leftCols(keep).adjoint();
    out.discarded_weight = discarded;

    // Phase gauge: largest-magnitude entry of each left vector made real positive.
    for (Eigen::Index k = 0; k < keep; ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < out.left.rows(); ++i) {
            double a = std::abs(out.left(i, k));
            if (a > best + 1e-15) { best = a; imax = i; }
        }
        if (best <= 0.0) continue;
        Complex ph = out.left(imax, k) / best;
        out.left.col(k) *= std::conj(ph);
        out.right.row(k) *= ph;
    }
    return out;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& h, Complex scalar) {
    if (h.rows() != h.cols()) throw InvalidInputError("matrix_exponential: matrix must be square");
    if (!h.allFinite()) throw InvalidInputError("matrix_exponential: non-finite entries");
    ComplexMatrix a = scalar * h;
    return a.exp();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

bool eig_preferred(Complex a, Complex b, double tol) {
    double ma = std::abs(a), mb = std::abs(b);
    double scale = std::max(ma, mb);
    if (std::abs(ma - mb) > tol * std::max(scale, 1e-300)) return ma > mb;
    double pa = std::abs(std::arg(a)), pb = std::abs(std::arg(b));
    if (std::abs(pa - pb) > 1e-14) return pa < pb;
    return std::arg(a) >= std::arg(b);
}

namespace {

Complex pick_dominant(const ComplexVector& eigs, double tol) {
    Complex best = eigs(0);
    for (Eigen::Index i = 1; i < eigs.size(); ++i)
        if (eig_preferred(eigs(i), best, tol)) best = eigs(i);
    return best;
}

} // namespace

std::pair<Complex, ComplexVector>
dominant_eigenpair_linop(Eigen::Index dim,
                         const std::function<ComplexVector(const ComplexVector&)>& apply,
                         double tol, long max_iter, const ComplexVector* warm_start) {
    const int k = static_cast<int>(std::min<Eigen::Index>(dim, 6));
    // Fixed seed: the routine must be bit-reproducible across runs.
    std::mt19937_64 rng(0x5ca4f1d3u);
    std::normal_distribution<double> gauss;
    ComplexMatrix block(dim, k);
    for (int j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            block(i, j) = Complex(gauss(rng), gauss(rng));
    if (warm_start && warm_start->size() == dim) block.col(0) = *warm_start;

    Complex prev(0, 0);
    int stable = 0;
    long iters = 0;
    while (iters < max_iter) {
        // Orthonormalize the block, then one application of M per column.
        Eigen::HouseholderQR<ComplexMatrix> qr(block);
        ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, k);
        ComplexMatrix mq(dim, k);
        for (int j = 0; j < k; ++j) mq.col(j) = apply(q.col(j));
        iters += k;

        ComplexMatrix small = q.adjoint() * mq;  // k x k Ritz matrix
        Eigen::ComplexEigenSolver<ComplexMatrix> es(small);
        Complex lam = pick_dominant(es.eigenvalues(), tol);

        if (std::abs(lam - prev) <= tol * std::max(std::abs(lam), 1e-300)) {
            if (++stable >= 2) {
                // Return the Ritz vector for the selected eigenvalue.
                Eigen::Index which = 0;
                double bestdist = std::numeric_limits<double>::max();
                for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
                    double d = std::abs(es.eigenvalues()(j) - lam);
                    if (d < bestdist) { bestdist = d; which = j; }
                }
                ComplexVector v = q * es.eigenvectors().col(which);
                v.normalize();
                return {lam, v};
            }
        } else {
            stable = 0;
        }
        prev = lam;
        block = mq;
    }
    throw ConvergenceError("dominant_eigenpair_linop failed to converge", iters);
}

Complex dominant_eigenvalue_linop(Eigen::Index dim,
                                  const std::function<ComplexVector(const ComplexVector&)>& apply,
                                  double tol, long max_iter) {
    return dominant_eigenpair_linop(dim, apply, tol, max_iter).first;
}

Complex dominant_eigenvalue(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw InvalidInputError("dominant_eigenvalue: matrix must be square");
    if (!m.allFinite()) throw InvalidInputError("dominant_eigenvalue: non-finite entries");
    if (m.rows() <= 256) {
        Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
        return pick_dominant(es.eigenvalues(), tol);
    }
    return dominant_eigenvalue_linop(m.rows(), [&](const ComplexVector& x) { return ComplexVector(m * x); },
                                     tol);
}

} // namespace scarfinder
