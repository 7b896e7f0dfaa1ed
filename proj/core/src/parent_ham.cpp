#include "scarfinder/parent_ham.hpp"

#include <cmath>
#include <map>
#include <random>

#include "scarfinder/ed.hpp"

namespace scarfinder {

namespace {

// translation-invariant sum of a single local term applied to a state
ComplexVector apply_term_sum(const FiniteHilbert& hil, const ComplexMatrix& op, int span,
                             const ComplexVector& x) {
    ComplexVector y = ComplexVector::Zero(x.size());
    for (int j = 0; j < hil.sites(); ++j)
        for (Eigen::Index col = 0; col < x.size(); ++col) {
            if (x(col) == Complex(0, 0)) continue;
            std::int64_t c = hil.config(col);
            std::int64_t p = hil.window(c, j, span);
            for (Eigen::Index pp = 0; pp < op.rows(); ++pp) {
                Complex v = op(pp, p);
                if (v == Complex(0, 0)) continue;
                Eigen::Index row = hil.index_of(hil.with_window(c, j, span, pp));
                if (row >= 0) y(row) += v * x(col);
            }
        }
    return y;
}

// Hilbert-Schmidt inner product density of two translation-invariant sums of
// span-k local terms on an L-site PBC chain: sum over relative placements,
// normalized by d^L.
double hs_sum_inner(const ComplexMatrix& ha, const ComplexMatrix& hb, int span, int d, int L) {
    if (L < 2 * span - 1)
        throw InvalidInputError("hs_sum_inner: chain too short for the span");
    double dpow_k = std::pow(double(d), span);
    Complex total = (ha.adjoint() * hb).trace() / dpow_k;
    for (int r = 1; r < span; ++r) {
        Eigen::Index idim = 1;
        for (int i = 0; i < r; ++i) idim *= d;
        ComplexMatrix ir = ComplexMatrix::Identity(idim, idim);
        ComplexMatrix a_left = kron(ha, ir), b_right = kron(ir, hb);
        ComplexMatrix a_right = kron(ir, ha), b_left = kron(hb, ir);
        double dpow = dpow_k * double(idim);
        total += (a_left.adjoint() * b_right).trace() / dpow;
        total += (a_right.adjoint() * b_left).trace() / dpow;
    }
    int disjoint = L - (2 * span - 1);
    total += double(disjoint) * std::conj(ha.trace()) * hb.trace() / (dpow_k * dpow_k);
    return double(L) * std::real(total);
}

} // namespace

OperatorBasis OperatorBasis::xy_type1() {
    auto ops = LocalOperatorSet::spin1();
    const std::vector<std::string> names = {"I", "Sx", "Sy", "Sz", "P0"};
    OperatorBasis basis;
    basis.local_dim = 3;
    basis.span = 2;
    for (const auto& a : names)
        for (const auto& b : names) {
            if (a == "I" && b == "I") continue;  // pure identity has no fluctuation content
            basis.names.push_back(a + "*" + b);
            basis.local_terms.push_back(kron(ops.at(a == "I" ? "Id" : a), ops.at(b == "I" ? "Id" : b)));
        }
    return basis;
}

OperatorBasis OperatorBasis::xy_all_two_site() {
    auto ops = LocalOperatorSet::spin1();
    std::vector<std::string> names = {"I"};
    for (int i = 1; i <= 8; ++i) names.push_back("gm" + std::to_string(i));
    OperatorBasis basis;
    basis.local_dim = 3;
    basis.span = 2;
    for (const auto& a : names)
        for (const auto& b : names) {
            if (a == "I" && b == "I") continue;
            basis.names.push_back(a + "*" + b);
            basis.local_terms.push_back(kron(ops.at(a == "I" ? "Id" : a), ops.at(b == "I" ? "Id" : b)));
        }
    return basis;
}

CovarianceMatrix covariance_matrix(const std::vector<FiniteState>& targets,
                                   const OperatorBasis& basis) {
    if (targets.empty()) throw InvalidInputError("covariance_matrix: empty target list");
    const auto& hil = *targets[0].hilbert;
    const int L = hil.sites();
    const Eigen::Index m = static_cast<Eigen::Index>(basis.local_terms.size());

    CovarianceMatrix out;
    out.chain_length = L;
    out.gram.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b) {
            double g = hs_sum_inner(basis.local_terms[a], basis.local_terms[b], basis.span,
                                    basis.local_dim, L);
            out.gram(a, b) = g;
            out.gram(b, a) = g;
        }

    // symmetric orthogonalization; near-zero eigenvalues are linear dependencies
    Eigen::SelfAdjointEigenSolver<RealMatrix> ges(out.gram);
    double gmax = ges.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i)
        if (ges.eigenvalues()(i) > 1e-10 * gmax) keep.push_back(i);
    out.to_ortho.resize(static_cast<Eigen::Index>(keep.size()), m);
    for (size_t i = 0; i < keep.size(); ++i)
        out.to_ortho.row(static_cast<Eigen::Index>(i)) =
            ges.eigenvectors().col(keep[i]).transpose() / std::sqrt(ges.eigenvalues()(keep[i]));

    // per-target applications
    const double n_targets = double(targets.size());
    RealMatrix c_raw = RealMatrix::Zero(m, m);
    RealVector mean_raw = RealVector::Zero(m);
    for (const auto& t : targets) {
        ComplexVector psi = t.amps / t.amps.norm();
        ComplexMatrix v(psi.size(), m);
        for (Eigen::Index a = 0; a < m; ++a)
            v.col(a) = apply_term_sum(hil, basis.local_terms[a], basis.span, psi);
        ComplexMatrix g = v.adjoint() * v;
        c_raw += g.real() / n_targets;
        for (Eigen::Index a = 0; a < m; ++a)
            mean_raw(a) += std::real(psi.dot(v.col(a))) / n_targets;
    }
    c_raw -= mean_raw * mean_raw.transpose();
    out.c = out.to_ortho * c_raw * out.to_ortho.transpose();
    out.c = 0.5 * (out.c + out.c.transpose()).eval();
    return out;
}

NullSpaceResult null_space(const CovarianceMatrix& c, double tol) {
    if (tol <= 0) throw InvalidInputError("null_space: tol must be positive");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(c.c);
    NullSpaceResult out;
    out.eigenvalues = es.eigenvalues();
    double lmax = std::max(out.eigenvalues.maxCoeff(), 1e-300);
    std::vector<Eigen::Index> null;
    for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
        if (out.eigenvalues(i) < tol * lmax) null.push_back(i);
    out.dimension = static_cast<int>(null.size());
    out.null_ortho.resize(c.c.rows(), out.dimension);
    for (int i = 0; i < out.dimension; ++i) out.null_ortho.col(i) = es.eigenvectors().col(null[i]);
    out.null_raw = c.to_ortho.transpose() * out.null_ortho;
    return out;
}

RealVector orthonormal_coords(const CovarianceMatrix& c, const RealVector& raw_coeffs) {
    return c.to_ortho * (c.gram * raw_coeffs);
}

HamiltonianSpec projective_embedding(const std::vector<FiniteState>& targets, int cluster_size,
                                     std::uint64_t seed) {
    if (targets.empty()) throw InvalidInputError("projective_embedding: empty target list");
    const auto& hil = *targets[0].hilbert;
    const int L = hil.sites();
    const int d = hil.local_dim();
    const int k = cluster_size;
    Eigen::Index cdim = 1;
    for (int i = 0; i < k; ++i) cdim *= d;

    // span of all k-site reduced supports: columns psi(p, env) over every
    // target and window position
    Eigen::Index env_dim = hil.dim() / cdim;
    ComplexMatrix support =
        ComplexMatrix::Zero(cdim, env_dim * static_cast<Eigen::Index>(targets.size()) * L);
    Eigen::Index col0 = 0;
    for (const auto& t : targets) {
        for (int j = 0; j < L; ++j) {
            std::map<std::int64_t, Eigen::Index> envs;
            for (Eigen::Index i = 0; i < hil.dim(); ++i) {
                std::int64_t c = hil.config(i);
                std::int64_t p = hil.window(c, j, k);
                std::int64_t env = hil.with_window(c, j, k, 0);
                auto [it, inserted] = envs.emplace(env, static_cast<Eigen::Index>(envs.size()));
                if (it->second >= env_dim)
                    throw InvalidInputError("projective_embedding: unexpected environment count");
                support(p, col0 + it->second) = t.amps(i);
            }
            col0 += env_dim;
        }
    }

    Eigen::BDCSVD<ComplexMatrix> svd(support, Eigen::ComputeThinU);
    const RealVector& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * s(0)) ++rank;
    if (rank >= cdim)
        throw EmbeddingImpossibleError(
            "projective_embedding: reduced supports span the full cluster space");
    ComplexMatrix u = svd.matrixU().leftCols(rank);
    ComplexMatrix q = ComplexMatrix::Identity(cdim, cdim) - u * u.adjoint();  // 1 - P

    // seeded GUE draw: column-major, real part then imaginary part, N(0, 1/2) each
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
    ComplexMatrix raw(cdim, cdim);
    for (Eigen::Index col = 0; col < cdim; ++col)
        for (Eigen::Index row = 0; row < cdim; ++row) {
            double re = gauss(rng), im = gauss(rng);
            raw(row, col) = Complex(re, im);
        }
    ComplexMatrix h_rand = 0.5 * (raw + raw.adjoint());
    ComplexMatrix term = q * h_rand * q;
    term = 0.5 * (term + term.adjoint()).eval();

    HamiltonianSpec spec;
    spec.name = "projective_embedding";
    spec.unit_cell = 1;
    spec.local_dim = d;
    spec.terms.push_back({0, k, term, 1.0});
    spec.validate();
    return spec;
}

} // namespace scarfinder
