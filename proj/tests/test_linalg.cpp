#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <scarfinder/linalg.hpp>

using namespace scarfinder;

namespace {

ComplexMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

ComplexMatrix random_hermitian(int n, std::uint64_t seed) {
    ComplexMatrix m = random_matrix(n, n, seed);
    return 0.5 * (m + m.adjoint());
}

ComplexMatrix random_unitary(int n, std::uint64_t seed) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, n, seed));
    return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

} // namespace

TEST_CASE("svd_truncate: identity keeps everything") {
    TruncatedSVD sv = svd_truncate(ComplexMatrix::Identity(4, 4), 4, 0.0);
    REQUIRE(sv.values.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(sv.values(i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sv.discarded_weight == doctest::Approx(0.0));
}

TEST_CASE("svd_truncate: rank-1 outer product") {
    ComplexVector u = random_matrix(5, 1, 11).col(0);
    ComplexVector v = random_matrix(7, 1, 12).col(0);
    ComplexMatrix m = u * v.adjoint();
    TruncatedSVD sv = svd_truncate(m, 4, 1e-12);
    REQUIRE(sv.values.size() >= 1);
    CHECK(sv.values(0) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
    for (Eigen::Index i = 1; i < sv.values.size(); ++i) CHECK(sv.values(i) < 1e-12 * sv.values(0));
}

TEST_CASE("svd_truncate: discarded weight against a full-SVD oracle") {
    ComplexMatrix m = random_matrix(6, 6, 21);
    // independent oracle: full Jacobi SVD, discarded = three smallest values
    Eigen::JacobiSVD<ComplexMatrix> full(m);
    RealVector s = full.singularValues();
    double expect = (s(3) * s(3) + s(4) * s(4) + s(5) * s(5)) / s.squaredNorm();

    TruncatedSVD sv = svd_truncate(m, 3, 0.0);
    REQUIRE(sv.values.size() == 3);
    CHECK(sv.discarded_weight == doctest::Approx(expect).epsilon(1e-12));

    // reconstruction error equals discarded weight (relative, squared norms)
    ComplexMatrix rec = sv.left * sv.values.cast<Complex>().asDiagonal() * sv.right;
    double err = (m - rec).squaredNorm() / m.squaredNorm();
    CHECK(err == doctest::Approx(sv.discarded_weight).epsilon(1e-12));
}

TEST_CASE("svd_truncate: rejects non-finite input and bad arguments") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_truncate(m, 2, 0.0), InvalidInputError);
    CHECK_THROWS_AS(svd_truncate(ComplexMatrix::Identity(2, 2), 0, 0.0), InvalidInputError);
    CHECK_THROWS_AS(svd_truncate(ComplexMatrix::Identity(2, 2), 2, -1.0), InvalidInputError);
}

TEST_CASE("svd_truncate: frobenius identity and isometry, randomized") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        int rows = 2 + int(rng() % 10), cols = 2 + int(rng() % 10);
        int chi = 1 + int(rng() % 6);
        ComplexMatrix m = random_matrix(rows, cols, rng());
        TruncatedSVD sv = svd_truncate(m, chi, 1e-10);
        ComplexMatrix rec = sv.left * sv.values.cast<Complex>().asDiagonal() * sv.right;
        double total = m.squaredNorm();
        CHECK(rec.squaredNorm() / total + sv.discarded_weight ==
              doctest::Approx(1.0).epsilon(1e-10));
        Eigen::Index r = sv.values.size();
        CHECK((sv.left.adjoint() * sv.left - ComplexMatrix::Identity(r, r)).norm() < 1e-12);
        CHECK((sv.right * sv.right.adjoint() - ComplexMatrix::Identity(r, r)).norm() < 1e-12);
        for (Eigen::Index i = 1; i < r; ++i) CHECK(sv.values(i) <= sv.values(i - 1) + 1e-15);
        // deterministic phase gauge: largest entry of each left vector is real positive
        for (Eigen::Index kcol = 0; kcol < r; ++kcol) {
            Eigen::Index imax = 0;
            sv.left.col(kcol).cwiseAbs().maxCoeff(&imax);
            CHECK(std::abs(std::imag(sv.left(imax, kcol))) < 1e-12);
            CHECK(std::real(sv.left(imax, kcol)) > 0.0);
        }
    }
}

TEST_CASE("matrix_exponential: pauli rotation") {
    ComplexMatrix sx = ComplexMatrix::Zero(2, 2);
    sx(0, 1) = 1;
    sx(1, 0) = 1;
    ComplexMatrix got = matrix_exponential(sx, -kImag * (M_PI / 2));
    ComplexMatrix expect = std::cos(M_PI / 2) * ComplexMatrix::Identity(2, 2) -
                           kImag * std::sin(M_PI / 2) * sx;
    CHECK((got - expect).norm() < 1e-13);
}

TEST_CASE("matrix_exponential: zero matrix gives identity") {
    ComplexMatrix got = matrix_exponential(ComplexMatrix::Zero(3, 3), Complex(2.0, 1.0));
    CHECK((got - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("matrix_exponential: eigendecomposition oracle, 9x9 Hermitian") {
    ComplexMatrix h = random_hermitian(9, 5);
    Complex scalar = -kImag * 0.2;
    ComplexMatrix got = matrix_exponential(h, scalar);

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    ComplexVector phases(9);
    for (int i = 0; i < 9; ++i) phases(i) = std::exp(scalar * es.eigenvalues()(i));
    ComplexMatrix expect = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    CHECK((got - expect).norm() < 1e-10);

    // anti-Hermitian exponent gives a unitary
    CHECK((got * got.adjoint() - ComplexMatrix::Identity(9, 9)).norm() < 1e-10);
}

TEST_CASE("matrix_exponential: non-square rejected") {
    CHECK_THROWS_AS(matrix_exponential(ComplexMatrix::Zero(2, 3), Complex(1, 0)),
                    InvalidInputError);
}

TEST_CASE("matrix_exponential: additivity for commuting arguments") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        ComplexMatrix h = random_hermitian(6, rng());
        Complex s1(0.3, -0.1), s2(-0.7, 0.45);
        ComplexMatrix lhs = matrix_exponential(h, s1) * matrix_exponential(h, s2);
        ComplexMatrix rhs = matrix_exponential(h, s1 + s2);
        CHECK((lhs - rhs).norm() < 1e-9 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("dominant_eigenvalue: diagonal case") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 0.9;
    m(1, 1) = 0.5;
    CHECK(std::abs(dominant_eigenvalue(m, 1e-10) - Complex(0.9, 0)) < 1e-12);
}

TEST_CASE("dominant_eigenvalue: rotation tie broken toward positive phase") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = -1;
    m(1, 0) = 1;  // eigenvalues +i, -i
    Complex lam = dominant_eigenvalue(m, 1e-10);
    CHECK(std::abs(std::abs(lam) - 1.0) < 1e-12);
    CHECK(std::imag(lam) > 0);  // smallest phase magnitude, then arg >= 0
}

TEST_CASE("dominant_eigenvalue: dense oracle, 16x16") {
    ComplexMatrix m = random_matrix(16, 16, 4242);
    Complex lam = dominant_eigenvalue(m, 1e-12);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
    double best = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(lam) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("dominant_eigenvalue: iterative path above the dense threshold") {
    ComplexMatrix m = random_matrix(300, 300, 99);
    Complex lam = dominant_eigenvalue(m, 1e-10);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
    double best = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(lam) == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("dominant_eigenvalue: magnitude invariant under unitary similarity") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 8; ++rep) {
        ComplexMatrix m = random_matrix(12, 12, rng());
        ComplexMatrix u = random_unitary(12, rng());
        Complex a = dominant_eigenvalue(m, 1e-11);
        Complex b = dominant_eigenvalue(ComplexMatrix(u * m * u.adjoint()), 1e-11);
        CHECK(std::abs(a) == doctest::Approx(std::abs(b)).epsilon(1e-9));
    }
}

TEST_CASE("dominant_eigenvalue_linop: iteration cap raises with count") {
    auto apply = [](const ComplexVector& x) { return ComplexVector(x.reverse()); };
    try {
        dominant_eigenvalue_linop(400, apply, 1e-30, 5);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations >= 5);
    }
}
