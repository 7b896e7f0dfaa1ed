#include "scarfinder/mps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scarfinder/optimize.hpp"

namespace scarfinder {

namespace {

// Dominant fixed point of a Hermiticity-preserving map on chi x chi matrices.
// Power iteration warm-started from the identity (exact for canonical states),
// with a subspace-iteration fallback for slow spectra.
std::pair<double, ComplexMatrix>
dominant_env(Eigen::Index chi, const std::function<ComplexMatrix(const ComplexMatrix&)>& map,
             double tol) {
    ComplexMatrix x = ComplexMatrix::Identity(chi, chi) / std::sqrt(double(chi));
    double lam_prev = 0.0;
    const double dx_tol = std::max(100.0 * tol, 1e-10);
    for (int it = 0; it < 2000; ++it) {
        ComplexMatrix y = map(x);
        y = 0.5 * (y + y.adjoint().eval());
        double lam = y.norm();
        if (lam < 1e-300) break;
        y /= lam;
        double dx = (y - x).norm();
        x = y;
        if (std::abs(lam - lam_prev) <= tol * lam && dx <= dx_tol) {
            // one Rayleigh-style refinement of the eigenvalue
            ComplexMatrix z = map(x);
            double lam_r = std::real((x.adjoint() * z).trace());
            return {lam_r, x};
        }
        lam_prev = lam;
    }
    // Fallback: generic subspace iteration on the vectorized map.
    auto vec_apply = [&](const ComplexVector& v) {
        ComplexMatrix m = Eigen::Map<const ComplexMatrix>(v.data(), chi, chi);
        ComplexMatrix r = map(m);
        return ComplexVector(Eigen::Map<const ComplexVector>(r.data(), chi * chi));
    };
    auto [lam, v] = dominant_eigenpair_linop(chi * chi, vec_apply, tol, 20000);
    ComplexMatrix m = Eigen::Map<const ComplexMatrix>(v.data(), chi, chi);
    m = 0.5 * (m + m.adjoint().eval());
    // rotate the global phase so the Hermitian part carries the weight
    if (std::abs(m.trace()) > 1e-14 && std::real(m.trace()) < 0) m = -m;
    double nrm = m.norm();
    if (nrm > 1e-300) m /= nrm;
    return {std::abs(lam), m};
}

// l = Y^dagger Y with Y of full row rank; returns (Y, pseudo-inverse of Y).
std::pair<ComplexMatrix, ComplexMatrix> factor_psd(const ComplexMatrix& l) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(l);
    RealVector ev = es.eigenvalues();
    double evmax = ev.size() ? ev.maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-14 * evmax) keep.push_back(i);
    // eigenvalues come out ascending; keep order stable (descending weight)
    std::reverse(keep.begin(), keep.end());
    Eigen::Index r = static_cast<Eigen::Index>(keep.size());
    ComplexMatrix y(r, l.rows()), yinv(l.rows(), r);
    for (Eigen::Index k = 0; k < r; ++k) {
        double s = std::sqrt(ev(keep[k]));
        y.row(k) = s * es.eigenvectors().col(keep[k]).adjoint();
        yinv.col(k) = es.eigenvectors().col(keep[k]) / s;
    }
    return {y, yinv};
}

} // namespace

UniformMPS UniformMPS::product_state(const std::vector<ComplexVector>& site_kets) {
    if (site_kets.empty()) throw InvalidInputError("product_state: empty unit cell");
    UniformMPS psi;
    psi.d_ = static_cast<int>(site_kets[0].size());
    psi.gammas_.resize(site_kets.size());
    psi.lambdas_.assign(site_kets.size(), RealVector::Ones(1));
    for (size_t j = 0; j < site_kets.size(); ++j) {
        const ComplexVector& v = site_kets[j];
        if (v.size() != psi.d_) throw InvalidInputError("product_state: inconsistent local dims");
        double n = v.norm();
        if (n < 1e-300) throw InvalidInputError("product_state: zero site vector");
        psi.gammas_[j].resize(psi.d_);
        for (int s = 0; s < psi.d_; ++s)
            psi.gammas_[j][s] = (v(s) / n) * ComplexMatrix::Identity(1, 1);
    }
    psi.canonical_residual_ = 0.0;
    return psi;
}

UniformMPS UniformMPS::from_tensors(const std::vector<std::vector<ComplexMatrix>>& site_matrices) {
    if (site_matrices.empty()) throw InvalidInputError("from_tensors: empty unit cell");
    UniformMPS psi;
    psi.d_ = static_cast<int>(site_matrices[0].size());
    psi.gammas_ = site_matrices;
    psi.lambdas_.resize(site_matrices.size());
    for (size_t j = 0; j < site_matrices.size(); ++j) {
        Eigen::Index chi = site_matrices[j][0].cols();
        psi.lambdas_[j] = RealVector::Constant(chi, 1.0 / std::sqrt(double(chi)));
    }
    psi.mark_dirty();
    psi.canonicalize();
    return psi;
}

int UniformMPS::max_bond_dim() const {
    int m = 0;
    for (const auto& l : lambdas_) m = std::max<int>(m, static_cast<int>(l.size()));
    return m;
}

ComplexMatrix UniformMPS::left_form(int site, int s) const {
    return scale_rows(gamma(site, s), lambda(site - 1));
}

ComplexMatrix UniformMPS::right_form(int site, int s) const {
    return scale_cols(gamma(site, s), lambda(site));
}

void UniformMPS::set_tensors(std::vector<std::vector<ComplexMatrix>> g, std::vector<RealVector> l) {
    if (g.empty() || g.size() != l.size()) throw InvalidInputError("set_tensors: shape mismatch");
    d_ = static_cast<int>(g[0].size());
    gammas_ = std::move(g);
    lambdas_ = std::move(l);
    mark_dirty();
}

void UniformMPS::canonicalize(double tol) {
    const int n = unit_cell();
    for (int pass = 0; pass < 4; ++pass) {
        for (int b = 0; b < n; ++b) {
            const Eigen::Index chi = lambdas_[b].size();
            // left environment at bond b: through sites b+1 .. b+n in left form
            auto lmap = [&](const ComplexMatrix& x0) {
                ComplexMatrix x = x0;
                for (int m = 1; m <= n; ++m) {
                    int site = mod(b + m);
                    ComplexMatrix acc = ComplexMatrix::Zero(gammas_[site][0].cols(),
                                                            gammas_[site][0].cols());
                    for (int s = 0; s < d_; ++s) {
                        ComplexMatrix a = left_form(site, s);
                        acc.noalias() += a.adjoint() * x * a;
                    }
                    x = std::move(acc);
                }
                return x;
            };
            auto rmap = [&](const ComplexMatrix& x0) {
                ComplexMatrix x = x0;
                for (int m = n; m >= 1; --m) {
                    int site = mod(b + m);
                    ComplexMatrix acc = ComplexMatrix::Zero(gammas_[site][0].rows(),
                                                            gammas_[site][0].rows());
                    for (int s = 0; s < d_; ++s) {
                        ComplexMatrix a = right_form(site, s);
                        acc.noalias() += a * x * a.adjoint();
                    }
                    x = std::move(acc);
                }
                return x;
            };
            auto [eta_l, l_env] = dominant_env(chi, lmap, tol);
            auto [eta_r, r_env] = dominant_env(chi, rmap, tol);
            (void)eta_l;
            (void)eta_r;

            auto [y, yinv] = factor_psd(l_env);   // l = y^dag y
            auto [xt, xtinv] = factor_psd(r_env); // r = x x^dag with x = xt^dag
            ComplexMatrix x = xt.adjoint();
            ComplexMatrix xinv = xtinv.adjoint();

            ComplexMatrix w = scale_cols(y, lambdas_[b]) * x;
            // dropping directions this far down costs weight ~1e-20 and keeps the
            // gauge inverses well conditioned
            TruncatedSVD sv = svd_truncate(w, static_cast<int>(w.rows() > w.cols() ? w.cols() : w.rows()),
                                           1e-10);
            double nrm = sv.values.norm();
            if (nrm < 1e-300) throw DegenerateStateError("canonicalize: zero-norm bond");

            ComplexMatrix g_left = yinv * sv.left;        // chi_old x r
            ComplexMatrix g_right = sv.right * xinv;      // r x chi_old
            int left_site = b;                            // right leg at bond b
            int right_site = mod(b + 1);                  // left leg at bond b
            for (int s = 0; s < d_; ++s) {
                gammas_[left_site][s] = gammas_[left_site][s] * g_left;
                gammas_[right_site][s] = g_right * gammas_[right_site][s];
            }
            lambdas_[b] = sv.values / nrm;
        }
        // per-site rescale to make the left orthonormality exact
        for (int site = 0; site < n; ++site) {
            Eigen::Index chi_r = gammas_[site][0].cols();
            ComplexMatrix acc = ComplexMatrix::Zero(chi_r, chi_r);
            for (int s = 0; s < d_; ++s) {
                ComplexMatrix a = left_form(site, s);
                acc.noalias() += a.adjoint() * a;
            }
            double c = std::real(acc.trace()) / double(chi_r);
            if (c < 1e-300) throw DegenerateStateError("canonicalize: vanishing site norm");
            double scale = std::sqrt(c);
            for (int s = 0; s < d_; ++s) gammas_[site][s] /= scale;
        }
        double defect = canonical_defect();
        if (defect <= std::max(tol * 100, 1e-11) || pass == 3) {
            canonical_residual_ = defect;
            break;
        }
    }
}

double UniformMPS::canonical_defect() const {
    const int n = unit_cell();
    double defect = 0.0;
    for (int site = 0; site < n; ++site) {
        Eigen::Index chi_r = gammas_[site][0].cols();
        Eigen::Index chi_l = gammas_[site][0].rows();
        ComplexMatrix accl = ComplexMatrix::Zero(chi_r, chi_r);
        ComplexMatrix accr = ComplexMatrix::Zero(chi_l, chi_l);
        for (int s = 0; s < d_; ++s) {
            ComplexMatrix a = left_form(site, s);
            accl.noalias() += a.adjoint() * a;
            ComplexMatrix b = right_form(site, s);
            accr.noalias() += b * b.adjoint();
        }
        defect = std::max(defect,
                          (accl - ComplexMatrix::Identity(chi_r, chi_r)).cwiseAbs().maxCoeff());
        defect = std::max(defect,
                          (accr - ComplexMatrix::Identity(chi_l, chi_l)).cwiseAbs().maxCoeff());
    }
    return defect;
}

UniformMPS UniformMPS::extended(int factor) const {
    if (factor < 1) throw InvalidInputError("extended: factor must be >= 1");
    UniformMPS out;
    out.d_ = d_;
    const int n = unit_cell();
    out.gammas_.reserve(n * factor);
    out.lambdas_.reserve(n * factor);
    for (int r = 0; r < factor; ++r)
        for (int j = 0; j < n; ++j) {
            out.gammas_.push_back(gammas_[j]);
            out.lambdas_.push_back(lambdas_[j]);
        }
    out.canonical_residual_ = canonical_residual_;
    return out;
}

double UniformMPS::truncate_bonds(int chi_target) {
    if (chi_target < 1) throw InvalidInputError("truncate_bonds: chi_target must be >= 1");
    const int n = unit_cell();
    double discarded = 0.0;
    bool changed = false;
    for (int b = 0; b < n; ++b) {
        Eigen::Index chi = lambdas_[b].size();
        if (chi <= chi_target) continue;
        changed = true;
        double total = lambdas_[b].squaredNorm();
        double kept = lambdas_[b].head(chi_target).squaredNorm();
        if (kept < 1e-300) throw DegenerateStateError("truncate_bonds: all weight discarded");
        discarded += (total - kept) / total;
        lambdas_[b] = lambdas_[b].head(chi_target).eval();
        lambdas_[b] /= lambdas_[b].norm();
        int right_site = mod(b + 1);
        for (int s = 0; s < d_; ++s) {
            gammas_[b][s] = gammas_[b][s].leftCols(chi_target).eval();
            gammas_[right_site][s] = gammas_[right_site][s].topRows(chi_target).eval();
        }
    }
    if (changed) {
        mark_dirty();
        canonicalize();
    }
    return discarded;
}

// ---------------------------------------------------------------------------
// transfer operators & measurements

ComplexMatrix MixedTransfer::apply(const ComplexMatrix& x) const {
    ComplexMatrix cur = x;
    const int n = ket->unit_cell();
    for (int site = 0; site < n; ++site) {
        ComplexMatrix acc = ComplexMatrix::Zero(ket->gamma(site, 0).cols(),
                                                bra->gamma(site, 0).cols());
        for (int s = 0; s < ket->local_dim(); ++s) {
            ComplexMatrix a = ket->right_form(site, s);
            ComplexMatrix b = bra->right_form(site, s);
            acc.noalias() += a.transpose() * cur * b.conjugate();
        }
        cur = std::move(acc);
    }
    return cur;
}

Eigen::Index MixedTransfer::dim() const {
    return static_cast<Eigen::Index>(ket->bond_dim(-1)) * bra->bond_dim(-1);
}

Complex MixedTransfer::dominant(double tol, long max_iter) const {
    Eigen::Index rows = ket->bond_dim(-1), cols = bra->bond_dim(-1);
    auto vec_apply = [&](const ComplexVector& v) {
        ComplexMatrix m = Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
        ComplexMatrix r = apply(m);
        return ComplexVector(Eigen::Map<const ComplexVector>(r.data(), rows * cols));
    };
    return dominant_eigenvalue_linop(rows * cols, vec_apply, tol, max_iter);
}

namespace {

void require_canonical(const UniformMPS& psi, const char* who) {
    if (psi.last_canonical_residual() > 1e-6)
        throw GaugeError(std::string(who) + ": state is not in canonical gauge");
}

// theta over `span` sites starting at `start`: lambda_{start-1} (Gamma lambda)^span,
// one chiL x chiR matrix per physical pattern (leftmost site most significant).
std::vector<ComplexMatrix> build_theta(const UniformMPS& psi, int start, int span) {
    const int d = psi.local_dim();
    const RealVector& l0 = psi.lambda(start - 1);
    ComplexMatrix d0 = ComplexMatrix::Zero(l0.size(), l0.size());
    d0.diagonal() = l0.cast<Complex>();
    std::vector<ComplexMatrix> cur{d0};
    for (int m = 0; m < span; ++m) {
        std::vector<ComplexMatrix> next(cur.size() * d);
        for (size_t p = 0; p < cur.size(); ++p)
            for (int s = 0; s < d; ++s)
                next[p * d + s] = cur[p] * psi.right_form(start + m, s);
        cur = std::move(next);
    }
    return cur;
}

} // namespace

Complex expectation_local(const UniformMPS& psi, const ComplexMatrix& op, int span) {
    require_canonical(psi, "expectation_local");
    const int n = psi.unit_cell();
    Eigen::Index want = 1;
    for (int i = 0; i < span; ++i) want *= psi.local_dim();
    if (op.rows() != want || op.cols() != want)
        throw InvalidInputError("expectation_local: operator dimension mismatch");
    Complex total(0, 0);
    for (int start = 0; start < n; ++start) {
        auto theta = build_theta(psi, start, span);
        Complex val(0, 0);
        for (Eigen::Index pb = 0; pb < want; ++pb)
            for (Eigen::Index pk = 0; pk < want; ++pk) {
                if (op(pb, pk) == Complex(0, 0)) continue;
                val += op(pb, pk) * (theta[pb].conjugate().cwiseProduct(theta[pk])).sum();
            }
        total += val;
    }
    return total / double(n);
}

double energy_density(const UniformMPS& psi, const HamiltonianSpec& h) {
    require_canonical(psi, "energy_density");
    if (psi.local_dim() != h.local_dim)
        throw InvalidInputError("energy_density: local dimension mismatch");
    if (psi.unit_cell() % h.unit_cell != 0)
        throw InvalidInputError("energy_density: state cell is not a multiple of the Hamiltonian cell");
    const int reps = psi.unit_cell() / h.unit_cell;
    double e = 0.0;
    for (int r = 0; r < reps; ++r)
        for (const auto& t : h.terms) {
            int start = r * h.unit_cell + t.start;
            auto theta = build_theta(psi, start, t.span);
            Complex val(0, 0);
            Eigen::Index dim = t.op.rows();
            for (Eigen::Index pb = 0; pb < dim; ++pb)
                for (Eigen::Index pk = 0; pk < dim; ++pk) {
                    if (t.op(pb, pk) == Complex(0, 0)) continue;
                    val += t.op(pb, pk) * (theta[pb].conjugate().cwiseProduct(theta[pk])).sum();
                }
            e += std::real(t.coeff * val);
        }
    return e / double(psi.unit_cell());
}

double transfer_fidelity(const UniformMPS& psi1, const UniformMPS& psi2) {
    if (psi1.local_dim() != psi2.local_dim())
        throw InvalidInputError("transfer_fidelity: incompatible local dimensions");
    int n = std::lcm(psi1.unit_cell(), psi2.unit_cell());
    UniformMPS a = psi1.extended(n / psi1.unit_cell());
    UniformMPS b = psi2.extended(n / psi2.unit_cell());
    MixedTransfer t{&a, &b};
    Complex lam = t.dominant(1e-12);
    double mag = std::abs(lam);
    return std::pow(mag, 1.0 / double(n));
}

double half_chain_entropy(const UniformMPS& psi, int bond) {
    const RealVector& l = psi.lambda(bond);
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        double p = l(i) * l(i);
        if (p > 1e-300) s -= p * std::log(p);
    }
    return s;
}

ScarFidelityResult scar_fidelity(const UniformMPS& psi, const ScarFamily& family,
                                 double param_tol) {
    auto eval = [&](double a, double b) -> double {
        try {
            return transfer_fidelity(psi, family.make(a, b));
        } catch (const ConvergenceError&) {
            return 0.0;
        }
    };
    ScarFidelityResult best;
    for (int ia = 0; ia < family.grid_a; ++ia) {
        double a = family.a_lo + (family.a_hi - family.a_lo) *
                                     (family.wrap_a ? double(ia) / family.grid_a
                                                    : double(ia) / std::max(1, family.grid_a - 1));
        for (int ib = 0; ib < family.grid_b; ++ib) {
            double b = family.b_lo + (family.b_hi - family.b_lo) *
                                         (family.wrap_b ? double(ib) / family.grid_b
                                                        : double(ib) / std::max(1, family.grid_b - 1));
            double f = eval(a, b);
            if (f > best.fidelity) best = {f, a, b};
        }
    }
    double step_a = (family.a_hi - family.a_lo) / family.grid_a;
    double step_b = (family.b_hi - family.b_lo) / family.grid_b;
    auto neg = [&](const std::vector<double>& x) { return -eval(x[0], x[1]); };
    SimplexResult r = nelder_mead(neg, {best.a, best.b}, std::max(step_a, step_b), param_tol, 400);
    if (-r.value > best.fidelity) best = {-r.value, r.x[0], r.x[1]};
    return best;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, double initial_step, double x_tol,
                          int max_evals) {
    const size_t n = x0.size();
    int evals = 0;
    auto call = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (size_t i = 0; i < n; ++i) pts[i + 1][i] += initial_step;
    for (size_t i = 0; i <= n; ++i) vals[i] = call(pts[i]);

    auto order = [&]() {
        std::vector<size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            v2[i] = vals[idx[i]];
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    while (evals < max_evals) {
        order();
        double diam = 0.0;
        for (size_t i = 1; i <= n; ++i)
            for (size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[0][k]));
        if (diam < x_tol) break;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / double(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (size_t k = 0; k < n; ++k) x[k] = centroid[k] + coef * (pts[n][k] - centroid[k]);
            return x;
        };
        std::vector<double> xr = blend(-1.0);
        double fr = call(xr);
        if (fr < vals[0]) {
            std::vector<double> xe = blend(-2.0);
            double fe = call(xe);
            if (fe < fr) { pts[n] = xe; vals[n] = fe; }
            else { pts[n] = xr; vals[n] = fr; }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            std::vector<double> xc = blend(0.5);
            double fc = call(xc);
            if (fc < vals[n]) { pts[n] = xc; vals[n] = fc; }
            else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t k = 0; k < n; ++k) pts[i][k] = 0.5 * (pts[i][k] + pts[0][k]);
                    vals[i] = call(pts[i]);
                }
            }
        }
    }
    order();
    return {pts[0], vals[0], evals};
}

} // namespace scarfinder
