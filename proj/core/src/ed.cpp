#include "scarfinder/ed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace scarfinder {

namespace {

struct Placement {
    int first_site;
    int span;
    ComplexMatrix op;  // already scaled by the coefficient
};

std::vector<Placement> tile_terms(const HamiltonianSpec& h, int L, bool pbc) {
    if (L % h.unit_cell != 0)
        throw InvalidInputError("finite chain length must be a multiple of the unit cell");
    std::vector<Placement> out;
    for (int cell = 0; cell < L / h.unit_cell; ++cell)
        for (const auto& t : h.terms) {
            int first = cell * h.unit_cell + t.start;
            if (!pbc && first + t.span > L) continue;
            out.push_back({first, t.span, ComplexMatrix(t.coeff * t.op)});
        }
    return out;
}

} // namespace

std::shared_ptr<const FiniteHilbert> make_hilbert(const HamiltonianSpec& h, int L, bool pbc,
                                                  std::int64_t config_cap) {
    return FiniteHilbert::make(L, h.local_dim, pbc, h.constraint_projector, config_cap);
}

ComplexMatrix build_finite_hamiltonian(const HamiltonianSpec& h, const FiniteHilbert& hilbert) {
    const Eigen::Index dim = hilbert.dim();
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    auto placements = tile_terms(h, hilbert.sites(), hilbert.periodic());
    for (const auto& pl : placements) {
        Eigen::Index pdim = pl.op.rows();
        for (Eigen::Index col = 0; col < dim; ++col) {
            std::int64_t c = hilbert.config(col);
            std::int64_t p = hilbert.window(c, pl.first_site, pl.span);
            for (Eigen::Index pp = 0; pp < pdim; ++pp) {
                Complex v = pl.op(pp, p);
                if (v == Complex(0, 0)) continue;
                Eigen::Index row = hilbert.index_of(hilbert.with_window(c, pl.first_site, pl.span, pp));
                if (row >= 0) m(row, col) += v;
            }
        }
    }
    return m;
}

ComplexMatrix build_finite_hamiltonian(const HamiltonianSpec& h, int L, bool pbc) {
    auto hilbert = make_hilbert(h, L, pbc);
    return build_finite_hamiltonian(h, *hilbert);
}

ComplexVector apply_finite(const HamiltonianSpec& h, const FiniteHilbert& hilbert,
                           const ComplexVector& x) {
    if (x.size() != hilbert.dim()) throw InvalidInputError("apply_finite: dimension mismatch");
    ComplexVector y = ComplexVector::Zero(x.size());
    auto placements = tile_terms(h, hilbert.sites(), hilbert.periodic());
    for (const auto& pl : placements) {
        Eigen::Index pdim = pl.op.rows();
        for (Eigen::Index col = 0; col < x.size(); ++col) {
            if (x(col) == Complex(0, 0)) continue;
            std::int64_t c = hilbert.config(col);
            std::int64_t p = hilbert.window(c, pl.first_site, pl.span);
            for (Eigen::Index pp = 0; pp < pdim; ++pp) {
                Complex v = pl.op(pp, p);
                if (v == Complex(0, 0)) continue;
                Eigen::Index row = hilbert.index_of(hilbert.with_window(c, pl.first_site, pl.span, pp));
                if (row >= 0) y(row) += v * x(col);
            }
        }
    }
    return y;
}

std::pair<double, double> extremal_energies(const HamiltonianSpec& h, const FiniteHilbert& hilbert,
                                            double tol, long max_iter) {
    // Plain Lanczos without reorthogonalization; extremal Ritz values are
    // insensitive to the ghost copies it produces.
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    ComplexVector v(hilbert.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    ComplexVector v_prev = ComplexVector::Zero(v.size());

    std::vector<double> alpha, beta;
    double lo_prev = 0, hi_prev = 0;
    const long m_max = std::min<long>(max_iter, 400);
    for (long m = 0; m < m_max; ++m) {
        ComplexVector w = apply_finite(h, hilbert, v);
        double a = std::real(v.dot(w));
        alpha.push_back(a);
        w -= a * v;
        if (!beta.empty()) w -= beta.back() * v_prev;
        double b = w.norm();

        if (alpha.size() >= 8 && (alpha.size() % 4 == 0 || b < 1e-12)) {
            Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
            RealMatrix t = RealMatrix::Zero(k, k);
            for (Eigen::Index i = 0; i < k; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
            double lo = es.eigenvalues()(0), hi = es.eigenvalues()(k - 1);
            double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
            if (std::abs(lo - lo_prev) < tol * scale && std::abs(hi - hi_prev) < tol * scale)
                return {lo, hi};
            lo_prev = lo;
            hi_prev = hi;
        }
        if (b < 1e-12) return {lo_prev, hi_prev};  // exact invariant subspace
        beta.push_back(b);
        v_prev = v;
        v = w / b;
    }
    throw ConvergenceError("extremal_energies failed to converge", m_max);
}

// ---------------------------------------------------------------------------
// momentum sectors

SymmetrySector sector_decompose(const std::shared_ptr<const FiniteHilbert>& hilbert,
                                const HamiltonianSpec& h, int step, double k) {
    if (hilbert->sites() % step != 0)
        throw InvalidInputError("sector_decompose: L must be divisible by the translation step");
    SymmetrySector sec;
    sec.hilbert = hilbert;
    sec.step = step;
    sec.k = k;

    const int n_trans = hilbert->sites() / step;
    // orbits under translation by `step`
    std::map<std::int64_t, std::pair<Eigen::Index, int>> rep_lookup;  // rep -> (index, orbit size)
    std::vector<char> seen(hilbert->dim(), 0);
    for (Eigen::Index i = 0; i < hilbert->dim(); ++i) {
        if (seen[i]) continue;
        std::int64_t c = hilbert->config(i);
        std::int64_t rep = c;
        int size = 0;
        std::int64_t cur = c;
        do {
            seen[hilbert->index_of(cur)] = 1;
            rep = std::min(rep, cur);
            cur = hilbert->translate(cur, step);
            ++size;
        } while (cur != c && size <= n_trans);
        // momentum compatibility: e^{i k R} must equal 1
        double phase = k * size;
        bool compatible = std::abs(std::remainder(phase, 2.0 * M_PI)) < 1e-9;
        if (compatible) {
            rep_lookup[rep] = {static_cast<Eigen::Index>(sec.reps.size()), size};
            sec.reps.push_back(rep);
            sec.orbit_sizes.push_back(size);
        }
    }

    // H in the symmetrized basis: for each representative apply every term and
    // fold the image configs back to their representatives with phases.
    const Eigen::Index dim = sec.dim();
    sec.hamiltonian = ComplexMatrix::Zero(dim, dim);
    auto placements = tile_terms(h, hilbert->sites(), hilbert->periodic());
    for (Eigen::Index a = 0; a < dim; ++a) {
        std::int64_t ca = sec.reps[a];
        for (const auto& pl : placements) {
            std::int64_t p = hilbert->window(ca, pl.first_site, pl.span);
            for (Eigen::Index pp = 0; pp < pl.op.rows(); ++pp) {
                Complex v = pl.op(pp, p);
                if (v == Complex(0, 0)) continue;
                std::int64_t cb = hilbert->with_window(ca, pl.first_site, pl.span, pp);
                if (hilbert->index_of(cb) < 0) continue;
                // translate cb to its representative
                std::int64_t rep = cb;
                std::int64_t cur = cb;
                int l = 0, lbest = 0;
                for (int r = 0; r < n_trans; ++r) {
                    if (cur < rep) { rep = cur; lbest = l; }
                    cur = hilbert->translate(cur, step);
                    ++l;
                }
                auto it = rep_lookup.find(rep);
                if (it == rep_lookup.end()) continue;
                auto [b, rb] = it->second;
                double ra = sec.orbit_sizes[a];
                sec.hamiltonian(b, a) +=
                    v * std::exp(kImag * k * double(lbest)) * std::sqrt(double(ra) / double(rb));
            }
        }
    }
    // enforce exact Hermiticity against roundoff
    sec.hamiltonian = 0.5 * (sec.hamiltonian + sec.hamiltonian.adjoint()).eval();
    return sec;
}

ComplexVector sector_project(const SymmetrySector& sector, const FiniteState& psi) {
    if (psi.hilbert.get() != sector.hilbert.get() && psi.hilbert->dim() != sector.hilbert->dim())
        throw InvalidInputError("sector_project: state lives on a different basis");
    const auto& hil = *sector.hilbert;
    ComplexVector coords = ComplexVector::Zero(sector.dim());
    for (Eigen::Index a = 0; a < sector.dim(); ++a) {
        std::int64_t cur = sector.reps[a];
        Complex acc(0, 0);
        for (int r = 0; r < sector.orbit_sizes[a]; ++r) {
            acc += std::exp(-kImag * sector.k * double(r)) * psi.amps(hil.index_of(cur));
            cur = hil.translate(cur, sector.step);
        }
        coords(a) = acc / std::sqrt(double(sector.orbit_sizes[a]));
    }
    return coords;
}

FiniteState sector_lift(const SymmetrySector& sector, const ComplexVector& coords) {
    const auto& hil = *sector.hilbert;
    FiniteState out{sector.hilbert, ComplexVector::Zero(hil.dim())};
    for (Eigen::Index a = 0; a < sector.dim(); ++a) {
        std::int64_t cur = sector.reps[a];
        double norm = std::sqrt(double(sector.orbit_sizes[a]));
        for (int r = 0; r < sector.orbit_sizes[a]; ++r) {
            out.amps(hil.index_of(cur)) += coords(a) * std::exp(kImag * sector.k * double(r)) / norm;
            cur = hil.translate(cur, sector.step);
        }
    }
    return out;
}

double half_cut_entropy(const FiniteState& psi) {
    const auto& hil = *psi.hilbert;
    const int L = hil.sites();
    const int cut = L / 2;
    std::int64_t right_span = hil.pow_d(L - cut);
    // collect distinct half patterns present in the basis
    std::map<std::int64_t, Eigen::Index> lefts, rights;
    for (Eigen::Index i = 0; i < hil.dim(); ++i) {
        std::int64_t c = hil.config(i);
        std::int64_t l = c / right_span, r = c % right_span;
        lefts.emplace(l, 0);
        rights.emplace(r, 0);
    }
    Eigen::Index nl = 0, nr = 0;
    for (auto& kv : lefts) kv.second = nl++;
    for (auto& kv : rights) kv.second = nr++;
    ComplexMatrix m = ComplexMatrix::Zero(nl, nr);
    for (Eigen::Index i = 0; i < hil.dim(); ++i) {
        std::int64_t c = hil.config(i);
        m(lefts[c / right_span], rights[c % right_span]) = psi.amps(i);
    }
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    const RealVector& s = svd.singularValues();
    double total = s.squaredNorm();
    double ent = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        double p = s(i) * s(i) / total;
        if (p > 1e-300) ent -= p * std::log(p);
    }
    return ent;
}

SpectrumResult eigensystem(const SymmetrySector& sector, const EigensystemOptions& opts) {
    if (sector.dim() > opts.dense_cap)
        throw DimensionCapError("eigensystem: sector dimension exceeds the dense cap; reduce L");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sector.hamiltonian);
    SpectrumResult out;
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
    if (opts.with_entropies) {
        out.entropies.resize(out.eigenvalues.size());
        for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
            FiniteState lifted = sector_lift(sector, out.eigenvectors.col(i));
            out.entropies(i) = half_cut_entropy(lifted);
        }
    }
    return out;
}

std::vector<std::pair<double, double>> overlaps(const FiniteState& psi,
                                                const SymmetrySector& sector,
                                                const SpectrumResult& spectrum,
                                                double* sector_weight) {
    ComplexVector coords = sector_project(sector, psi);
    if (sector_weight) *sector_weight = coords.squaredNorm();
    std::vector<std::pair<double, double>> out;
    out.reserve(spectrum.eigenvalues.size());
    for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        Complex ov = spectrum.eigenvectors.col(i).dot(coords);
        out.emplace_back(spectrum.eigenvalues(i), std::norm(ov));
    }
    return out;
}

// ---------------------------------------------------------------------------
// towers & the finite projection loop

std::vector<FiniteState> scar_tower(int L) {
    if (L % 2 != 0) throw InvalidInputError("scar_tower: L must be even");
    auto hilbert = FiniteHilbert::make(L, 3, true);
    const Eigen::Index dim = hilbert->dim();

    ComplexVector cur = ComplexVector::Zero(dim);
    std::int64_t all_minus = 0;
    for (int i = 0; i < L; ++i) all_minus = all_minus * 3 + 2;
    cur(hilbert->index_of(all_minus)) = 1.0;

    std::vector<FiniteState> tower;
    tower.push_back({hilbert, cur});
    for (int n = 1; n <= L; ++n) {
        ComplexVector next = ComplexVector::Zero(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (cur(i) == Complex(0, 0)) continue;
            std::int64_t c = hilbert->config(i);
            for (int j = 0; j < L; ++j) {
                if (hilbert->digit(c, j) != 2) continue;  // needs |-> at site j
                std::int64_t cp = c - 2 * hilbert->pow_d(L - 1 - j);
                double sign = (j % 2 == 0) ? 1.0 : -1.0;
                next(hilbert->index_of(cp)) += 2.0 * sign * cur(i);
            }
        }
        double nrm = next.norm();
        if (nrm < 1e-12) break;
        tower.push_back({hilbert, next / nrm});
        cur = next;
    }
    return tower;
}

double eta_decomposition(const FiniteState& psi, const std::vector<FiniteState>& tower) {
    ComplexVector residual = psi.amps;
    for (const auto& t : tower) residual -= t.amps.dot(psi.amps) * t.amps;
    return residual.norm();
}

DensePropagator::DensePropagator(const HamiltonianSpec& h,
                                 std::shared_ptr<const FiniteHilbert> hilbert)
    : hilbert_(std::move(hilbert)) {
    ComplexMatrix m = build_finite_hamiltonian(h, *hilbert_);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

FiniteState DensePropagator::step(const FiniteState& psi, double dt) const {
    ComplexVector coords = evecs_.adjoint() * psi.amps;
    for (Eigen::Index i = 0; i < coords.size(); ++i)
        coords(i) *= std::exp(-kImag * evals_(i) * dt);
    return {hilbert_, evecs_ * coords};
}

namespace {

void fix_vector_phase(ComplexVector& v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best + 1e-15) { best = std::abs(v(i)); imax = i; }
    if (best > 0) v *= std::conj(v(imax) / best);
}

bool lex_less(const ComplexVector& a, const ComplexVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::real(a(i)) != std::real(b(i))) return std::real(a(i)) < std::real(b(i));
        if (std::imag(a(i)) != std::imag(b(i))) return std::imag(a(i)) < std::imag(b(i));
    }
    return false;
}

} // namespace

FiniteState finite_scarfinder_step(const FiniteState& psi, const DensePropagator& prop,
                                   double dt) {
    FiniteState evolved = dt == 0.0 ? psi : prop.step(psi, dt);
    const auto& hil = *evolved.hilbert;
    const int L = hil.sites();
    if (L % 2 != 0) throw InvalidInputError("finite_scarfinder_step: L must be even");
    if (hil.constrained())
        throw InvalidInputError("finite_scarfinder_step: unconstrained basis expected");
    const std::int64_t half = hil.pow_d(L / 2);
    ComplexMatrix m(half, half);
    for (std::int64_t l = 0; l < half; ++l)
        for (std::int64_t r = 0; r < half; ++r) m(l, r) = evolved.amps(l * half + r);

    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    Eigen::Index pick = 0;
    if (s.size() > 1 && s(0) - s(1) < 1e-12) {
        ComplexVector u0 = svd.matrixU().col(0), u1 = svd.matrixU().col(1);
        fix_vector_phase(u0);
        fix_vector_phase(u1);
        if (lex_less(u1, u0)) pick = 1;
    }
    ComplexVector u = svd.matrixU().col(pick), v = svd.matrixV().col(pick);
    FiniteState out{evolved.hilbert, ComplexVector(hil.dim())};
    for (std::int64_t l = 0; l < half; ++l)
        for (std::int64_t r = 0; r < half; ++r) out.amps(l * half + r) = u(l) * std::conj(v(r));
    out.normalize();
    return out;
}

double verify_eigenstate(const HamiltonianSpec& h, const FiniteState& psi, double E) {
    ComplexVector r = apply_finite(h, *psi.hilbert, psi.amps) - E * psi.amps;
    return r.norm();
}

// ---------------------------------------------------------------------------
// iMPS -> finite bridge

namespace {

FiniteState tile_to_hilbert(const std::vector<std::vector<ComplexMatrix>>& b_forms,
                            std::shared_ptr<const FiniteHilbert> hilbert, bool normalize) {
    const auto& hil = *hilbert;
    const int L = hil.sites();
    const int n = static_cast<int>(b_forms.size());
    if (L % n != 0) throw InvalidInputError("imps_to_finite: L must be a multiple of the unit cell");
    const int d = static_cast<int>(b_forms[0].size());
    if (d != hil.local_dim()) throw InvalidInputError("imps_to_finite: local dimension mismatch");

    // meet-in-the-middle: matrix chains over the two halves
    const int cut = L / 2;
    auto chains = [&](int first, int count) {
        std::int64_t patterns = 1;
        for (int i = 0; i < count; ++i) patterns *= d;
        std::vector<ComplexMatrix> out(patterns);
        for (std::int64_t p = 0; p < patterns; ++p) {
            ComplexMatrix m;
            std::int64_t rest = p;
            for (int i = 0; i < count; ++i) {
                std::int64_t div = 1;
                for (int q = 0; q < count - 1 - i; ++q) div *= d;
                int s = static_cast<int>((rest / div) % d);
                const ComplexMatrix& b = b_forms[(first + i) % n][s];
                m = (i == 0) ? b : ComplexMatrix(m * b);
            }
            out[p] = m;
        }
        return out;
    };
    auto left = chains(0, cut);
    auto right = chains(cut, L - cut);

    FiniteState out{hilbert, ComplexVector(hil.dim())};
    const std::int64_t right_span = hil.pow_d(L - cut);
    for (Eigen::Index i = 0; i < hil.dim(); ++i) {
        std::int64_t c = hil.config(i);
        const ComplexMatrix& a = left[c / right_span];
        const ComplexMatrix& b = right[c % right_span];
        out.amps(i) = (a.transpose().cwiseProduct(b)).sum();
    }
    if (normalize) {
        double nrm = out.norm();
        if (nrm < 1e-300) throw DegenerateStateError("imps_to_finite: zero norm after tiling");
        out.amps /= nrm;
    }
    return out;
}

} // namespace

FiniteState raw_mps_to_finite(const std::vector<std::vector<ComplexMatrix>>& site_matrices,
                              std::shared_ptr<const FiniteHilbert> hilbert, bool normalize) {
    return tile_to_hilbert(site_matrices, std::move(hilbert), normalize);
}

FiniteState imps_to_finite(const UniformMPS& psi, std::shared_ptr<const FiniteHilbert> hilbert) {
    std::vector<std::vector<ComplexMatrix>> b(psi.unit_cell());
    for (int j = 0; j < psi.unit_cell(); ++j) {
        b[j].resize(psi.local_dim());
        for (int s = 0; s < psi.local_dim(); ++s) b[j][s] = psi.right_form(j, s);
    }
    return tile_to_hilbert(b, std::move(hilbert), true);
}

FiniteState imps_to_finite(const UniformMPS& psi, int L) {
    auto hilbert = FiniteHilbert::make(L, psi.local_dim(), true);
    return imps_to_finite(psi, hilbert);
}

} // namespace scarfinder
