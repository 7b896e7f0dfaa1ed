#include "scarfinder/models.hpp"

#include <cmath>
#include <random>

#include "scarfinder/ed.hpp"
#include "scarfinder/parent_ham.hpp"

namespace scarfinder {

namespace {

void add_term_on_both_sites(HamiltonianSpec& spec, const ComplexMatrix& op, int span,
                            Complex coeff) {
    for (int start = 0; start < spec.unit_cell; ++start)
        spec.terms.push_back({start, span, op, coeff});
}

} // namespace

HamiltonianSpec spin1_xy(double h, XyPerturbation pert, std::optional<std::uint64_t> seed) {
    if (!std::isfinite(h)) throw InvalidInputError("spin1_xy: h must be finite");
    auto ops = LocalOperatorSet::spin1();
    HamiltonianSpec spec;
    spec.unit_cell = 2;
    spec.local_dim = 3;

    ComplexMatrix xy = kron(ops.at("Sx"), ops.at("Sx")) + kron(ops.at("Sy"), ops.at("Sy"));
    add_term_on_both_sites(spec, xy, 2, 1.0);
    add_term_on_both_sites(spec, ops.at("Sz"), 1, -h);

    switch (pert) {
        case XyPerturbation::None:
            spec.name = "spin1_xy";
            break;
        case XyPerturbation::V1:
            spec.name = "spin1_xy_v1";
            add_term_on_both_sites(spec, kron(ops.at("P0"), ops.at("Sx")), 2, 1.0);
            break;
        case XyPerturbation::V1prime: {
            spec.name = "spin1_xy_v1prime";
            ComplexMatrix r = ComplexMatrix::Zero(3, 3);
            for (int i = 1; i <= 8; ++i) r += std::sin(100.0 * i) * ops.at("gm" + std::to_string(i));
            add_term_on_both_sites(spec, kron(ops.at("P0"), r), 2, 1.0);
            break;
        }
        case XyPerturbation::V2: {
            spec.name = "spin1_xy_v2";
            ComplexMatrix sp2 = ops.at("Splus") * ops.at("Splus");
            ComplexMatrix sm2 = sp2.adjoint();
            ComplexMatrix bracket = kron(sp2, sm2) + kron(sm2, sp2);
            add_term_on_both_sites(spec, kron(bracket, ops.at("Sx")), 3, 1.0);
            break;
        }
        case XyPerturbation::V2prime: {
            spec.name = "spin1_xy_v2prime";
            if (!seed) throw InvalidInputError("spin1_xy: V2prime requires a seed");
            auto targets = type2_scar_tower(6);
            HamiltonianSpec emb = projective_embedding(targets, 3, *seed);
            add_term_on_both_sites(spec, emb.terms.at(0).op, 3, 1.0);
            break;
        }
    }
    spec.validate();
    return spec;
}

HamiltonianSpec pxp(double omega, double mu) {
    if (!(omega > 0)) throw InvalidInputError("pxp: omega must be positive");
    if (mu < 0) throw InvalidInputError("pxp: mu must be >= 0");
    auto ops = LocalOperatorSet::spin_half();
    HamiltonianSpec spec;
    spec.name = "pxp";
    spec.unit_cell = 1;
    spec.local_dim = 2;
    spec.terms.push_back(
        {0, 3, kron(ops.at("P_down"), kron(ops.at("sigma_x"), ops.at("P_down"))), omega});
    ComplexMatrix upup = kron(ops.at("n_up"), ops.at("n_up"));
    spec.constraint_projector = ComplexMatrix::Identity(4, 4) - upup;
    if (mu > 0) spec.penalty = PenaltyTerm{upup, mu};
    spec.validate();
    return spec;
}

HamiltonianSpec mixed_field_ising(double J, double h, double g) {
    auto ops = LocalOperatorSet::spin_half();
    HamiltonianSpec spec;
    spec.name = "mixed_field_ising";
    spec.unit_cell = 2;
    spec.local_dim = 2;
    add_term_on_both_sites(spec, kron(ops.at("sigma_z"), ops.at("sigma_z")), 2, -J);
    add_term_on_both_sites(spec, ops.at("sigma_z"), 1, -h);
    add_term_on_both_sites(spec, ops.at("sigma_x"), 1, -g);
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// cylinders

LatticeGeometry LatticeGeometry::square_cylinder() {
    LatticeGeometry g;
    g.name = "square";
    g.intra_column_links = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    g.inter_column_links = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    return g;
}

LatticeGeometry LatticeGeometry::triangular_cylinder() {
    LatticeGeometry g = square_cylinder();
    g.name = "triangular";
    for (int s = 0; s < 4; ++s) g.inter_column_links.emplace_back(s, (s + 1) % 4);
    return g;
}

bool CylinderBasis::column_site_up(int config, int site) const {
    return (config >> (geometry.sites_per_column - 1 - site)) & 1;
}

int CylinderBasis::index_of(int config) const {
    auto it = std::lower_bound(column_configs.begin(), column_configs.end(), config);
    if (it == column_configs.end() || *it != config) return -1;
    return static_cast<int>(it - column_configs.begin());
}

CylinderBasis cylinder_basis(const LatticeGeometry& geometry) {
    if (geometry.sites_per_column != 4)
        throw UnsupportedGeometryError("cylinder_basis: only 4-site circumference is supported");
    CylinderBasis basis;
    basis.geometry = geometry;
    const int n = geometry.sites_per_column;
    for (int mask = 0; mask < (1 << n); ++mask) {
        bool ok = true;
        for (auto [a, b] : geometry.intra_column_links) {
            bool ua = (mask >> (n - 1 - a)) & 1;
            bool ub = (mask >> (n - 1 - b)) & 1;
            if (ua && ub) { ok = false; break; }
        }
        if (ok) basis.column_configs.push_back(mask);
    }
    return basis;
}

HamiltonianSpec pxp_cylinder(const LatticeGeometry& geometry, double omega, double mu) {
    CylinderBasis basis = cylinder_basis(geometry);
    const int d = basis.dim();
    const int n = geometry.sites_per_column;

    // single-block flips between allowed column configurations
    ComplexMatrix flip = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int s = 0; s < n; ++s) {
            int flipped = basis.column_configs[i] ^ (1 << (n - 1 - s));
            int j = basis.index_of(flipped);
            if (j >= 0) flip(j, i) += 1.0;
        }

    // inter-column blockade: count of violated links per adjacent pair
    ComplexMatrix violations = ComplexMatrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            int count = 0;
            for (auto [a, b] : geometry.inter_column_links)
                if (basis.column_site_up(basis.column_configs[i], a) &&
                    basis.column_site_up(basis.column_configs[j], b))
                    ++count;
            violations(i * d + j, i * d + j) = count;
        }

    HamiltonianSpec spec;
    spec.name = "pxp_cylinder_" + geometry.name;
    spec.unit_cell = 1;
    spec.local_dim = d;
    spec.terms.push_back({0, 1, flip, omega});
    ComplexMatrix proj = ComplexMatrix::Identity(d * d, d * d);
    for (int idx = 0; idx < d * d; ++idx)
        if (std::real(violations(idx, idx)) > 0.5) proj(idx, idx) = 0.0;
    spec.constraint_projector = proj;
    if (mu > 0) spec.penalty = PenaltyTerm{violations, mu};
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// states

UniformMPS type1_scar_state(const ScarFamilyParams& p) {
    // per site j: normalize(|-> + xi (-1)^j e^{-2 i theta} |+>); xi = 1 is the
    // equal-weight member at energy density 0
    std::vector<ComplexVector> kets(2, ComplexVector::Zero(3));
    for (int j = 0; j < 2; ++j) {
        double sign = (j == 0) ? 1.0 : -1.0;
        kets[j](0) = p.xi * sign * std::exp(-2.0 * kImag * p.theta);
        kets[j](2) = 1.0;
    }
    return UniformMPS::product_state(kets);
}

UniformMPS imperfect_state(double alpha) {
    // staggered-z detuning of the equal-weight scar state: per site j,
    // normalize(e^{+i alpha s/2}|-> + (-1)^j e^{-i alpha s/2}|+>) with s = (-1)^j
    std::vector<ComplexVector> kets(2, ComplexVector::Zero(3));
    for (int j = 0; j < 2; ++j) {
        double sign = (j == 0) ? 1.0 : -1.0;
        kets[j](0) = sign * std::exp(-kImag * 0.5 * alpha * sign);
        kets[j](2) = std::exp(kImag * 0.5 * alpha * sign);
    }
    return UniformMPS::product_state(kets);
}

std::vector<std::vector<ComplexMatrix>> type2_raw_tensors(double phi, double theta) {
    double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
    std::vector<std::vector<ComplexMatrix>> a(2, std::vector<ComplexMatrix>(3));
    for (int j = 0; j < 2; ++j) {
        double sign = (j == 0) ? 1.0 : -1.0;
        ComplexMatrix ap = ComplexMatrix::Zero(2, 2), a0 = ComplexMatrix::Zero(2, 2),
                      am = ComplexMatrix::Zero(2, 2);
        ap(0, 0) = s * std::exp(kImag * theta);
        a0(0, 1) = c;
        a0(1, 0) = sign * s;
        am(1, 1) = sign * c * std::exp(-kImag * theta);
        a[j][0] = ap;
        a[j][1] = a0;
        a[j][2] = am;
    }
    return a;
}

UniformMPS type2_scar_mps(double phi, double theta) {
    return UniformMPS::from_tensors(type2_raw_tensors(phi, theta));
}

UniformMPS named_product_state(NamedState which) {
    switch (which) {
        case NamedState::Z2: {
            ComplexVector down = ComplexVector::Zero(2), up = ComplexVector::Zero(2);
            down(1) = 1.0;
            up(0) = 1.0;
            return UniformMPS::product_state({down, up});
        }
        case NamedState::Z3: {
            ComplexVector down = ComplexVector::Zero(2), up = ComplexVector::Zero(2);
            down(1) = 1.0;
            up(0) = 1.0;
            return UniformMPS::product_state({up, down, down});
        }
        case NamedState::CdwSquare: {
            CylinderBasis basis = cylinder_basis(LatticeGeometry::square_cylinder());
            ComplexVector z2 = ComplexVector::Zero(basis.dim());
            ComplexVector z2p = ComplexVector::Zero(basis.dim());
            z2(basis.index_of(0b1010)) = 1.0;
            z2p(basis.index_of(0b0101)) = 1.0;
            return UniformMPS::product_state({z2, z2p});
        }
    }
    throw InvalidInputError("named_product_state: unknown state");
}

UniformMPS theta_product_state(double theta) {
    ComplexVector v(2);
    v(0) = std::cos(theta);
    v(1) = std::sin(theta);
    return UniformMPS::product_state({v, v});
}

FiniteState triangular_S_state(int L_columns) {
    if (L_columns < 2) throw InvalidInputError("triangular_S_state: need at least 2 columns");
    LatticeGeometry geom = LatticeGeometry::triangular_cylinder();
    CylinderBasis basis = cylinder_basis(geom);
    HamiltonianSpec spec = pxp_cylinder(geom);
    auto hilbert = FiniteHilbert::make(L_columns, basis.dim(), true, spec.constraint_projector);

    const int z2 = 0b1010, z2p = 0b0101;
    FiniteState psi{hilbert, ComplexVector::Zero(hilbert->dim())};
    for (Eigen::Index i = 0; i < hilbert->dim(); ++i) {
        double amp = 1.0;
        for (int col = 0; col < L_columns && amp != 0.0; ++col) {
            int mask = basis.column_configs[hilbert->digit(hilbert->config(i), col)];
            if (mask == 0) continue;
            if (mask == z2 || mask == z2p) amp = -amp;
            else amp = 0.0;
        }
        psi.amps(i) = amp;
    }
    double n = psi.norm();
    if (n < 1e-300) throw DegenerateStateError("triangular_S_state: empty support");
    psi.amps /= n;
    return psi;
}

std::vector<FiniteState> type2_scar_tower(int L, double phi0) {
    if (L % 2 != 0) throw InvalidInputError("type2_scar_tower: L must be even");
    auto hilbert = FiniteHilbert::make(L, 3, true);
    const int n_theta = 2 * L + 1;
    std::vector<ComplexVector> tiled;
    tiled.reserve(n_theta);
    for (int kidx = 0; kidx < n_theta; ++kidx) {
        double theta = 2.0 * M_PI * kidx / n_theta;
        FiniteState f = raw_mps_to_finite(type2_raw_tensors(phi0, theta), hilbert,
                                          /*normalize=*/false);
        tiled.push_back(f.amps);
    }
    std::vector<FiniteState> tower;
    double scale = 0.0;
    std::vector<ComplexVector> comps;
    for (int m = -L; m <= L; ++m) {
        ComplexVector acc = ComplexVector::Zero(hilbert->dim());
        for (int kidx = 0; kidx < n_theta; ++kidx) {
            double theta = 2.0 * M_PI * kidx / n_theta;
            acc += std::exp(-kImag * double(m) * theta) * tiled[kidx];
        }
        acc /= double(n_theta);
        comps.push_back(acc);
        scale = std::max(scale, acc.norm());
    }
    for (auto& c : comps) {
        if (c.norm() > 1e-8 * scale) {
            FiniteState f{hilbert, c / c.norm()};
            tower.push_back(std::move(f));
        }
    }
    return tower;
}

UniformMPS random_imps(int chi, int unit_cell, int local_dim, std::uint64_t seed) {
    if (chi < 1 || unit_cell < 1 || local_dim < 1)
        throw InvalidInputError("random_imps: dimensions must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<std::vector<ComplexMatrix>> a(unit_cell, std::vector<ComplexMatrix>(local_dim));
    for (int j = 0; j < unit_cell; ++j)
        for (int s = 0; s < local_dim; ++s) {
            ComplexMatrix m(chi, chi);
            for (Eigen::Index col = 0; col < chi; ++col)
                for (Eigen::Index row = 0; row < chi; ++row) {
                    double re = gauss(rng), im = gauss(rng);
                    m(row, col) = Complex(re, im);
                }
            a[j][s] = m;
        }
    return UniformMPS::from_tensors(a);
}

ScarFamily type1_family() {
    ScarFamily fam;
    fam.make = [](double theta, double beta) {
        return type1_scar_state({theta, std::tan(beta), 0.0});
    };
    fam.a_lo = 0.0;
    fam.a_hi = 2.0 * M_PI;
    fam.wrap_a = true;
    fam.b_lo = -(M_PI / 2 - 0.01);
    fam.b_hi = M_PI / 2 - 0.01;
    fam.wrap_b = false;
    return fam;
}

ScarFamily type2_family() {
    ScarFamily fam;
    fam.make = [](double theta, double phi) { return type2_scar_mps(phi, theta); };
    fam.a_lo = 0.0;
    fam.a_hi = 2.0 * M_PI;
    fam.wrap_a = true;
    fam.b_lo = 0.0;
    fam.b_hi = 2.0 * M_PI;
    fam.wrap_b = true;
    return fam;
}

} // namespace scarfinder
