#include <cmath>
#include <numeric>

#include "scarfinder/mps.hpp"

namespace scarfinder {

namespace {

ComplexMatrix embed_window(const ComplexMatrix& op, int span, int pos, int window, int d) {
    // identity padding: `pos` sites to the left, window - pos - span to the right
    Eigen::Index left = 1, right = 1;
    for (int i = 0; i < pos; ++i) left *= d;
    for (int i = 0; i < window - pos - span; ++i) right *= d;
    ComplexMatrix m = op;
    if (left > 1) m = kron(ComplexMatrix::Identity(left, left), m);
    if (right > 1) m = kron(m, ComplexMatrix::Identity(right, right));
    return m;
}

} // namespace

GatePlan trotter_plan(const HamiltonianSpec& h, Complex dt, int order, int plan_cell) {
    if (dt == Complex(0, 0)) throw ConfigError("trotter_plan: dt must be nonzero");
    if (order != 1 && order != 2) throw ConfigError("trotter_plan: order must be 1 or 2");
    h.validate();

    const int span = h.max_span();
    int n = plan_cell;
    if (n == 0) {
        n = h.unit_cell;
        while (n < span) n += h.unit_cell;
    } else {
        if (n % h.unit_cell != 0)
            throw ConfigError("trotter_plan: plan cell must be a multiple of the Hamiltonian cell");
        if (n < span)
            throw ConfigError("trotter_plan: term span exceeds the unit cell after tiling");
    }
    const int d = h.local_dim;
    Eigen::Index gate_dim = 1;
    for (int i = 0; i < span; ++i) gate_dim *= d;

    // Fold every term placement into the span-wide windows that contain it,
    // with weight 1/(number of containing windows).
    std::vector<ComplexMatrix> herm(n, ComplexMatrix::Zero(gate_dim, gate_dim));
    std::vector<ComplexMatrix> decay(n, ComplexMatrix::Zero(gate_dim, gate_dim));
    const int reps = n / h.unit_cell;
    for (int r = 0; r < reps; ++r)
        for (const auto& t : h.terms) {
            int abs_start = r * h.unit_cell + t.start;
            int nwin = span - t.span + 1;
            for (int shift = 0; shift < nwin; ++shift) {
                int o = ((abs_start - shift) % n + n) % n;
                herm[o] += (t.coeff / double(nwin)) * embed_window(t.op, t.span, shift, span, d);
            }
        }
    if (h.penalty && h.penalty->mu > 0) {
        int nwin = span - 2 + 1;
        for (int p = 0; p < n; ++p)
            for (int shift = 0; shift < nwin; ++shift) {
                int o = ((p - shift) % n + n) % n;
                decay[o] += (h.penalty->mu / double(nwin)) *
                            embed_window(h.penalty->op, 2, shift, span, d);
            }
    }

    GatePlan plan;
    plan.unit_cell = n;
    plan.local_dim = d;
    plan.order = order;
    plan.dt = dt;

    auto make_gate = [&](int o, Complex step) {
        ComplexMatrix exponent = -kImag * step * herm[o] - std::abs(step) * decay[o];
        return GateLayer{o, span, matrix_exponential(exponent, Complex(1.0, 0.0))};
    };
    if (order == 1 || n == 1) {
        for (int o = 0; o < n; ++o) plan.layers.push_back(make_gate(o, dt));
    } else {
        for (int o = 0; o < n - 1; ++o) plan.layers.push_back(make_gate(o, dt * 0.5));
        plan.layers.push_back(make_gate(n - 1, dt));
        for (int o = n - 2; o >= 0; --o) plan.layers.push_back(make_gate(o, dt * 0.5));
    }
    return plan;
}

namespace {

constexpr double kSchmidtFloor = 1e-12;

// Apply one gate at sites [start, start+span): contract, multiply, re-split.
double apply_gate(UniformMPS& psi, const ComplexMatrix& gate, int start, int span, int chi_max,
                  double cutoff) {
    const int d = psi.local_dim();
    Eigen::Index pdim = 1;
    for (int i = 0; i < span; ++i) pdim *= d;

    // theta[p] = lambda_{start-1} (Gamma lambda)...(Gamma lambda), chiL x chiR per pattern
    const RealVector lam_left = psi.lambda(start - 1);
    const Eigen::Index chiL = lam_left.size();
    ComplexMatrix d0 = ComplexMatrix::Zero(chiL, chiL);
    d0.diagonal() = lam_left.cast<Complex>();
    std::vector<ComplexMatrix> theta{d0};
    for (int m = 0; m < span; ++m) {
        std::vector<ComplexMatrix> next(theta.size() * d);
        for (size_t p = 0; p < theta.size(); ++p)
            for (int s = 0; s < d; ++s) next[p * d + s] = theta[p] * psi.right_form(start + m, s);
        theta = std::move(next);
    }
    const Eigen::Index chiR = theta[0].cols();

    std::vector<ComplexMatrix> out(pdim);
    for (Eigen::Index pp = 0; pp < pdim; ++pp) {
        ComplexMatrix acc = ComplexMatrix::Zero(chiL, chiR);
        for (Eigen::Index p = 0; p < pdim; ++p)
            if (gate(pp, p) != Complex(0, 0)) acc.noalias() += gate(pp, p) * theta[p];
        out[pp] = std::move(acc);
    }

    // Re-split left to right. `rem` holds the remaining block per pattern of the
    // unsplit sites; the running prefix norm lives inside it.
    double discarded = 0.0;
    std::vector<ComplexMatrix> rem = std::move(out);
    RealVector lam_prev = lam_left;
    for (int m = 0; m < span - 1; ++m) {
        const int site = start + m;
        const Eigen::Index chi_cur = rem[0].rows();
        Eigen::Index rem_patterns = rem.size() / d;
        ComplexMatrix big(chi_cur * d, rem_patterns * chiR);
        for (int s = 0; s < d; ++s)
            for (Eigen::Index q = 0; q < rem_patterns; ++q)
                big.block(s * chi_cur, q * chiR, chi_cur, chiR) = rem[s * rem_patterns + q];

        // floor: values this far below the leading one are numerical noise and
        // poison the lambda inverses of later splits
        const double floor_cut = std::max(cutoff, kSchmidtFloor);
        TruncatedSVD sv = svd_truncate(big, chi_max, floor_cut);
        discarded += sv.discarded_weight;
        const Eigen::Index chi_new = sv.values.size();
        double nrm = sv.values.norm();
        if (nrm < 1e-300) throw DegenerateStateError("itebd_step: bond truncation produced zero norm");

        RealVector inv_prev = RealVector::Zero(lam_prev.size());
        double lpmax = lam_prev.maxCoeff();
        for (Eigen::Index i = 0; i < lam_prev.size(); ++i)
            if (lam_prev(i) > 1e-12 * lpmax) inv_prev(i) = 1.0 / lam_prev(i);

        for (int s = 0; s < d; ++s)
            psi.gamma(site, s) = scale_rows(sv.left.middleRows(s * chi_cur, chi_cur), inv_prev);
        psi.lambda(site) = sv.values / nrm;
        lam_prev = psi.lambda(site);

        if (m == span - 2) {
            // last factor: Gamma_last = nrm * V * pinv(lambda_right); the overall
            // norm factor stays here and canonicalize rescales it away
            (void)chi_new;
            const RealVector& lam_right = psi.lambda(start + span - 1);
            RealVector inv_r = RealVector::Zero(lam_right.size());
            double lrmax = lam_right.maxCoeff();
            for (Eigen::Index i = 0; i < lam_right.size(); ++i)
                if (lam_right(i) > 1e-12 * lrmax) inv_r(i) = 1.0 / lam_right(i);
            for (int s = 0; s < d; ++s) {
                ComplexMatrix g = sv.right.middleCols(s * chiR, chiR);
                psi.gamma(start + span - 1, s) = scale_cols(g, inv_r) * nrm;
            }
        } else {
            ComplexMatrix sval_v = scale_rows(sv.right, sv.values);
            std::vector<ComplexMatrix> rem2(rem_patterns);
            for (Eigen::Index q = 0; q < rem_patterns; ++q)
                rem2[q] = sval_v.middleCols(q * chiR, chiR);
            rem = std::move(rem2);
        }
    }
    psi.mark_dirty();
    return discarded;
}

} // namespace

double itebd_step(UniformMPS& psi, const GatePlan& plan, int chi_max, double cutoff) {
    if (psi.local_dim() != plan.local_dim)
        throw InvalidInputError("itebd_step: local dimension mismatch");
    if (psi.unit_cell() % plan.unit_cell != 0)
        throw InvalidInputError("itebd_step: state cell must be a multiple of the plan cell");
    const int reps = psi.unit_cell() / plan.unit_cell;
    double discarded = 0.0;
    for (const auto& layer : plan.layers)
        for (int r = 0; r < reps; ++r)
            discarded += apply_gate(psi, layer.gate, layer.offset + r * plan.unit_cell, layer.span,
                                    chi_max, cutoff);
    psi.canonicalize();
    return discarded;
}

Trajectory free_evolve(UniformMPS& psi, const HamiltonianSpec& h, double t_max,
                       const EvolveOptions& opts) {
    GatePlan plan = trotter_plan(h, Complex(opts.dt, 0.0), 2);
    if (psi.unit_cell() % plan.unit_cell != 0) {
        int n = std::lcm(psi.unit_cell(), plan.unit_cell);
        psi = psi.extended(n / psi.unit_cell());
    }
    UniformMPS ref = psi;

    Trajectory traj;
    auto record = [&](double time) {
        TrajectoryRecord rec;
        rec.time = time;
        rec.energy = energy_density(psi, h);
        rec.entropies.resize(psi.unit_cell());
        for (int b = 0; b < psi.unit_cell(); ++b) rec.entropies(b) = half_chain_entropy(psi, b);
        rec.log_fidelity = opts.record_fidelity ? transfer_fidelity(psi, ref) : 0.0;
        for (const auto& ob : opts.observables)
            rec.observables.emplace_back(ob.name,
                                         std::real(expectation_local(psi, ob.op, ob.span)));
        traj.records.push_back(std::move(rec));
    };

    record(0.0);
    const int n_steps = static_cast<int>(std::round(t_max / opts.dt));
    for (int k = 1; k <= n_steps; ++k) {
        itebd_step(psi, plan, opts.chi_max, opts.cutoff);
        if (k % opts.record_stride == 0 || k == n_steps) record(k * opts.dt);
    }
    return traj;
}

} // namespace scarfinder
