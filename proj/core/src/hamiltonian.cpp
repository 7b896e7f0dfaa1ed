#include "scarfinder/hamiltonian.hpp"

#include <cmath>

namespace scarfinder {

const ComplexMatrix& LocalOperatorSet::at(const std::string& name) const {
    auto it = ops.find(name);
    if (it == ops.end()) throw InvalidInputError("LocalOperatorSet: unknown operator '" + name + "'");
    return it->second;
}

LocalOperatorSet LocalOperatorSet::spin1() {
    LocalOperatorSet set;
    set.local_dim = 3;
    const double r2 = std::sqrt(2.0);

    ComplexMatrix sp = ComplexMatrix::Zero(3, 3);
    sp(0, 1) = r2;  // S+|0> = sqrt(2)|+>
    sp(1, 2) = r2;  // S+|-> = sqrt(2)|0>
    ComplexMatrix sm = sp.adjoint();
    ComplexMatrix sx = 0.5 * (sp + sm);
    ComplexMatrix sy = -0.5 * kImag * (sp - sm);
    ComplexMatrix sz = ComplexMatrix::Zero(3, 3);
    sz(0, 0) = 1.0;
    sz(2, 2) = -1.0;
    ComplexMatrix id = ComplexMatrix::Identity(3, 3);
    ComplexMatrix p0 = id - sz * sz;  // |0><0|

    set.ops["Sx"] = sx;
    set.ops["Sy"] = sy;
    set.ops["Sz"] = sz;
    set.ops["Splus"] = sp;
    set.ops["Sminus"] = sm;
    set.ops["P0"] = p0;
    set.ops["Id"] = id;

    // Gell-Mann matrices, standard ordering.
    auto gm = [&](int i) -> ComplexMatrix {
        ComplexMatrix g = ComplexMatrix::Zero(3, 3);
        switch (i) {
            case 1: g(0, 1) = 1; g(1, 0) = 1; break;
            case 2: g(0, 1) = -kImag; g(1, 0) = kImag; break;
            case 3: g(0, 0) = 1; g(1, 1) = -1; break;
            case 4: g(0, 2) = 1; g(2, 0) = 1; break;
            case 5: g(0, 2) = -kImag; g(2, 0) = kImag; break;
            case 6: g(1, 2) = 1; g(2, 1) = 1; break;
            case 7: g(1, 2) = -kImag; g(2, 1) = kImag; break;
            case 8: g(0, 0) = 1; g(1, 1) = 1; g(2, 2) = -2; g /= std::sqrt(3.0); break;
            default: throw InvalidInputError("gell-mann index out of range");
        }
        return g;
    };
    for (int i = 1; i <= 8; ++i) set.ops["gm" + std::to_string(i)] = gm(i);
    return set;
}

LocalOperatorSet LocalOperatorSet::spin_half() {
    LocalOperatorSet set;
    set.local_dim = 2;
    ComplexMatrix sx = ComplexMatrix::Zero(2, 2), sy = ComplexMatrix::Zero(2, 2),
                  sz = ComplexMatrix::Zero(2, 2);
    sx(0, 1) = 1; sx(1, 0) = 1;
    sy(0, 1) = -kImag; sy(1, 0) = kImag;
    sz(0, 0) = 1; sz(1, 1) = -1;
    ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    set.ops["sigma_x"] = sx;
    set.ops["sigma_y"] = sy;
    set.ops["sigma_z"] = sz;
    set.ops["P_down"] = 0.5 * (id - sz);
    set.ops["n_up"] = 0.5 * (id + sz);
    set.ops["Id"] = id;
    return set;
}

int HamiltonianSpec::max_span() const {
    int k = penalty || constraint_projector ? 2 : 1;
    for (const auto& t : terms) k = std::max(k, t.span);
    return k;
}

double HamiltonianSpec::hermiticity_defect() const {
    double defect = 0.0;
    for (const auto& t : terms) {
        ComplexMatrix full = t.coeff * t.op;
        defect = std::max(defect, (full - full.adjoint()).cwiseAbs().maxCoeff());
    }
    return defect;
}

void HamiltonianSpec::validate() const {
    if (unit_cell < 1 || local_dim < 2) throw InvalidInputError("HamiltonianSpec: bad dimensions");
    for (const auto& t : terms) {
        Eigen::Index want = 1;
        for (int i = 0; i < t.span; ++i) want *= local_dim;
        if (t.op.rows() != want || t.op.cols() != want)
            throw InvalidInputError("HamiltonianSpec: term dimension does not match local_dim^span");
        if (t.start < 0 || t.start >= unit_cell)
            throw InvalidInputError("HamiltonianSpec: term start outside unit cell");
    }
    if (hermiticity_defect() > 1e-12)
        throw InvalidInputError("HamiltonianSpec: Hermitian part is not Hermitian");
    if (penalty) {
        Eigen::Index want = static_cast<Eigen::Index>(local_dim) * local_dim;
        if (penalty->op.rows() != want || penalty->op.cols() != want)
            throw InvalidInputError("HamiltonianSpec: penalty operator must act on a pair");
        if (penalty->mu < 0) throw InvalidInputError("HamiltonianSpec: penalty mu must be >= 0");
    }
}

} // namespace scarfinder
