#include "scarfinder/finite_hilbert.hpp"

#include <algorithm>

namespace scarfinder {

namespace {

std::vector<std::vector<bool>> pair_table(int d, const std::optional<ComplexMatrix>& proj) {
    std::vector<std::vector<bool>> ok(d, std::vector<bool>(d, true));
    if (!proj) return ok;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Eigen::Index idx = static_cast<Eigen::Index>(a) * d + b;
            ok[a][b] = std::real((*proj)(idx, idx)) > 0.5;
        }
    return ok;
}

} // namespace

std::shared_ptr<const FiniteHilbert>
FiniteHilbert::make(int L, int local_dim, bool pbc,
                    const std::optional<ComplexMatrix>& pair_projector, std::int64_t config_cap) {
    if (L < 1 || local_dim < 2) throw InvalidInputError("FiniteHilbert: bad L or local_dim");
    auto h = std::make_shared<FiniteHilbert>();
    h->L_ = L;
    h->d_ = local_dim;
    h->pbc_ = pbc;
    h->constrained_ = pair_projector.has_value();
    h->powers_.resize(L + 1);
    h->powers_[0] = 1;
    for (int k = 1; k <= L; ++k) {
        h->powers_[k] = h->powers_[k - 1] * local_dim;
        if (h->powers_[k] > (std::int64_t(1) << 62) / local_dim)
            throw DimensionCapError("FiniteHilbert: configuration encoding overflow");
    }

    auto ok = pair_table(local_dim, pair_projector);

    // Depth-first enumeration over sites, pruning on the adjacent-pair rule.
    std::vector<int> digits(L, 0);
    std::vector<std::int64_t> out;
    int site = 0;
    digits[0] = -1;
    while (site >= 0) {
        ++digits[site];
        if (digits[site] >= local_dim) {
            --site;
            continue;
        }
        if (site > 0 && !ok[digits[site - 1]][digits[site]]) continue;
        if (site == L - 1) {
            if (!pbc || L == 1 || ok[digits[L - 1]][digits[0]]) {
                std::int64_t c = 0;
                for (int i = 0; i < L; ++i) c = c * local_dim + digits[i];
                out.push_back(c);
                if (static_cast<std::int64_t>(out.size()) > config_cap)
                    throw DimensionCapError("FiniteHilbert: dimension exceeds configuration cap");
            }
        } else {
            ++site;
            digits[site] = -1;
        }
    }
    std::sort(out.begin(), out.end());
    h->configs_ = std::move(out);
    return h;
}

Eigen::Index FiniteHilbert::index_of(std::int64_t config) const {
    if (!constrained_) {
        if (config < 0 || config >= powers_[L_]) return -1;
        return static_cast<Eigen::Index>(config);
    }
    auto it = std::lower_bound(configs_.begin(), configs_.end(), config);
    if (it == configs_.end() || *it != config) return -1;
    return static_cast<Eigen::Index>(it - configs_.begin());
}

int FiniteHilbert::digit(std::int64_t config, int site) const {
    return static_cast<int>((config / powers_[L_ - 1 - site]) % d_);
}

std::int64_t FiniteHilbert::window(std::int64_t config, int first_site, int span) const {
    std::int64_t p = 0;
    for (int m = 0; m < span; ++m) p = p * d_ + digit(config, (first_site + m) % L_);
    return p;
}

std::int64_t FiniteHilbert::with_window(std::int64_t config, int first_site, int span,
                                        std::int64_t pattern) const {
    std::int64_t c = config;
    for (int m = span - 1; m >= 0; --m) {
        int site = (first_site + m) % L_;
        int s = static_cast<int>(pattern % d_);
        pattern /= d_;
        std::int64_t p = powers_[L_ - 1 - site];
        c += (s - digit(c, site)) * p;
    }
    return c;
}

std::int64_t FiniteHilbert::translate(std::int64_t config, int step) const {
    std::int64_t c = 0;
    for (int i = 0; i < L_; ++i) c = c * d_ + digit(config, (i + step) % L_);
    return c;
}

} // namespace scarfinder
