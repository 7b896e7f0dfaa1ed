#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "scarfinder/hamiltonian.hpp"

namespace scarfinder {

/// Basis of a finite chain, possibly restricted by a nearest-neighbour pair
/// constraint (Rydberg-blockade style). Configurations are encoded base
/// local_dim with site 0 as the most significant digit, matching the kron
/// ordering of multi-site operators, and listed in ascending integer order.
class FiniteHilbert {
public:
    static std::shared_ptr<const FiniteHilbert>
    make(int L, int local_dim, bool pbc,
         const std::optional<ComplexMatrix>& pair_projector = std::nullopt,
         std::int64_t config_cap = 200000);

    int sites() const { return L_; }
    int local_dim() const { return d_; }
    bool periodic() const { return pbc_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(configs_.size()); }
    const std::vector<std::int64_t>& configs() const { return configs_; }

    std::int64_t config(Eigen::Index i) const { return configs_[i]; }
    /// Index of a configuration, or -1 when it is not in the basis.
    Eigen::Index index_of(std::int64_t config) const;
    bool constrained() const { return constrained_; }

    int digit(std::int64_t config, int site) const;
    std::int64_t with_window(std::int64_t config, int first_site, int span, std::int64_t pattern) const;
    std::int64_t window(std::int64_t config, int first_site, int span) const;
    /// Cyclic translation: site i of the result carries site (i+step) mod L.
    std::int64_t translate(std::int64_t config, int step) const;

    std::int64_t pow_d(int k) const { return powers_[k]; }

private:
    int L_ = 0, d_ = 2;
    bool pbc_ = true;
    bool constrained_ = false;
    std::vector<std::int64_t> configs_;
    std::vector<std::int64_t> powers_;
};

struct FiniteState {
    std::shared_ptr<const FiniteHilbert> hilbert;
    ComplexVector amps;

    double norm() const { return amps.norm(); }
    void normalize() { amps /= amps.norm(); }
};

} // namespace scarfinder
