#pragma once

// Spin configurations, fixed-magnetization sector bases and dense state
// vectors. Conventions fixed globally:
//   * full Hilbert space basis: site 1 is the slowest (leftmost) Kronecker
//     factor; up = index 0, down = index 1, so a configuration with down
//     spins at positions x contributes bit 2^(L-x) to the basis index;
//   * sector bases are ordered lexicographically on the position tuples.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"

namespace bethemps {

struct SpinConfiguration {
    std::vector<int> positions;  // strictly increasing, 1-based, within [1, L]
    int chain_length = 0;

    void validate() const {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (positions[i] < 1 || positions[i] > chain_length)
                throw BetheError(ErrorKind::Precondition, "spin position out of range");
            if (i > 0 && positions[i] <= positions[i - 1])
                throw BetheError(ErrorKind::Precondition, "spin positions not increasing");
        }
    }

    std::size_t full_index() const {
        std::size_t idx = 0;
        for (int x : positions) idx |= std::size_t{1} << (chain_length - x);
        return idx;
    }
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) r = r * static_cast<std::uint64_t>(n - i) / (i + 1);
    return r;
}

class SectorBasis {
public:
    SectorBasis(int chain_length, int down_spins)
        : chain_length_(chain_length), down_spins_(down_spins) {
        if (chain_length < 0 || down_spins < 0 || down_spins > chain_length)
            throw BetheError(ErrorKind::Precondition, "SectorBasis: bad (L, n)");
        std::vector<int> cur(down_spins);
        build(cur, 0, 1);
        for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = i;
    }

    int chain_length() const { return chain_length_; }
    int down_spins() const { return down_spins_; }
    std::size_t size() const { return states_.size(); }

    SpinConfiguration config(std::size_t i) const {
        return SpinConfiguration{states_[i], chain_length_};
    }

    std::size_t index_of(const std::vector<int>& positions) const {
        auto it = index_.find(positions);
        if (it == index_.end())
            throw BetheError(ErrorKind::Precondition, "configuration not in sector");
        return it->second;
    }

    std::size_t full_index(std::size_t i) const { return config(i).full_index(); }

private:
    void build(std::vector<int>& cur, int depth, int start) {
        if (depth == down_spins_) {
            states_.push_back(cur);
            return;
        }
        for (int x = start; x <= chain_length_ - (down_spins_ - depth - 1); ++x) {
            cur[depth] = x;
            build(cur, depth + 1, x + 1);
        }
    }

    int chain_length_, down_spins_;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, std::size_t> index_;
};

// Dense amplitude vector over either a magnetization sector (down_spins >= 0,
// ordered as the SectorBasis) or the full Hilbert space (down_spins == -1).
struct StateVector {
    int chain_length = 0;
    int down_spins = -1;
    std::vector<cplx> amplitudes;

    double max_abs() const {
        double m = 0.0;
        for (const auto& a : amplitudes) m = std::max(m, std::abs(a));
        return m;
    }
    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
    bool all_zero() const { return max_abs() <= 1e-12; }

    StateVector normalized() const {
        StateVector out = *this;
        const double nrm = norm();
        if (nrm <= 0.0) throw BetheError(ErrorKind::NullState, "cannot normalize a zero state");
        for (auto& a : out.amplitudes) a /= nrm;
        return out;
    }
};

inline cplx overlap(const StateVector& a, const StateVector& b) {
    if (a.amplitudes.size() != b.amplitudes.size())
        throw BetheError(ErrorKind::Precondition, "overlap: dimension mismatch");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
        s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return s;
}

inline StateVector embed_in_full(const StateVector& sector_state, const SectorBasis& basis) {
    StateVector out;
    out.chain_length = basis.chain_length();
    out.down_spins = -1;
    out.amplitudes.assign(std::size_t{1} << basis.chain_length(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < basis.size(); ++i)
        out.amplitudes[basis.full_index(i)] = sector_state.amplitudes[i];
    return out;
}

// Restrict a full-space state to a sector; out_of_sector reports the norm of
// what was dropped.
inline StateVector restrict_to_sector(const StateVector& full, const SectorBasis& basis,
                                      double* out_of_sector = nullptr) {
    StateVector out;
    out.chain_length = basis.chain_length();
    out.down_spins = basis.down_spins();
    out.amplitudes.assign(basis.size(), cplx(0.0, 0.0));
    std::vector<bool> taken(full.amplitudes.size(), false);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const std::size_t fi = basis.full_index(i);
        out.amplitudes[i] = full.amplitudes[fi];
        taken[fi] = true;
    }
    if (out_of_sector) {
        double s = 0.0;
        for (std::size_t i = 0; i < full.amplitudes.size(); ++i)
            if (!taken[i]) s += std::norm(full.amplitudes[i]);
        *out_of_sector = std::sqrt(s);
    }
    return out;
}

}  // namespace bethemps
