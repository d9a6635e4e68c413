#pragma once

// The open-chain Hamiltonian, full or restricted to a fixed-magnetization
// sector, its dense diagonalization, and overlap matching of candidate
// states against eigenpairs.

#include <cmath>
#include <complex>
#include <vector>

#include "bethemps/basis.hpp"
#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/kernel.hpp"

namespace bethemps {

inline constexpr int kMaxFullDiagChain = 12;
inline constexpr std::size_t kMaxSectorDim = 4096;

// H = sum_i [ sx_i sx_{i+1} + sy_i sy_{i+1} + Delta (sz_i sz_{i+1} - 1) ] - Delta
// on the full 2^L space; real symmetric by construction.
inline CMatrix build_hamiltonian(const ModelKernel& k, int chain_length) {
    if (chain_length < 1 || chain_length > kMaxFullDiagChain)
        throw BetheError(ErrorKind::SizeLimit, "build_hamiltonian: chain length above cap");
    const std::size_t dim = std::size_t{1} << chain_length;
    const double delta = k.delta();

    CMatrix h(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) h(i, i) = -delta;
    for (int bond = 1; bond < chain_length; ++bond) {
        const std::size_t ml = std::size_t{1} << (chain_length - bond);
        const std::size_t mr = std::size_t{1} << (chain_length - bond - 1);
        for (std::size_t s = 0; s < dim; ++s) {
            const bool dl = s & ml;
            const bool dr = s & mr;
            // sz sz - 1: 0 on aligned, -2 on anti-aligned
            if (dl != dr) {
                h(s, s) += -2.0 * delta;
                // sx sx + sy sy: exchanges the two anti-aligned spins
                const std::size_t t = s ^ ml ^ mr;
                h(s, t) += 2.0;
            }
        }
    }
    return h;
}

inline CMatrix build_hamiltonian_sector(const ModelKernel& k, int chain_length, int down_spins) {
    const SectorBasis basis(chain_length, down_spins);
    if (basis.size() > kMaxSectorDim)
        throw BetheError(ErrorKind::SizeLimit, "build_hamiltonian_sector: sector above cap");
    const double delta = k.delta();

    CMatrix h(basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto cfg = basis.config(i);
        const std::size_t full = cfg.full_index();
        h(i, i) = -delta;
        for (int bond = 1; bond < chain_length; ++bond) {
            const std::size_t ml = std::size_t{1} << (chain_length - bond);
            const std::size_t mr = std::size_t{1} << (chain_length - bond - 1);
            const bool dl = full & ml;
            const bool dr = full & mr;
            if (dl != dr) {
                h(i, i) += -2.0 * delta;
                // hop keeps the magnetization, so the image stays in the sector
                const std::size_t t = full ^ ml ^ mr;
                std::vector<int> positions;
                for (int x = 1; x <= chain_length; ++x)
                    if (t & (std::size_t{1} << (chain_length - x))) positions.push_back(x);
                h(i, basis.index_of(positions)) += 2.0;
            }
        }
    }
    return h;
}

struct EigenPair {
    double energy = 0.0;
    StateVector vector;  // unit norm, sector-ordered
};

inline std::vector<EigenPair> diagonalize_sector(const ModelKernel& k, int chain_length,
                                                 int down_spins) {
    const CMatrix h = build_hamiltonian_sector(k, chain_length, down_spins);
    const SymEig eig = sym_eig_real(h);
    std::vector<EigenPair> out(eig.values.size());
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        out[j].energy = eig.values[j];
        out[j].vector.chain_length = chain_length;
        out[j].vector.down_spins = down_spins;
        out[j].vector.amplitudes.resize(eig.values.size());
        for (std::size_t i = 0; i < eig.values.size(); ++i)
            out[j].vector.amplitudes[i] = eig.vectors(i, j);
    }
    return out;
}

struct MatchReport {
    double best_overlap = 0.0;   // |<candidate|eigvec>| after normalization
    double matched_energy = 0.0;
    double residual = 0.0;       // ||H c - E c|| / ||c||
    std::size_t matched_index = 0;
    bool degenerate = false;     // projector overlap over a near-degenerate group
};

// Best overlap of the candidate against the eigenpairs. Near-degenerate
// groups (gap < 1e-8) are scored by the norm of the projection onto the
// group's span.
inline MatchReport match_state(const StateVector& candidate, const std::vector<EigenPair>& pairs,
                               const ModelKernel& k) {
    if (pairs.empty())
        throw BetheError(ErrorKind::Precondition, "match_state: no eigenpairs");
    if (candidate.max_abs() <= 1e-12)
        throw BetheError(ErrorKind::NullState, "match_state: candidate state is zero");
    const StateVector cand = candidate.normalized();

    MatchReport best;
    std::size_t g0 = 0;
    while (g0 < pairs.size()) {
        std::size_t g1 = g0 + 1;
        while (g1 < pairs.size() && std::abs(pairs[g1].energy - pairs[g1 - 1].energy) < 1e-8)
            ++g1;
        double proj_sq = 0.0;
        for (std::size_t j = g0; j < g1; ++j)
            proj_sq += std::norm(overlap(pairs[j].vector, cand));
        const double score = std::sqrt(proj_sq);
        if (score > best.best_overlap) {
            best.best_overlap = score;
            best.matched_energy = pairs[g0].energy;
            best.matched_index = g0;
            best.degenerate = (g1 - g0) > 1;
        }
        g0 = g1;
    }

    const CMatrix h =
        build_hamiltonian_sector(k, candidate.chain_length, candidate.down_spins);
    const std::vector<cplx> hc = h * cand.amplitudes;
    double res_sq = 0.0;
    for (std::size_t i = 0; i < hc.size(); ++i)
        res_sq += std::norm(hc[i] - best.matched_energy * cand.amplitudes[i]);
    best.residual = std::sqrt(res_sq);
    return best;
}

}  // namespace bethemps
