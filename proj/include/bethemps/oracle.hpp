#pragma once

// Independent ground truth on the full Hilbert space: the looped (double-row)
// monodromy matrix assembled from site-embedded L-operators, its A/B/C/D
// blocks and forward/backward halves, Bethe states as B-operator products,
// transfer matrices, the Hamiltonian recovered from the transfer-matrix
// log-derivative, and a seeded residual suite for the algebraic identities.

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bethemps/basis.hpp"
#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/kernel.hpp"
#include "bethemps/obc_mps.hpp"

namespace bethemps {

inline constexpr int kMaxOracleChain = 10;       // dense 2^L operators
inline constexpr int kMaxReflectionChain = 6;    // 4 * 4^L contractions

struct MonodromyBlocks {
    CMatrix a, b, c, d;  // each 2^L x 2^L
    cplx lambda;
    int chain_length = 0;
};

struct HalfMonodromies {
    // forward half M = L_{a1} ... L_{aL} and backward half N = L_{aL} ... L_{a1}
    CMatrix e, f, g, h;  // blocks of M
    CMatrix u, v, x, y;  // blocks of N
    cplx lambda;
};

namespace detail {

// y = x * (identity ⊗ s ⊗ identity), s acting on the given 1-based site of an
// L-site chain, site 1 slowest. Column update, O(4^L).
inline CMatrix mul_site_right(const CMatrix& x, const CMatrix& s, int site, int chain_length) {
    const std::size_t mask = std::size_t{1} << (chain_length - site);
    const std::size_t dim = x.rows();
    CMatrix y(dim, x.cols());
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const std::size_t sc = (c & mask) ? 1 : 0;
            const std::size_t c0 = c & ~mask;
            const std::size_t c1 = c | mask;
            y(r, c) = x(r, c0) * s(0, sc) + x(r, c1) * s(1, sc);
        }
    }
    return y;
}

struct AuxBlocks {
    CMatrix a, b, c, d;
};

inline AuxBlocks aux_identity(std::size_t dim) {
    AuxBlocks t;
    t.a = CMatrix::identity(dim);
    t.b = CMatrix(dim, dim);
    t.c = CMatrix(dim, dim);
    t.d = CMatrix::identity(dim);
    return t;
}

// t <- t * L_{0,site}(lambda), the L-operator seen as a 2x2 auxiliary-space
// block matrix of single-site physical operators.
inline void aux_mul_l(AuxBlocks& t, const ModelKernel& k, cplx lambda, int site,
                      int chain_length) {
    const CMatrix l4 = l_operator(k, lambda);
    CMatrix la(2, 2), lb(2, 2), lc(2, 2), ld(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            la(i, j) = l4(i, j);
            lb(i, j) = l4(i, 2 + j);
            lc(i, j) = l4(2 + i, j);
            ld(i, j) = l4(2 + i, 2 + j);
        }
    auto mul = [&](const CMatrix& x, const CMatrix& s) {
        return mul_site_right(x, s, site, chain_length);
    };
    CMatrix na = mul(t.a, la) + mul(t.b, lc);
    CMatrix nb = mul(t.a, lb) + mul(t.b, ld);
    CMatrix nc = mul(t.c, la) + mul(t.d, lc);
    CMatrix nd = mul(t.c, lb) + mul(t.d, ld);
    t.a = std::move(na);
    t.b = std::move(nb);
    t.c = std::move(nc);
    t.d = std::move(nd);
}

// Identity residual scaled by the operand magnitude once that exceeds unit
// size; near a parametrization pole the matrix entries blow up and absolute
// roundoff grows with them.
inline double scaled_diff(const CMatrix& a, const CMatrix& b) {
    return max_abs_diff(a, b) / std::max({1.0, a.max_abs(), b.max_abs()});
}

inline CMatrix blocks_to_matrix(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                                const CMatrix& d) {
    const std::size_t n = a.rows();
    CMatrix t(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            t(i, j) = a(i, j);
            t(i, n + j) = b(i, j);
            t(n + i, j) = c(i, j);
            t(n + i, n + j) = d(i, j);
        }
    return t;
}

// w <- L_{0,site}(lambda) w on the auxiliary ⊗ chain vector (aux slowest).
inline void apply_l_to_vector(std::vector<cplx>& w, const ModelKernel& k, cplx lambda,
                              int site, int chain_length) {
    const CMatrix l4 = l_operator(k, lambda);
    const std::size_t d = std::size_t{1} << chain_length;
    const std::size_t mask = std::size_t{1} << (chain_length - site);
    for (std::size_t rest = 0; rest < d; ++rest) {
        if (rest & mask) continue;  // enumerate patterns with the site bit cleared
        cplx in[4];
        for (std::size_t aux = 0; aux < 2; ++aux)
            for (std::size_t s = 0; s < 2; ++s)
                in[2 * aux + s] = w[aux * d + (s ? (rest | mask) : rest)];
        for (std::size_t aux = 0; aux < 2; ++aux)
            for (std::size_t s = 0; s < 2; ++s) {
                cplx acc(0.0, 0.0);
                for (std::size_t q = 0; q < 4; ++q) acc += l4(2 * aux + s, q) * in[q];
                w[aux * d + (s ? (rest | mask) : rest)] = acc;
            }
    }
}

}  // namespace detail

// T(lambda) = L_{01}...L_{0L} L_{0L}...L_{01}, accumulated as sequential 2x2
// auxiliary-block products of site-embedded L-operators; both the blocks of T
// and the two halves M, N are returned.
inline std::pair<MonodromyBlocks, HalfMonodromies> looped_monodromy(const ModelKernel& k,
                                                                    int chain_length,
                                                                    cplx lambda) {
    if (chain_length < 1 || chain_length > kMaxOracleChain)
        throw BetheError(ErrorKind::SizeLimit, "looped_monodromy: chain length above cap");
    const std::size_t dim = std::size_t{1} << chain_length;

    detail::AuxBlocks m = detail::aux_identity(dim);
    for (int i = 1; i <= chain_length; ++i) detail::aux_mul_l(m, k, lambda, i, chain_length);
    detail::AuxBlocks n = detail::aux_identity(dim);
    for (int i = chain_length; i >= 1; --i) detail::aux_mul_l(n, k, lambda, i, chain_length);

    MonodromyBlocks t;
    t.lambda = lambda;
    t.chain_length = chain_length;
    t.a = m.a * n.a + m.b * n.c;
    t.b = m.a * n.b + m.b * n.d;
    t.c = m.c * n.a + m.d * n.c;
    t.d = m.c * n.b + m.d * n.d;

    HalfMonodromies halves;
    halves.lambda = lambda;
    halves.e = std::move(m.a);
    halves.f = std::move(m.b);
    halves.g = std::move(m.c);
    halves.h = std::move(m.d);
    halves.u = std::move(n.a);
    halves.v = std::move(n.b);
    halves.x = std::move(n.c);
    halves.y = std::move(n.d);
    return {std::move(t), std::move(halves)};
}

// B(lambda_1)...B(lambda_n)|omega>, applied right to left. Each B application
// runs the 2L site factors of the looped monodromy over an auxiliary-extended
// vector, so no operator is ever materialized.
inline StateVector bethe_state_oracle(const ModelKernel& k, int chain_length,
                                      const std::vector<cplx>& lambdas) {
    if (chain_length < 1 || chain_length > kMaxOracleChain)
        throw BetheError(ErrorKind::SizeLimit, "bethe_state_oracle: chain length above cap");
    const std::size_t d = std::size_t{1} << chain_length;

    std::vector<cplx> state(d, cplx(0.0, 0.0));
    state[0] = 1.0;  // |omega> = all spins up
    for (std::size_t j = lambdas.size(); j-- > 0;) {
        const cplx lambda = lambdas[j];
        // w = |down>_aux ⊗ state, then w <- T(lambda) w
        std::vector<cplx> w(2 * d, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < d; ++i) w[d + i] = state[i];
        for (int i = 1; i <= chain_length; ++i)
            detail::apply_l_to_vector(w, k, lambda, i, chain_length);
        for (int i = chain_length; i >= 1; --i)
            detail::apply_l_to_vector(w, k, lambda, i, chain_length);
        for (std::size_t i = 0; i < d; ++i) state[i] = w[i];  // <up|_aux component
    }

    StateVector out;
    out.chain_length = chain_length;
    out.down_spins = -1;
    out.amplitudes = std::move(state);
    return out;
}

inline CMatrix transfer_matrix(const ModelKernel& k, int chain_length, cplx lambda) {
    auto [t, halves] = looped_monodromy(k, chain_length, lambda);
    (void)halves;
    return t.a + t.d;
}

// sinh(eta) t(eta/2)^{-1} (t(eta/2+h) - t(eta/2-h)) / (2h): central-difference
// form of the transfer-matrix log-derivative.
inline CMatrix hamiltonian_from_transfer(const ModelKernel& k, int chain_length,
                                         double fd_step) {
    if (fd_step < 1e-7 || fd_step > 1e-4)
        throw BetheError(ErrorKind::Precondition,
                         "hamiltonian_from_transfer: fd_step outside [1e-7, 1e-4]");
    const cplx half_eta = k.eta() / 2.0;
    const CMatrix t0 = transfer_matrix(k, chain_length, half_eta);
    CMatrix dt = transfer_matrix(k, chain_length, half_eta + fd_step) -
                 transfer_matrix(k, chain_length, half_eta - fd_step);
    dt *= cplx(1.0 / (2.0 * fd_step), 0.0);
    CMatrix h;
    try {
        h = solve_linear_matrix(t0, dt);
    } catch (const BetheError& e) {
        if (e.kind() == ErrorKind::SingularMatrix)
            throw BetheError(ErrorKind::SingularMatrix,
                             "hamiltonian_from_transfer: t(eta/2) numerically singular");
        throw;
    }
    h *= k.sh(k.eta());
    return h;
}

// Residual of the doubled-auxiliary trace rewriting at a single rapidity:
// Tr_{Vbar}(Q M N) against Tr_{Vbar x Vund}(M N^t q_script), the backward
// half transposed in the added auxiliary space (the faster factor of the
// pair) via a layout index permutation.
inline double q_tilde_trace_residual(const ModelKernel& k, int chain_length, cplx lambda) {
    auto [t, halves] = looped_monodromy(k, chain_length, lambda);
    (void)t;
    const std::size_t d = std::size_t{1} << chain_length;
    const TensorIndexLayout layout{{2, 2, d}};
    const BoundaryTensors boundary = build_boundary(1);

    const CMatrix lhs = halves.e * halves.v + halves.f * halves.y;
    const CMatrix mbig = embed(
        detail::blocks_to_matrix(halves.e, halves.f, halves.g, halves.h), layout, {0, 2});
    const CMatrix nbig = partial_transpose(
        embed(detail::blocks_to_matrix(halves.u, halves.v, halves.x, halves.y), layout, {1, 2}),
        layout, 1);
    const CMatrix q = embed(boundary.q_script, layout, {0, 1});
    const CMatrix rhs = partial_trace_head(mbig * nbig * q, 4);
    return detail::scaled_diff(lhs, rhs);
}

struct CheckReport {
    double yang_baxter = 0.0;       // intertwining of two L-operators by R
    double reflection = 0.0;        // double-row exchange relation for T
    double q_tilde_trace = 0.0;     // single-aux trace vs doubled-aux trace
    double b_commutation = 0.0;     // [B(lambda), B(mu)] = 0
    double transfer_commutation = 0.0;  // [t(lambda), t(mu)] = 0, relative
    int samples = 0;
    std::uint64_t seed = 0;

    double worst() const {
        double w = yang_baxter;
        w = std::max(w, reflection);
        w = std::max(w, q_tilde_trace);
        w = std::max(w, b_commutation);
        w = std::max(w, transfer_commutation);
        return w;
    }
};

namespace detail {

// deterministic uniform double in [lo, hi) from raw mt19937_64 output
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace detail

// Seeded residual suite over random pole-free rapidity pairs drawn from
// Re in [-1,1], Im in [-1.5,1.5].
inline CheckReport run_algebra_checks(const ModelKernel& k, int chain_length, int samples,
                                      std::uint64_t seed) {
    if (chain_length > kMaxReflectionChain)
        throw BetheError(ErrorKind::SizeLimit, "run_algebra_checks: chain length above cap");

    CheckReport report;
    report.samples = samples;
    report.seed = seed;
    std::mt19937_64 rng(seed);

    const std::size_t d = std::size_t{1} << chain_length;
    const TensorIndexLayout pair_layout{{2, 2, 2}};
    const TensorIndexLayout big_layout{{2, 2, d}};

    for (int s = 0; s < samples; ++s) {
        cplx lambda, mu;
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            lambda = cplx(detail::uniform(rng, -1.0, 1.0), detail::uniform(rng, -1.5, 1.5));
            mu = cplx(detail::uniform(rng, -1.0, 1.0), detail::uniform(rng, -1.5, 1.5));
            try {  // reject draws that sit on a pole of any factor used below
                r_matrix(k, lambda - mu);
                r_matrix(k, lambda + mu - k.eta());
                l_operator(k, lambda);
                l_operator(k, mu);
                ok = true;
            } catch (const BetheError&) {
            }
        }
        if (!ok)
            throw BetheError(ErrorKind::DegenerateInput,
                             "run_algebra_checks: could not draw a pole-free sample");

        // (i) intertwining of L by R on V_a ⊗ V_b ⊗ V_i
        {
            const CMatrix r = embed(r_matrix(k, lambda - mu), pair_layout, {0, 1});
            const CMatrix la = embed(l_operator(k, lambda), pair_layout, {0, 2});
            const CMatrix lb = embed(l_operator(k, mu), pair_layout, {1, 2});
            report.yang_baxter =
                std::max(report.yang_baxter, detail::scaled_diff(r * la * lb, lb * la * r));
        }

        auto [tl, halves_l] = looped_monodromy(k, chain_length, lambda);
        auto [tm, halves_m] = looped_monodromy(k, chain_length, mu);
        (void)halves_l;
        (void)halves_m;

        // (ii) reflection relation on V_a ⊗ V_b ⊗ H
        {
            const CMatrix ta =
                embed(detail::blocks_to_matrix(tl.a, tl.b, tl.c, tl.d), big_layout, {0, 2});
            const CMatrix tb =
                embed(detail::blocks_to_matrix(tm.a, tm.b, tm.c, tm.d), big_layout, {1, 2});
            const CMatrix r1 = embed(r_matrix(k, lambda - mu), big_layout, {0, 1});
            const CMatrix r2 = embed(r_matrix(k, lambda + mu - k.eta()), big_layout, {0, 1});
            report.reflection = std::max(
                report.reflection, detail::scaled_diff(r1 * ta * r2 * tb, tb * r2 * ta * r1));
        }

        // (iii) single-aux trace vs doubled-aux trace with the pair matrix
        report.q_tilde_trace = std::max(report.q_tilde_trace,
                                        q_tilde_trace_residual(k, chain_length, lambda));

        // (iv) B-operator commutation
        report.b_commutation =
            std::max(report.b_commutation, detail::scaled_diff(tl.b * tm.b, tm.b * tl.b));

        // (v) transfer-matrix commutativity, relative to operand norms
        {
            const CMatrix t1 = tl.a + tl.d;
            const CMatrix t2 = tm.a + tm.d;
            const double scale = std::max(t1.max_abs() * t2.max_abs(), 1e-300);
            report.transfer_commutation = std::max(
                report.transfer_commutation, max_abs_diff(t1 * t2, t2 * t1) / scale);
        }
    }
    return report;
}

}  // namespace bethemps
