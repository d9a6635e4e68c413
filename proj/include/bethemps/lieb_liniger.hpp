#pragma once

// Lattice-regularized Lieb-Liniger gas with open boundaries: the bosonic
// L-operator on a truncated Fock space, quantum-determinant and inverse
// residuals, the real-rapidity Bethe equations, the C_{n,m} site-tensor
// family with its five-term recursion, trace amplitudes closed by the same
// boundary matrix as the spin chain, and a B-product oracle state on the
// truncated Fock lattice.
//
// Truncation rule used throughout: with local Fock dimension local_dim, every
// identity that is exact in the untruncated algebra remains exact on matrix
// entries whose Fock indices stay at or below local_dim - 2; residual checks
// restrict to those retained levels. Oracle states built with
// local_dim >= 2n+1 are exact, since each of the 2n monodromy factors raises
// a local occupation by at most one.

#include <cmath>
#include <complex>
#include <vector>

#include "bethemps/basis.hpp"
#include "bethemps/bethe.hpp"
#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/obc_mps.hpp"

namespace bethemps {

inline constexpr std::size_t kMaxLLDim = 1u << 20;

struct LLParams {
    double kappa = 1.0;  // repulsive coupling, 1/length
    double a = 0.1;      // lattice spacing
    int sites = 4;       // N

    double length() const { return sites * a; }
    bool kappa_a_recommended() const { return kappa * a < 4.0; }

    void validate() const {
        if (!(kappa > 0.0) || !(a > 0.0) || sites < 1)
            throw BetheError(ErrorKind::Validation, "LLParams: need kappa > 0, a > 0, N >= 1");
    }
};

// delta_m / gamma_{n,m} / beta_{n,m} coefficient functions; delta_m vanishes
// for m < 0 (and does so continuously at m = -1).
inline cplx ll_delta(const LLParams& p, int m) {
    if (m < 0) return 0.0;
    const double ka = p.kappa * p.a;
    return cplx(0.0, std::sqrt((m + 1) * ka * (1.0 + m * ka / 4.0)));
}
inline cplx ll_gamma(const LLParams& p, double lambda, int m) {
    return 1.0 - cplx(0.0, 1.0) * (lambda + cplx(0.0, p.kappa / 2.0)) * p.a / 2.0 +
           m * p.kappa * p.a / 2.0;
}
inline cplx ll_beta(const LLParams& p, double lambda, int m) {
    return 1.0 + cplx(0.0, 1.0) * (lambda + cplx(0.0, p.kappa / 2.0)) * p.a / 2.0 +
           m * p.kappa * p.a / 2.0;
}

namespace ll_detail {

inline CMatrix annihilator(int local_dim) {
    CMatrix psi(local_dim, local_dim);
    for (int m = 1; m < local_dim; ++m) psi(m - 1, m) = std::sqrt(double(m));
    return psi;
}

}  // namespace ll_detail

// 2x2 auxiliary-block operator (auxiliary slow factor) with Fock-space blocks
//   [ 1 - i lambda a/2 + (kappa a/2) n      -i sqrt(kappa a) psi^dag rho ]
//   [ i sqrt(kappa a) rho psi                1 + i lambda a/2 + (kappa a/2) n ],
// rho = sqrt(1 + (kappa a/4) n), truncated at local_dim occupations.
inline CMatrix ll_l_operator(const LLParams& p, cplx lambda, int local_dim) {
    if (local_dim < 1)
        throw BetheError(ErrorKind::Precondition, "ll_l_operator: local_dim < 1");
    const int d = local_dim;
    const CMatrix psi = ll_detail::annihilator(d);
    const CMatrix psidag = psi.transpose();
    CMatrix rho(d, d);
    for (int m = 0; m < d; ++m) rho(m, m) = std::sqrt(1.0 + p.kappa * p.a / 4.0 * m);

    const cplx ia2 = cplx(0.0, 1.0) * lambda * p.a / 2.0;
    const double ka2 = p.kappa * p.a / 2.0;
    const cplx root = cplx(0.0, std::sqrt(p.kappa * p.a));

    CMatrix out(2 * d, 2 * d);
    const CMatrix b = (-root) * (psidag * rho);
    const CMatrix c = root * (rho * psi);
    for (int m = 0; m < d; ++m) {
        out(m, m) = 1.0 - ia2 + ka2 * m;
        out(d + m, d + m) = 1.0 + ia2 + ka2 * m;
    }
    for (int r = 0; r < d; ++r)
        for (int cc = 0; cc < d; ++cc) {
            out(r, d + cc) = b(r, cc);
            out(d + r, cc) = c(r, cc);
        }
    return out;
}

namespace ll_detail {

inline CMatrix aux_transpose(const CMatrix& m) {
    const std::size_t d = m.rows() / 2;
    CMatrix out(2 * d, 2 * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            out(i, j) = m(i, j);
            out(d + i, d + j) = m(d + i, d + j);
            out(i, d + j) = m(d + i, j);
            out(d + i, j) = m(i, d + j);
        }
    return out;
}

// sigma^y (aux) M sigma^y (aux): swaps the diagonal blocks, negates the
// off-diagonal ones.
inline CMatrix sy_conjugate(const CMatrix& m) {
    const std::size_t d = m.rows() / 2;
    CMatrix out(2 * d, 2 * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            out(i, j) = m(d + i, d + j);
            out(d + i, d + j) = m(i, j);
            out(i, d + j) = -m(d + i, j);
            out(d + i, j) = -m(i, d + j);
        }
    return out;
}

inline double restricted_max_abs(const CMatrix& m, int local_dim, int keep) {
    double r = 0.0;
    for (int ar = 0; ar < 2; ++ar)
        for (int ac = 0; ac < 2; ++ac)
            for (int fr = 0; fr < keep; ++fr)
                for (int fc = 0; fc < keep; ++fc)
                    r = std::max(r, std::abs(m(ar * local_dim + fr, ac * local_dim + fc)));
    return r;
}

}  // namespace ll_detail

inline cplx ll_quantum_determinant(const LLParams& p, cplx mu) {
    return p.a * p.a / 4.0 * (mu - cplx(0.0, p.kappa / 2.0) + cplx(0.0, 2.0 / p.a)) *
           (mu + cplx(0.0, p.kappa / 2.0) - cplx(0.0, 2.0 / p.a));
}

// || L(mu - i kappa/2) sy L^t_aux(mu + i kappa/2) sy - det_q L(mu) * I ||
// on Fock levels 0 .. local_dim-2.
inline double ll_quantum_determinant_residual(const LLParams& p, cplx mu, int local_dim) {
    const CMatrix lhs = ll_l_operator(p, mu - cplx(0.0, p.kappa / 2.0), local_dim) *
                        ll_detail::sy_conjugate(ll_detail::aux_transpose(
                            ll_l_operator(p, mu + cplx(0.0, p.kappa / 2.0), local_dim)));
    CMatrix diff = lhs;
    const cplx dq = ll_quantum_determinant(p, mu);
    for (std::size_t i = 0; i < diff.rows(); ++i) diff(i, i) -= dq;
    return ll_detail::restricted_max_abs(diff, local_dim, local_dim - 1);
}

// || L(mu) L^{-1}(mu) - I || on retained levels, with the closed-form inverse
// L^{-1}(mu) = sy L^t_aux(mu + i kappa) sy / [ (a^2/4)(mu + 2i/a)(mu + i kappa - 2i/a) ].
inline double ll_inverse_residual(const LLParams& p, cplx mu, int local_dim) {
    const cplx denom = p.a * p.a / 4.0 * (mu + cplx(0.0, 2.0 / p.a)) *
                       (mu + cplx(0.0, p.kappa) - cplx(0.0, 2.0 / p.a));
    CMatrix linv = ll_detail::sy_conjugate(
        ll_detail::aux_transpose(ll_l_operator(p, mu + cplx(0.0, p.kappa), local_dim)));
    linv *= 1.0 / denom;
    CMatrix diff = ll_l_operator(p, mu, local_dim) * linv;
    for (std::size_t i = 0; i < diff.rows(); ++i) diff(i, i) -= 1.0;
    return ll_detail::restricted_max_abs(diff, local_dim, local_dim - 1);
}

// Rational R-matrix of the gas model.
inline CMatrix ll_r_matrix(const LLParams& p, cplx lambda) {
    const cplx den = lambda - cplx(0.0, p.kappa);
    if (std::abs(den) < kPoleGuard)
        throw BetheError(ErrorKind::DegenerateInput, "ll_r_matrix: pole at lambda = i kappa");
    CMatrix r(4, 4);
    r(0, 0) = r(3, 3) = 1.0;
    r(1, 1) = r(2, 2) = lambda / den;
    r(1, 2) = r(2, 1) = -cplx(0.0, p.kappa) / den;
    return r;
}

// Intertwining residual R(l-m) L(l) L(m) - L(m) L(l) R(l-m) on the doubled
// auxiliary space, restricted to retained Fock levels.
inline double ll_intertwining_residual(const LLParams& p, cplx lambda, cplx mu, int local_dim) {
    const std::size_t d = local_dim;
    const TensorIndexLayout layout{{2, 2, d}};
    auto embed_l = [&](cplx z, std::size_t aux_slot) {
        return embed(ll_l_operator(p, z, local_dim), layout, {aux_slot, 2});
    };
    const CMatrix r = embed(ll_r_matrix(p, lambda - mu), layout, {0, 1});
    const CMatrix la = embed_l(lambda, 0);
    const CMatrix lb = embed_l(mu, 1);
    const CMatrix diff = r * la * lb - lb * la * r;
    double res = 0.0;
    for (std::size_t ar = 0; ar < 4; ++ar)
        for (std::size_t ac = 0; ac < 4; ++ac)
            for (std::size_t fr = 0; fr + 1 < d; ++fr)
                for (std::size_t fc = 0; fc + 1 < d; ++fc)
                    res = std::max(res, std::abs(diff(ar * d + fr, ac * d + fc)));
    return res;
}

// Log-form residuals of e^{i 2 lambda_i L} = prod_{j != i} (...), reduced to
// Im in (-pi, pi]. Rapidities must be real (OBC repulsive roots are real).
inline std::vector<cplx> ll_bae_residual(const LLParams& p, const std::vector<double>& lambdas) {
    const std::size_t n = lambdas.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(lambdas[i] - lambdas[j]) < 1e-9)
                throw BetheError(ErrorKind::DegenerateInput, "ll_bae_residual: repeated rapidity");

    const cplx ik(0.0, p.kappa);
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double li = lambdas[i];
        cplx prod(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double lj = lambdas[j];
            prod *= (li + lj + ik) * (li - lj + ik) / ((li + lj - ik) * (li - lj - ik));
        }
        out[i] = detail::reduce_log_branch(cplx(0.0, 2.0 * li * p.length()) - std::log(prod));
    }
    return out;
}

struct LLRoots {
    std::vector<double> lambdas;
    double residual_norm = 0.0;
    bool converged = false;
};

inline LLRoots ll_solve_bae(const LLParams& p, const std::vector<double>& guess,
                            const SolverConfig& cfg) {
    cfg.validate();
    auto f = [&](const std::vector<double>& x) {
        const auto res = ll_bae_residual(p, x);
        std::vector<double> out(res.size());
        for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i].imag();
        return out;
    };
    NewtonOptions opt{cfg.max_iterations, cfg.tolerance, cfg.fd_step, cfg.damping};
    const NewtonResult nr = newton_solve(f, guess, opt);

    LLRoots roots;
    roots.lambdas = nr.x;
    double rmax = 0.0;
    for (const cplx r : ll_bae_residual(p, roots.lambdas)) rmax = std::max(rmax, std::abs(r));
    roots.residual_norm = rmax;
    roots.converged = rmax <= cfg.tolerance;
    return roots;
}

struct LLSiteTensors {
    std::vector<CMatrix> c;  // c[m] = C_{n,m} for m = 0 .. 2n, each 4^n x 4^n
    std::vector<double> lambdas;
    int n = 0;
};

namespace ll_detail {

// The five 4x4 recursion kernels in the added auxiliary pair, coupling
// C_{n+1,m} to C_{n,m+shift}.
inline CMatrix k_shift(const LLParams& p, double lambda, int m, int shift) {
    CMatrix k(4, 4);
    switch (shift) {
        case +2:
            k(2, 1) = -ll_delta(p, m) * ll_delta(p, m + 1);
            break;
        case -2:
            k(1, 2) = -ll_delta(p, m - 1) * ll_delta(p, m - 2);
            break;
        case +1: {
            const cplx d = ll_delta(p, m);
            k(0, 1) = -d * ll_gamma(p, lambda, m);
            k(2, 0) = d * std::conj(ll_beta(p, lambda, m + 1));
            k(2, 3) = -d * ll_beta(p, lambda, m);
            k(3, 1) = d * std::conj(ll_gamma(p, lambda, m + 1));
            break;
        }
        case -1: {
            const cplx d = ll_delta(p, m - 1);
            k(0, 2) = -d * std::conj(ll_beta(p, lambda, m - 1));
            k(1, 0) = d * ll_gamma(p, lambda, m);
            k(1, 3) = -d * std::conj(ll_gamma(p, lambda, m - 1));
            k(3, 2) = d * ll_beta(p, lambda, m);
            break;
        }
        case 0: {
            const cplx g = ll_gamma(p, lambda, m);
            const cplx b = ll_beta(p, lambda, m);
            k(0, 0) = g * std::conj(b);
            k(0, 3) = ll_delta(p, m - 1) * ll_delta(p, m - 1);
            k(1, 1) = g * std::conj(g);
            k(2, 2) = b * std::conj(b);
            k(3, 0) = ll_delta(p, m) * ll_delta(p, m);
            k(3, 3) = b * std::conj(g);
            break;
        }
    }
    return k;
}

}  // namespace ll_detail

// C_{n,m} family from the base case C_{0,0} = [1]; one recursion application
// per rapidity, the added pair entering as the left Kronecker factor. Tensors
// with m > 2n are identically zero and therefore not stored.
inline LLSiteTensors ll_site_tensors(const LLParams& p, const std::vector<double>& lambdas) {
    p.validate();
    const int n = static_cast<int>(lambdas.size());
    if (n > kMaxExcitationsTensors)
        throw BetheError(ErrorKind::SizeLimit, "ll_site_tensors: n above cap");

    std::vector<CMatrix> cur = {CMatrix::identity(1)};
    int level = 0;
    for (const double lambda : lambdas) {
        const std::size_t dim = std::size_t{1} << (2 * (level + 1));
        std::vector<CMatrix> next(2 * (level + 1) + 1, CMatrix(dim, dim));
        for (int m = 0; m <= 2 * (level + 1); ++m) {
            for (const int shift : {+2, -2, +1, -1, 0}) {
                const int src = m + shift;
                if (src < 0 || src > 2 * level) continue;
                next[m] += kron(ll_detail::k_shift(p, lambda, m, shift), cur[src]);
            }
        }
        cur = std::move(next);
        ++level;
    }

    LLSiteTensors t;
    t.c = std::move(cur);
    t.lambdas = lambdas;
    t.n = n;
    return t;
}

struct OccupationConfiguration {
    std::vector<int> occupations;  // m_1 .. m_N

    int total() const {
        int s = 0;
        for (int m : occupations) s += m;
        return s;
    }
};

// Tr[ C_{n,m_1} C_{n,m_2} ... C_{n,m_N} q_n ] via the rank-1 boundary.
inline cplx ll_amplitude(const LLSiteTensors& t, const BoundaryTensors& b,
                         const OccupationConfiguration& occ) {
    if (occ.total() != t.n)
        throw BetheError(ErrorKind::Precondition, "ll_amplitude: total occupation != n");
    if (b.n != t.n)
        throw BetheError(ErrorKind::Precondition, "ll_amplitude: boundary n mismatch");
    for (int m : occ.occupations)
        if (m < 0 || m > 2 * t.n) return 0.0;  // C_{n,m} = 0 beyond m = 2n

    std::vector<cplx> vec = b.right_vector;
    for (std::size_t i = occ.occupations.size(); i-- > 0;)
        vec = t.c[occ.occupations[i]] * vec;
    cplx out(0.0, 0.0);
    for (std::size_t i = 0; i < vec.size(); ++i) out += b.left_vector[i] * vec[i];
    return out;
}

struct LLStateVector {
    int sites = 0;
    int local_dim = 0;
    std::vector<cplx> amplitudes;  // index = sum_i m_i * local_dim^(N-i), site 1 slowest

    std::size_t index_of(const std::vector<int>& occ) const {
        std::size_t idx = 0;
        for (int m : occ) idx = idx * local_dim + m;
        return idx;
    }
    double max_abs() const {
        double r = 0.0;
        for (const auto& v : amplitudes) r = std::max(r, std::abs(v));
        return r;
    }
};

namespace ll_detail {

// w <- Op w where Op is a 2x2 aux-block operator with local Fock blocks,
// acting on (aux, site i) of the aux ⊗ Fock-lattice vector.
inline void apply_site_op(std::vector<cplx>& w, const CMatrix& op, int site, int sites,
                          int local_dim) {
    const std::size_t d = w.size() / 2;
    std::size_t stride = 1;
    for (int j = sites; j > site; --j) stride *= local_dim;
    const std::size_t block = stride * local_dim;
    std::vector<cplx> in(2 * local_dim);
    for (std::size_t hi = 0; hi < d; hi += block) {
        for (std::size_t lo = 0; lo < stride; ++lo) {
            for (int aux = 0; aux < 2; ++aux)
                for (int m = 0; m < local_dim; ++m)
                    in[aux * local_dim + m] = w[aux * d + hi + m * stride + lo];
            for (int aux = 0; aux < 2; ++aux)
                for (int m = 0; m < local_dim; ++m) {
                    cplx acc(0.0, 0.0);
                    for (int q = 0; q < 2 * local_dim; ++q)
                        acc += op(aux * local_dim + m, q) * in[q];
                    w[aux * d + hi + m * stride + lo] = acc;
                }
        }
    }
}

}  // namespace ll_detail

// B(lambda_n)...B(lambda_1) |0>^(N), with the looped monodromy
// T = A_1...A_N B_N...B_1, A_i = L_i(lambda + i kappa/2) and
// B_i = sy L_i^t_aux(-lambda + i kappa/2) sy, applied as site factors over an
// auxiliary-extended vector.
inline LLStateVector ll_oracle_state(const LLParams& p, const std::vector<double>& lambdas,
                                     int local_dim) {
    p.validate();
    const int n = static_cast<int>(lambdas.size());
    if (local_dim < 2 * n + 1)
        throw BetheError(ErrorKind::Precondition,
                         "ll_oracle_state: local_dim < 2n+1 breaks exactness");
    std::size_t d = 1;
    for (int i = 0; i < p.sites; ++i) {
        d *= local_dim;
        if (d > kMaxLLDim)
            throw BetheError(ErrorKind::SizeLimit, "ll_oracle_state: lattice above cap");
    }

    std::vector<cplx> state(d, cplx(0.0, 0.0));
    state[0] = 1.0;  // global vacuum
    for (const double lambda : lambdas) {
        const CMatrix a_op =
            ll_l_operator(p, cplx(lambda, p.kappa / 2.0), local_dim);
        const CMatrix b_op = ll_detail::sy_conjugate(ll_detail::aux_transpose(
            ll_l_operator(p, cplx(-lambda, p.kappa / 2.0), local_dim)));

        std::vector<cplx> w(2 * d, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < d; ++i) w[d + i] = state[i];
        for (int i = 1; i <= p.sites; ++i)
            ll_detail::apply_site_op(w, b_op, i, p.sites, local_dim);
        for (int i = p.sites; i >= 1; --i)
            ll_detail::apply_site_op(w, a_op, i, p.sites, local_dim);
        for (std::size_t i = 0; i < d; ++i) state[i] = w[i];
    }

    LLStateVector out;
    out.sites = p.sites;
    out.local_dim = local_dim;
    out.amplitudes = std::move(state);
    return out;
}

// || (B(lambda) B(mu) - B(mu) B(lambda)) |0> ||_max with local_dim chosen so
// both applications stay exact.
inline double ll_b_commutation_residual(const LLParams& p, double lambda, double mu) {
    const LLStateVector s1 = ll_oracle_state(p, {mu, lambda}, 5);
    const LLStateVector s2 = ll_oracle_state(p, {lambda, mu}, 5);
    double r = 0.0;
    for (std::size_t i = 0; i < s1.amplitudes.size(); ++i)
        r = std::max(r, std::abs(s1.amplitudes[i] - s2.amplitudes[i]));
    return r;
}

// All occupation configurations of n particles on N sites (each m <= m_cap).
inline std::vector<OccupationConfiguration> enumerate_occupations(int sites, int particles,
                                                                  int m_cap) {
    std::vector<OccupationConfiguration> out;
    std::vector<int> cur(sites, 0);
    auto rec = [&](auto&& self, int site, int remaining) -> void {
        if (site == sites) {
            if (remaining == 0) out.push_back({cur});
            return;
        }
        for (int m = 0; m <= std::min(remaining, m_cap); ++m) {
            cur[site] = m;
            self(self, site + 1, remaining - m);
        }
        cur[site] = 0;
    };
    rec(rec, 0, particles);
    return out;
}

}  // namespace bethemps
