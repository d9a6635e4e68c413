#pragma once

// Exact MPS data for the open six-vertex chain: the boundary matrices
// (single-space Q, the merged Q-tilde, the nilpotent pair matrix and its
// n-fold Kronecker power) and the site matrices D_n, C_n built by recursion
// over the rapidities. Amplitudes are traces of site-matrix strings closed by
// the boundary matrix; a rank-1 fast path and a dense reference path are both
// provided.
//
// Auxiliary-space ordering, fixed once and used everywhere: each rapidity
// carries a pair of auxiliary spaces, the pair added last is the leftmost
// (slowest) Kronecker factor, and within a pair the first ("bar") space is
// slower than the added one.

#include <complex>
#include <vector>

#include "bethemps/basis.hpp"
#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/kernel.hpp"

namespace bethemps {

inline constexpr int kMaxExcitationsTensors = 6;   // site matrices up to 4096 x 4096
inline constexpr int kMaxExcitationsAssemble = 4;  // full-state assembly cap
inline constexpr int kMaxChainAssemble = 16;

struct BoundaryTensors {
    CMatrix q_single;  // 2x2  |down><up|
    CMatrix q_tilde;   // 4x4  pair-space merger
    CMatrix q_script;  // 4x4  nilpotent pair matrix, rank 1
    CMatrix q_n;       // 4^n x 4^n Kronecker power of q_script
    int n = 0;

    // rank-1 factorization q_n = right * left^T (no conjugation)
    std::vector<cplx> left_vector;   // row vector closing the trace
    std::vector<cplx> right_vector;  // column vector opening the trace
};

inline BoundaryTensors build_boundary(int n) {
    if (n < 0) throw BetheError(ErrorKind::Precondition, "build_boundary: negative n");
    if (n > 8) throw BetheError(ErrorKind::SizeLimit, "build_boundary: n above cap");

    BoundaryTensors b;
    b.n = n;
    b.q_single = CMatrix(2, 2);
    b.q_single(1, 0) = 1.0;

    b.q_tilde = CMatrix(4, 4);
    b.q_tilde(0, 0) = b.q_tilde(0, 3) = 1.0;
    b.q_tilde(3, 0) = b.q_tilde(3, 3) = 1.0;

    b.q_script = b.q_tilde * kron(b.q_single, CMatrix::identity(2));

    b.q_n = CMatrix::identity(1);
    for (int i = 0; i < n; ++i) b.q_n = kron(b.q_n, b.q_script);

    // q_script = u v^T with u = e0 + e3, v = e1; Kronecker powers inherit it.
    std::vector<cplx> u = {1.0, 0.0, 0.0, 1.0};
    std::vector<cplx> v = {0.0, 1.0, 0.0, 0.0};
    b.right_vector = {1.0};
    b.left_vector = {1.0};
    for (int i = 0; i < n; ++i) {
        std::vector<cplx> ru, lv;
        ru.reserve(b.right_vector.size() * 4);
        lv.reserve(b.left_vector.size() * 4);
        for (const cplx r : b.right_vector)
            for (const cplx x : u) ru.push_back(r * x);
        for (const cplx l : b.left_vector)
            for (const cplx x : v) lv.push_back(l * x);
        b.right_vector = std::move(ru);
        b.left_vector = std::move(lv);
    }
    return b;
}

struct MpsTensors {
    CMatrix d_n;  // 4^n x 4^n
    CMatrix c_n;  // 4^n x 4^n
    std::vector<cplx> lambdas;
    int n = 0;
};

namespace detail {

// The four 4x4 recursion kernels in the new auxiliary pair, as functions of
// the weights (b, c) of the added rapidity. k_dd reproduces the one-rapidity
// D-matrix pattern and k_cd the one-rapidity C-matrix pattern.
inline CMatrix k_dd(const WeightPair& w) {
    CMatrix m(4, 4);
    m(0, 0) = 1.0;
    m(1, 1) = w.b;
    m(2, 2) = w.b;
    m(3, 0) = w.c * w.c;
    m(3, 3) = w.b * w.b;
    return m;
}
inline CMatrix k_dc(const WeightPair& w) {
    CMatrix m(4, 4);
    m(0, 1) = w.c;
    m(2, 0) = w.b * w.c;
    m(2, 3) = w.b * w.c;
    m(3, 1) = w.c;
    return m;
}
inline CMatrix k_cc(const WeightPair& w) {
    CMatrix m(4, 4);
    m(0, 0) = w.b * w.b;
    m(0, 3) = w.c * w.c;
    m(1, 1) = w.b;
    m(2, 2) = w.b;
    m(3, 3) = 1.0;
    return m;
}
inline CMatrix k_cd(const WeightPair& w) {
    CMatrix m(4, 4);
    m(0, 2) = w.c;
    m(1, 0) = w.b * w.c;
    m(1, 3) = w.b * w.c;
    m(3, 2) = w.c;
    return m;
}

}  // namespace detail

// Builds D_n, C_n from the base case D_0 = [1], C_0 = [0] by applying the
// recursion once per rapidity in order; each application adds the new
// auxiliary pair as the left Kronecker factor.
inline MpsTensors build_site_tensors(const ModelKernel& k, const std::vector<cplx>& lambdas) {
    if (static_cast<int>(lambdas.size()) > kMaxExcitationsTensors)
        throw BetheError(ErrorKind::SizeLimit, "build_site_tensors: n above cap");

    MpsTensors t;
    t.lambdas = lambdas;
    t.n = static_cast<int>(lambdas.size());
    t.d_n = CMatrix::identity(1);
    t.c_n = CMatrix(1, 1);
    for (const cplx lambda : lambdas) {
        const WeightPair w = weights(k, lambda);
        CMatrix d_next = kron(detail::k_dd(w), t.d_n) + kron(detail::k_dc(w), t.c_n);
        CMatrix c_next = kron(detail::k_cc(w), t.c_n) + kron(detail::k_cd(w), t.d_n);
        t.d_n = std::move(d_next);
        t.c_n = std::move(c_next);
    }
    return t;
}

// Tr[ D^(x1-1) C D^(x2-x1-1) C ... C D^(L-xn) * boundary ] with an arbitrary
// boundary matrix; dense reference path.
inline cplx amplitude_with_boundary(const MpsTensors& t, const CMatrix& boundary,
                                    const SpinConfiguration& cfg) {
    if (static_cast<int>(cfg.positions.size()) != t.n)
        throw BetheError(ErrorKind::Precondition, "amplitude: configuration n mismatch");
    cfg.validate();
    const std::size_t dim = t.d_n.rows();
    if (boundary.rows() != dim || boundary.cols() != dim)
        throw BetheError(ErrorKind::Precondition, "amplitude: boundary dimension mismatch");

    CMatrix acc = CMatrix::identity(dim);
    int prev = 0;
    for (const int x : cfg.positions) {
        for (int p = 0; p < x - prev - 1; ++p) acc = acc * t.d_n;
        acc = acc * t.c_n;
        prev = x;
    }
    for (int p = 0; p < cfg.chain_length - prev; ++p) acc = acc * t.d_n;
    return (acc * boundary).trace();
}

// Same trace evaluated against the rank-1 factorization of the boundary:
// Tr[ M q_n ] = left^T M right, walked right-to-left with matrix-vector
// products only.
inline cplx amplitude(const MpsTensors& t, const BoundaryTensors& b,
                      const SpinConfiguration& cfg) {
    if (b.n != t.n)
        throw BetheError(ErrorKind::Precondition, "amplitude: boundary n mismatch");
    if (static_cast<int>(cfg.positions.size()) != t.n)
        throw BetheError(ErrorKind::Precondition, "amplitude: configuration n mismatch");
    cfg.validate();

    std::vector<cplx> vec = b.right_vector;
    int prev = cfg.chain_length + 1;
    for (std::size_t i = cfg.positions.size(); i-- > 0;) {
        const int x = cfg.positions[i];
        for (int p = 0; p < prev - x - 1; ++p) vec = t.d_n * vec;
        vec = t.c_n * vec;
        prev = x;
    }
    for (int p = 0; p < prev - 1; ++p) vec = t.d_n * vec;

    cplx out(0.0, 0.0);
    for (std::size_t i = 0; i < vec.size(); ++i) out += b.left_vector[i] * vec[i];
    return out;
}

// Enumerates every configuration of the (L, n) sector and fills the sector
// state vector from the trace formula.
inline StateVector assemble_state(const MpsTensors& t, const BoundaryTensors& b,
                                  int chain_length) {
    if (t.n > kMaxExcitationsAssemble || chain_length > kMaxChainAssemble)
        throw BetheError(ErrorKind::SizeLimit, "assemble_state: (L, n) above cap");
    if (chain_length < t.n)
        throw BetheError(ErrorKind::Precondition, "assemble_state: L < n");

    const SectorBasis basis(chain_length, t.n);
    StateVector out;
    out.chain_length = chain_length;
    out.down_spins = t.n;
    out.amplitudes.resize(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        out.amplitudes[i] = amplitude(t, b, basis.config(i));
    return out;
}

}  // namespace bethemps
