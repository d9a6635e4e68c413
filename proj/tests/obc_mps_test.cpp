#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "bethemps/bethe.hpp"
#include "bethemps/exact_diag.hpp"
#include "bethemps/obc_mps.hpp"
#include "bethemps/oracle.hpp"
#include "test_util.hpp"

using namespace bethemps;

namespace {

const double kHalfPi = std::numbers::pi / 2.0;

// Independent reference for the site matrices: the literal product of four
// embedded L-operators on (aux pair 2) x (aux pair 1) x (physical site), the
// underlined factors transposed in their own auxiliary space, bracketed with
// the physical in/out states.
std::pair<CMatrix, CMatrix> site_tensors_by_product(const ModelKernel& k, cplx l1, cplx l2) {
    const TensorIndexLayout layout{{2, 2, 2, 2, 2}};  // 2bar, 2und, 1bar, 1und, phys
    auto factor = [&](cplx lambda, std::size_t aux_slot, bool transpose_aux) {
        CMatrix m = embed(l_operator(k, lambda), layout, {aux_slot, 4});
        if (transpose_aux) m = partial_transpose(m, layout, aux_slot);
        return m;
    };
    const CMatrix prod = factor(l2, 0, false) * factor(l2, 1, true) * factor(l1, 2, false) *
                         factor(l1, 3, true);
    CMatrix d2(16, 16), c2(16, 16);
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
            d2(r, c) = prod(2 * r + 0, 2 * c + 0);  // <up| ... |up>
            c2(r, c) = prod(2 * r + 1, 2 * c + 0);  // <down| ... |up>
        }
    return {d2, c2};
}

StateVector oracle_in_sector(const ModelKernel& k, int chain_length,
                             const std::vector<cplx>& lambdas) {
    const StateVector full = bethe_state_oracle(k, chain_length, lambdas);
    const SectorBasis basis(chain_length, static_cast<int>(lambdas.size()));
    return restrict_to_sector(full, basis, nullptr);
}

}  // namespace

TEST_CASE("boundary tensors") {
    const BoundaryTensors b = build_boundary(1);

    CHECK(std::abs(b.q_single(1, 0) - cplx(1.0, 0.0)) == 0.0);
    CHECK(std::abs(b.q_single(0, 0)) + std::abs(b.q_single(0, 1)) +
              std::abs(b.q_single(1, 1)) ==
          0.0);

    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const bool corner = (i == 0 || i == 3) && (j == 0 || j == 3);
            CHECK(b.q_tilde(i, j) == (corner ? cplx(1.0, 0.0) : cplx(0.0, 0.0)));
        }

    // exactly two unit entries, first and last row of the second column
    CHECK(b.q_script(0, 1) == cplx(1.0, 0.0));
    CHECK(b.q_script(3, 1) == cplx(1.0, 0.0));
    double rest = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (!((i == 0 || i == 3) && j == 1)) rest += std::abs(b.q_script(i, j));
    CHECK(rest == 0.0);

    // nilpotency, exactly
    CHECK((b.q_script * b.q_script).max_abs() == 0.0);
    CHECK((b.q_n * b.q_n).max_abs() == 0.0);

    // rank-1 outer-product structure of q_n, entrywise
    const BoundaryTensors b2 = build_boundary(2);
    CHECK(max_abs_diff(b2.q_n, kron(b.q_script, b.q_script)) == 0.0);
    for (std::size_t i = 0; i < b2.q_n.rows(); ++i)
        for (std::size_t j = 0; j < b2.q_n.cols(); ++j)
            CHECK(b2.q_n(i, j) == b2.right_vector[i] * b2.left_vector[j]);

    const BoundaryTensors b0 = build_boundary(0);
    CHECK(b0.q_n.rows() == 1);
    CHECK(b0.q_n(0, 0) == cplx(1.0, 0.0));

    CHECK_THROWS_AS(build_boundary(9), BetheError);
}

TEST_CASE("one-rapidity site matrices") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const cplx lambda(0.0, kHalfPi);
    const WeightPair w = weights(k, lambda);
    const MpsTensors t = build_site_tensors(k, {lambda});

    // D_1 pattern
    CHECK(std::abs(t.d_n(0, 0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(t.d_n(1, 1) - w.b) < 1e-15);
    CHECK(std::abs(t.d_n(2, 2) - w.b) < 1e-15);
    CHECK(std::abs(t.d_n(3, 0) - w.c * w.c) < 1e-15);
    CHECK(std::abs(t.d_n(3, 3) - w.b * w.b) < 1e-15);
    // C_1 pattern
    CHECK(std::abs(t.c_n(0, 2) - w.c) < 1e-15);
    CHECK(std::abs(t.c_n(1, 0) - w.b * w.c) < 1e-15);
    CHECK(std::abs(t.c_n(1, 3) - w.b * w.c) < 1e-15);
    CHECK(std::abs(t.c_n(3, 2) - w.c) < 1e-15);

    // frozen values at this point: c^2 = -2, b c = -i sqrt(2)
    CHECK(std::abs(t.d_n(3, 0) - cplx(-2.0, 0.0)) < 1e-13);
    CHECK(std::abs(t.c_n(1, 0) - cplx(0.0, -std::sqrt(2.0))) < 1e-13);

    int d_nonzero = 0, c_nonzero = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            if (std::abs(t.d_n(i, j)) > 0.0) ++d_nonzero;
            if (std::abs(t.c_n(i, j)) > 0.0) ++c_nonzero;
        }
    CHECK(d_nonzero == 5);
    CHECK(c_nonzero == 4);
}

TEST_CASE("two-rapidity recursion against the quadruple product") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const cplx l1(0.31, 0.22), l2(-0.47, 0.18);
    const MpsTensors t = build_site_tensors(k, {l1, l2});
    const auto [d_ref, c_ref] = site_tensors_by_product(k, l1, l2);
    CHECK(max_abs_diff(t.d_n, d_ref) < 1e-12);
    CHECK(max_abs_diff(t.c_n, c_ref) < 1e-12);

    const ModelKernel kr = ModelKernel::rational();
    const MpsTensors tr = build_site_tensors(kr, {l1, l2});
    const auto [dr_ref, cr_ref] = site_tensors_by_product(kr, l1, l2);
    CHECK(max_abs_diff(tr.d_n, dr_ref) < 1e-13);
    CHECK(max_abs_diff(tr.c_n, cr_ref) < 1e-13);
}

TEST_CASE("three-site amplitudes reproduce the closed-form triple") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const SolverConfig cfg{};
    const std::vector<cplx> roots = {
        cplx(0.0, kHalfPi),
        solve_bae(k, 3, {cplx(0.0, 0.4)}, cfg).lambdas[0],
        solve_bae(k, 3, {cplx(-0.8, 1.5)}, cfg).lambdas[0],
    };

    for (const cplx root : roots) {
        const WeightPair w = weights(k, root);
        const MpsTensors t = build_site_tensors(k, {root});
        const BoundaryTensors b = build_boundary(1);
        const cplx b2 = w.b * w.b, c2 = w.c * w.c;
        const cplx expected[3] = {1.0 + c2 + b2 * c2 + b2 * b2, w.b * (1.0 + b2 + c2),
                                  2.0 * b2};
        cplx amps[3];
        for (int x = 1; x <= 3; ++x)
            amps[x - 1] = amplitude(t, b, SpinConfiguration{{x}, 3});

        // one global lambda-dependent factor relates the raw traces to the
        // closed-form triple; measured to be b(lambda) c(lambda)
        const cplx factor = w.b * w.c;
        for (int i = 0; i < 3; ++i) CHECK(std::abs(amps[i] - factor * expected[i]) < 1e-12);
    }
}

TEST_CASE("removing the boundary matrix kills every amplitude") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    for (const auto& lams : {std::vector<cplx>{cplx(0.0, kHalfPi)},
                             std::vector<cplx>{cplx(0.35, 0.2), cplx(-0.4, 0.6)}}) {
        const MpsTensors t = build_site_tensors(k, lams);
        const int L = 4;
        const CMatrix id = CMatrix::identity(t.d_n.rows());
        const SectorBasis basis(L, t.n);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const cplx a = amplitude_with_boundary(t, id, basis.config(i));
            CHECK(std::abs(a) <= 1e-12);
        }
    }
}

TEST_CASE("dense and rank-1 amplitude paths agree") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const std::vector<cplx> lams = {cplx(0.35, 0.2), cplx(-0.4, 0.6)};
    const MpsTensors t = build_site_tensors(k, lams);
    const BoundaryTensors b = build_boundary(2);
    const SectorBasis basis(5, 2);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto cfg = basis.config(i);
        CHECK(std::abs(amplitude(t, b, cfg) - amplitude_with_boundary(t, b.q_n, cfg)) <=
              1e-12);
    }
}

TEST_CASE("two-site state matches the monodromy oracle entrywise") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const cplx lambda(0.27, -0.33);
    const MpsTensors t = build_site_tensors(k, {lambda});
    const BoundaryTensors b = build_boundary(1);
    const StateVector mps = assemble_state(t, b, 2);
    const StateVector orc = oracle_in_sector(k, 2, {lambda});
    CHECK(testutil::max_abs_diff_vec(mps.amplitudes, orc.amplitudes) <=
          1e-10 * std::max(orc.max_abs(), 1.0));
}

TEST_CASE("assembled eigenstate at the pi/2 root") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const MpsTensors t = build_site_tensors(k, {cplx(0.0, kHalfPi)});
    const BoundaryTensors b = build_boundary(1);
    const StateVector state = assemble_state(t, b, 3).normalized();

    // (|up up down> - |down up up>)/sqrt(2) up to a global phase; sector order
    // is x=1, x=2, x=3
    CHECK(std::abs(state.amplitudes[1]) < 1e-12);
    CHECK(std::abs(std::abs(state.amplitudes[0]) - 1.0 / std::sqrt(2.0)) < 1e-12);
    const cplx ratio = state.amplitudes[2] / state.amplitudes[0];
    CHECK(std::abs(ratio + 1.0) < 1e-12);
}

TEST_CASE("empty excitation sector") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const MpsTensors t = build_site_tensors(k, {});
    const BoundaryTensors b = build_boundary(0);
    const StateVector state = assemble_state(t, b, 4);
    REQUIRE(state.amplitudes.size() == 1);
    CHECK(std::abs(state.amplitudes[0] - cplx(1.0, 0.0)) == 0.0);
}

TEST_CASE("non-root rapidities still match the oracle but are no eigenstate") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const std::vector<cplx> lams = {cplx(0.3, 0.2), cplx(-0.4, 0.15)};
    const MpsTensors t = build_site_tensors(k, lams);
    const BoundaryTensors b = build_boundary(2);
    const StateVector mps = assemble_state(t, b, 4);
    const StateVector orc = oracle_in_sector(k, 4, lams);

    CHECK(mps.max_abs() > 1e-6);
    CHECK(testutil::max_abs_diff_vec(mps.amplitudes, orc.amplitudes) <=
          1e-10 * orc.max_abs());

    // Rayleigh-quotient residual stays macroscopic away from a Bethe root
    const CMatrix h = build_hamiltonian_sector(k, 4, 2);
    const StateVector v = mps.normalized();
    const auto hv = h * v.amplitudes;
    cplx rayleigh(0.0, 0.0);
    for (std::size_t i = 0; i < hv.size(); ++i)
        rayleigh += std::conj(v.amplitudes[i]) * hv[i];
    double res = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i)
        res += std::norm(hv[i] - rayleigh * v.amplitudes[i]);
    CHECK(std::sqrt(res) > 1e-3);
}

TEST_CASE("state is invariant under rapidity permutations") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const std::vector<cplx> lams = {cplx(0.3, 0.2), cplx(-0.4, 0.15), cplx(0.12, -0.5)};
    const BoundaryTensors b = build_boundary(3);
    const StateVector s1 = assemble_state(build_site_tensors(k, lams), b, 5);
    const StateVector s2 = assemble_state(
        build_site_tensors(k, {lams[2], lams[0], lams[1]}), b, 5);
    CHECK(testutil::max_abs_diff_vec(s1.amplitudes, s2.amplitudes) <=
          1e-10 * std::max(s1.max_abs(), 1.0));
}

TEST_CASE("contract violations and size caps") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    const MpsTensors t1 = build_site_tensors(k, {cplx(0.3, 0.2)});
    const BoundaryTensors b2 = build_boundary(2);
    CHECK_THROWS_AS(amplitude(t1, b2, SpinConfiguration{{1, 2}, 3}), BetheError);

    const std::vector<cplx> five(5, cplx(0.3, 0.2));
    std::vector<cplx> distinct;
    for (int i = 0; i < 5; ++i) distinct.push_back(cplx(0.1 * (i + 1), 0.2));
    const MpsTensors t5 = build_site_tensors(k, distinct);
    const BoundaryTensors b5 = build_boundary(5);
    try {
        assemble_state(t5, b5, 12);
        CHECK(false);
    } catch (const BetheError& e) {
        CHECK(e.kind() == ErrorKind::SizeLimit);
    }
}
