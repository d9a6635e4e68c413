#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "bethemps/kernel.hpp"
#include "test_util.hpp"

using namespace bethemps;

namespace {

CMatrix swap_matrix() {
    CMatrix p(4, 4);
    p(0, 0) = p(3, 3) = 1.0;
    p(1, 2) = p(2, 1) = 1.0;
    return p;
}

double intertwining_residual(const ModelKernel& k, cplx lambda, cplx mu) {
    const TensorIndexLayout layout{{2, 2, 2}};
    const CMatrix r = embed(r_matrix(k, lambda - mu), layout, {0, 1});
    const CMatrix la = embed(l_operator(k, lambda), layout, {0, 2});
    const CMatrix lb = embed(l_operator(k, mu), layout, {1, 2});
    const CMatrix lhs = r * la * lb;
    const CMatrix rhs = lb * la * r;
    return max_abs_diff(lhs, rhs) / std::max({1.0, lhs.max_abs(), rhs.max_abs()});
}

}  // namespace

TEST_CASE("kernel construction") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    CHECK(k.eta().real() == doctest::Approx(1.3169578969248166).epsilon(1e-14));
    CHECK(k.eta().imag() == 0.0);
    CHECK(std::abs(std::cosh(k.eta()) - cplx(2.0, 0.0)) < 1e-12);

    const ModelKernel k1 = ModelKernel::trigonometric(std::cosh(1.0));
    CHECK(k1.eta().real() == doctest::Approx(1.0).epsilon(1e-14));

    const ModelKernel kr = ModelKernel::rational();
    CHECK(kr.delta() == 1.0);
    CHECK(kr.eta() == cplx(0.0, 1.0));

    try {
        ModelKernel::trigonometric(0.5);
        CHECK(false);
    } catch (const BetheError& e) {
        CHECK(e.kind() == ErrorKind::Validation);
    }
}

TEST_CASE("weights") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    {
        const WeightPair w = weights(k, k.eta() / 2.0);
        CHECK(std::abs(w.b) < 1e-15);
        CHECK(std::abs(w.c - cplx(1.0, 0.0)) < 1e-15);
    }
    {
        // i pi/2 at Delta = 2: b = 1, c = -i sqrt(2) exactly
        const WeightPair w = weights(k, cplx(0.0, std::numbers::pi / 2.0));
        CHECK(std::abs(w.b - cplx(1.0, 0.0)) < 1e-14);
        CHECK(std::abs(w.c - cplx(0.0, -std::sqrt(2.0))) < 1e-14);
        CHECK(std::isfinite(std::abs(w.b)));
        CHECK(std::isfinite(std::abs(w.c)));
    }
    {
        const ModelKernel kr = ModelKernel::rational();
        const WeightPair w = weights(kr, cplx(0.0, 0.5));
        CHECK(std::abs(w.b) < 1e-15);
        CHECK(std::abs(w.c - cplx(1.0, 0.0)) < 1e-15);
    }
    {
        // real lambda, real eta: b real
        const WeightPair w = weights(k, 0.42);
        CHECK(std::abs(w.b.imag()) < 1e-15);
    }
    // pole guard
    CHECK_THROWS_AS(weights(k, -k.eta() / 2.0), BetheError);
}

TEST_CASE("r_matrix structure") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    CHECK(max_abs_diff(r_matrix(k, 0.0), swap_matrix()) == 0.0);

    const CMatrix r = r_matrix(k, cplx(0.4, 0.3));
    CHECK(std::abs(r(1, 1) - r(2, 2)) == 0.0);
    CHECK(std::abs(r(1, 2) - r(2, 1)) == 0.0);
    int nonzero = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (std::abs(r(i, j)) > 0.0) ++nonzero;
    CHECK(nonzero == 6);

    CHECK(intertwining_residual(k, cplx(0.3, 0.1), cplx(-0.2, 0.4)) <= 1e-12);
}

TEST_CASE("l_operator") {
    const ModelKernel k = ModelKernel::trigonometric(2.0);
    CHECK(max_abs_diff(l_operator(k, k.eta() / 2.0), swap_matrix()) == 0.0);

    const cplx lam(0.0, std::numbers::pi / 2.0);
    const WeightPair w = weights(k, lam);
    const CMatrix l = l_operator(k, lam);
    CHECK(std::abs(l(1, 1) - w.b) < 1e-14);
    CHECK(std::abs(l(2, 2) - w.b) < 1e-14);

    // the four off-corner nonzeros are exactly {b, b, c, c} from weights
    const cplx lam2(0.25, -0.4);
    const WeightPair w2 = weights(k, lam2);
    const CMatrix l2 = l_operator(k, lam2);
    CHECK(std::abs(l2(1, 1) - w2.b) < 1e-14);
    CHECK(std::abs(l2(2, 2) - w2.b) < 1e-14);
    CHECK(std::abs(l2(1, 2) - w2.c) < 1e-14);
    CHECK(std::abs(l2(2, 1) - w2.c) < 1e-14);
}

TEST_CASE("explicit complex crossing parameter") {
    // purely imaginary eta reaches |Delta| < 1; the algebra is unchanged
    const ModelKernel k = ModelKernel::trigonometric_eta(cplx(0.0, 0.5));
    CHECK(k.delta() == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
    CHECK(intertwining_residual(k, cplx(0.3, 0.1), cplx(-0.2, 0.4)) <= 1e-12);
    const CMatrix r0 = r_matrix(k, 0.0);
    CHECK(std::abs(r0(1, 2) - cplx(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(r0(1, 1)) < 1e-14);
}

TEST_CASE("intertwining over 20 random pole-free pairs") {
    std::mt19937_64 rng(42);
    for (const ModelKernel& k :
         {ModelKernel::trigonometric(2.0), ModelKernel::rational()}) {
        int done = 0;
        while (done < 20) {
            const cplx lambda(testutil::uniform(rng, -1.0, 1.0),
                              testutil::uniform(rng, -1.5, 1.5));
            const cplx mu(testutil::uniform(rng, -1.0, 1.0),
                          testutil::uniform(rng, -1.5, 1.5));
            double res;
            try {
                res = intertwining_residual(k, lambda, mu);
            } catch (const BetheError&) {
                continue;  // pole-guarded draw, reject
            }
            CHECK(res <= 1e-12);
            ++done;
        }
    }
}
