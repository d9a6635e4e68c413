#pragma once

// Model parametrization for the six-vertex chain. Two kernels are supported:
// the trigonometric one with Delta = cosh(eta), and the rational one obtained
// from it by rescaling the rapidity (sinh -> identity, eta -> i, cosh -> 1).
// Everything downstream (R-matrix, L-operator, Bethe equations, energy) is
// written once in terms of sh/ch/eta so both kernels share one code path.

#include <cmath>
#include <complex>

#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"

namespace bethemps {

inline constexpr double kPoleGuard = 1e-12;

enum class KernelKind { Trigonometric, Rational };

class ModelKernel {
public:
    // Delta > 1, principal real eta = arccosh(Delta)
    static ModelKernel trigonometric(double delta) {
        if (!(delta > 1.0))
            throw BetheError(ErrorKind::Validation,
                             "trigonometric kernel needs Delta > 1 (or an explicit eta)");
        return ModelKernel(KernelKind::Trigonometric, delta, std::acosh(delta));
    }

    // explicit crossing parameter, Delta = cosh(eta)
    static ModelKernel trigonometric_eta(cplx eta) {
        return ModelKernel(KernelKind::Trigonometric, std::cosh(eta).real(), eta);
    }

    static ModelKernel rational() {
        return ModelKernel(KernelKind::Rational, 1.0, cplx(0.0, 1.0));
    }

    KernelKind kind() const { return kind_; }
    double delta() const { return delta_; }
    cplx eta() const { return eta_; }

    cplx sh(cplx z) const {
        return kind_ == KernelKind::Trigonometric ? std::sinh(z) : z;
    }
    cplx ch(cplx z) const {
        return kind_ == KernelKind::Trigonometric ? std::cosh(z) : cplx(1.0, 0.0);
    }

private:
    ModelKernel(KernelKind kind, double delta, cplx eta)
        : kind_(kind), delta_(delta), eta_(eta) {}

    KernelKind kind_;
    double delta_;
    cplx eta_;
};

struct WeightPair {
    cplx b;
    cplx c;
};

inline void require_pole_free(const ModelKernel& k, cplx denom_arg, const char* where) {
    if (std::abs(k.sh(denom_arg)) < kPoleGuard)
        throw BetheError(ErrorKind::DegenerateInput,
                         std::string(where) + ": rapidity hits a pole of the parametrization");
}

// b(lambda), c(lambda) entering the site tensors and the L-operator.
inline WeightPair weights(const ModelKernel& k, cplx lambda) {
    require_pole_free(k, lambda + k.eta() / 2.0, "weights");
    const cplx den = k.sh(lambda + k.eta() / 2.0);
    return {k.sh(lambda - k.eta() / 2.0) / den, k.sh(k.eta()) / den};
}

// Six-vertex R-matrix on V_a (x) V_b, six nonzero entries.
inline CMatrix r_matrix(const ModelKernel& k, cplx lambda) {
    require_pole_free(k, lambda + k.eta(), "r_matrix");
    const cplx den = k.sh(lambda + k.eta());
    const cplx bb = k.sh(lambda) / den;
    const cplx cc = k.sh(k.eta()) / den;
    CMatrix r(4, 4);
    r(0, 0) = 1.0;
    r(1, 1) = bb;
    r(1, 2) = cc;
    r(2, 1) = cc;
    r(2, 2) = bb;
    r(3, 3) = 1.0;
    return r;
}

// L-operator on auxiliary (slow factor) (x) physical (fast factor):
// L(lambda) = R(lambda - eta/2).
inline CMatrix l_operator(const ModelKernel& k, cplx lambda) {
    return r_matrix(k, lambda - k.eta() / 2.0);
}

}  // namespace bethemps
