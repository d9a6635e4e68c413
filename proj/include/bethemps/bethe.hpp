#pragma once

// Open-boundary Bethe-ansatz equations: log-form residuals, a damped Newton
// solver over the 2n real rapidity coordinates, and the eigenenergy sum.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bethemps/dense.hpp"
#include "bethemps/errors.hpp"
#include "bethemps/kernel.hpp"

namespace bethemps {

struct SolverConfig {
    int max_iterations = 200;
    double tolerance = 1e-12;
    double fd_step = 1e-7;
    double damping = 1.0;

    void validate() const {
        if (max_iterations <= 0 || !(tolerance > 0.0) || !(fd_step > 0.0) ||
            fd_step >= 1e-3 || !(damping > 0.0) || damping > 1.0)
            throw BetheError(ErrorKind::Precondition,
                             "SolverConfig out of range (need max_iterations > 0, "
                             "tolerance > 0, 0 < fd_step < 1e-3, damping in (0, 1])");
    }
};

struct RapiditySet {
    std::vector<cplx> lambdas;
    int chain_length = 0;
    ModelKernel kernel = ModelKernel::rational();
    double residual_norm = 0.0;  // max |log-residual|
    bool converged = false;
};

namespace detail {

inline cplx reduce_log_branch(cplx f) {
    double im = f.imag();
    const double two_pi = 2.0 * std::numbers::pi;
    while (im > std::numbers::pi) im -= two_pi;
    while (im <= -std::numbers::pi) im += two_pi;
    return {f.real(), im};
}

inline cplx guarded_sh(const ModelKernel& k, cplx z, const char* where) {
    const cplx v = k.sh(z);
    if (std::abs(v) < kPoleGuard)
        throw BetheError(ErrorKind::DegenerateInput,
                         std::string(where) + ": sinh factor vanishes");
    return v;
}

inline cplx guarded_ch(const ModelKernel& k, cplx z, const char* where) {
    const cplx v = k.ch(z);
    if (std::abs(v) < kPoleGuard)
        throw BetheError(ErrorKind::DegenerateInput,
                         std::string(where) + ": cosh factor vanishes");
    return v;
}

}  // namespace detail

// Log-form residual of the OBC Bethe equations, one entry per rapidity. The
// product side and the boundary side are each assembled fully before taking
// the principal-branch logarithm; the difference is reduced to Im in (-pi,pi].
inline std::vector<cplx> bae_residual(const ModelKernel& k, int chain_length,
                                      const std::vector<cplx>& lambdas) {
    const auto n = lambdas.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(lambdas[i] - lambdas[j]) < 1e-9)
                throw BetheError(ErrorKind::DegenerateInput, "bae_residual: repeated rapidity");

    const cplx eta = k.eta();
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx li = lambdas[i];
        cplx lhs(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const cplx lj = lambdas[j];
            lhs *= detail::guarded_sh(k, li + lj + eta, "bae_residual") *
                   detail::guarded_sh(k, li - lj + eta, "bae_residual") /
                   (detail::guarded_sh(k, li + lj - eta, "bae_residual") *
                    detail::guarded_sh(k, li - lj - eta, "bae_residual"));
        }
        const cplx ch_ratio = detail::guarded_ch(k, li - eta / 2.0, "bae_residual") /
                              detail::guarded_ch(k, li + eta / 2.0, "bae_residual");
        const cplx sh_ratio = detail::guarded_sh(k, li + eta / 2.0, "bae_residual") /
                              detail::guarded_sh(k, li - eta / 2.0, "bae_residual");
        const cplx rhs = ch_ratio * ch_ratio * std::pow(sh_ratio, 2 * chain_length);
        out[i] = detail::reduce_log_branch(std::log(lhs) - std::log(rhs));
    }
    return out;
}

// Damped Newton iteration on bae_residual with a forward-difference Jacobian
// over the 2n real coordinates. Returns converged=false (not an error) when
// the iteration budget runs out.
inline RapiditySet solve_bae(const ModelKernel& k, int chain_length,
                             const std::vector<cplx>& initial_guess, const SolverConfig& cfg) {
    cfg.validate();
    const std::size_t n = initial_guess.size();
    auto pack = [n](const std::vector<cplx>& z) {
        std::vector<double> x(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            x[2 * i] = z[i].real();
            x[2 * i + 1] = z[i].imag();
        }
        return x;
    };
    auto unpack = [n](const std::vector<double>& x) {
        std::vector<cplx> z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = cplx(x[2 * i], x[2 * i + 1]);
        return z;
    };

    auto f = [&](const std::vector<double>& x) {
        const auto res = bae_residual(k, chain_length, unpack(x));
        std::vector<double> out(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            out[2 * i] = res[i].real();
            out[2 * i + 1] = res[i].imag();
        }
        return out;
    };

    NewtonOptions opt{cfg.max_iterations, cfg.tolerance, cfg.fd_step, cfg.damping};
    const NewtonResult nr = newton_solve(f, pack(initial_guess), opt);

    RapiditySet set;
    set.lambdas = unpack(nr.x);
    set.chain_length = chain_length;
    set.kernel = k;
    // report the true complex residual max, not the stacked-real one
    double rmax = 0.0;
    for (const cplx r : bae_residual(k, chain_length, set.lambdas))
        rmax = std::max(rmax, std::abs(r));
    set.residual_norm = rmax;
    set.converged = rmax <= cfg.tolerance;
    return set;
}

// E = sum_i 2 sh(eta)^2 / (sh(lambda_i + eta/2) sh(lambda_i - eta/2)) - Delta.
inline cplx energy(const ModelKernel& k, const std::vector<cplx>& lambdas) {
    const cplx eta = k.eta();
    cplx e(-k.delta(), 0.0);
    const cplx sh_eta = k.sh(eta);
    for (const cplx l : lambdas)
        e += 2.0 * sh_eta * sh_eta /
             (detail::guarded_sh(k, l + eta / 2.0, "energy") *
              detail::guarded_sh(k, l - eta / 2.0, "energy"));
    return e;
}

// Root identity modulo the i*pi periodicity of the trigonometric
// parametrization: sorted rapidities must match to tol after reducing
// Im(lambda) into (-pi/2, pi/2] (rational kernel: plain comparison).
inline bool same_solution(const ModelKernel& k, std::vector<cplx> a, std::vector<cplx> b,
                          double tol = 1e-8) {
    if (a.size() != b.size()) return false;
    auto canon = [&](cplx z) {
        if (k.kind() == KernelKind::Trigonometric) {
            double im = z.imag();
            while (im > std::numbers::pi / 2.0) im -= std::numbers::pi;
            while (im <= -std::numbers::pi / 2.0) im += std::numbers::pi;
            return cplx(z.real(), im);
        }
        return z;
    };
    auto less = [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    for (auto& z : a) z = canon(z);
    for (auto& z : b) z = canon(z);
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

}  // namespace bethemps
