#include "levylab/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace levylab {

bool HamiltonianValue::finite() const {
    return std::isfinite(value) && grad.allFinite() && hess.allFinite() &&
           std::isfinite(quad_error);
}

HamiltonianValue hamiltonian(const LevyModel& model, const VectorXd& xi) {
    const int d = model.dim();
    if (xi.size() != d) throw std::invalid_argument("hamiltonian: xi has wrong dimension");
    if (!xi.allFinite()) throw std::invalid_argument("hamiltonian: xi must be finite");

    // Packed integrand [e^s - 1; gamma e^s; vech(gamma gamma^T) e^s].
    const int n = 1 + d + d * (d + 1) / 2;
    VectorXd gam(d);
    auto f = [&](double z, Eigen::Ref<VectorXd> out) {
        model.gamma(z, gam);
        const double s = gam.dot(xi);
        const double em1 = std::expm1(s);
        const double e = em1 + 1.0;
        out[0] = em1;
        int idx = 1;
        for (int i = 0; i < d; ++i) out[idx++] = gam[i] * e;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) out[idx++] = gam[i] * gam[j] * e;
    };
    auto q = model.integrate_vec(f, n);

    HamiltonianValue hv;
    hv.value = q.value[0];
    hv.grad = q.value.segment(1, d);
    hv.hess.resize(d, d);
    int idx = 1 + d;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            hv.hess(i, j) = q.value[idx];
            hv.hess(j, i) = q.value[idx];
            ++idx;
        }
    }
    hv.quad_error = q.error;
    if (!q.converged && std::isfinite(q.value[0])) {
        throw QuadratureError("hamiltonian: quadrature did not converge", q.value[0], q.error);
    }
    return hv;
}

double hamiltonian_value(const LevyModel& model, const VectorXd& xi) {
    const int d = model.dim();
    if (xi.size() != d) throw std::invalid_argument("hamiltonian_value: xi has wrong dimension");
    VectorXd gam(d);
    auto q = model.integrate([&](double z) {
        model.gamma(z, gam);
        return std::expm1(gam.dot(xi));
    });
    if (!q.converged && std::isfinite(q.value)) {
        throw QuadratureError("hamiltonian_value: quadrature did not converge", q.value, q.error);
    }
    return q.value;
}

double scaled_cumulant(const LevyModel& model, double h, double t, const VectorXd& xi) {
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("scaled_cumulant: h must be in (0,1]");
    if (!(t > 0.0)) throw std::invalid_argument("scaled_cumulant: t must be positive");
    return (t / h) * hamiltonian_value(model, h * xi);
}

}  // namespace levylab
