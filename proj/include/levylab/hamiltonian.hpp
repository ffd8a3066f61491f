#pragma once

#include <Eigen/Core>

#include "levylab/model.hpp"

namespace levylab {

/// H(xi) with its gradient and Hessian, all computed by differentiating
/// under the integral (legitimate: g has compact support, so the cumulant
/// is finite and smooth for every xi).
struct HamiltonianValue {
    double value = 0.0;
    VectorXd grad;
    Eigen::MatrixXd hess;
    double quad_error = 0.0;

    bool finite() const;
};

/// H(xi) = int (exp<gamma(z),xi> - 1) g(z) dz together with
/// grad = int gamma e^... g dz and hess = int gamma gamma^T e^... g dz.
/// On exponent overflow the value is +inf and finite() is false.
HamiltonianValue hamiltonian(const LevyModel& model, const VectorXd& xi);

/// Value-only evaluation (used by line searches).
double hamiltonian_value(const LevyModel& model, const VectorXd& xi);

/// Log moment generating function of the increment over [0, t] of the
/// process generated by (1/h) L^h: (t/h) H(h xi).
double scaled_cumulant(const LevyModel& model, double h, double t, const VectorXd& xi);

}  // namespace levylab
