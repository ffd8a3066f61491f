#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>

namespace levylab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Smooth jump curve z -> gamma(z) in R^d with gamma(0) = 0, exposed with
/// derivative access so the spanning order of Hypothesis H can be computed.
class Curve {
  public:
    explicit Curve(int dim) : dim_(dim) {}
    virtual ~Curve() = default;

    int dim() const { return dim_; }

    virtual void value(double z, Eigen::Ref<VectorXd> out) const = 0;

    /// d^order/dz^order gamma(z); order 0 is the value itself.
    /// The default uses high-order central differences, see fd_derivative.
    virtual void derivative(double z, int order, Eigen::Ref<VectorXd> out) const;

    VectorXd value(double z) const {
        VectorXd v(dim_);
        value(z, v);
        return v;
    }
    VectorXd derivative(double z, int order) const {
        VectorXd v(dim_);
        derivative(z, order, v);
        return v;
    }

  private:
    int dim_;
};

/// gamma_i(z) = sum_j coeff(i, j-1) z^j  (no constant term, so gamma(0)=0).
/// Derivatives are exact.
class PolynomialCurve : public Curve {
  public:
    explicit PolynomialCurve(MatrixXd coeff);

    /// gamma(z) = (z, z^2, ..., z^d), the curve of the simplified setting
    /// where the first d derivatives at 0 are independent.
    static std::shared_ptr<const PolynomialCurve> monomial(int d);

    void value(double z, Eigen::Ref<VectorXd> out) const override;
    void derivative(double z, int order, Eigen::Ref<VectorXd> out) const override;

    const MatrixXd& coefficients() const { return coeff_; }

  private:
    MatrixXd coeff_;  // d x max_power, column j-1 holds the z^j coefficients
};

/// Curve given by an arbitrary evaluator; derivatives fall back to central
/// finite differences with Richardson extrapolation.
class CallbackCurve : public Curve {
  public:
    CallbackCurve(int dim, std::function<void(double, Eigen::Ref<VectorXd>)> f)
        : Curve(dim), f_(std::move(f)) {}

    void value(double z, Eigen::Ref<VectorXd> out) const override { f_(z, out); }

  private:
    std::function<void(double, Eigen::Ref<VectorXd>)> f_;
};

namespace fd {

/// Step size for an order-n central difference. 1e-5 is kept for the low
/// orders; higher orders need larger steps to stay above roundoff.
double step_for_order(int order);

/// Order-n derivative of a scalar callable by fourth-order central
/// differences at steps {h, 2h} combined by one Richardson level.
double derivative(const std::function<double(double)>& f, double z, int order);

}  // namespace fd

}  // namespace levylab
