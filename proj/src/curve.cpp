#include "levylab/curve.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace levylab {

namespace {

// Fourth-order-accurate central difference coefficients for derivatives
// 1..4: offsets are symmetric integers, weights divide by h^order.
struct Stencil {
    int half_width;
    std::array<double, 7> w;  // weights for offsets -half_width..half_width
};

const Stencil& stencil(int order) {
    static const Stencil s1{2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12, 0, 0}};
    static const Stencil s2{2, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0, 0}};
    static const Stencil s3{3, {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8}};
    static const Stencil s4{3, {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6}};
    switch (order) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        case 4: return s4;
        default: throw std::invalid_argument("fd: stencils available for orders 1..4 only");
    }
}

double apply_stencil(const std::function<double(double)>& f, double z, int order, double h) {
    const Stencil& s = stencil(order);
    double acc = 0.0;
    for (int k = -s.half_width; k <= s.half_width; ++k) {
        const double w = s.w[k + s.half_width];
        if (w != 0.0) acc += w * f(z + k * h);
    }
    return acc / std::pow(h, order);
}

}  // namespace

namespace fd {

double step_for_order(int order) {
    // Balance truncation O(h^4) against roundoff O(eps/h^order).
    const double eps = std::numeric_limits<double>::epsilon();
    return std::max(1e-5, std::pow(eps, 1.0 / (order + 4)));
}

double derivative(const std::function<double(double)>& f, double z, int order) {
    if (order == 0) return f(z);
    if (order > 4) {
        // Reduce recursively: order-4 stencil of the (order-4)-th derivative.
        auto lower = [&](double x) { return derivative(f, x, order - 4); };
        return apply_stencil(lower, z, 4, 4.0 * step_for_order(order));
    }
    const double h = step_for_order(order);
    const double d1 = apply_stencil(f, z, order, h);
    const double d2 = apply_stencil(f, z, order, 2.0 * h);
    return (16.0 * d1 - d2) / 15.0;  // cancels the h^4 truncation term
}

}  // namespace fd

void Curve::derivative(double z, int order, Eigen::Ref<VectorXd> out) const {
    if (order == 0) {
        value(z, out);
        return;
    }
    VectorXd buf(dim());
    for (int i = 0; i < dim(); ++i) {
        auto fi = [&](double x) {
            value(x, buf);
            return buf[i];
        };
        out[i] = fd::derivative(fi, z, order);
    }
}

PolynomialCurve::PolynomialCurve(MatrixXd coeff)
    : Curve(static_cast<int>(coeff.rows())), coeff_(std::move(coeff)) {
    if (coeff_.rows() < 1 || coeff_.cols() < 1) {
        throw std::invalid_argument("PolynomialCurve: empty coefficient matrix");
    }
}

std::shared_ptr<const PolynomialCurve> PolynomialCurve::monomial(int d) {
    MatrixXd c = MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) c(i, i) = 1.0;  // column j-1=i holds z^{i+1}
    return std::make_shared<const PolynomialCurve>(std::move(c));
}

void PolynomialCurve::value(double z, Eigen::Ref<VectorXd> out) const {
    const int p = static_cast<int>(coeff_.cols());
    out.setZero();
    double zj = 1.0;
    for (int j = 0; j < p; ++j) {
        zj *= z;  // z^{j+1}
        out += coeff_.col(j) * zj;
    }
}

void PolynomialCurve::derivative(double z, int order, Eigen::Ref<VectorXd> out) const {
    if (order == 0) {
        value(z, out);
        return;
    }
    const int p = static_cast<int>(coeff_.cols());
    out.setZero();
    for (int j = order; j <= p; ++j) {  // term c z^j, j >= order
        double fall = 1.0;
        for (int k = 0; k < order; ++k) fall *= (j - k);
        out += coeff_.col(j - 1) * (fall * std::pow(z, j - order));
    }
}

}  // namespace levylab
