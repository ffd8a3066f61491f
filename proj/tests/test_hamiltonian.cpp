#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "levylab/hamiltonian.hpp"
#include "levylab/rng.hpp"
#include "oracles.hpp"

using namespace levylab;

TEST_CASE("H(0) = 0 with grad equal to the mean drift and a PSD Hessian") {
    auto m = default_model();
    auto hv = hamiltonian(m, VectorXd::Zero(2));
    CHECK(std::abs(hv.value) <= 1e-10);

    const double m1 = oracles::levy_integral_dense(m, [&](double z) { return m.gamma(z)[0]; },
                                                   0.0, 1.0, 400000);
    const double m2 = oracles::levy_integral_dense(m, [&](double z) { return m.gamma(z)[1]; },
                                                   0.0, 1.0, 400000);
    CHECK(hv.grad[0] == doctest::Approx(m1).epsilon(1e-7));
    CHECK(hv.grad[1] == doctest::Approx(m2).epsilon(1e-7));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hv.hess);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * hv.hess.trace());
    CHECK((hv.hess - hv.hess.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("symmetric 1-d model gives an even Hamiltonian") {
    auto m = default_model(0.5, 1);
    VectorXd xi(1);
    for (double v : {0.3, 1.0, 2.5}) {
        xi[0] = v;
        const double plus = hamiltonian_value(m, xi);
        xi[0] = -v;
        const double minus = hamiltonian_value(m, xi);
        CHECK(plus == doctest::Approx(minus).epsilon(1e-9));
    }
}

TEST_CASE("value at xi=(1,1) matches the dense-grid oracle") {
    auto m = default_model();
    VectorXd xi(2);
    xi << 1.0, 1.0;
    auto hv = hamiltonian(m, xi);
    const double ref = oracles::levy_integral_dense(
        m, [&](double z) { return std::expm1(m.gamma(z).dot(xi)); });
    CHECK(hv.value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("gradient and Hessian match finite differences at random xi") {
    auto m = default_model();
    RngStream stream = make_stream(77, 0);
    const double fd_step = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd xi(2);
        xi << stream.normal(), stream.normal();
        xi *= 5.0 * stream.uniform() / std::max(1.0, xi.norm());
        auto hv = hamiltonian(m, xi);
        for (int i = 0; i < 2; ++i) {
            VectorXd e = VectorXd::Zero(2);
            e[i] = fd_step;
            const double fd =
                (hamiltonian_value(m, xi + e) - hamiltonian_value(m, xi - e)) / (2.0 * fd_step);
            CHECK(hv.grad[i] ==
                  doctest::Approx(fd).epsilon(1e-4).scale(std::max(1.0, hv.grad.norm())));
        }
        if (trial < 5) {  // Hessian columns against gradient differences
            for (int i = 0; i < 2; ++i) {
                VectorXd e = VectorXd::Zero(2);
                e[i] = fd_step;
                VectorXd fd =
                    (hamiltonian(m, xi + e).grad - hamiltonian(m, xi - e).grad) / (2.0 * fd_step);
                for (int j = 0; j < 2; ++j) {
                    CHECK(hv.hess(j, i) ==
                          doctest::Approx(fd[j]).epsilon(1e-3).scale(
                              std::max(1.0, hv.hess.norm())));
                }
            }
        }
    }
}

TEST_CASE("H is convex along random chords") {
    auto m = default_model();
    RngStream stream = make_stream(78, 0);
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd a(2), b(2);
        a << 4.0 * (stream.uniform() - 0.5), 4.0 * (stream.uniform() - 0.5);
        b << 4.0 * (stream.uniform() - 0.5), 4.0 * (stream.uniform() - 0.5);
        const double lam = stream.uniform();
        const double lhs = hamiltonian_value(m, lam * a + (1.0 - lam) * b);
        const double rhs =
            lam * hamiltonian_value(m, a) + (1.0 - lam) * hamiltonian_value(m, b);
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("Hessian is strictly positive definite under Hypothesis H") {
    auto m = default_model();
    RngStream stream = make_stream(79, 0);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd xi(2);
        xi << 3.0 * (stream.uniform() - 0.5), 3.0 * (stream.uniform() - 0.5);
        auto hv = hamiltonian(m, xi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hv.hess);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("scaled cumulant identities") {
    auto m = default_model();
    VectorXd xi(2);
    xi << 0.7, -0.2;
    CHECK(scaled_cumulant(m, 1.0, 1.0, xi) ==
          doctest::Approx(hamiltonian(m, xi).value).epsilon(1e-12));
    CHECK(scaled_cumulant(m, 0.25, 1.0, VectorXd::Zero(2)) == doctest::Approx(0.0));
    VectorXd e1(2);
    e1 << 1.0, 0.0;
    CHECK(scaled_cumulant(m, 0.25, 1.0, e1) ==
          doctest::Approx(4.0 * hamiltonian_value(m, 0.25 * e1)).epsilon(1e-12));
}
