#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levylab/curve.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

/// Parameters of the jump model. The density g has the exact power core
/// C |z|^{-1-alpha} on (0, cutoff_inner], is tapered to zero on
/// (cutoff_inner, 1) by the smoothstep u^2(3-2u), and vanishes outside
/// [-1, 1]. alpha must lie in the open interval (0,1).
struct ModelConfig {
    double alpha = 0.5;
    double big_c = 1.0;
    int d = 2;
    double cutoff_inner = 0.5;
    std::shared_ptr<const Curve> gamma;  // defaults to the monomial curve
    double outer_skew = 0.0;             // asymmetry of the smooth outer region, in (-1,1)
    bool enforce_hypothesis_h = true;
    int k_max = 0;  // 0 -> d + 4
    QuadratureConfig quadrature{};
};

struct HypothesisHReport {
    bool satisfied = false;
    int k_hyp = 0;          // smallest spanning order when satisfied
    int achieved_rank = 0;  // rank reached at k_max otherwise
    int k_max = 0;
    std::string to_string() const;
};

/// Spanning order of {gamma^(l)(0), l <= k} via singular values with a
/// relative threshold (1e-10 of the largest).
HypothesisHReport check_hypothesis_h(const Curve& curve, int k_max, double rank_threshold = 1e-10);

class LevyModel {
  public:
    /// Validates the configuration: alpha in (0,1), C > 0, d >= 1,
    /// gamma(0) = 0, the integral of (z^2 ^ 1) g finite, and Hypothesis H
    /// when enforcement is on.
    static LevyModel build(const ModelConfig& config);

    double alpha() const { return cfg_.alpha; }
    double big_c() const { return cfg_.big_c; }
    int dim() const { return cfg_.d; }
    double cutoff_inner() const { return cfg_.cutoff_inner; }
    double outer_skew() const { return cfg_.outer_skew; }
    int k_hyp() const { return k_hyp_; }
    bool hypothesis_h_enforced() const { return cfg_.enforce_hypothesis_h; }
    const QuadratureConfig& quadrature() const { return cfg_.quadrature; }
    const Curve& curve() const { return *cfg_.gamma; }
    double levy_mass_check() const { return eq1_integral_; }

    /// Jump density. Exact power law on the core, smoothstep taper outside.
    double g(double z) const;

    /// Malliavin weight: z^4 on the core, same taper, compact support.
    double nu(double z) const;

    void gamma(double z, Eigen::Ref<VectorXd> out) const { cfg_.gamma->value(z, out); }
    void gamma_prime(double z, Eigen::Ref<VectorXd> out) const {
        cfg_.gamma->derivative(z, 1, out);
    }
    VectorXd gamma(double z) const { return cfg_.gamma->value(z); }
    VectorXd gamma_prime(double z) const { return cfg_.gamma->derivative(z, 1); }

    /// Closed-form mass of the power core: int_a^b C z^{-1-alpha} dz for
    /// 0 < a < b <= cutoff_inner (one side only).
    double core_mass(double a, double b) const;

    /// int f(z) g(z) dz over |z| in [z_lo, z_hi] (both sides). The core part
    /// is integrated in the substituted variable w = sign(z) |z|^{1-alpha},
    /// which removes the singularity for integrands of linear order.
    QuadOutcome<double> integrate(const std::function<double(double)>& f, double z_lo = 0.0,
                                  double z_hi = 1.0) const;

    /// Vector-valued version; f fills a preallocated n-vector.
    QuadOutcome<VectorXd> integrate_vec(const std::function<void(double, Eigen::Ref<VectorXd>)>& f,
                                        int n, double z_lo = 0.0, double z_hi = 1.0) const;

  private:
    explicit LevyModel(ModelConfig cfg) : cfg_(std::move(cfg)) {}
    std::vector<TaggedInterval> domain(double z_lo, double z_hi) const;

    ModelConfig cfg_;
    int k_hyp_ = 0;
    double eq1_integral_ = 0.0;
};

/// The shared integration primitive: int f(z) g(z) dz over the whole line.
/// Throws QuadratureError when the panel budget is exhausted.
double levy_integral(const LevyModel& model, const std::function<double(double)>& f);

/// Default model of the artifact: d = 2, gamma = (z, z^2), alpha = 0.5.
LevyModel default_model(double alpha = 0.5, int d = 2);

}  // namespace levylab
