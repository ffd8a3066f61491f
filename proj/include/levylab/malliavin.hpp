#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levylab/simulate.hpp"

namespace levylab {

/// Extended state: endpoint, accumulated Malliavin matrix
/// V = sum nu(h z) gamma'(h z) gamma'(h z)^T over jumps, and optional
/// auxiliary components driven by bounded maps G_j(h z).
struct MalliavinSample {
    VectorXd x_end;
    Eigen::MatrixXd v;             // symmetric PSD d x d
    std::vector<VectorXd> extras;  // components of the big-space state x^l
    std::int64_t n_jumps = 0;
};

/// Auxiliary coordinate map: |G(z)| <= C |z|^2 near 0, compact support.
struct ExtraMap {
    int dim = 1;
    std::function<void(double, Eigen::Ref<VectorXd>)> map;
    std::string label;
};

/// Flat batch of extended samples; column i is path i of the counter-derived
/// stream (seed, i), identical to the plain sampler's draws.
struct MalliavinBatch {
    Eigen::MatrixXd endpoints;  // d x n
    Eigen::MatrixXd v_packed;   // d(d+1)/2 x n, upper triangle row-wise
    Eigen::MatrixXd extras;     // total extra dim x n
    std::vector<std::int64_t> n_jumps;

    std::int64_t size() const { return endpoints.cols(); }
    Eigen::MatrixXd v_matrix(std::int64_t i) const;
    /// <V xi, xi> for column i.
    double v_quadratic_form(std::int64_t i, const VectorXd& xi) const;
};

class MalliavinDivergence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shares the jump draws of the plain sampler (same stream consumption, so
/// endpoints coincide bit for bit in the intrinsic convention) and
/// accumulates V and the extras on each jump.
class MalliavinSampler {
  public:
    MalliavinSampler(const LevyModel& model, const SimConfig& cfg,
                     std::vector<ExtraMap> extras = {});

    /// One jump applied to an extended state; exposed so degenerate
    /// single-jump cases are testable directly.
    void apply_jump(MalliavinSample& state, double z) const;

    MalliavinSample sample(const VectorXd& x0, RngStream& stream) const;

    const JumpSampler& jumps() const { return jumps_; }
    const Eigen::MatrixXd& v_drift_rate() const { return v_drift_rate_; }

  private:
    const LevyModel& model_;
    JumpSampler jumps_;
    std::vector<ExtraMap> extras_;
    Eigen::MatrixXd v_drift_rate_;        // compensation of the truncated V jumps
    std::vector<VectorXd> extra_drift_;   // same for the extras
    int total_extra_dim_ = 0;
};

MalliavinSample sample_extended(const LevyModel& model, const SimConfig& cfg,
                                const std::vector<ExtraMap>& extras, const VectorXd& x0,
                                RngStream& stream);

MalliavinBatch sample_extended_batch(const LevyModel& model, const SimConfig& cfg,
                                     const std::vector<ExtraMap>& extras = {},
                                     const VectorXd& x0 = VectorXd());

/// log E[exp(-2 beta <V xi, xi>)] in closed form:
/// (t/h) int (exp[-2 beta nu(hz) <gamma'(hz), xi>^2] - 1) g(z) dz.
double laplace_exponent_v(const LevyModel& model, double h, double t, double beta,
                          const VectorXd& xi);

/// Gamma-integral upper bound of E[<V xi, xi>^{-p}] (the Bismut route):
/// Gamma(p)^{-1} int_0^inf beta^{p-1} exp(laplace_exponent_v(beta)/2) dbeta.
/// Throws MalliavinDivergence when the integrand fails to decay, which is
/// the numerical signature of a Hypothesis-H violation in direction xi.
double inverse_moment_semianalytic(const LevyModel& model, double h, double t, double p,
                                   const VectorXd& xi);

struct MomentEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
    std::int64_t n = 0;
};

/// Monte Carlo E[||V||^p] (operator norm).
MomentEstimate moment_v(const LevyModel& model, const SimConfig& cfg, int p);

/// Monte Carlo E[min(<V xi,xi>^{-p}, cap)] from an existing batch; the
/// truncation keeps the estimate a lower bound, the right side for testing
/// the Bismut upper bound.
MomentEstimate inverse_moment_mc(const MalliavinBatch& batch, const VectorXd& xi, double p,
                                 double cap = 1e12);

/// Monte Carlo E[exp(-2 beta <V xi, xi>)] (martingale-identity cross-check).
MomentEstimate laplace_mc(const MalliavinBatch& batch, double beta, const VectorXd& xi);

struct ScalingFit {
    double p = 0.0;
    std::vector<double> h_grid;
    std::vector<double> log_moments;  // log of sup over directions of the inverse moment
    double fitted_slope = 0.0;        // estimates -n(p) of the h^{-n(p)} bound
    double r_squared = 0.0;
    bool pass = false;
};

struct ScalingOptions {
    int directions = 0;  // 0 -> 64 * d
    double t = 1.0;
};

/// Semianalytic sup over unit directions (quasi-uniform sphere sample plus
/// the eigenvectors of E[V]) of the inverse moment, fitted log-log in h.
ScalingFit fit_scaling(const LevyModel& model, double p, const std::vector<double>& h_grid,
                       const ScalingOptions& opts = {});

struct PolyTestFunction {
    std::function<double(const MalliavinSample&)> eval;
    int degree = 1;
    std::string label;
};

struct ExtendedMomentReport {
    std::vector<double> h_grid;
    std::vector<double> estimates;  // E[|f(x^l)|] per h
    std::vector<double> stderrs;
    double band_ratio = 0.0;  // max/min across the grid
    bool pass = false;        // uniform-boundedness proxy: band <= 10
};

ExtendedMomentReport extended_moment_check(const LevyModel& model, const std::vector<double>& h_grid,
                                           const PolyTestFunction& f,
                                           const std::vector<ExtraMap>& extras, std::int64_t n_paths,
                                           std::uint64_t seed, double t = 1.0, int workers = 0);

/// E[V] at (h, t) by quadrature: (t/h) int nu(hz) gamma'(hz) gamma'(hz)^T g dz.
Eigen::MatrixXd expected_v(const LevyModel& model, double h, double t);

}  // namespace levylab
