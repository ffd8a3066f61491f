#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levylab/model.hpp"
#include "levylab/rng.hpp"

namespace levylab {

/// x-increment convention per jump. Scaled is the h z' form of the scaled
/// generator (x += h gamma(z)); Intrinsic is the Malliavin-generator form
/// (x += gamma(h z)). Both share the jump intensity (1/h) g(z) dz.
enum class JumpConvention { Scaled, Intrinsic };

struct SimConfig {
    double h = 1.0;
    double t = 1.0;
    double eps_cut = 0.0;  // 0 resolves the automatic rule
    std::int64_t n_paths = 1;
    std::uint64_t seed = 0;
    std::optional<VectorXd> tilt;  // Esscher tilt eta (Scaled convention only)
    JumpConvention convention = JumpConvention::Scaled;
    int workers = 0;  // 0 -> LEVYLAB_WORKERS or hardware concurrency
};

struct TrajectorySample {
    VectorXd endpoint;
    std::int64_t n_jumps = 0;
    double log_weight = 0.0;  // 0 when untilted
};

/// Flat storage of a deterministic batch: column i of `endpoints` belongs to
/// path i whose stream is derived from (seed, i) alone, so the batch is
/// bit-identical for every worker count.
struct PathBatch {
    Eigen::MatrixXd endpoints;  // d x n
    Eigen::VectorXd log_weights;
    std::vector<std::int64_t> n_jumps;

    std::int64_t size() const { return endpoints.cols(); }
};

/// Jump machinery shared by the plain and the Malliavin samplers: Poisson
/// counts above the truncation radius, exact inverse-CDF sampling on the
/// power core, piecewise-envelope rejection for the smooth tail and the
/// exponential tilt, and the deterministic small-jump drift.
class JumpSampler {
  public:
    JumpSampler(const LevyModel& model, const SimConfig& cfg);

    double eps() const { return eps_; }
    double lambda() const { return lambda_; }                    // tilted total rate, per unit time
    const VectorXd& drift_rate() const { return drift_rate_; }   // x-space drift, per unit time
    double small_jump_var_bound() const { return var_bound_; }   // (1/h) int_{|z|<eps} |jump|^2 g
    double log_weight_offset() const { return logw_offset_; }    // (t/h) H(eta)
    bool tilted() const { return tilted_; }
    const SimConfig& config() const { return cfg_; }
    const LevyModel& model() const { return model_; }

    std::int64_t draw_count(RngStream& stream) const {
        return static_cast<std::int64_t>(stream.poisson(cfg_.t * lambda_));
    }
    /// One jump size z from the normalized (tilted) restricted density.
    double draw_jump_z(RngStream& stream) const;

    TrajectorySample sample(const VectorXd& x0, RngStream& stream) const;

  private:
    struct Segment {
        double a, b;        // |z| range
        double sign;        // +1 or -1
        bool core;          // power-law piece (exact inverse CDF)
        double pow_a;       // a^-alpha
        double pow_span;    // a^-alpha - b^-alpha
        double g_max;       // tail proposal height
        double tilt_env;    // upper bound of exp<gamma(z), eta> on the segment
        double cum_weight;  // cumulative mixture weight
    };

    const LevyModel& model_;
    SimConfig cfg_;
    double eps_ = 0.0;
    double lambda_ = 0.0;
    VectorXd drift_rate_;
    double var_bound_ = 0.0;
    double logw_offset_ = 0.0;
    bool tilted_ = false;
    VectorXd eta_;
    std::vector<Segment> segments_;
    double total_weight_ = 0.0;
};

/// Samples one endpoint of the process generated by (1/h) L^h at time t.
TrajectorySample sample_trajectory(const LevyModel& model, const SimConfig& cfg,
                                   const VectorXd& x0, RngStream& stream);

/// Tilted variant; requires cfg.tilt. Weighted expectations are unbiased for
/// the original law: log_weight = -<eta, (X_t - x0)>/h + (t/h) H(eta).
TrajectorySample sample_tilted(const LevyModel& model, const SimConfig& cfg, const VectorXd& x0,
                               RngStream& stream);

/// n_paths endpoints with counter-derived streams; embarrassingly parallel
/// and reproducible.
PathBatch sample_batch(const LevyModel& model, const SimConfig& cfg, const VectorXd& x0);

struct HitEstimate {
    double value = 0.0;        // self-normalized probability estimate
    double stderr_value = 0.0; // jackknife over 32 path blocks
    double log_value = 0.0;
    double stderr_log = 0.0;
    std::int64_t hits = 0;
    double n_effective = 0.0;
    VectorXd tilt_used;
    bool zero_hits = false;
    std::string note;
};

/// Self-normalized importance estimate of P_t^h[1_O](x) for the open ball
/// O = B(center, radius). When cfg.tilt is unset the tilt defaults to
/// xi_star at the minimizer of L over the ball.
HitEstimate hit_probability(const LevyModel& model, const SimConfig& cfg, const VectorXd& x,
                            const VectorXd& center, double radius);

/// Ball-probability estimate evaluated on an existing batch.
HitEstimate hit_probability_from_batch(const PathBatch& batch, const VectorXd& center,
                                       double radius);

/// Euclidean d-ball volume (the density normalizer).
double ball_volume(int d, double r);

}  // namespace levylab
