#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "levylab/simulate.hpp"

namespace levylab {

struct DensityEstimate {
    double h = 0.0;
    VectorXd x, y;
    double ball_radius = 0.0;
    double value = 0.0;   // weighted hits / (sum of weights * ball volume)
    double stderr_value = 0.0;
    double log_value = 0.0;
    double stderr_log = 0.0;
    double n_effective = 0.0;
    std::int64_t hits = 0;
    bool zero_hits = false;
    std::string note;
};

/// Ball-counting heat-kernel estimate at p_t^h(x, y). The tilt defaults to
/// xi_star(y - x), which recentres the sampled endpoints at y.
DensityEstimate estimate_density(const LevyModel& model, const SimConfig& cfg, const VectorXd& x,
                                 const VectorXd& y, double radius);

DensityEstimate density_from_batch(const PathBatch& batch, double h, const VectorXd& x,
                                   const VectorXd& y, double radius);

struct SweepRow {
    double h = 0.0;
    double log_est = 0.0;
    double h_log_est = 0.0;
    double neg_rate = 0.0;
    double slack = 0.0;  // h_log_est - neg_rate; the upper bound asks slack <= chi_tol
    double stderr_log = 0.0;
    std::int64_t hits = 0;
    std::string verdict;  // PASS / FAIL / INCONCLUSIVE per row
};

struct SweepTable {
    std::vector<SweepRow> rows;  // sorted by decreasing h
    std::string verdict;         // PASS / FAIL / INCONCLUSIVE
    double chi_tol = 0.2;
    double rate = 0.0;           // l(x,y) or inf over the ball
    std::string kind;            // "varadhan" or "wf"
};

struct SweepConfig {
    std::vector<double> h_grid;  // decreasing values in (0,1]
    std::int64_t n_paths = 200000;
    std::uint64_t seed = 0;
    double chi_tol = 0.2;
    double radius_c = 0.25;  // ball radius rule r = max(0.05, c sqrt(h))
    double t = 1.0;
    int workers = 0;
};

/// Theorem-2 sweep: h log p_hat(x,y) against -l(x,y). Any zero-hit row makes
/// the whole table INCONCLUSIVE. PASS needs slack <= chi_tol on every row
/// and a non-increasing slack sequence along the decreasing-h rows.
SweepTable varadhan_sweep(const LevyModel& model, const VectorXd& x, const VectorXd& y,
                          const SweepConfig& cfg);

/// Theorem-1 sweep: h log P_hat[ball] against -inf_ball l(x, .).
SweepTable wf_sweep(const LevyModel& model, const VectorXd& x, const VectorXd& center,
                    double radius, const SweepConfig& cfg);

}  // namespace levylab
