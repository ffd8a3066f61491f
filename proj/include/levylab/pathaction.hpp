#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "levylab/ratefn.hpp"

namespace levylab {

/// Piecewise-linear path on a strictly increasing grid t_0 = 0 < ... < t_N = 1.
struct DiscretePath {
    std::vector<double> times;
    std::vector<VectorXd> points;

    int segments() const { return static_cast<int>(times.size()) - 1; }
    static DiscretePath straight(const VectorXd& x, const VectorXd& y, int segments);
    void validate() const;
};

/// S(path) = sum_i L((p_{i+1} - p_i) / dt_i) dt_i; exact for piecewise-linear
/// paths. +inf when a segment velocity leaves the reachable cone.
double action(const LevyModel& model, const DiscretePath& path, const LegendreOptions& opts = {});

struct MinimizeResult {
    DiscretePath path;
    double value = 0.0;
    int iterations = 0;
    bool stagnated = false;  // descent stopped early; value is the best found
};

/// Minimizes the discretized action over the interior points by L-BFGS
/// initialized at the straight line (or at `initial` when supplied). The
/// discrete problem is convex because L is, so descent reaches the global
/// minimum; by Jensen the optimum is the straight line and the value equals
/// L(y - x) up to solver tolerance.
MinimizeResult minimize_action(const LevyModel& model, const VectorXd& x, const VectorXd& y,
                               int segments, const std::optional<DiscretePath>& initial = {},
                               const LegendreOptions& opts = {});

}  // namespace levylab
