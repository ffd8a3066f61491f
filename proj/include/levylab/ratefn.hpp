#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "levylab/hamiltonian.hpp"
#include "levylab/model.hpp"

namespace levylab {

/// A velocity alpha with its Legendre value L(alpha), the maximizing dual
/// vector, and the duality-gap certificate |alpha - grad H(xi_star)|.
struct RatePoint {
    VectorXd alpha;
    double value = 0.0;
    VectorXd xi_star;
    double gap = 0.0;
    int iterations = 0;
};

enum class LegendreStatus {
    Converged,
    /// The dual iterates ran away: sup_xi <alpha,xi> - H(xi) = +inf. This
    /// happens for velocities outside the reachable cone (e.g. a negative
    /// component along an even-degree coordinate of gamma).
    Infeasible,
    MaxIterations,
};

struct LegendreOutcome {
    LegendreStatus status = LegendreStatus::MaxIterations;
    RatePoint point;  // last iterate; trustworthy only when Converged
};

struct LegendreOptions {
    double tol_scale = 1e-8;  // gap target is tol_scale * (1 + |alpha|)
    int max_iterations = 200;
    double xi_cap = 500.0;  // |xi| beyond this classifies the point as infeasible
};

class SolverFailure : public std::runtime_error {
  public:
    SolverFailure(const std::string& what, LegendreOutcome outcome)
        : std::runtime_error(what), outcome(std::move(outcome)) {}
    LegendreOutcome outcome;
};

/// Newton ascent with Armijo backtracking from xi = 0 for
/// L(alpha) = sup_xi { <alpha,xi> - H(xi) }. Under Hypothesis H the dual
/// Hessian is negative definite, so the maximizer is unique.
LegendreOutcome try_legendre(const LevyModel& model, const VectorXd& alpha,
                             const LegendreOptions& opts = {});

/// Strict form: throws SolverFailure unless the ascent converged.
RatePoint legendre(const LevyModel& model, const VectorXd& alpha, const LegendreOptions& opts = {});

/// l(x, y) = L(y - x): by convexity of L and Jensen's inequality the
/// straight constant-speed path is optimal. +inf when y - x is outside the
/// reachable cone.
double rate_l(const LevyModel& model, const VectorXd& x, const VectorXd& y,
              const LegendreOptions& opts = {});

struct BallRate {
    double value = std::numeric_limits<double>::infinity();
    VectorXd minimizer;
    RatePoint at_minimizer;  // Legendre data of the optimal velocity
    int iterations = 0;
};

/// inf over the closed ball |y - center| <= radius of L(y - x), by projected
/// gradient descent multi-started from the center and the 2d axis points.
BallRate rate_inf_ball(const LevyModel& model, const VectorXd& x, const VectorXd& center,
                       double radius, const LegendreOptions& opts = {});

struct GrowthRow {
    double radius = 0.0;
    double min_ratio = 0.0;  // min over sphere of L(alpha) / (|alpha| log |alpha|)
    double max_ratio = 0.0;  // max over the directions where L is finite
    int infinite_directions = 0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    double min_ratio_lower = 0.0;  // inf over rows of min_ratio
    double max_ratio_upper = 0.0;  // sup over rows of the finite max_ratio
    double min_ratio_spread = 0.0; // max/min of the per-radius minima
    bool pass = false;             // minima positive at every radius
};

/// Samples 32*d directions per radius and reports the normalized growth
/// ratio of Lemma 3. Directions where L = +inf are counted separately; the
/// paper's finiteness claim does not hold in directions the curve cannot
/// realize, see the module notes.
GrowthReport growth_check(const LevyModel& model, const std::vector<double>& radii);

struct PolyhedralMinorant {
    struct Anchor {
        VectorXd alpha;
        VectorXd xi;
        double value = 0.0;  // L(alpha)
    };
    std::vector<Anchor> anchors;
    double chi = 0.0;      // requested gap bound
    double radius = 0.0;   // stated ball |alpha| <= R
    double xi_cap = 0.0;   // feasibility cap used to carve out the domain
    double achieved_gap = 0.0;

    /// L'(alpha) = sup_i { L(alpha_i) + <xi_i, alpha - alpha_i> }.
    double evaluate(const VectorXd& alpha) const;
};

struct MinorantOptions {
    int max_anchors = 10000;
    int initial_grid = 17;   // points per axis of the starting grid
    int refinements = 3;     // each refinement doubles the grid resolution
    double xi_cap = 25.0;    // exclude the blow-up layer near the cone boundary
};

/// Greedy supporting-plane construction: anchors are inserted at the point
/// of maximal sampled gap on a refining grid over |alpha| <= R until the
/// gap drops below chi. Throws SolverFailure when the anchor budget is
/// exhausted.
PolyhedralMinorant polyhedral_minorant(const LevyModel& model, double R, double chi,
                                       const MinorantOptions& opts = {});

/// Deterministic quasi-uniform unit directions (exact angles for d = 2,
/// seeded low-discrepancy normalization otherwise).
std::vector<VectorXd> sphere_directions(int d, int count);

}  // namespace levylab
