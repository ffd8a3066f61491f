#include "levylab/ratefn.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <queue>

#include "levylab/rng.hpp"

namespace levylab {

namespace {

double phi_value(const LevyModel& model, const VectorXd& alpha, const VectorXd& xi) {
    // Dual objective <alpha, xi> - H(xi); -inf when H overflows.
    const double h = hamiltonian_value(model, xi);
    if (!std::isfinite(h)) return -std::numeric_limits<double>::infinity();
    return alpha.dot(xi) - h;
}

}  // namespace

LegendreOutcome try_legendre(const LevyModel& model, const VectorXd& alpha,
                             const LegendreOptions& opts) {
    const int d = model.dim();
    if (alpha.size() != d) throw std::invalid_argument("legendre: alpha has wrong dimension");

    LegendreOutcome out;
    VectorXd xi = VectorXd::Zero(d);
    const double tol = opts.tol_scale * (1.0 + alpha.norm());

    HamiltonianValue hv = hamiltonian(model, xi);
    for (int it = 0; it <= opts.max_iterations; ++it) {
        const VectorXd grad_phi = alpha - hv.grad;
        const double gap = grad_phi.norm();
        out.point = RatePoint{alpha, alpha.dot(xi) - hv.value, xi, gap, it};
        if (gap <= tol) {
            out.status = LegendreStatus::Converged;
            return out;
        }
        if (xi.norm() > opts.xi_cap) {
            out.status = LegendreStatus::Infeasible;
            return out;
        }
        if (it == opts.max_iterations) break;

        VectorXd step;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hv.hess);
        if (ldlt.info() == Eigen::Success) {
            step = ldlt.solve(grad_phi);
        }
        if (step.size() != d || !step.allFinite() || step.dot(grad_phi) <= 0.0) {
            step = grad_phi;  // ascent fallback when the Hessian is unusable
        }

        const double phi0 = alpha.dot(xi) - hv.value;
        const double slope = grad_phi.dot(step);
        double s = 1.0;
        bool accepted = false;
        while (s >= 1e-14) {
            const VectorXd trial = xi + s * step;
            const double phi_t = phi_value(model, alpha, trial);
            if (std::isfinite(phi_t) && phi_t >= phi0 + 1e-4 * s * slope) {
                xi = trial;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            out.status = LegendreStatus::MaxIterations;  // stagnation
            return out;
        }
        hv = hamiltonian(model, xi);
        if (!hv.finite()) {
            out.status = LegendreStatus::MaxIterations;
            return out;
        }
    }
    out.status = LegendreStatus::MaxIterations;
    return out;
}

RatePoint legendre(const LevyModel& model, const VectorXd& alpha, const LegendreOptions& opts) {
    LegendreOutcome out = try_legendre(model, alpha, opts);
    if (out.status == LegendreStatus::Converged) return out.point;
    const char* why = out.status == LegendreStatus::Infeasible
                          ? "dual iterates diverged (velocity outside the reachable cone, "
                            "L(alpha) = +inf)"
                          : "no convergence within the iteration budget";
    throw SolverFailure(std::string("legendre: ") + why + "; last gap " +
                            std::to_string(out.point.gap) + " after " +
                            std::to_string(out.point.iterations) + " iterations",
                        std::move(out));
}

double rate_l(const LevyModel& model, const VectorXd& x, const VectorXd& y,
              const LegendreOptions& opts) {
    LegendreOutcome out = try_legendre(model, y - x, opts);
    switch (out.status) {
        case LegendreStatus::Converged: return out.point.value;
        case LegendreStatus::Infeasible: return std::numeric_limits<double>::infinity();
        default:
            throw SolverFailure("rate_l: legendre solve stalled", std::move(out));
    }
}

namespace {

// L(y - x) treating both failure modes as +inf; used by the ball minimizer
// whose trial points may step outside the cone during the line search.
double rate_or_inf(const LevyModel& model, const VectorXd& v, const LegendreOptions& opts,
                   LegendreOutcome* out = nullptr) {
    LegendreOutcome o = try_legendre(model, v, opts);
    const double val = o.status == LegendreStatus::Converged
                           ? o.point.value
                           : std::numeric_limits<double>::infinity();
    if (out) *out = std::move(o);
    return val;
}

VectorXd project_ball(const VectorXd& y, const VectorXd& center, double radius) {
    VectorXd diff = y - center;
    const double n = diff.norm();
    if (n <= radius) return y;
    return center + diff * (radius / n);
}

}  // namespace

BallRate rate_inf_ball(const LevyModel& model, const VectorXd& x, const VectorXd& center,
                       double radius, const LegendreOptions& opts) {
    if (!(radius > 0.0)) throw std::invalid_argument("rate_inf_ball: radius must be positive");
    const int d = model.dim();

    std::vector<VectorXd> starts;
    starts.push_back(center);
    for (int i = 0; i < d; ++i) {
        VectorXd e = VectorXd::Zero(d);
        e[i] = radius;
        starts.push_back(center + e);
        starts.push_back(center - e);
    }

    BallRate best;
    for (const auto& start : starts) {
        LegendreOutcome o;
        double f = rate_or_inf(model, start - x, opts, &o);
        if (!std::isfinite(f)) continue;
        VectorXd y = start;
        VectorXd xi = o.point.xi_star;  // envelope theorem: grad_y L(y - x) = xi_star
        int iters = 0;
        double step = radius;
        for (; iters < 500; ++iters) {
            VectorXd trial = project_ball(y - step * xi, center, radius);
            const double move = (trial - y).norm();
            if (move <= 1e-10 * (1.0 + radius)) break;
            LegendreOutcome ot;
            const double ft = rate_or_inf(model, trial - x, opts, &ot);
            if (ft < f - 1e-14 * (1.0 + std::abs(f))) {
                y = trial;
                f = ft;
                xi = ot.point.xi_star;
                o = std::move(ot);
                step = std::min(step * 2.0, 1e3);
            } else {
                step *= 0.5;
                if (step < 1e-12) break;
            }
        }
        if (f < best.value) {
            best.value = f;
            best.minimizer = y;
            best.at_minimizer = o.point;
            best.iterations = iters;
        }
    }
    if (!best.minimizer.size()) {
        throw SolverFailure("rate_inf_ball: every start point lies outside the reachable cone",
                            LegendreOutcome{});
    }
    return best;
}

std::vector<VectorXd> sphere_directions(int d, int count) {
    std::vector<VectorXd> dirs;
    dirs.reserve(count);
    if (d == 1) {
        dirs.push_back(VectorXd::Constant(1, 1.0));
        if (count > 1) dirs.push_back(VectorXd::Constant(1, -1.0));
        return dirs;
    }
    if (d == 2) {
        for (int j = 0; j < count; ++j) {
            const double th = 2.0 * M_PI * j / count;
            VectorXd u(2);
            u << std::cos(th), std::sin(th);
            dirs.push_back(u);
        }
        return dirs;
    }
    RngStream stream = make_stream(0x5EEDD1Au, 0);
    for (int j = 0; j < count; ++j) {
        VectorXd u(d);
        do {
            for (int i = 0; i < d; ++i) u[i] = stream.normal();
        } while (u.norm() < 1e-8);
        dirs.push_back(u / u.norm());
    }
    return dirs;
}

GrowthReport growth_check(const LevyModel& model, const std::vector<double>& radii) {
    for (double r : radii) {
        if (!(r >= 2.0)) throw std::invalid_argument("growth_check: radii must be >= 2");
    }
    LegendreOptions opts;
    opts.max_iterations = 120;
    opts.xi_cap = 300.0;

    GrowthReport report;
    const auto dirs = sphere_directions(model.dim(), 32 * model.dim());
    for (double r : radii) {
        GrowthRow row;
        row.radius = r;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        const double denom = r * std::log(r);
        for (const auto& u : dirs) {
            LegendreOutcome o = try_legendre(model, r * u, opts);
            if (o.status != LegendreStatus::Converged) {
                ++row.infinite_directions;
                continue;
            }
            const double ratio = o.point.value / denom;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        row.min_ratio = lo;
        row.max_ratio = hi;
        report.rows.push_back(row);
    }
    double min_lower = std::numeric_limits<double>::infinity();
    double max_upper = 0.0;
    double min_of_min = std::numeric_limits<double>::infinity();
    double max_of_min = 0.0;
    bool pass = true;
    for (const auto& row : report.rows) {
        min_lower = std::min(min_lower, row.min_ratio);
        max_upper = std::max(max_upper, row.max_ratio);
        min_of_min = std::min(min_of_min, row.min_ratio);
        max_of_min = std::max(max_of_min, row.min_ratio);
        if (!(row.min_ratio > 0.0) || !std::isfinite(row.min_ratio)) pass = false;
    }
    report.min_ratio_lower = min_lower;
    report.max_ratio_upper = max_upper;
    report.min_ratio_spread = min_of_min > 0.0 ? max_of_min / min_of_min
                                               : std::numeric_limits<double>::infinity();
    report.pass = pass;
    return report;
}

double PolyhedralMinorant::evaluate(const VectorXd& alpha) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : anchors) {
        best = std::max(best, a.value + a.xi.dot(alpha - a.alpha));
    }
    return best;
}

PolyhedralMinorant polyhedral_minorant(const LevyModel& model, double R, double chi,
                                       const MinorantOptions& opts) {
    if (!(R > 0.0) || !(chi > 0.0)) {
        throw std::invalid_argument("polyhedral_minorant: R and chi must be positive");
    }
    const int d = model.dim();
    LegendreOptions lopts;
    lopts.max_iterations = 120;
    lopts.xi_cap = opts.xi_cap;

    PolyhedralMinorant result;
    result.chi = chi;
    result.radius = R;
    result.xi_cap = opts.xi_cap;

    struct GridPoint {
        VectorXd alpha;
        double l_value;
        VectorXd xi;
        double minorant;  // current best supporting-plane value
    };
    std::vector<GridPoint> grid;

    auto add_grid_level = [&](int per_axis, bool skip_even) {
        // Cartesian grid over [-R, R]^d restricted to the ball; points where
        // the dual solve diverges (or needs |xi| beyond the cap) are skipped.
        // After a refinement the all-even index points coincide with the
        // previous level and are not re-evaluated.
        std::vector<int> idx(d, 0);
        while (true) {
            bool all_even = true;
            for (int i = 0; i < d; ++i) {
                if (idx[i] % 2 != 0) {
                    all_even = false;
                    break;
                }
            }
            if (!(skip_even && all_even)) {
                VectorXd a(d);
                for (int i = 0; i < d; ++i) {
                    a[i] = -R + 2.0 * R * idx[i] / (per_axis - 1);
                }
                if (a.norm() <= R) {
                    LegendreOutcome o = try_legendre(model, a, lopts);
                    if (o.status == LegendreStatus::Converged &&
                        o.point.xi_star.norm() <= opts.xi_cap) {
                        GridPoint gp;
                        gp.alpha = a;
                        gp.l_value = o.point.value;
                        gp.xi = o.point.xi_star;
                        gp.minorant = -std::numeric_limits<double>::infinity();
                        for (const auto& anchor : result.anchors) {
                            gp.minorant = std::max(
                                gp.minorant,
                                anchor.value + anchor.xi.dot(gp.alpha - anchor.alpha));
                        }
                        grid.push_back(std::move(gp));
                    }
                }
            }
            int i = 0;
            for (; i < d; ++i) {
                if (++idx[i] < per_axis) break;
                idx[i] = 0;
            }
            if (i == d) break;
        }
    };

    int per_axis = opts.initial_grid;
    add_grid_level(per_axis, false);
    const double target = 0.5 * chi;  // margin so an audit at 2x resolution stays below chi

    for (int level = 0; level <= opts.refinements; ++level) {
        while (true) {
            double worst_gap = -1.0;
            std::size_t worst = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double gap = grid[i].l_value - grid[i].minorant;
                if (gap > worst_gap) {
                    worst_gap = gap;
                    worst = i;
                }
            }
            result.achieved_gap = std::max(worst_gap, 0.0);
            if (worst_gap <= target || grid.empty()) break;
            if (static_cast<int>(result.anchors.size()) >= opts.max_anchors) {
                throw SolverFailure(
                    "polyhedral_minorant: anchor budget exhausted with sampled gap " +
                        std::to_string(worst_gap),
                    LegendreOutcome{});
            }
            PolyhedralMinorant::Anchor anchor;
            anchor.alpha = grid[worst].alpha;
            anchor.xi = grid[worst].xi;
            anchor.value = grid[worst].l_value;
            result.anchors.push_back(anchor);
            for (auto& gp : grid) {
                gp.minorant = std::max(gp.minorant,
                                       anchor.value + anchor.xi.dot(gp.alpha - anchor.alpha));
            }
        }
        if (level < opts.refinements) {
            per_axis = 2 * per_axis - 1;
            add_grid_level(per_axis, true);
        }
    }
    if (result.anchors.empty() && !grid.empty()) {
        // chi larger than every sampled value: one anchor still required
        PolyhedralMinorant::Anchor anchor;
        anchor.alpha = grid.front().alpha;
        anchor.xi = grid.front().xi;
        anchor.value = grid.front().l_value;
        result.anchors.push_back(anchor);
    }
    return result;
}

}  // namespace levylab
