#include "levylab/pathaction.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace levylab {

DiscretePath DiscretePath::straight(const VectorXd& x, const VectorXd& y, int segments) {
    DiscretePath p;
    p.times.resize(segments + 1);
    p.points.resize(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        const double t = static_cast<double>(i) / segments;
        p.times[i] = t;
        p.points[i] = x + t * (y - x);
    }
    return p;
}

void DiscretePath::validate() const {
    if (times.size() < 2 || times.size() != points.size()) {
        throw std::invalid_argument("DiscretePath: need matching times/points with >= 2 entries");
    }
    if (std::abs(times.front()) > 1e-15 || std::abs(times.back() - 1.0) > 1e-15) {
        throw std::invalid_argument("DiscretePath: time grid must span [0, 1]");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("DiscretePath: times must be strictly increasing");
        }
    }
}

double action(const LevyModel& model, const DiscretePath& path, const LegendreOptions& opts) {
    path.validate();
    double total = 0.0;
    for (int i = 0; i < path.segments(); ++i) {
        const double dt = path.times[i + 1] - path.times[i];
        const VectorXd v = (path.points[i + 1] - path.points[i]) / dt;
        LegendreOutcome o = try_legendre(model, v, opts);
        if (o.status == LegendreStatus::Infeasible) {
            return std::numeric_limits<double>::infinity();
        }
        if (o.status != LegendreStatus::Converged) {
            throw SolverFailure("action: legendre stalled on segment " + std::to_string(i),
                                std::move(o));
        }
        total += o.point.value * dt;
    }
    return total;
}

namespace {

// Action and gradient with respect to the stacked interior points. The
// gradient uses the envelope theorem: grad L(v) = xi_star(v).
struct ActionEval {
    double value = std::numeric_limits<double>::infinity();
    VectorXd grad;
    bool feasible = false;
};

ActionEval eval_interior(const LevyModel& model, const DiscretePath& grid, const VectorXd& x,
                         const VectorXd& y, const VectorXd& interior,
                         const LegendreOptions& opts) {
    const int d = model.dim();
    const int segs = grid.segments();
    ActionEval out;
    out.grad = VectorXd::Zero(interior.size());
    out.value = 0.0;

    auto point_at = [&](int i) -> VectorXd {
        if (i == 0) return x;
        if (i == segs) return y;
        return interior.segment(static_cast<Eigen::Index>(i - 1) * d, d);
    };

    std::vector<VectorXd> xi(segs);
    for (int i = 0; i < segs; ++i) {
        const double dt = grid.times[i + 1] - grid.times[i];
        const VectorXd v = (point_at(i + 1) - point_at(i)) / dt;
        LegendreOutcome o = try_legendre(model, v, opts);
        if (o.status != LegendreStatus::Converged) {
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.value += o.point.value * dt;
        xi[i] = o.point.xi_star;
    }
    // d/dp_j [ L(v_{j-1}) dt_{j-1} + L(v_j) dt_j ] = xi_{j-1} - xi_j
    for (int j = 1; j < segs; ++j) {
        out.grad.segment(static_cast<Eigen::Index>(j - 1) * d, d) = xi[j - 1] - xi[j];
    }
    out.feasible = true;
    return out;
}

}  // namespace

MinimizeResult minimize_action(const LevyModel& model, const VectorXd& x, const VectorXd& y,
                               int segments, const std::optional<DiscretePath>& initial,
                               const LegendreOptions& opts) {
    if (segments < 1) throw std::invalid_argument("minimize_action: need at least one segment");
    const int d = model.dim();

    DiscretePath grid = initial ? *initial : DiscretePath::straight(x, y, segments);
    if (initial) {
        grid.validate();
        if ((grid.points.front() - x).norm() > 1e-12 || (grid.points.back() - y).norm() > 1e-12) {
            throw std::invalid_argument("minimize_action: initial path violates the endpoints");
        }
        segments = grid.segments();
    }

    MinimizeResult result;
    if (segments == 1) {
        result.path = grid;
        result.value = rate_l(model, x, y, opts);
        return result;
    }

    VectorXd interior(static_cast<Eigen::Index>(segments - 1) * d);
    for (int j = 1; j < segments; ++j) {
        interior.segment(static_cast<Eigen::Index>(j - 1) * d, d) = grid.points[j];
    }

    ActionEval cur = eval_interior(model, grid, x, y, interior, opts);
    if (!cur.feasible) {
        throw SolverFailure("minimize_action: initial path has a segment outside the cone",
                            LegendreOutcome{});
    }

    // L-BFGS with Armijo backtracking on the convex discrete action.
    const int memory = 8;
    std::deque<VectorXd> s_list, y_list;
    std::deque<double> rho_list;
    VectorXd prev_x = interior, prev_g = cur.grad;

    const double grad_tol = 1e-9 * (1.0 + std::abs(cur.value));
    const int max_iter = 400;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (cur.grad.norm() <= grad_tol) break;

        // two-loop recursion
        VectorXd q = cur.grad;
        std::vector<double> alpha_mem(s_list.size());
        for (int i = static_cast<int>(s_list.size()) - 1; i >= 0; --i) {
            alpha_mem[i] = rho_list[i] * s_list[i].dot(q);
            q -= alpha_mem[i] * y_list[i];
        }
        if (!s_list.empty()) {
            const double gamma =
                s_list.back().dot(y_list.back()) / y_list.back().squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_list.size(); ++i) {
            const double beta = rho_list[i] * y_list[i].dot(q);
            q += (alpha_mem[i] - beta) * s_list[i];
        }
        VectorXd dir = -q;
        if (dir.dot(cur.grad) >= 0.0) dir = -cur.grad;

        const double slope = dir.dot(cur.grad);
        double step = 1.0;
        bool accepted = false;
        ActionEval next;
        while (step >= 1e-14) {
            const VectorXd trial = interior + step * dir;
            next = eval_interior(model, grid, x, y, trial, opts);
            if (next.feasible && next.value <= cur.value + 1e-4 * step * slope) {
                interior = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            result.stagnated = true;
            break;
        }

        VectorXd s_vec = interior - prev_x;
        VectorXd y_vec = next.grad - prev_g;
        const double sy = s_vec.dot(y_vec);
        if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
            s_list.push_back(std::move(s_vec));
            y_list.push_back(std::move(y_vec));
            rho_list.push_back(1.0 / sy);
            if (static_cast<int>(s_list.size()) > memory) {
                s_list.pop_front();
                y_list.pop_front();
                rho_list.pop_front();
            }
        }
        prev_x = interior;
        prev_g = next.grad;
        cur = next;
    }
    if (it == max_iter) result.stagnated = true;

    for (int j = 1; j < segments; ++j) {
        grid.points[j] = interior.segment(static_cast<Eigen::Index>(j - 1) * d, d);
    }
    result.path = grid;
    result.value = cur.value;
    result.iterations = it;
    return result;
}

}  // namespace levylab
