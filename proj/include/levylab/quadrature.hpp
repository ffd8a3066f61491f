#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace levylab {

/// Tolerances and budget for the adaptive quadrature shared by every module.
struct QuadratureConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_panels = 4096;
    double split_point = 0.0;  // singularity location of the Levy density
};

/// Result of an adaptive integration. `error` is the accumulated
/// Gauss-Kronrod error bound; when `converged` is false the value is the
/// best estimate reached within the panel budget.
template <class Value>
struct QuadOutcome {
    Value value{};
    double error = std::numeric_limits<double>::infinity();
    int panels = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best, double error_bound)
        : std::runtime_error(what), best_estimate(best), error_bound(error_bound) {}
    double best_estimate;
    double error_bound;
};

namespace quad_detail {

inline double sup_norm(double v) { return std::abs(v); }

template <class Derived>
double sup_norm(const Eigen::MatrixBase<Derived>& v) {
    return v.cwiseAbs().maxCoeff();
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
inline constexpr double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class Value, class F>
void gk15(F&& f, int tag, double a, double b, Value& k15_out, double& err_out) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Value fc = f(tag, mid);
    Value k15 = kKronrodW[7] * fc;
    Value g7 = kGaussW[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGkNodes[i];
        Value pair = f(tag, mid - dx) + f(tag, mid + dx);
        k15 += kKronrodW[i] * pair;
        if (i % 2 == 1) g7 += kGaussW[i / 2] * pair;
    }
    k15 *= half;
    g7 *= half;
    k15_out = k15;
    err_out = sup_norm(k15 - g7);
}

template <class Value>
struct Panel {
    double a, b;
    int tag;
    Value value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace quad_detail

/// A segment of the integration domain; `tag` selects which branch of the
/// integrand applies (used to mix substituted and direct variables).
struct TaggedInterval {
    double a, b;
    int tag = 0;
};

/// Globally adaptive Gauss-Kronrod integration over a union of intervals.
/// F is called as f(tag, x) and returns Value (double or Eigen vector).
template <class Value, class F>
QuadOutcome<Value> integrate_adaptive_tagged(F&& f, const std::vector<TaggedInterval>& domain,
                                             const QuadratureConfig& cfg) {
    using quad_detail::Panel;
    using quad_detail::sup_norm;

    QuadOutcome<Value> out;
    std::vector<Panel<Value>> heap;
    std::vector<Panel<Value>> frozen;  // panels too narrow to refine further
    heap.reserve(64);

    bool have_total = false;
    Value total{};
    double total_err = 0.0;
    int panels = 0;

    auto add_panel = [&](double a, double b, int tag, bool refinable) {
        Panel<Value> p;
        p.a = a;
        p.b = b;
        p.tag = tag;
        quad_detail::gk15(f, tag, a, b, p.value, p.err);
        if (!std::isfinite(sup_norm(p.value)) || !std::isfinite(p.err)) {
            p.err = std::numeric_limits<double>::infinity();
        }
        if (have_total) {
            total += p.value;
        } else {
            total = p.value;
            have_total = true;
        }
        total_err += p.err;
        ++panels;
        if (refinable) {
            heap.push_back(std::move(p));
            std::push_heap(heap.begin(), heap.end());
        } else {
            frozen.push_back(std::move(p));
        }
    };

    for (const auto& seg : domain) {
        if (!(seg.a < seg.b)) continue;
        add_panel(seg.a, seg.b, seg.tag, true);
    }
    if (!have_total) {
        out.value = Value{};
        out.error = 0.0;
        out.converged = true;
        return out;
    }

    auto target = [&]() {
        return std::max(cfg.abs_tol, cfg.rel_tol * sup_norm(total));
    };

    while (!heap.empty() && total_err > target() && panels < cfg.max_panels) {
        std::pop_heap(heap.begin(), heap.end());
        Panel<Value> worst = std::move(heap.back());
        heap.pop_back();
        if (!std::isfinite(worst.err)) {
            // A node evaluated to inf/nan; refining cannot recover.
            out.value = total;
            out.error = std::numeric_limits<double>::infinity();
            out.panels = panels;
            out.converged = false;
            return out;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const double width_floor =
            std::numeric_limits<double>::epsilon() *
            std::max({std::abs(worst.a), std::abs(worst.b), 1.0});
        if (worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b) {
            frozen.push_back(std::move(worst));
            continue;
        }
        total -= worst.value;
        total_err -= worst.err;
        --panels;
        add_panel(worst.a, mid, worst.tag, true);
        add_panel(mid, worst.b, worst.tag, true);
        if (total_err < 0) total_err = 0;
    }

    out.value = total;
    out.error = total_err;
    out.panels = panels;
    out.converged = std::isfinite(sup_norm(total)) && total_err <= target();
    return out;
}

/// Plain adaptive integration of f over [a, b].
template <class Value, class F>
QuadOutcome<Value> integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg) {
    auto wrap = [&f](int, double x) -> Value { return f(x); };
    return integrate_adaptive_tagged<Value>(wrap, {{a, b, 0}}, cfg);
}

inline void require_converged(const QuadOutcome<double>& q, const char* what) {
    if (!q.converged) {
        throw QuadratureError(std::string(what) + ": quadrature did not converge (error bound " +
                                  std::to_string(q.error) + ", best estimate " +
                                  std::to_string(q.value) + ")",
                              q.value, q.error);
    }
}

}  // namespace levylab
