#include "levylab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levylab/hamiltonian.hpp"
#include "levylab/parallel.hpp"
#include "levylab/ratefn.hpp"

namespace levylab {

namespace {

// Upper bound of <gamma(sign*u), eta> for u in [a, b], 0 < a < b. Exact for
// polynomial curves (monomial maxima sit at the endpoints); sampled with a
// small safety margin otherwise.
double tilt_exponent_bound(const Curve& curve, const VectorXd& eta, double a, double b,
                           double sign) {
    if (const auto* poly = dynamic_cast<const PolynomialCurve*>(&curve)) {
        const auto& c = poly->coefficients();
        double bound = 0.0;
        double sa = sign, sb = sign;  // sign^j * u^j evaluated at a and b
        double pa = a, pb = b;
        for (int j = 0; j < c.cols(); ++j) {
            const double q = eta.dot(c.col(j));
            bound += std::max(q * sa * pa, q * sb * pb);
            pa *= a;
            pb *= b;
        }
        return bound;
    }
    VectorXd gam(curve.dim());
    double worst = -std::numeric_limits<double>::infinity();
    const int grid = 33;
    for (int i = 0; i <= grid; ++i) {
        const double u = a + (b - a) * i / grid;
        curve.value(sign * u, gam);
        worst = std::max(worst, gam.dot(eta));
    }
    return worst + 0.05 * (std::abs(worst) + 1e-3);
}

}  // namespace

double ball_volume(int d, double r) {
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(r, d);
}

JumpSampler::JumpSampler(const LevyModel& model, const SimConfig& cfg)
    : model_(model), cfg_(cfg) {
    const int d = model.dim();
    const double h = cfg.h;
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("SimConfig: h must be in (0,1]");
    if (!(cfg.t > 0.0)) throw std::invalid_argument("SimConfig: t must be positive");
    if (cfg.n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    tilted_ = cfg.tilt.has_value() && cfg.tilt->size() > 0;
    if (tilted_) {
        if (cfg.convention != JumpConvention::Scaled) {
            throw std::invalid_argument(
                "SimConfig: the Esscher tilt is defined for the scaled convention only");
        }
        if (cfg.tilt->size() != d) throw std::invalid_argument("SimConfig: tilt has wrong size");
        eta_ = *cfg.tilt;
    } else {
        eta_ = VectorXd::Zero(d);
    }

    const double delta = model.cutoff_inner();
    VectorXd gam(d);

    // Jump size in x-space, by convention.
    auto x_jump = [&](double z, Eigen::Ref<VectorXd> out) {
        if (cfg_.convention == JumpConvention::Scaled) {
            model_.gamma(z, out);
            out *= h;
        } else {
            model_.gamma(h * z, out);
        }
    };

    // Truncation radius: largest eps with (1/h) int_{|z|<eps} |jump|^2 g <= 1e-4.
    auto var_below = [&](double eps) {
        auto q = model_.integrate(
            [&](double z) {
                x_jump(z, gam);
                return gam.squaredNorm();
            },
            0.0, eps);
        require_converged(q, "JumpSampler: small-jump variance");
        return q.value / h;
    };
    if (cfg_.eps_cut > 0.0) {
        // eps >= 1 is the degenerate no-jump configuration (everything is
        // compensated into the drift); otherwise the spec range (0, delta).
        eps_ = cfg_.eps_cut;
    } else {
        double lo = 1e-12, hi = 0.9 * delta;
        if (var_below(hi) <= 1e-4) {
            eps_ = hi;
        } else {
            for (int it = 0; it < 60; ++it) {
                const double mid = std::sqrt(lo * hi);
                (var_below(mid) <= 1e-4 ? lo : hi) = mid;
            }
            eps_ = lo;
        }
        cfg_.eps_cut = eps_;
    }
    if (!(eps_ > 0.0)) throw std::invalid_argument("SimConfig: eps_cut must be positive");
    var_bound_ = var_below(std::min(eps_, 1.0));

    // Total (tilted) jump rate and the small-jump compensation drift.
    const double support = 1.0;
    if (eps_ < support) {
        auto rate = model_.integrate(
            [&](double z) {
                model_.gamma(z, gam);
                return tilted_ ? std::exp(gam.dot(eta_)) : 1.0;
            },
            eps_, support);
        require_converged(rate, "JumpSampler: total rate");
        lambda_ = rate.value / h;
    } else {
        lambda_ = 0.0;
    }

    auto drift = model_.integrate_vec(
        [&](double z, Eigen::Ref<VectorXd> out) {
            x_jump(z, out);
            if (tilted_) {
                model_.gamma(z, gam);
                out *= std::exp(gam.dot(eta_));
            }
        },
        d, 0.0, std::min(eps_, support));
    if (!drift.converged) {
        throw QuadratureError("JumpSampler: compensation drift quadrature failed", 0.0,
                              drift.error);
    }
    drift_rate_ = drift.value / h;

    if (tilted_) {
        logw_offset_ = (cfg_.t / h) * hamiltonian_value(model_, eta_);
        if (!std::isfinite(logw_offset_) || !std::isfinite(lambda_)) {
            throw std::invalid_argument(
                "JumpSampler: tilted rate overflows; use a smaller tilt vector");
        }
    }

    // Proposal segments: inverse-CDF power core graded in w = z^{1-alpha},
    // constant-envelope pieces on the smooth tail.
    const int n_core = 40, n_tail = 24;
    const double q = 1.0 - model.alpha();
    for (double sign : {+1.0, -1.0}) {
        if (eps_ < delta) {
            const double wa = std::pow(eps_, q), wb = std::pow(delta, q);
            for (int i = 0; i < n_core; ++i) {
                Segment s;
                s.a = std::pow(wa + (wb - wa) * i / n_core, 1.0 / q);
                s.b = std::pow(wa + (wb - wa) * (i + 1) / n_core, 1.0 / q);
                if (i == 0) s.a = eps_;
                if (i == n_core - 1) s.b = delta;
                s.sign = sign;
                s.core = true;
                s.pow_a = std::pow(s.a, -model.alpha());
                s.pow_span = s.pow_a - std::pow(s.b, -model.alpha());
                s.g_max = 0.0;
                s.tilt_env =
                    tilted_ ? std::exp(tilt_exponent_bound(model.curve(), eta_, s.a, s.b, sign))
                            : 1.0;
                segments_.push_back(s);
            }
        }
        const double tail_lo = std::max(eps_, delta);
        if (tail_lo < support) {
            for (int i = 0; i < n_tail; ++i) {
                Segment s;
                s.a = tail_lo + (support - tail_lo) * i / n_tail;
                s.b = tail_lo + (support - tail_lo) * (i + 1) / n_tail;
                s.sign = sign;
                s.core = false;
                s.pow_a = 0.0;
                s.pow_span = 0.0;
                s.g_max = model.g(sign * s.a);  // g decreases in |z| on the taper
                s.tilt_env =
                    tilted_ ? std::exp(tilt_exponent_bound(model.curve(), eta_, s.a, s.b, sign))
                            : 1.0;
                segments_.push_back(s);
            }
        }
    }
    double cum = 0.0;
    for (auto& s : segments_) {
        const double base_mass = s.core ? model.big_c() * s.pow_span / model.alpha()
                                        : s.g_max * (s.b - s.a);
        cum += s.tilt_env * base_mass;
        s.cum_weight = cum;
    }
    total_weight_ = cum;
}

double JumpSampler::draw_jump_z(RngStream& stream) const {
    while (true) {
        const double pick = stream.uniform() * total_weight_;
        auto it = std::lower_bound(segments_.begin(), segments_.end(), pick,
                                   [](const Segment& s, double v) { return s.cum_weight < v; });
        if (it == segments_.end()) --it;
        const Segment& s = *it;
        double z;
        if (s.core) {
            const double u = stream.uniform();
            z = s.sign * std::pow(s.pow_a - u * s.pow_span, -1.0 / model_.alpha());
        } else {
            z = s.sign * (s.a + stream.uniform() * (s.b - s.a));
        }
        double accept;
        if (tilted_) {
            static thread_local VectorXd gam;
            gam.resize(model_.dim());
            model_.gamma(z, gam);
            const double tilt = std::exp(gam.dot(eta_));
            accept = s.core ? tilt / s.tilt_env
                            : tilt * model_.g(z) / (s.tilt_env * s.g_max);
        } else {
            accept = s.core ? 1.0 : model_.g(z) / s.g_max;
        }
        if (accept >= 1.0 || stream.uniform() < accept) return z;
    }
}

TrajectorySample JumpSampler::sample(const VectorXd& x0, RngStream& stream) const {
    const int d = model_.dim();
    TrajectorySample out;
    out.endpoint = x0 + cfg_.t * drift_rate_;
    out.n_jumps = lambda_ > 0.0 ? draw_count(stream) : 0;
    VectorXd gam(d);
    VectorXd gam_sum = VectorXd::Zero(d);
    for (std::int64_t j = 0; j < out.n_jumps; ++j) {
        const double z = draw_jump_z(stream);
        if (cfg_.convention == JumpConvention::Scaled) {
            model_.gamma(z, gam);
            gam_sum += gam;
        } else {
            model_.gamma(cfg_.h * z, gam);
            out.endpoint += gam;
        }
    }
    if (cfg_.convention == JumpConvention::Scaled) {
        out.endpoint += cfg_.h * gam_sum;
        if (tilted_) {
            out.log_weight = -eta_.dot(out.endpoint - x0) / cfg_.h + logw_offset_;
        }
    }
    return out;
}

TrajectorySample sample_trajectory(const LevyModel& model, const SimConfig& cfg,
                                   const VectorXd& x0, RngStream& stream) {
    JumpSampler sampler(model, cfg);
    return sampler.sample(x0, stream);
}

TrajectorySample sample_tilted(const LevyModel& model, const SimConfig& cfg, const VectorXd& x0,
                               RngStream& stream) {
    if (!cfg.tilt) throw std::invalid_argument("sample_tilted: cfg.tilt must be set");
    return sample_trajectory(model, cfg, x0, stream);
}

PathBatch sample_batch(const LevyModel& model, const SimConfig& cfg, const VectorXd& x0) {
    JumpSampler sampler(model, cfg);
    PathBatch batch;
    const std::int64_t n = cfg.n_paths;
    batch.endpoints.resize(model.dim(), n);
    batch.log_weights.resize(n);
    batch.n_jumps.resize(n);
    parallel_for(n, cfg.workers, [&](std::int64_t i) {
        RngStream stream = make_stream(cfg.seed, static_cast<std::uint64_t>(i));
        TrajectorySample s = sampler.sample(x0, stream);
        batch.endpoints.col(i) = s.endpoint;
        batch.log_weights[i] = s.log_weight;
        batch.n_jumps[i] = s.n_jumps;
    });
    return batch;
}

HitEstimate hit_probability_from_batch(const PathBatch& batch, const VectorXd& center,
                                       double radius) {
    const std::int64_t n = batch.size();
    HitEstimate est;

    auto weight = [&](std::int64_t i) { return std::exp(batch.log_weights[i]); };
    auto hit = [&](std::int64_t i) {
        return (batch.endpoints.col(i) - center).norm() <= radius ? 1.0 : 0.0;
    };

    const double sum_w = pairwise_sum(0, n, weight);
    const double sum_wh = pairwise_sum(0, n, [&](std::int64_t i) { return weight(i) * hit(i); });
    const double sum_w2 = pairwise_sum(0, n, [&](std::int64_t i) {
        const double w = weight(i);
        return w * w;
    });
    for (std::int64_t i = 0; i < n; ++i) est.hits += hit(i) > 0.0 ? 1 : 0;
    est.value = sum_w > 0.0 ? sum_wh / sum_w : 0.0;
    est.n_effective = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;

    if (est.hits == 0) {
        est.zero_hits = true;
        est.note = "no paths hit the target set; increase n_paths or improve the tilt";
        est.log_value = -std::numeric_limits<double>::infinity();
        return est;
    }

    // Delete-one-block jackknife over 32 contiguous index blocks.
    const int blocks = 32;
    std::vector<double> theta(blocks);
    std::vector<double> theta_log(blocks);
    bool log_ok = true;
    for (int b = 0; b < blocks; ++b) {
        const std::int64_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
        const double bw = pairwise_sum(lo, hi, weight);
        const double bwh = pairwise_sum(lo, hi, [&](std::int64_t i) { return weight(i) * hit(i); });
        const double denom = sum_w - bw;
        theta[b] = denom > 0.0 ? (sum_wh - bwh) / denom : 0.0;
        if (theta[b] > 0.0) {
            theta_log[b] = std::log(theta[b]);
        } else {
            log_ok = false;
        }
    }
    auto jack_se = [&](const std::vector<double>& th) {
        double mean = 0.0;
        for (double v : th) mean += v;
        mean /= blocks;
        double ss = 0.0;
        for (double v : th) ss += (v - mean) * (v - mean);
        return std::sqrt(ss * (blocks - 1.0) / blocks);
    };
    est.stderr_value = jack_se(theta);
    est.log_value = std::log(est.value);
    est.stderr_log = log_ok ? jack_se(theta_log) : std::numeric_limits<double>::infinity();
    if (!log_ok) est.note = "a jackknife block had zero hits; log error band unreliable";
    return est;
}

HitEstimate hit_probability(const LevyModel& model, const SimConfig& cfg, const VectorXd& x,
                            const VectorXd& center, double radius) {
    SimConfig run = cfg;
    if (!run.tilt) {
        auto ball = rate_inf_ball(model, x, center, radius);
        run.tilt = ball.at_minimizer.xi_star;
    }
    PathBatch batch = sample_batch(model, run, x);
    HitEstimate est = hit_probability_from_batch(batch, center, radius);
    est.tilt_used = *run.tilt;
    return est;
}

}  // namespace levylab
