#include "levylab/model.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace levylab {

namespace {

double smoothstep01(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

constexpr int kTagDirect = 0;     // integrate in z over the smooth outer region
constexpr int kTagCorePos = 1;    // substituted variable on the positive core
constexpr int kTagCoreNeg = 2;    // substituted variable on the negative core

}  // namespace

std::string HypothesisHReport::to_string() const {
    std::ostringstream os;
    if (satisfied) {
        os << "Hypothesis H satisfied with spanning order k_hyp = " << k_hyp;
    } else {
        os << "Hypothesis H fails: derivatives of gamma at 0 up to order " << k_max
           << " reach rank " << achieved_rank << " only";
    }
    return os.str();
}

HypothesisHReport check_hypothesis_h(const Curve& curve, int k_max, double rank_threshold) {
    const int d = curve.dim();
    if (k_max < d) throw std::invalid_argument("check_hypothesis_h: k_max must be >= d");
    HypothesisHReport report;
    report.k_max = k_max;
    MatrixXd cols(d, k_max);
    int rank = 0;
    for (int k = 1; k <= k_max; ++k) {
        VectorXd dk(d);
        curve.derivative(0.0, k, dk);
        cols.col(k - 1) = dk;
        Eigen::JacobiSVD<MatrixXd> svd(cols.leftCols(k));
        const auto& sv = svd.singularValues();
        const double thresh = rank_threshold * sv(0);
        rank = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) > thresh) ++rank;
        }
        if (rank == d) {
            report.satisfied = true;
            report.k_hyp = k;
            report.achieved_rank = d;
            return report;
        }
    }
    report.achieved_rank = rank;
    return report;
}

LevyModel LevyModel::build(const ModelConfig& config) {
    ModelConfig cfg = config;
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw std::invalid_argument(
            "LevyModel: alpha must lie in the open interval ]0,1[, got " +
            std::to_string(cfg.alpha));
    }
    if (!(cfg.big_c > 0.0)) throw std::invalid_argument("LevyModel: big_c must be positive");
    if (cfg.d < 1) throw std::invalid_argument("LevyModel: dimension must be >= 1");
    if (!(cfg.cutoff_inner > 0.0 && cfg.cutoff_inner < 1.0)) {
        throw std::invalid_argument("LevyModel: cutoff_inner must lie in (0,1)");
    }
    if (!(cfg.quadrature.rel_tol > 0.0 && cfg.quadrature.abs_tol > 0.0)) {
        throw std::invalid_argument("LevyModel: quadrature tolerances must be positive");
    }
    if (std::abs(cfg.outer_skew) >= 1.0) {
        throw std::invalid_argument("LevyModel: outer_skew must lie in (-1,1)");
    }
    if (!cfg.gamma) cfg.gamma = PolynomialCurve::monomial(cfg.d);
    if (cfg.gamma->dim() != cfg.d) {
        throw std::invalid_argument("LevyModel: gamma dimension does not match d");
    }
    if (cfg.k_max <= 0) cfg.k_max = cfg.d + 4;

    VectorXd at0 = cfg.gamma->value(0.0);
    if (at0.cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("LevyModel: gamma(0) must vanish, |gamma(0)| = " +
                                    std::to_string(at0.norm()));
    }

    LevyModel m(cfg);
    if (cfg.enforce_hypothesis_h) {
        auto report = check_hypothesis_h(*cfg.gamma, cfg.k_max);
        if (!report.satisfied) {
            throw std::invalid_argument("LevyModel: " + report.to_string());
        }
        m.k_hyp_ = report.k_hyp;
    } else {
        auto report = check_hypothesis_h(*cfg.gamma, cfg.k_max);
        m.k_hyp_ = report.satisfied ? report.k_hyp : 0;
    }

    auto sq = m.integrate([](double z) { return std::min(z * z, 1.0); });
    if (!sq.converged || !std::isfinite(sq.value)) {
        throw std::invalid_argument(
            "LevyModel: integral of (z^2 ^ 1) g(z) dz failed the finiteness check");
    }
    m.eq1_integral_ = sq.value;
    return m;
}

double LevyModel::g(double z) const {
    const double az = std::abs(z);
    if (az >= 1.0) return 0.0;
    if (az == 0.0) return std::numeric_limits<double>::infinity();
    const double core = cfg_.big_c * std::pow(az, -1.0 - cfg_.alpha);
    if (az <= cfg_.cutoff_inner) return core;
    const double u = (1.0 - az) / (1.0 - cfg_.cutoff_inner);
    const double skew = 1.0 + (z > 0 ? cfg_.outer_skew : -cfg_.outer_skew);
    return core * smoothstep01(u) * skew;
}

double LevyModel::nu(double z) const {
    const double az = std::abs(z);
    if (az >= 1.0) return 0.0;
    const double base = (z * z) * (z * z);
    if (az <= cfg_.cutoff_inner) return base;
    const double u = (1.0 - az) / (1.0 - cfg_.cutoff_inner);
    return base * smoothstep01(u);
}

double LevyModel::core_mass(double a, double b) const {
    // int_a^b C z^{-1-alpha} dz = C (a^-alpha - b^-alpha) / alpha
    return cfg_.big_c * (std::pow(a, -cfg_.alpha) - std::pow(b, -cfg_.alpha)) / cfg_.alpha;
}

std::vector<TaggedInterval> LevyModel::domain(double z_lo, double z_hi) const {
    if (z_lo < 0.0 || z_hi < z_lo) {
        throw std::invalid_argument("LevyModel::integrate: need 0 <= z_lo <= z_hi");
    }
    const double delta = cfg_.cutoff_inner;
    const double q = 1.0 - cfg_.alpha;
    std::vector<TaggedInterval> segs;
    const double core_hi = std::min(z_hi, delta);
    if (z_lo < core_hi) {
        const double wa = std::pow(z_lo, q);  // 0 at z_lo = 0
        const double wb = std::pow(core_hi, q);
        segs.push_back({wa, wb, kTagCorePos});
        segs.push_back({wa, wb, kTagCoreNeg});
    }
    const double out_lo = std::max(z_lo, delta);
    const double out_hi = std::min(z_hi, 1.0);
    if (out_lo < out_hi) {
        segs.push_back({out_lo, out_hi, kTagDirect});
        segs.push_back({-out_hi, -out_lo, kTagDirect});
    }
    return segs;
}

QuadOutcome<double> LevyModel::integrate(const std::function<double(double)>& f, double z_lo,
                                         double z_hi) const {
    const double q_exp = 1.0 / (1.0 - cfg_.alpha);
    auto eval = [&](int tag, double x) -> double {
        if (tag == kTagDirect) return f(x) * g(x);
        const double w = std::abs(x);
        double z = std::pow(w, q_exp);
        if (z < std::numeric_limits<double>::min()) return 0.0;
        if (tag == kTagCoreNeg) z = -z;
        const double jac = q_exp * std::pow(w, q_exp - 1.0);
        return f(z) * g(z) * jac;
    };
    return integrate_adaptive_tagged<double>(eval, domain(z_lo, z_hi), cfg_.quadrature);
}

QuadOutcome<VectorXd> LevyModel::integrate_vec(
    const std::function<void(double, Eigen::Ref<VectorXd>)>& f, int n, double z_lo,
    double z_hi) const {
    const double q_exp = 1.0 / (1.0 - cfg_.alpha);
    VectorXd buf(n);
    auto eval = [&](int tag, double x) -> VectorXd {
        if (tag == kTagDirect) {
            f(x, buf);
            return buf * g(x);
        }
        const double w = std::abs(x);
        double z = std::pow(w, q_exp);
        if (z < std::numeric_limits<double>::min()) return VectorXd::Zero(n);
        if (tag == kTagCoreNeg) z = -z;
        const double jac = q_exp * std::pow(w, q_exp - 1.0);
        f(z, buf);
        return buf * (g(z) * jac);
    };
    return integrate_adaptive_tagged<VectorXd>(eval, domain(z_lo, z_hi), cfg_.quadrature);
}

double levy_integral(const LevyModel& model, const std::function<double(double)>& f) {
    auto q = model.integrate(f);
    require_converged(q, "levy_integral");
    return q.value;
}

LevyModel default_model(double alpha, int d) {
    ModelConfig cfg;
    cfg.alpha = alpha;
    cfg.d = d;
    cfg.gamma = PolynomialCurve::monomial(d);
    return LevyModel::build(cfg);
}

}  // namespace levylab
