#include "tzinf/truncated_gaussian.hpp"

#include "tzinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace tzinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracket = 30.0;
constexpr double kBoundaryTol = 1e-8;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * M_PI);

double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_phi(double x) {
    if (std::isinf(x)) return -kInf;
    return -0.5 * x * x - kLogSqrt2Pi;
}

} // namespace

double log_normal_sf(double x) {
    if (std::isnan(x)) throw InputError("NaN passed to normal tail");
    if (x == kInf) return -kInf;
    if (x == -kInf) return 0.0;
    if (x > 30.0) {
        const double r = 1.0 / (x * x);
        const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - 105.0 * r)));
        return log_phi(x) - std::log(x) + std::log(series);
    }
    if (x < 0.0) return std::log1p(-0.5 * std::erfc(-x / M_SQRT2));
    return std::log(0.5 * std::erfc(x / M_SQRT2));
}

double log_normal_mass(double a, double b) {
    if (!(a < b)) return -kInf;
    if (a >= 0.0) {
        const double la = log_normal_sf(a);
        const double lb = log_normal_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (b <= 0.0) {
        const double la = log_normal_sf(-b);
        const double lb = log_normal_sf(-a);
        return la + std::log1p(-std::exp(lb - la));
    }
    return std::log(0.5 * (std::erf(b / M_SQRT2) - std::erf(a / M_SQRT2)));
}

TruncatedGaussian::TruncatedGaussian(double mean, double variance, TruncationSet support)
    : mean_(mean), variance_(variance), sd_(std::sqrt(variance)), support_(std::move(support)) {
    if (!std::isfinite(mean)) throw InputError("truncated Gaussian mean must be finite");
    if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("truncated Gaussian variance must be positive");
    if (support_.empty()) throw InputError("truncated Gaussian support is empty");
    std::vector<double> parts;
    for (const auto& iv : support_) parts.push_back(log_normal_mass((iv.lo - mean_) / sd_, (iv.hi - mean_) / sd_));
    log_mass_ = log_sum_exp(parts);
    if (!(log_mass_ > -kInf)) {
        std::ostringstream msg;
        msg << "support " << support_.to_string() << " carries no probability mass under mean " << mean_ << ", sd "
            << sd_;
        throw DegenerateSupportError(msg.str());
    }
}

double TruncatedGaussian::cdf(double x) const {
    if (std::isnan(x)) throw InputError("NaN passed to truncated Gaussian cdf");
    std::vector<double> left;
    for (const auto& iv : support_) {
        if (iv.lo >= x) break;
        left.push_back(log_normal_mass((iv.lo - mean_) / sd_, (std::min(iv.hi, x) - mean_) / sd_));
    }
    return std::clamp(std::exp(log_sum_exp(left) - log_mass_), 0.0, 1.0);
}

double TruncatedGaussian::sf(double x) const {
    if (std::isnan(x)) throw InputError("NaN passed to truncated Gaussian sf");
    std::vector<double> right;
    for (const auto& iv : support_) {
        if (iv.hi <= x) continue;
        right.push_back(log_normal_mass((std::max(iv.lo, x) - mean_) / sd_, (iv.hi - mean_) / sd_));
    }
    return std::clamp(std::exp(log_sum_exp(right) - log_mass_), 0.0, 1.0);
}

double TruncatedGaussian::log_pdf(double x) const {
    if (!support_.contains(x)) return -kInf;
    const double u = (x - mean_) / sd_;
    return log_phi(u) - std::log(sd_) - log_mass_;
}

double TruncatedGaussian::expectation() const {
    double acc = 0.0;
    for (const auto& iv : support_) {
        const double a = (iv.lo - mean_) / sd_;
        const double b = (iv.hi - mean_) / sd_;
        acc += std::exp(log_phi(a) - log_mass_) - std::exp(log_phi(b) - log_mass_);
    }
    return mean_ + sd_ * acc;
}

double tg_cdf(double x, const TruncatedGaussian& d) { return d.cdf(x); }

double tg_sf(double x, const TruncatedGaussian& d) { return d.sf(x); }

double clamp_to_support(double z_obs, const TruncationSet& support, double sd, bool* clamped) {
    if (clamped) *clamped = false;
    if (support.empty()) throw InputError("support is empty");
    const double dist = support.distance(z_obs);
    if (dist == 0.0) return z_obs;
    if (dist <= kBoundaryTol * sd) {
        if (clamped) *clamped = true;
        return support.nearest(z_obs);
    }
    std::ostringstream msg;
    msg.precision(12);
    msg << "observed statistic " << z_obs << " lies outside its conditioning set " << support.to_string()
        << " (distance " << dist << ")";
    throw ConditioningError(msg.str());
}

double tg_pivot(double z_obs, double mean, double variance, const TruncationSet& support, bool* clamped) {
    const TruncatedGaussian d(mean, variance, support);
    return d.cdf(clamp_to_support(z_obs, support, d.sd(), clamped));
}

IntervalEstimate tg_interval(double z_obs, double variance, const TruncationSet& support, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (!(variance > 0.0)) throw InputError("variance must be positive");
    const double sd = std::sqrt(variance);
    const double z = clamp_to_support(z_obs, support, sd);
    auto F = [&](double mu) { return TruncatedGaussian(mu, variance, support).cdf(z); };

    // Root of F(mu) = target; F is decreasing in mu. outward = -1 for the lower
    // endpoint, +1 for the upper one.
    auto solve = [&](double target, int outward, bool& infinite) {
        double lo = z - kBracket * sd;
        double hi = z + kBracket * sd;
        if (F(lo) < target) {
            if (outward < 0) {
                infinite = true;
                return -kInf;
            }
            double width = kBracket * sd;
            do {
                hi = lo;
                width *= 2.0;
                lo = z - width;
                if (width > 1e12 * sd) {
                    infinite = true;
                    return -kInf;
                }
            } while (F(lo) < target);
        } else if (F(hi) > target) {
            if (outward > 0) {
                infinite = true;
                return kInf;
            }
            double width = kBracket * sd;
            do {
                lo = hi;
                width *= 2.0;
                hi = z + width;
                if (width > 1e12 * sd) {
                    infinite = true;
                    return kInf;
                }
            } while (F(hi) > target);
        }
        const double tol = 1e-6 * sd;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (F(mid) > target) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    IntervalEstimate out{0.0, 0.0, 1.0 - alpha};
    out.lower = solve(1.0 - 0.5 * alpha, -1, out.lower_infinite);
    out.upper = solve(0.5 * alpha, +1, out.upper_infinite);
    return out;
}

double tg_pvalue(double z_obs, double mean0, double variance, const TruncationSet& support, Alternative alt) {
    const TruncatedGaussian d(mean0, variance, support);
    const double z = clamp_to_support(z_obs, support, d.sd());
    switch (alt) {
        case Alternative::less: return d.cdf(z);
        case Alternative::greater: return d.sf(z);
        case Alternative::two_sided: break;
    }
    return std::clamp(2.0 * std::min(d.cdf(z), d.sf(z)), 0.0, 1.0);
}

MleEstimate tg_mle(double z_obs, double variance, const TruncationSet& support) {
    if (!(variance > 0.0)) throw InputError("variance must be positive");
    const double sd = std::sqrt(variance);
    const double z = clamp_to_support(z_obs, support, sd);
    // The score in the mean is (z - E_mu[Z]) / variance and E_mu[Z] increases in mu.
    auto g = [&](double mu) { return TruncatedGaussian(mu, variance, support).expectation() - z; };
    double lo = z - kBracket * sd;
    double hi = z + kBracket * sd;
    if (g(lo) > 0.0) return {lo, true};
    if (g(hi) < 0.0) return {hi, true};
    const double tol = 1e-9 * variance;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol || hi - lo <= 1e-14 * (std::abs(mid) + sd)) return {mid, false};
        if (gm > 0.0) hi = mid;
        else lo = mid;
    }
    return {0.5 * (lo + hi), false};
}

} // namespace tzinf
