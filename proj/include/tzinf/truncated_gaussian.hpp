#pragma once

#include "tzinf/truncation_set.hpp"

namespace tzinf {

// N(mean, variance) restricted to a union of intervals.
class TruncatedGaussian {
public:
    // Throws InputError on non-positive variance or empty support and
    // DegenerateSupportError when the support carries no representable mass.
    TruncatedGaussian(double mean, double variance, TruncationSet support);

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double sd() const noexcept { return sd_; }
    const TruncationSet& support() const noexcept { return support_; }

    // Log of the untruncated probability of the support.
    double log_mass() const noexcept { return log_mass_; }

    double cdf(double x) const;
    double sf(double x) const;  // 1 - cdf, without cancellation
    double log_pdf(double x) const;
    double expectation() const;

private:
    double mean_, variance_, sd_;
    TruncationSet support_;
    double log_mass_;
};

// log P(Z > x) for standard normal Z, accurate far into the upper tail.
double log_normal_sf(double x);
// log P(a <= Z <= b) for standard normal Z.
double log_normal_mass(double a, double b);

double tg_cdf(double x, const TruncatedGaussian& d);
double tg_sf(double x, const TruncatedGaussian& d);

// z_obs within boundary_tol = 1e-8 * sd of the support is clamped onto it
// (sets *clamped); further away is a ConditioningError.
double clamp_to_support(double z_obs, const TruncationSet& support, double sd, bool* clamped = nullptr);

// F_mean(z_obs) under the truncated law; decreasing in mean.
double tg_pivot(double z_obs, double mean, double variance, const TruncationSet& support, bool* clamped = nullptr);

struct IntervalEstimate {
    double lower;
    double upper;
    double level;
    bool lower_infinite = false;
    bool upper_infinite = false;
};

// Equal-tailed interval for the mean by inverting the pivot over
// [z_obs - 30 sd, z_obs + 30 sd]. A side whose root lies beyond the outer
// bracket edge is reported as -inf / +inf with its flag set.
IntervalEstimate tg_interval(double z_obs, double variance, const TruncationSet& support, double alpha);

enum class Alternative { two_sided, greater, less };

double tg_pvalue(double z_obs, double mean0, double variance, const TruncationSet& support,
                 Alternative alt = Alternative::two_sided);

struct MleEstimate {
    double value;
    bool unbounded = false;  // score did not change sign inside the bracket
};

MleEstimate tg_mle(double z_obs, double variance, const TruncationSet& support);

} // namespace tzinf
