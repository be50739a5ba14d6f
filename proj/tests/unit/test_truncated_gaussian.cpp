#include "oracles.hpp"

#include "tzinf/errors.hpp"
#include "tzinf/inference.hpp"
#include "tzinf/truncated_gaussian.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tzinf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Phi(double x) {
    return boost::math::cdf(boost::math::normal(), x);
}

TruncationSet random_support(Rng& rng) {
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    std::uniform_int_distribution<int> K(1, 4);
    std::vector<Interval> parts;
    const int k = K(rng);
    for (int i = 0; i < k; ++i) {
        double a = U(rng), b = U(rng);
        if (a > b) std::swap(a, b);
        parts.push_back({a, b + 0.05});
    }
    std::bernoulli_distribution coin(0.3);
    if (coin(rng)) parts.push_back({-kInf, U(rng) - 4.0});
    if (coin(rng)) parts.push_back({U(rng) + 4.0, kInf});
    return TruncationSet(parts);
}

} // namespace

TEST_SUITE("truncated_gaussian") {

TEST_CASE("log tail functions") {
    CHECK(std::exp(log_normal_sf(0.0)) == doctest::Approx(0.5));
    CHECK(std::exp(log_normal_sf(1.0)) == doctest::Approx(1.0 - Phi(1.0)).epsilon(1e-12));
    // Far tail stays finite and follows the Mills-ratio asymptote.
    const double x = 40.0;
    const double mills = -0.5 * x * x - std::log(x) - 0.5 * std::log(2 * M_PI);
    CHECK(log_normal_sf(x) == doctest::Approx(mills).epsilon(1e-6));
    CHECK(std::isfinite(log_normal_sf(1e4)));
    CHECK(std::exp(log_normal_mass(1.0, 2.0)) == doctest::Approx(Phi(2) - Phi(1)).epsilon(1e-12));
    CHECK(std::exp(log_normal_mass(-kInf, kInf)) == doctest::Approx(1.0));
}

TEST_CASE("cdf: closed-form cases") {
    const TruncatedGaussian whole(0.3, 1.0, TruncationSet::whole_line());
    CHECK(tg_cdf(0.3, whole) == doctest::Approx(0.5));
    const double lam = 1.3;
    const TruncatedGaussian two_rays(0.0, 1.0, TruncationSet({{-kInf, -lam}, {lam, kInf}}));
    CHECK(tg_cdf(-lam, two_rays) == doctest::Approx(0.5));
    const TruncatedGaussian box(0.0, 1.0, TruncationSet::single(1, 2));
    const double expected = (Phi(1.5) - Phi(1)) / (Phi(2) - Phi(1));
    CHECK(expected == doctest::Approx(0.676).epsilon(1e-3));
    CHECK(tg_cdf(1.5, box) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(tg_cdf(1.5, box) + tg_sf(1.5, box) == doctest::Approx(1.0));
}

TEST_CASE("cdf matches quadrature on random union supports") {
    Rng rng(42);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    std::uniform_real_distribution<double> V(0.25, 4.0);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const TruncationSet S = random_support(rng);
        const double mean = U(rng), var = V(rng);
        const TruncatedGaussian d(mean, var, S);
        for (int k = 0; k < 5; ++k) {
            const double x = U(rng) * 2.0;
            worst = std::max(worst, std::abs(tg_cdf(x, d) - oracle::quadrature_cdf(x, mean, std::sqrt(var), S)));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("far tail support stays finite") {
    const TruncatedGaussian d(0.0, 1.0, TruncationSet::single(8.0, 9.0));
    for (double x : {8.0, 8.0001, 8.5, 8.999, 9.0}) {
        CHECK(std::isfinite(tg_cdf(x, d)));
        CHECK(std::isfinite(tg_sf(x, d)));
        CHECK(std::isfinite(d.log_pdf(x)));
    }
    const boost::math::normal N;
    const double q8 = boost::math::cdf(boost::math::complement(N, 8.0));
    const double exact = (q8 - boost::math::cdf(boost::math::complement(N, 8.5))) /
                         (q8 - boost::math::cdf(boost::math::complement(N, 9.0)));
    CHECK(tg_cdf(8.5, d) == doctest::Approx(exact).epsilon(1e-10));
    CHECK(std::isfinite(d.expectation()));
    CHECK(d.expectation() > 8.0);
    CHECK(d.expectation() < 8.2);
    const IntervalEstimate ci = tg_interval(8.05, 1.0, d.support(), 0.1);
    CHECK(!std::isnan(ci.lower));
    CHECK(!std::isnan(ci.upper));
    CHECK(std::isfinite(tg_pvalue(8.05, 0.0, 1.0, d.support())));
    const TruncatedGaussian deep(0.0, 1.0, TruncationSet::single(35.0, 36.0));
    CHECK(std::isfinite(tg_cdf(35.5, deep)));
}

TEST_CASE("pivot") {
    const TruncationSet S({{-kInf, -1}, {1, kInf}});
    CHECK(tg_pivot(1.2, 0.0, 1.0, TruncationSet::whole_line()) == doctest::Approx(Phi(1.2)));
    CHECK(tg_pivot(-1.0, 0.0, 1.0, S) == doctest::Approx(0.5));
    const TruncationSet box = TruncationSet::single(1, 2);
    CHECK(tg_pivot(1.0, 0.0, 1.0, box) == doctest::Approx(0.0));
    bool clamped = false;
    CHECK(tg_pivot(1.0 - 1e-10, 0.0, 1.0, box, &clamped) == doctest::Approx(0.0));
    CHECK(clamped);
    CHECK_THROWS_AS(tg_pivot(0.5, 0.0, 1.0, box), ConditioningError);
    // Monotone decreasing in the mean.
    double prev = 1.0;
    for (double mu = -5; mu <= 5; mu += 0.5) {
        const double f = tg_pivot(1.5, mu, 1.0, S);
        CHECK(f <= prev + 1e-15);
        prev = f;
    }
}

TEST_CASE("interval inversion") {
    const IntervalEstimate plain = tg_interval(0.0, 1.0, TruncationSet::whole_line(), 0.1);
    CHECK(plain.lower == doctest::Approx(-1.6448536).epsilon(1e-6));
    CHECK(plain.upper == doctest::Approx(1.6448536).epsilon(1e-6));
    CHECK_FALSE(plain.lower_infinite);

    Rng rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        const TruncationSet S = random_support(rng);
        const double var = 0.5 + std::abs(U(rng));
        std::uniform_real_distribution<double> pick(0.0, 1.0);
        const auto& I = S.intervals()[static_cast<size_t>(pick(rng) * S.size()) % S.size()];
        double lo = std::isinf(I.lo) ? I.hi - 1.0 : I.lo;
        double hi = std::isinf(I.hi) ? I.lo + 1.0 : I.hi;
        if (std::isinf(I.lo) && std::isinf(I.hi)) lo = -1.0, hi = 1.0;
        const double z = lo + (hi - lo) * (0.1 + 0.8 * pick(rng));
        const IntervalEstimate ci = tg_interval(z, var, S, 0.1);
        CAPTURE(rep);
        if (!ci.lower_infinite) CHECK(tg_pivot(z, ci.lower, var, S) == doctest::Approx(0.95).epsilon(1e-4));
        if (!ci.upper_infinite) CHECK(tg_pivot(z, ci.upper, var, S) == doctest::Approx(0.05).epsilon(1e-4));
        CHECK(ci.lower <= ci.upper);
    }
}

TEST_CASE("observation at a deep truncation boundary gives an infinite side") {
    const TruncationSet S = TruncationSet::single(10.0, kInf);
    const IntervalEstimate ci = tg_interval(10.0 + 1e-8, 1.0, S, 0.1);
    CHECK(ci.lower_infinite);
    CHECK(ci.lower == -kInf);
    CHECK(std::isfinite(ci.upper));
}

TEST_CASE("p-values") {
    CHECK(tg_pvalue(1.6448536, 0.0, 1.0, TruncationSet::whole_line(), Alternative::greater) ==
          doctest::Approx(0.05).epsilon(1e-6));
    CHECK(tg_pvalue(-1.6448536, 0.0, 1.0, TruncationSet::whole_line(), Alternative::less) ==
          doctest::Approx(0.05).epsilon(1e-6));
    // At the median of the truncated law the two-sided p-value is 1.
    const TruncationSet S({{-kInf, -1}, {0.5, 3}});
    const TruncatedGaussian d(0.0, 1.0, S);
    double a = -1.0 - 1e-9, b = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (a + b);
        if (!S.contains(m)) {
            (tg_cdf(-1.0, d) >= 0.5 ? b : a) = m;
            continue;
        }
        (tg_cdf(m, d) < 0.5 ? a : b) = m;
    }
    const double median = S.nearest(0.5 * (a + b));
    CHECK(tg_pvalue(median, 0.0, 1.0, S) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("MLE") {
    CHECK(tg_mle(0.7, 1.0, TruncationSet::whole_line()).value == doctest::Approx(0.7).epsilon(1e-8));
    const TruncationSet box = TruncationSet::single(1, 2);
    const MleEstimate m1 = tg_mle(1.5, 1.0, box);
    CHECK_FALSE(m1.unbounded);
    CHECK(std::abs(m1.value - oracle::grid_mle(1.5, 1.0, box, -10, 10)) < 1e-4);
    const double lam = 1.0;
    const TruncationSet rays({{-kInf, -lam}, {lam, kInf}});
    const MleEstimate m2 = tg_mle(lam + 0.5, 1.0, rays);
    CHECK(std::abs(m2.value - oracle::grid_mle(lam + 0.5, 1.0, rays, -10, 10)) < 1e-4);
    const MleEstimate m3 = tg_mle(lam, 1.0, rays);
    CHECK(std::abs(m3.value - oracle::grid_mle(lam, 1.0, rays, -10, 10)) < 1e-4);
}

TEST_CASE("rejects degenerate inputs") {
    CHECK_THROWS_AS(TruncatedGaussian(0.0, 0.0, TruncationSet::whole_line()), InputError);
    CHECK_THROWS_AS(TruncatedGaussian(0.0, 1.0, TruncationSet()), InputError);
    CHECK_THROWS_AS(TruncatedGaussian(0.0, 1.0, TruncationSet::single(3.0, 3.0)), DegenerateSupportError);
    CHECK(std::isfinite(TruncatedGaussian(0.0, 1.0, TruncationSet::single(1e6, 1e6 + 1)).log_mass()));
}

}
