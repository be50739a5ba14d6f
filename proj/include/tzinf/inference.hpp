#pragma once

#include "tzinf/geometry.hpp"
#include "tzinf/lasso.hpp"
#include "tzinf/truncated_gaussian.hpp"
#include "tzinf/truncation_set.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tzinf {

enum class TargetKind { full, partial, stable_t, stable_l1 };
enum class Method { naive, bonferroni, tz_v, tz_m, tz_ms, stab_t, stab_l1 };

std::string to_string(TargetKind k);
std::string to_string(Method m);
TargetKind parse_target_kind(const std::string& s);
Method parse_method(const std::string& s);
bool is_stable(Method m);

struct TargetSpec {
    TargetKind kind = TargetKind::full;
    int variable = -1;
    IndexList context;  // columns of the regression that defines the coefficient
    Eigen::VectorXd eta;

    std::string describe() const;
};

// The coefficient contrast for kind; context is all columns (full), the active
// set (partial) or the high-value set, augmented by j for low-value variables
// (stable kinds).
TargetSpec make_target(const DesignMatrix& X, TargetKind kind, int j, const IndexList& context);

enum class SigmaMode { known, ols_full, reid };

struct SigmaSpec {
    SigmaMode mode = SigmaMode::known;
    double value = 1.0;      // used when mode == known
    std::uint64_t seed = 0;  // fold shuffle for reid
};

// Residual-based sigma from the CV-tuned lasso: RSS / (n - |M| - intercept).
double estimate_sigma_reid(const DesignMatrix& X, const ResponseVector& y, std::uint64_t seed,
                           bool include_intercept = false);
// RSS / (n - p - intercept) from the full least-squares fit.
double estimate_sigma_ols(const DesignMatrix& X, const ResponseVector& y, bool include_intercept = false);

// {j in M : |t_j| > cutoff} with t_j the least-squares t-statistic on X_M at known sigma.
IndexList select_high_value_t(const DesignMatrix& X, const ResponseVector& y, const IndexList& M, double sigma,
                              double cutoff);

double normal_quantile(double p);
double default_stable_cutoff(double alpha, int p);

IntervalEstimate naive_interval(double z_obs, double sd_eta, double alpha);
IntervalEstimate bonferroni_interval(double z_obs, double sd_eta, double alpha, int p);

struct InferenceResult {
    int variable = -1;
    std::string name;
    Method method = Method::naive;
    TargetSpec target;
    double z_obs = 0.0;
    double sd_eta = 0.0;  // sigma * ||eta||
    TruncationSet truncation;
    double point_estimate = 0.0;
    IntervalEstimate interval{0.0, 0.0, 0.0};
    double p_value = 1.0;
    bool failed = false;  // no interval could be produced; see degenerate_flags
    std::vector<std::string> degenerate_flags;
};

struct AnalysisOptions {
    std::vector<Method> methods{Method::tz_ms};
    TargetKind target = TargetKind::partial;  // for naive, Bonferroni and the TZ_V/TZ_M/TZ_Ms family
    SigmaSpec sigma;
    double alpha = 0.1;
    bool include_intercept = false;
    std::optional<double> stable_cutoff;  // default: normal quantile at 1 - alpha / (2p)
    std::optional<double> lambda_high;    // sum scale
    bool lambda_from_cv = false;          // chooses the lambda_high default rule
    double range_sds = 20.0;              // working range half-width in units of sigma ||eta||
    bool full_target_closed_form = true;
    LassoOptions lasso;
    PartitionOptions partition;
};

struct Analysis {
    LassoFit fit;
    double lambda = 0.0;
    double sigma = 0.0;
    double stable_cutoff = 0.0;
    double lambda_high = 0.0;
    IndexList high_value_t;
    IndexList high_value_l1;
    std::vector<InferenceResult> results;  // ordered by variable, then by the requested method order
};

// Fits the lasso at sum-scale penalty lambda and produces one result per
// (selected variable, method). With include_intercept the data are centered
// first and every step runs on the centered problem.
Analysis analyze(const DesignMatrix& X, const ResponseVector& y, double lambda, const AnalysisOptions& opts);

} // namespace tzinf
