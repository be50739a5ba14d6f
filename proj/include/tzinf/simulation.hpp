#pragma once

#include "tzinf/inference.hpp"
#include "tzinf/lasso.hpp"
#include "tzinf/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tzinf {

enum class DesignKind { independent, block_equicorr, toeplitz };

struct DesignScheme {
    DesignKind kind = DesignKind::independent;
    double rho = 0.0;
    int blocks = 5;

    void validate(int p) const;
};

enum class NoiseKind { normal, student_t, skew_normal };

struct NoiseScheme {
    NoiseKind kind = NoiseKind::normal;
    double dof = 3.0;
    double skewness = 10.0;  // skew-normal shape parameter
    double sigma = 1.0;

    void validate() const;
};

enum class SignalLevel { null, low, high, explicit_value };
enum class LambdaRule { universal, cv_median, explicit_value };

struct StudyConfig {
    int n = 100;
    int p = 50;
    int k_signals = 5;
    SignalLevel signal = SignalLevel::null;
    double signal_value = 0.0;  // used with explicit_value
    DesignScheme design;
    NoiseScheme noise;
    LambdaRule lambda_rule = LambdaRule::universal;
    double lambda_value = 0.0;  // per-observation scale, used with explicit_value
    std::optional<double> lambda_high;  // per-observation scale override
    std::vector<Method> methods{Method::naive, Method::bonferroni, Method::tz_v, Method::tz_m, Method::tz_ms,
                                Method::stab_t, Method::stab_l1};
    TargetKind target = TargetKind::partial;
    SigmaMode sigma_mode = SigmaMode::known;
    double alpha = 0.1;
    int replications = 500;
    std::uint64_t seed = 1;
    int calibration_reps = 1000;
    int cv_reps = 100;
    std::optional<double> delta_low, delta_high;  // skip calibration when given
    std::optional<double> stable_cutoff;
    int threads = 0;  // 0: TZINF_THREADS or hardware concurrency

    // Lists every offending field; empty when valid.
    std::vector<std::string> problems() const;
    void validate() const;
};

// n x p design; deterministic given the generator state.
Eigen::MatrixXd gen_design(int n, int p, const DesignScheme& scheme, Rng& rng);
DesignMatrix gen_design(int n, int p, const DesignScheme& scheme, std::uint64_t seed);

// Noise with variance sigma^2 (student-t and skew-normal are standardized first).
Eigen::VectorXd gen_noise(int n, const NoiseScheme& noise, Rng& rng);
ResponseVector gen_response(const DesignMatrix& X, const Eigen::VectorXd& beta, const NoiseScheme& noise,
                            std::uint64_t seed);

struct DeltaCalibration {
    double delta_low;
    double delta_high;
};

// Median and 99th percentile + 0.25 of max_j |x_j' y| / n under y ~ N(0, I),
// one fresh design per draw.
DeltaCalibration calibrate_delta(int n, int p, const DesignScheme& design, int reps, std::uint64_t seed);

// Per-observation universal threshold sqrt(2 log p / n).
double universal_lambda(int n, int p);

// Median of the 10-fold CV choice (per-observation scale) over reps simulated data sets.
double calibrate_lambda_cv(const StudyConfig& cfg, double signal, int reps, std::uint64_t seed);

// Coefficient vector for one replication: k_signals entries equal to signal,
// at the first k columns (block leaders for block designs) or at random
// positions for Toeplitz designs.
Eigen::VectorXd gen_beta(const StudyConfig& cfg, double signal, Rng& rng);

struct MethodSummary {
    Method method = Method::naive;
    std::size_t intervals = 0;  // successfully constructed
    std::size_t covered = 0;
    std::size_t infinite = 0;
    std::size_t failures = 0;   // per-variable numerical failures (no interval)
    double coverage = 0.0;
    double median_length = 0.0;         // infinite lengths included as +inf
    double median_finite_length = 0.0;
    double q1_finite_length = 0.0;
    double q3_finite_length = 0.0;
    double infinite_proportion = 0.0;
    std::vector<double> lengths;  // per interval, +inf for infinite ones
};

struct CalibrationRecord {
    std::optional<double> delta_low, delta_high;
    double signal = 0.0;
    double lambda = 0.0;       // per-observation scale
    double lambda_sum = 0.0;   // solver scale
    double lambda_high = 0.0;  // per-observation scale
    double stable_cutoff = 0.0;
};

struct StudyReport {
    StudyConfig config;
    CalibrationRecord calibration;
    int replications = 0;
    int failed_replications = 0;
    std::vector<std::string> failure_messages;  // first few, in replication order
    int zero_selection_replications = 0;
    double mean_selected = 0.0;
    std::vector<MethodSummary> methods;
};

// Runs cfg.replications independent replications (fresh design and noise each)
// across a worker pool; the report does not depend on the thread count.
// Aborts with NumericalError once replication failures exceed 1% of the total.
StudyReport run_study(const StudyConfig& cfg);

// Thread count from cfg.threads, the TZINF_THREADS variable, or the hardware.
int resolve_threads(int requested);

double quantile(std::vector<double> v, double q);

} // namespace tzinf
