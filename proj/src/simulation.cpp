#include "tzinf/simulation.hpp"

#include "tzinf/cross_validation.hpp"
#include "tzinf/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace tzinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum SeedTag : std::uint64_t { kDesign = 1, kBeta = 2, kNoise = 3, kSigma = 4, kDelta = 10, kCvLambda = 11 };

// Runs fn(i) for i in [0, count) on up to `threads` workers. Stops handing out
// work once fn returns false.
void parallel_for(int count, int threads, const std::function<bool(int)>& fn) {
    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        while (!stop.load()) {
            const int i = next.fetch_add(1);
            if (i >= count) break;
            try {
                if (!fn(i)) stop.store(true);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
            }
        }
    };
    const int nt = std::max(1, std::min(threads, count));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nt));
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

double resolve_signal(const StudyConfig& cfg, CalibrationRecord& cal) {
    switch (cfg.signal) {
        case SignalLevel::null: return 0.0;
        case SignalLevel::explicit_value: return cfg.signal_value;
        case SignalLevel::low:
        case SignalLevel::high: break;
    }
    if (!cfg.delta_low || !cfg.delta_high) {
        const DeltaCalibration d =
            calibrate_delta(cfg.n, cfg.p, cfg.design, cfg.calibration_reps, derive_seed(cfg.seed, 0, kDelta));
        cal.delta_low = cfg.delta_low.value_or(d.delta_low);
        cal.delta_high = cfg.delta_high.value_or(d.delta_high);
    } else {
        cal.delta_low = cfg.delta_low;
        cal.delta_high = cfg.delta_high;
    }
    return cfg.signal == SignalLevel::low ? *cal.delta_low : *cal.delta_high;
}

struct MethodTally {
    std::vector<double> lengths;
    std::size_t covered = 0;
    std::size_t infinite = 0;
    std::size_t failures = 0;
};

struct RepRecord {
    bool failed = false;
    std::string error;
    int selected = 0;
    std::vector<MethodTally> tallies;
};

} // namespace

void DesignScheme::validate(int p) const {
    if (kind != DesignKind::independent && !(rho >= 0.0 && rho < 1.0)) {
        throw InputError("design rho must lie in [0, 1)");
    }
    if (kind == DesignKind::block_equicorr) {
        if (blocks < 1) throw InputError("design blocks must be positive");
        if (p % blocks != 0) throw InputError("design blocks must divide p");
    }
}

void NoiseScheme::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("noise sigma must be finite and >= 0");
    if (kind == NoiseKind::student_t && !(dof > 2.0)) throw InputError("student-t noise needs dof > 2");
    if (kind == NoiseKind::skew_normal && !std::isfinite(skewness)) throw InputError("skew-normal shape must be finite");
}

std::vector<std::string> StudyConfig::problems() const {
    std::vector<std::string> out;
    auto check = [&](bool ok, const char* msg) {
        if (!ok) out.emplace_back(msg);
    };
    check(n >= 2, "n: must be >= 2");
    check(p >= 1, "p: must be >= 1");
    check(k_signals >= 0 && k_signals <= p, "k_signals: must lie in [0, p]");
    check(replications >= 1, "replications: must be >= 1");
    check(alpha > 0.0 && alpha < 1.0, "alpha: must lie in (0, 1)");
    check(!methods.empty(), "methods: at least one method is required");
    check(target == TargetKind::full || target == TargetKind::partial, "target: must be full or partial");
    check(target != TargetKind::full || n > p, "target: full target requires n > p");
    check(calibration_reps >= 100, "calibration_reps: must be >= 100");
    check(cv_reps >= 10, "cv_reps: must be >= 10");
    check(lambda_rule != LambdaRule::explicit_value || lambda_value > 0.0, "lambda: explicit value must be positive");
    check(!lambda_high || *lambda_high > 0.0, "lambda_high: must be positive");
    check(!stable_cutoff || *stable_cutoff > 0.0, "stable_cutoff: must be positive");
    check(threads >= 0, "threads: must be >= 0");
    check(sigma_mode != SigmaMode::ols_full || n > p, "sigma: ols requires n > p");
    try {
        design.validate(p > 0 ? p : 1);
    } catch (const InputError& e) {
        out.push_back(std::string("design: ") + e.what());
    }
    try {
        noise.validate();
    } catch (const InputError& e) {
        out.push_back(std::string("noise: ") + e.what());
    }
    return out;
}

void StudyConfig::validate() const {
    const auto bad = problems();
    if (bad.empty()) return;
    std::string msg = "invalid study config:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw InputError(msg);
}

Eigen::MatrixXd gen_design(int n, int p, const DesignScheme& scheme, Rng& rng) {
    if (n < 1 || p < 1) throw InputError("design dimensions must be positive");
    scheme.validate(p);
    std::normal_distribution<double> N01;
    Eigen::MatrixXd Z(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) Z(i, j) = N01(rng);
    switch (scheme.kind) {
        case DesignKind::independent: return Z;
        case DesignKind::block_equicorr: {
            const int B = scheme.blocks;
            const int per = p / B - 1;  // derived columns per block
            const double mix = std::sqrt(1.0 - scheme.rho * scheme.rho);
            Eigen::MatrixXd X = Z;
            for (int j = B; j < p; ++j) {
                const int leader = per > 0 ? (j - B) / per : 0;
                X.col(j) = scheme.rho * Z.col(leader) + mix * Z.col(j);
            }
            return X;
        }
        case DesignKind::toeplitz: {
            Eigen::MatrixXd S(p, p);
            for (int a = 0; a < p; ++a)
                for (int b = 0; b < p; ++b) S(a, b) = std::pow(scheme.rho, std::abs(a - b));
            Eigen::LLT<Eigen::MatrixXd> llt(S);
            if (llt.info() != Eigen::Success) throw InputError("Toeplitz covariance is not positive definite");
            return Z * Eigen::MatrixXd(llt.matrixU());
        }
    }
    return Z;
}

DesignMatrix gen_design(int n, int p, const DesignScheme& scheme, std::uint64_t seed) {
    Rng rng(seed);
    return DesignMatrix(gen_design(n, p, scheme, rng));
}

Eigen::VectorXd gen_noise(int n, const NoiseScheme& noise, Rng& rng) {
    noise.validate();
    Eigen::VectorXd e(n);
    switch (noise.kind) {
        case NoiseKind::normal: {
            std::normal_distribution<double> N01;
            for (int i = 0; i < n; ++i) e(i) = N01(rng);
            break;
        }
        case NoiseKind::student_t: {
            std::student_t_distribution<double> T(noise.dof);
            const double scale = std::sqrt(noise.dof / (noise.dof - 2.0));
            for (int i = 0; i < n; ++i) e(i) = T(rng) / scale;
            break;
        }
        case NoiseKind::skew_normal: {
            std::normal_distribution<double> N01;
            const double a = noise.skewness;
            const double delta = a / std::sqrt(1.0 + a * a);
            const double mean = delta * std::sqrt(2.0 / M_PI);
            const double sd = std::sqrt(1.0 - 2.0 * delta * delta / M_PI);
            const double tail = std::sqrt(1.0 - delta * delta);
            for (int i = 0; i < n; ++i) {
                const double u0 = N01(rng);
                const double u1 = N01(rng);
                e(i) = (delta * std::abs(u0) + tail * u1 - mean) / sd;
            }
            break;
        }
    }
    return noise.sigma * e;
}

ResponseVector gen_response(const DesignMatrix& X, const Eigen::VectorXd& beta, const NoiseScheme& noise,
                            std::uint64_t seed) {
    if (beta.size() != X.cols()) throw InputError("beta length does not match the design");
    Rng rng(seed);
    return ResponseVector(X.values() * beta + gen_noise(static_cast<int>(X.rows()), noise, rng));
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    if (std::isinf(v[lo]) || std::isinf(v[hi])) return pos - lo > 0 ? v[hi] : v[lo];
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

DeltaCalibration calibrate_delta(int n, int p, const DesignScheme& design, int reps, std::uint64_t seed) {
    if (reps < 1) throw InputError("calibration needs at least one draw");
    std::vector<double> stat(static_cast<size_t>(reps));
    parallel_for(reps, resolve_threads(0), [&](int r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r), kDelta));
        const Eigen::MatrixXd X = gen_design(n, p, design, rng);
        std::normal_distribution<double> N01;
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = N01(rng);
        stat[static_cast<size_t>(r)] = (X.transpose() * y).lpNorm<Eigen::Infinity>() / n;
        return true;
    });
    return {quantile(stat, 0.5), quantile(stat, 0.99) + 0.25};
}

double universal_lambda(int n, int p) {
    if (n < 1 || p < 1) throw InputError("universal threshold needs positive n and p");
    return std::sqrt(2.0 * std::log(static_cast<double>(p)) / n);
}

Eigen::VectorXd gen_beta(const StudyConfig& cfg, double signal, Rng& rng) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(cfg.p);
    if (cfg.k_signals == 0 || signal == 0.0) return beta;
    if (cfg.design.kind == DesignKind::toeplitz) {
        std::vector<int> idx(static_cast<size_t>(cfg.p));
        for (int j = 0; j < cfg.p; ++j) idx[static_cast<size_t>(j)] = j;
        for (int k = 0; k < cfg.k_signals; ++k) {
            std::uniform_int_distribution<int> pick(k, cfg.p - 1);
            std::swap(idx[static_cast<size_t>(k)], idx[static_cast<size_t>(pick(rng))]);
            beta(idx[static_cast<size_t>(k)]) = signal;
        }
    } else {
        beta.head(cfg.k_signals).setConstant(signal);
    }
    return beta;
}

double calibrate_lambda_cv(const StudyConfig& cfg, double signal, int reps, std::uint64_t seed) {
    if (reps < 1) throw InputError("CV calibration needs at least one replication");
    std::vector<double> picks(static_cast<size_t>(reps));
    parallel_for(reps, resolve_threads(cfg.threads), [&](int r) {
        const auto rr = static_cast<std::uint64_t>(r);
        Rng rng(derive_seed(seed, rr, kDesign));
        const DesignMatrix X(gen_design(cfg.n, cfg.p, cfg.design, rng));
        Rng brng(derive_seed(seed, rr, kBeta));
        const Eigen::VectorXd beta = gen_beta(cfg, signal, brng);
        const ResponseVector y = gen_response(X, beta, cfg.noise, derive_seed(seed, rr, kNoise));
        CvOptions cv;
        cv.seed = derive_seed(seed, rr, kCvLambda);
        picks[static_cast<size_t>(r)] = cv_select_lambda(X, y, cv).lambda_min;
        return true;
    });
    return quantile(picks, 0.5);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TZINF_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

StudyReport run_study(const StudyConfig& cfg) {
    cfg.validate();
    const int threads = resolve_threads(cfg.threads);
    StudyReport rep;
    rep.config = cfg;
    rep.replications = cfg.replications;

    CalibrationRecord& cal = rep.calibration;
    cal.signal = resolve_signal(cfg, cal);
    switch (cfg.lambda_rule) {
        case LambdaRule::universal: cal.lambda = universal_lambda(cfg.n, cfg.p); break;
        case LambdaRule::explicit_value: cal.lambda = cfg.lambda_value; break;
        case LambdaRule::cv_median:
            cal.lambda = calibrate_lambda_cv(cfg, cal.signal, cfg.cv_reps, derive_seed(cfg.seed, 0, kCvLambda));
            break;
    }
    cal.lambda_sum = cal.lambda * cfg.n;
    cal.lambda_high = cfg.lambda_high.value_or(cfg.lambda_rule == LambdaRule::cv_median
                                                   ? universal_lambda(cfg.n, cfg.p)
                                                   : 1.25 * cal.lambda);
    cal.stable_cutoff = cfg.stable_cutoff.value_or(default_stable_cutoff(cfg.alpha, cfg.p));

    AnalysisOptions ao;
    ao.methods = cfg.methods;
    ao.target = cfg.target;
    ao.alpha = cfg.alpha;
    ao.stable_cutoff = cal.stable_cutoff;
    ao.lambda_high = cal.lambda_high * cfg.n;
    ao.sigma.mode = cfg.sigma_mode;
    ao.sigma.value = cfg.noise.sigma;

    const size_t nm = cfg.methods.size();
    std::vector<RepRecord> records(static_cast<size_t>(cfg.replications));
    const int budget = cfg.replications / 100;
    std::atomic<int> failed{0};

    parallel_for(cfg.replications, threads, [&](int r) {
        const auto rr = static_cast<std::uint64_t>(r);
        RepRecord& rec = records[static_cast<size_t>(r)];
        rec.tallies.resize(nm);
        try {
            Rng drng(derive_seed(cfg.seed, rr, kDesign));
            const DesignMatrix X(gen_design(cfg.n, cfg.p, cfg.design, drng));
            Rng brng(derive_seed(cfg.seed, rr, kBeta));
            const Eigen::VectorXd beta = gen_beta(cfg, cal.signal, brng);
            const ResponseVector y = gen_response(X, beta, cfg.noise, derive_seed(cfg.seed, rr, kNoise));
            const Eigen::VectorXd mu = X.values() * beta;
            AnalysisOptions local = ao;
            local.sigma.seed = derive_seed(cfg.seed, rr, kSigma);
            const Analysis an = analyze(X, y, cal.lambda_sum, local);
            rec.selected = static_cast<int>(an.fit.active_set.size());
            for (const auto& res : an.results) {
                const size_t m = static_cast<size_t>(
                    std::find(cfg.methods.begin(), cfg.methods.end(), res.method) - cfg.methods.begin());
                MethodTally& t = rec.tallies[m];
                if (res.failed) {
                    ++t.failures;
                    continue;
                }
                const double theta = res.target.eta.dot(mu);
                const bool inf = res.interval.lower_infinite || res.interval.upper_infinite ||
                                 std::isinf(res.interval.lower) || std::isinf(res.interval.upper);
                t.lengths.push_back(inf ? kInf : res.interval.upper - res.interval.lower);
                if (inf) ++t.infinite;
                if (res.interval.lower <= theta && theta <= res.interval.upper) ++t.covered;
            }
        } catch (const Error& e) {
            rec.failed = true;
            rec.error = e.what();
            rec.tallies.assign(nm, MethodTally{});
            if (failed.fetch_add(1) + 1 > budget) return false;
        }
        return true;
    });

    std::vector<std::string> messages;
    for (int r = 0; r < cfg.replications; ++r) {
        const RepRecord& rec = records[static_cast<size_t>(r)];
        if (!rec.failed) continue;
        ++rep.failed_replications;
        if (rep.failure_messages.size() < 10) {
            rep.failure_messages.push_back("replication " + std::to_string(r) + ": " + rec.error);
        }
    }
    if (rep.failed_replications > budget) {
        std::string msg = "study aborted: " + std::to_string(rep.failed_replications) +
                          " replication failures exceed the 1% budget";
        if (!rep.failure_messages.empty()) msg += "; first: " + rep.failure_messages.front();
        throw NumericalError(msg);
    }

    long total_selected = 0;
    rep.methods.resize(nm);
    for (size_t m = 0; m < nm; ++m) rep.methods[m].method = cfg.methods[m];
    for (const RepRecord& rec : records) {
        if (rec.failed) continue;
        total_selected += rec.selected;
        if (rec.selected == 0) ++rep.zero_selection_replications;
        for (size_t m = 0; m < nm; ++m) {
            const MethodTally& t = rec.tallies[m];
            MethodSummary& s = rep.methods[m];
            s.lengths.insert(s.lengths.end(), t.lengths.begin(), t.lengths.end());
            s.covered += t.covered;
            s.infinite += t.infinite;
            s.failures += t.failures;
        }
    }
    const int ok_reps = cfg.replications - rep.failed_replications;
    rep.mean_selected = ok_reps > 0 ? static_cast<double>(total_selected) / ok_reps : 0.0;
    for (MethodSummary& s : rep.methods) {
        s.intervals = s.lengths.size();
        std::vector<double> finite;
        for (double l : s.lengths)
            if (std::isfinite(l)) finite.push_back(l);
        if (s.intervals > 0) {
            s.coverage = static_cast<double>(s.covered) / static_cast<double>(s.intervals);
            s.infinite_proportion = static_cast<double>(s.infinite) / static_cast<double>(s.intervals);
            s.median_length = quantile(s.lengths, 0.5);
        } else {
            s.coverage = s.infinite_proportion = s.median_length = std::numeric_limits<double>::quiet_NaN();
        }
        s.median_finite_length = quantile(finite, 0.5);
        s.q1_finite_length = quantile(finite, 0.25);
        s.q3_finite_length = quantile(finite, 0.75);
    }
    return rep;
}

} // namespace tzinf
