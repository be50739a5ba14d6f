#include "tzinf/inference.hpp"

#include "tzinf/cross_validation.hpp"
#include "tzinf/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace tzinf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::pair<Method, const char*> kMethodNames[] = {
    {Method::naive, "naive"}, {Method::bonferroni, "bonferroni"}, {Method::tz_v, "tz-v"},
    {Method::tz_m, "tz-m"},   {Method::tz_ms, "tz-ms"},           {Method::stab_t, "stab-t"},
    {Method::stab_l1, "stab-l1"}};

const std::pair<TargetKind, const char*> kTargetNames[] = {{TargetKind::full, "full"},
                                                           {TargetKind::partial, "partial"},
                                                           {TargetKind::stable_t, "stable-t"},
                                                           {TargetKind::stable_l1, "stable-l1"}};

std::string normalize(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return c == '_' ? '-' : static_cast<char>(std::tolower(c));
    });
    return s;
}

IndexList with_index(IndexList S, int j) {
    if (std::find(S.begin(), S.end(), j) == S.end()) {
        S.insert(std::lower_bound(S.begin(), S.end(), j), j);
    }
    return S;
}

IndexList all_columns(Eigen::Index p) {
    IndexList all(static_cast<size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) all[static_cast<size_t>(k)] = static_cast<int>(k);
    return all;
}

double two_sided_normal_p(double z, double sd) {
    return std::min(1.0, 2.0 * std::exp(log_normal_sf(std::abs(z) / sd)));
}

} // namespace

std::string to_string(TargetKind k) {
    for (const auto& [v, name] : kTargetNames)
        if (v == k) return name;
    return "?";
}

std::string to_string(Method m) {
    for (const auto& [v, name] : kMethodNames)
        if (v == m) return name;
    return "?";
}

TargetKind parse_target_kind(const std::string& s) {
    const std::string key = normalize(s);
    for (const auto& [v, name] : kTargetNames)
        if (key == name) return v;
    throw InputError("unknown target kind '" + s + "'");
}

Method parse_method(const std::string& s) {
    const std::string key = normalize(s);
    for (const auto& [v, name] : kMethodNames)
        if (key == name) return v;
    throw InputError("unknown method '" + s + "'");
}

bool is_stable(Method m) { return m == Method::stab_t || m == Method::stab_l1; }

std::string TargetSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << " coefficient of variable " << variable << " in {";
    for (size_t i = 0; i < context.size(); ++i) os << (i ? "," : "") << context[i];
    os << '}';
    return os.str();
}

TargetSpec make_target(const DesignMatrix& X, TargetKind kind, int j, const IndexList& context) {
    if (j < 0 || j >= X.cols()) throw InputError("variable index out of range");
    TargetSpec t;
    t.kind = kind;
    t.variable = j;
    switch (kind) {
        case TargetKind::full: t.context = all_columns(X.cols()); break;
        case TargetKind::partial:
            t.context = context;
            if (std::find(context.begin(), context.end(), j) == context.end()) {
                throw InputError("partial target requires j in the model");
            }
            break;
        case TargetKind::stable_t:
        case TargetKind::stable_l1: t.context = with_index(context, j); break;
    }
    t.eta = coefficient_contrast(X, t.context, j);
    return t;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double default_stable_cutoff(double alpha, int p) { return normal_quantile(1.0 - alpha / (2.0 * p)); }

IntervalEstimate naive_interval(double z_obs, double sd_eta, double alpha) {
    if (!(sd_eta > 0.0)) throw InputError("sd_eta must be positive");
    const double q = normal_quantile(1.0 - alpha / 2.0);
    return {z_obs - q * sd_eta, z_obs + q * sd_eta, 1.0 - alpha};
}

IntervalEstimate bonferroni_interval(double z_obs, double sd_eta, double alpha, int p) {
    if (p < 1) throw InputError("Bonferroni needs p >= 1");
    IntervalEstimate iv = naive_interval(z_obs, sd_eta, alpha / p);
    iv.level = 1.0 - alpha;
    return iv;
}

double estimate_sigma_ols(const DesignMatrix& X, const ResponseVector& y, bool include_intercept) {
    const Eigen::Index n = X.rows(), p = X.cols();
    const Eigen::Index df = n - p - (include_intercept ? 1 : 0);
    if (df <= 0) throw InputError("least-squares sigma needs n > p");
    Eigen::MatrixXd Xc = X.values();
    Eigen::VectorXd yc = y.values();
    if (include_intercept) {
        Xc = Xc.rowwise() - Xc.colwise().mean();
        yc.array() -= yc.mean();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
    if (qr.rank() < p) throw RankError("design is rank deficient; least-squares sigma undefined");
    const Eigen::VectorXd resid = yc - Xc * qr.solve(yc);
    return std::sqrt(resid.squaredNorm() / static_cast<double>(df));
}

double estimate_sigma_reid(const DesignMatrix& X, const ResponseVector& y, std::uint64_t seed,
                           bool include_intercept) {
    CvOptions cv;
    cv.seed = seed;
    cv.include_intercept = include_intercept;
    const CvResult res = cv_select_lambda(X, y, cv);
    LassoOptions lo;
    lo.penalty = res.lambda_min * static_cast<double>(X.rows());
    lo.include_intercept = include_intercept;
    const LassoFit fit = fit_lasso(X, y, lo);
    const auto df = static_cast<double>(X.rows()) - static_cast<double>(fit.active_set.size()) -
                    (include_intercept ? 1.0 : 0.0);
    if (df <= 0) throw NumericalError("CV-tuned lasso selects as many variables as observations");
    Eigen::VectorXd resid = y.values() - X.values() * fit.coefficients;
    if (fit.intercept) resid.array() -= *fit.intercept;
    return std::sqrt(resid.squaredNorm() / df);
}

IndexList select_high_value_t(const DesignMatrix& X, const ResponseVector& y, const IndexList& M, double sigma,
                              double cutoff) {
    if (!(sigma > 0.0)) throw InputError("sigma must be positive");
    if (M.empty()) return {};
    const Eigen::MatrixXd Ginv = gram_inverse(X, M);
    const Eigen::VectorXd beta = Ginv * (X.columns(M).transpose() * y.values());
    IndexList H;
    for (size_t k = 0; k < M.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (std::abs(beta(kk)) / (sigma * std::sqrt(Ginv(kk, kk))) > cutoff) H.push_back(M[k]);
    }
    return H;
}

Analysis analyze(const DesignMatrix& X_in, const ResponseVector& y_in, double lambda, const AnalysisOptions& opts) {
    if (X_in.rows() != y_in.size()) throw InputError("dimension mismatch between X and y");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be positive and finite");
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (opts.target != TargetKind::full && opts.target != TargetKind::partial) {
        throw InputError("target must be full or partial; stable targets follow from the stable methods");
    }
    if (!(opts.range_sds > 0.0)) throw InputError("range_sds must be positive");
    const Eigen::Index n = X_in.rows(), p = X_in.cols();
    const bool needs_full = opts.target == TargetKind::full;
    if (needs_full && n <= p) throw InputError("full target requires n > p");

    const DesignMatrix X = opts.include_intercept ? X_in.centered() : X_in;
    const ResponseVector y = opts.include_intercept
                                 ? ResponseVector(y_in.values().array() - y_in.values().mean())
                                 : y_in;

    Analysis out;
    out.lambda = lambda;
    LassoOptions lo = opts.lasso;
    lo.penalty = lambda;
    lo.include_intercept = false;
    out.fit = fit_lasso(X, y, lo);
    if (opts.include_intercept) {
        out.fit.intercept = y_in.values().mean() - X_in.values().colwise().mean().dot(out.fit.coefficients);
    }

    switch (opts.sigma.mode) {
        case SigmaMode::known:
            if (!(opts.sigma.value > 0.0)) throw InputError("known sigma must be positive");
            out.sigma = opts.sigma.value;
            break;
        case SigmaMode::ols_full: out.sigma = estimate_sigma_ols(X_in, y_in, opts.include_intercept); break;
        case SigmaMode::reid: out.sigma = estimate_sigma_reid(X_in, y_in, opts.sigma.seed, opts.include_intercept); break;
    }
    if (!(out.sigma > 0.0)) throw NumericalError("estimated sigma is zero");

    const bool want_t = std::find(opts.methods.begin(), opts.methods.end(), Method::stab_t) != opts.methods.end();
    const bool want_l1 = std::find(opts.methods.begin(), opts.methods.end(), Method::stab_l1) != opts.methods.end();
    out.stable_cutoff = opts.stable_cutoff.value_or(default_stable_cutoff(opts.alpha, static_cast<int>(p)));
    if (!(out.stable_cutoff > 0.0)) throw InputError("stable-t cutoff must be positive");
    out.lambda_high = opts.lambda_high.value_or(
        opts.lambda_from_cv ? static_cast<double>(n) * std::sqrt(2.0 * std::log(static_cast<double>(p)) / n)
                            : 1.25 * lambda);
    if (want_l1 && !(out.lambda_high > lambda)) throw InputError("lambda_high must exceed lambda");

    const IndexList& M = out.fit.active_set;
    if (M.empty()) return out;

    std::optional<LassoFit> fit_high;
    if (want_t) out.high_value_t = select_high_value_t(X, y, M, out.sigma, out.stable_cutoff);
    if (want_l1) {
        LassoOptions lh = lo;
        lh.penalty = out.lambda_high;
        fit_high = fit_lasso(X, y, lh);
        out.high_value_l1 = fit_high->active_set;
    }

    using Key = std::pair<IndexList, int>;
    std::map<Key, LinePartition> parts, parts_high;
    auto partition = [&](std::map<Key, LinePartition>& cache, const TargetSpec& t, const LineDecomposition& line,
                         double pen, const LassoFit& start) -> const LinePartition& {
        const Key key{t.context, t.variable};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double half = opts.range_sds * out.sigma * t.eta.norm();
        PartitionOptions po = opts.partition;
        po.lasso = lo;
        po.merge_tol = 1e-10 * out.sigma * t.eta.norm();
        LinePartition part = line_partition(X, line, pen, line.z_obs - half, line.z_obs + half, po, &start);
        return cache.emplace(key, std::move(part)).first->second;
    };

    const double var_scale = out.sigma * out.sigma;
    for (int j : M) {
        for (Method m : opts.methods) {
            InferenceResult r;
            r.variable = j;
            r.name = X_in.name(j);
            r.method = m;
            try {
                if (m == Method::stab_t) r.target = make_target(X, TargetKind::stable_t, j, out.high_value_t);
                else if (m == Method::stab_l1) r.target = make_target(X, TargetKind::stable_l1, j, out.high_value_l1);
                else r.target = make_target(X, opts.target, j, M);

                const LineDecomposition line = decompose_line(r.target.eta, y.values());
                r.z_obs = line.z_obs;
                r.sd_eta = out.sigma * r.target.eta.norm();
                const double variance = var_scale * r.target.eta.squaredNorm();

                if (m == Method::naive || m == Method::bonferroni) {
                    r.truncation = TruncationSet::whole_line();
                    r.interval = m == Method::naive ? naive_interval(r.z_obs, r.sd_eta, opts.alpha)
                                                    : bonferroni_interval(r.z_obs, r.sd_eta, opts.alpha, static_cast<int>(p));
                    r.point_estimate = r.z_obs;
                    const double pn = two_sided_normal_p(r.z_obs, r.sd_eta);
                    r.p_value = m == Method::naive ? pn : std::min(1.0, pn * static_cast<double>(p));
                } else {
                    switch (m) {
                        case Method::tz_v:
                            if (opts.target == TargetKind::full && opts.full_target_closed_form) {
                                r.truncation = full_target_truncation(X, y, j, lambda);
                            } else {
                                r.truncation = variable_truncation(partition(parts, r.target, line, lambda, out.fit), j);
                            }
                            break;
                        case Method::tz_m:
                            r.truncation = model_truncation(partition(parts, r.target, line, lambda, out.fit), M);
                            break;
                        case Method::tz_ms:
                            r.truncation = model_sign_truncation(partition(parts, r.target, line, lambda, out.fit), M,
                                                                 out.fit.signs);
                            break;
                        case Method::stab_t:
                            r.truncation = stable_t_truncation(partition(parts, r.target, line, lambda, out.fit), X,
                                                               line, j, out.high_value_t, out.stable_cutoff, out.sigma);
                            break;
                        case Method::stab_l1:
                            r.truncation = stable_l1_truncation(
                                partition(parts, r.target, line, lambda, out.fit),
                                partition(parts_high, r.target, line, out.lambda_high, *fit_high), j,
                                out.high_value_l1);
                            break;
                        default: break;
                    }
                    bool clamped = false;
                    clamp_to_support(r.z_obs, r.truncation, r.sd_eta, &clamped);
                    if (clamped) r.degenerate_flags.push_back("z_obs clamped onto the truncation boundary");
                    const MleEstimate mle = tg_mle(r.z_obs, variance, r.truncation);
                    r.point_estimate = mle.value;
                    if (mle.unbounded) r.degenerate_flags.push_back("mle unbounded within bracket");
                    r.interval = tg_interval(r.z_obs, variance, r.truncation, opts.alpha);
                    r.p_value = tg_pvalue(r.z_obs, 0.0, variance, r.truncation);
                }
                if (r.interval.lower_infinite) r.degenerate_flags.push_back("lower endpoint infinite");
                if (r.interval.upper_infinite) r.degenerate_flags.push_back("upper endpoint infinite");
                if (out.fit.degenerate) r.degenerate_flags.push_back("observed lasso fit lies on a selection boundary");
            } catch (const Error& e) {
                r.failed = true;
                r.interval = {kNaN, kNaN, 1.0 - opts.alpha};
                r.point_estimate = kNaN;
                r.p_value = kNaN;
                r.degenerate_flags.push_back(e.what());
            }
            out.results.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace tzinf
