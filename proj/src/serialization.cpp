#include "tzinf/serialization.hpp"

#include "tzinf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace tzinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string csv_double(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

const char* design_name(DesignKind k) {
    switch (k) {
        case DesignKind::independent: return "independent";
        case DesignKind::block_equicorr: return "block_equicorr";
        case DesignKind::toeplitz: return "toeplitz";
    }
    return "?";
}

const char* noise_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::normal: return "normal";
        case NoiseKind::student_t: return "student_t";
        case NoiseKind::skew_normal: return "skew_normal";
    }
    return "?";
}

const char* sigma_name(SigmaMode m) {
    switch (m) {
        case SigmaMode::known: return "known";
        case SigmaMode::ols_full: return "ols";
        case SigmaMode::reid: return "reid";
    }
    return "?";
}

// Reads fields of a JSON object, remembering every problem instead of failing fast.
class FieldReader {
public:
    explicit FieldReader(const Json& j, std::string prefix = "") : j_(j), prefix_(std::move(prefix)) {
        if (!j.is_object()) problems_.push_back(label("") + "must be a JSON object");
    }

    bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
    const Json& raw(const char* key) {
        seen_.insert(key);
        return j_.at(key);
    }

    template <class T>
    void number(const char* key, T& out) {
        if (!has(key)) return;
        const Json& v = raw(key);
        if (!v.is_number()) {
            problems_.push_back(label(key) + "must be a number");
            return;
        }
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                problems_.push_back(label(key) + "must be an integer");
                return;
            }
        }
        out = v.get<T>();
    }

    void optional_number(const char* key, std::optional<double>& out) {
        if (!has(key)) return;
        const Json& v = raw(key);
        if (v.is_null()) return;
        if (!v.is_number()) {
            problems_.push_back(label(key) + "must be a number");
            return;
        }
        out = v.get<double>();
    }

    std::optional<std::string> string(const char* key) {
        if (!has(key)) return std::nullopt;
        const Json& v = raw(key);
        if (!v.is_string()) {
            problems_.push_back(label(key) + "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    void problem(const char* key, const std::string& msg) { problems_.push_back(label(key) + msg); }

    std::vector<std::string> finish() {
        if (j_.is_object()) {
            for (const auto& item : j_.items()) {
                if (!seen_.count(item.key())) problems_.push_back(label(item.key().c_str()) + "unknown field");
            }
        }
        return problems_;
    }

    std::string label(const char* key) const {
        std::string k = prefix_.empty() ? key : prefix_ + (*key ? "." : "") + key;
        return k.empty() ? "" : k + ": ";
    }

private:
    const Json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
    std::vector<std::string> problems_;
};

} // namespace

Json encode_double(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double decode_double(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw InputError("expected a number, \"inf\", \"-inf\" or null");
}

Json result_to_json(const InferenceResult& r) {
    Json trunc = Json::array();
    for (const auto& iv : r.truncation) trunc.push_back({encode_double(iv.lo), encode_double(iv.hi)});
    return {
        {"variable", r.variable},
        {"name", r.name},
        {"method", to_string(r.method)},
        {"target", {{"kind", to_string(r.target.kind)}, {"context", r.target.context}}},
        {"z_obs", encode_double(r.z_obs)},
        {"sd_eta", encode_double(r.sd_eta)},
        {"truncation", trunc},
        {"estimate", encode_double(r.point_estimate)},
        {"interval",
         {{"lower", encode_double(r.interval.lower)},
          {"upper", encode_double(r.interval.upper)},
          {"level", encode_double(r.interval.level)},
          {"lower_infinite", r.interval.lower_infinite},
          {"upper_infinite", r.interval.upper_infinite}}},
        {"p_value", encode_double(r.p_value)},
        {"failed", r.failed},
        {"flags", r.degenerate_flags},
    };
}

InferenceResult result_from_json(const Json& j) {
    try {
        InferenceResult r;
        r.variable = j.at("variable").get<int>();
        r.name = j.at("name").get<std::string>();
        r.method = parse_method(j.at("method").get<std::string>());
        r.target.kind = parse_target_kind(j.at("target").at("kind").get<std::string>());
        r.target.variable = r.variable;
        r.target.context = j.at("target").at("context").get<IndexList>();
        r.z_obs = decode_double(j.at("z_obs"));
        r.sd_eta = decode_double(j.at("sd_eta"));
        std::vector<Interval> ivs;
        for (const auto& iv : j.at("truncation")) ivs.push_back({decode_double(iv.at(0)), decode_double(iv.at(1))});
        r.truncation = TruncationSet(std::move(ivs));
        r.point_estimate = decode_double(j.at("estimate"));
        const Json& in = j.at("interval");
        r.interval = {decode_double(in.at("lower")), decode_double(in.at("upper")), decode_double(in.at("level")),
                      in.at("lower_infinite").get<bool>(), in.at("upper_infinite").get<bool>()};
        r.p_value = decode_double(j.at("p_value"));
        r.failed = j.at("failed").get<bool>();
        r.degenerate_flags = j.at("flags").get<std::vector<std::string>>();
        return r;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed inference result: ") + e.what());
    }
}

std::string results_to_csv(const std::vector<InferenceResult>& results) {
    std::ostringstream os;
    os << "variable,name,method,target,z_obs,sd_eta,estimate,lower,upper,lower_infinite,upper_infinite,p_value,"
          "truncation,failed,flags\n";
    for (const auto& r : results) {
        std::string flags;
        for (size_t i = 0; i < r.degenerate_flags.size(); ++i) flags += (i ? "; " : "") + r.degenerate_flags[i];
        os << r.variable << ',' << csv_field(r.name) << ',' << to_string(r.method) << ',' << to_string(r.target.kind)
           << ',' << csv_double(r.z_obs) << ',' << csv_double(r.sd_eta) << ',' << csv_double(r.point_estimate) << ','
           << csv_double(r.interval.lower) << ',' << csv_double(r.interval.upper) << ','
           << (r.interval.lower_infinite ? 1 : 0) << ',' << (r.interval.upper_infinite ? 1 : 0) << ','
           << csv_double(r.p_value) << ',' << csv_field(r.truncation.to_string()) << ',' << (r.failed ? 1 : 0) << ','
           << csv_field(flags) << '\n';
    }
    return os.str();
}

Json config_to_json(const StudyConfig& c) {
    Json j;
    j["n"] = c.n;
    j["p"] = c.p;
    j["k_signals"] = c.k_signals;
    switch (c.signal) {
        case SignalLevel::null: j["signal"] = "null"; break;
        case SignalLevel::low: j["signal"] = "low"; break;
        case SignalLevel::high: j["signal"] = "high"; break;
        case SignalLevel::explicit_value: j["signal"] = c.signal_value; break;
    }
    j["design"] = {{"kind", design_name(c.design.kind)}, {"rho", c.design.rho}, {"blocks", c.design.blocks}};
    j["noise"] = {{"kind", noise_name(c.noise.kind)},
                  {"dof", c.noise.dof},
                  {"skewness", c.noise.skewness},
                  {"sigma", c.noise.sigma}};
    switch (c.lambda_rule) {
        case LambdaRule::universal: j["lambda"] = "universal"; break;
        case LambdaRule::cv_median: j["lambda"] = "cv"; break;
        case LambdaRule::explicit_value: j["lambda"] = c.lambda_value; break;
    }
    j["lambda_high"] = c.lambda_high ? Json(*c.lambda_high) : Json(nullptr);
    Json methods = Json::array();
    for (Method m : c.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["target"] = to_string(c.target);
    j["sigma"] = sigma_name(c.sigma_mode);
    j["alpha"] = c.alpha;
    j["replications"] = c.replications;
    j["seed"] = c.seed;
    j["calibration_reps"] = c.calibration_reps;
    j["cv_reps"] = c.cv_reps;
    j["delta_low"] = c.delta_low ? Json(*c.delta_low) : Json(nullptr);
    j["delta_high"] = c.delta_high ? Json(*c.delta_high) : Json(nullptr);
    j["stable_cutoff"] = c.stable_cutoff ? Json(*c.stable_cutoff) : Json(nullptr);
    j["threads"] = c.threads;
    return j;
}

StudyConfig config_from_json(const Json& j) {
    StudyConfig c;
    FieldReader rd(j);
    std::vector<std::string> problems;
    rd.number("n", c.n);
    rd.number("p", c.p);
    rd.number("k_signals", c.k_signals);
    if (rd.has("signal")) {
        const Json& v = rd.raw("signal");
        if (v.is_number()) {
            c.signal = SignalLevel::explicit_value;
            c.signal_value = v.get<double>();
        } else if (v == "null") c.signal = SignalLevel::null;
        else if (v == "low") c.signal = SignalLevel::low;
        else if (v == "high") c.signal = SignalLevel::high;
        else rd.problem("signal", "must be \"null\", \"low\", \"high\" or a number");
    }
    if (rd.has("design")) {
        FieldReader d(rd.raw("design"), "design");
        if (auto kind = d.string("kind")) {
            if (*kind == "independent") c.design.kind = DesignKind::independent;
            else if (*kind == "block_equicorr") c.design.kind = DesignKind::block_equicorr;
            else if (*kind == "toeplitz") c.design.kind = DesignKind::toeplitz;
            else d.problem("kind", "must be independent, block_equicorr or toeplitz");
        }
        d.number("rho", c.design.rho);
        d.number("blocks", c.design.blocks);
        auto more = d.finish();
        problems.insert(problems.end(), more.begin(), more.end());
    }
    if (rd.has("noise")) {
        FieldReader d(rd.raw("noise"), "noise");
        if (auto kind = d.string("kind")) {
            if (*kind == "normal") c.noise.kind = NoiseKind::normal;
            else if (*kind == "student_t") c.noise.kind = NoiseKind::student_t;
            else if (*kind == "skew_normal") c.noise.kind = NoiseKind::skew_normal;
            else d.problem("kind", "must be normal, student_t or skew_normal");
        }
        d.number("dof", c.noise.dof);
        d.number("skewness", c.noise.skewness);
        d.number("sigma", c.noise.sigma);
        auto more = d.finish();
        problems.insert(problems.end(), more.begin(), more.end());
    }
    if (rd.has("lambda")) {
        const Json& v = rd.raw("lambda");
        if (v.is_number()) {
            c.lambda_rule = LambdaRule::explicit_value;
            c.lambda_value = v.get<double>();
        } else if (v == "universal") c.lambda_rule = LambdaRule::universal;
        else if (v == "cv") c.lambda_rule = LambdaRule::cv_median;
        else rd.problem("lambda", "must be \"universal\", \"cv\" or a number");
    }
    rd.optional_number("lambda_high", c.lambda_high);
    if (rd.has("methods")) {
        const Json& v = rd.raw("methods");
        if (!v.is_array()) {
            rd.problem("methods", "must be an array of method names");
        } else {
            c.methods.clear();
            for (const auto& m : v) {
                try {
                    c.methods.push_back(parse_method(m.is_string() ? m.get<std::string>() : m.dump()));
                } catch (const InputError& e) {
                    rd.problem("methods", e.what());
                }
            }
        }
    }
    if (auto t = rd.string("target")) {
        try {
            c.target = parse_target_kind(*t);
        } catch (const InputError& e) {
            rd.problem("target", e.what());
        }
    }
    if (auto s = rd.string("sigma")) {
        if (*s == "known") c.sigma_mode = SigmaMode::known;
        else if (*s == "ols") c.sigma_mode = SigmaMode::ols_full;
        else if (*s == "reid") c.sigma_mode = SigmaMode::reid;
        else rd.problem("sigma", "must be known, ols or reid");
    }
    rd.number("alpha", c.alpha);
    rd.number("replications", c.replications);
    rd.number("seed", c.seed);
    rd.number("calibration_reps", c.calibration_reps);
    rd.number("cv_reps", c.cv_reps);
    rd.optional_number("delta_low", c.delta_low);
    rd.optional_number("delta_high", c.delta_high);
    rd.optional_number("stable_cutoff", c.stable_cutoff);
    rd.number("threads", c.threads);

    auto top = rd.finish();
    problems.insert(problems.begin(), top.begin(), top.end());
    for (auto& p : c.problems()) problems.push_back(std::move(p));
    if (!problems.empty()) {
        std::string msg = "invalid study config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw InputError(msg);
    }
    return c;
}

Json study_to_json(const StudyReport& r) {
    Json methods = Json::array();
    for (const auto& m : r.methods) {
        methods.push_back({{"method", to_string(m.method)},
                           {"intervals", m.intervals},
                           {"covered", m.covered},
                           {"coverage", encode_double(m.coverage)},
                           {"median_length", encode_double(m.median_length)},
                           {"median_finite_length", encode_double(m.median_finite_length)},
                           {"q1_finite_length", encode_double(m.q1_finite_length)},
                           {"q3_finite_length", encode_double(m.q3_finite_length)},
                           {"infinite", m.infinite},
                           {"infinite_proportion", encode_double(m.infinite_proportion)},
                           {"failures", m.failures}});
    }
    const auto& c = r.calibration;
    return {
        {"config", config_to_json(r.config)},
        {"calibration",
         {{"delta_low", c.delta_low ? Json(*c.delta_low) : Json(nullptr)},
          {"delta_high", c.delta_high ? Json(*c.delta_high) : Json(nullptr)},
          {"signal", c.signal},
          {"lambda", c.lambda},
          {"lambda_sum", c.lambda_sum},
          {"lambda_high", c.lambda_high},
          {"stable_cutoff", c.stable_cutoff}}},
        {"replications", r.replications},
        {"failed_replications", r.failed_replications},
        {"failure_messages", r.failure_messages},
        {"zero_selection_replications", r.zero_selection_replications},
        {"mean_selected", r.mean_selected},
        {"conventions",
         {{"coverage_unit", "constructed interval (variable-replication pair)"},
          {"infinite_intervals", "counted as covering; length +inf in median_length, excluded from finite quantiles"}}},
        {"methods", methods},
    };
}

std::string study_to_csv(const StudyReport& r) {
    std::ostringstream os;
    os << "method,intervals,covered,coverage,median_length,median_finite_length,q1_finite_length,q3_finite_length,"
          "infinite,infinite_proportion,failures\n";
    for (const auto& m : r.methods) {
        os << to_string(m.method) << ',' << m.intervals << ',' << m.covered << ',' << csv_double(m.coverage) << ','
           << csv_double(m.median_length) << ',' << csv_double(m.median_finite_length) << ','
           << csv_double(m.q1_finite_length) << ',' << csv_double(m.q3_finite_length) << ',' << m.infinite << ','
           << csv_double(m.infinite_proportion) << ',' << m.failures << '\n';
    }
    return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json ReportDocument::to_json() const {
    return {{"metadata", metadata}, {"input_digest", input_digest}, {"payload", payload}};
}

ReportDocument ReportDocument::from_json(const Json& j) {
    try {
        return {j.at("metadata"), j.at("input_digest").get<std::string>(), j.at("payload")};
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed report document: ") + e.what());
    }
}

} // namespace tzinf
