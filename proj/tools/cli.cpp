#include "tzinf/cli.hpp"

#include "tzinf/cross_validation.hpp"
#include "tzinf/errors.hpp"
#include "tzinf/inference.hpp"
#include "tzinf/serialization.hpp"
#include "tzinf/simulation.hpp"
#include "tzinf/svg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef TZINF_VERSION
#define TZINF_VERSION "0.0.0"
#endif

namespace tzinf {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (ch == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (ch == delim && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    }
    return out;
}

} // namespace

Table read_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw InputError("input file is empty");
    const char delim = lines[0].find('\t') != std::string::npos ? '\t' : ',';
    Table t;
    t.columns = split_line(lines[0], delim);
    for (size_t k = 0; k < t.columns.size(); ++k) {
        if (t.columns[k].empty()) throw InputError("header column " + std::to_string(k + 1) + " has no name");
    }
    const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
    if (rows == 0) throw InputError("input has a header but no data rows");
    t.values.resize(rows, static_cast<Eigen::Index>(t.columns.size()));
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto fields = split_line(lines[static_cast<size_t>(i) + 1], delim);
        if (fields.size() != t.columns.size()) {
            throw InputError("row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                             " fields but the header has " + std::to_string(t.columns.size()));
        }
        for (size_t k = 0; k < fields.size(); ++k) {
            const std::string& f = fields[k];
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(f, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (f.empty() || used != f.size() || !std::isfinite(v)) {
                throw InputError("column '" + t.columns[k] + "' has a non-numeric value '" + f + "' in row " +
                                 std::to_string(i + 1));
            }
            t.values(i, static_cast<Eigen::Index>(k)) = v;
        }
    }
    return t;
}

namespace cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << content;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

Json metadata(const std::string& command, std::uint64_t seed, bool timestamp) {
    Json m = {{"tool", "tzinf"}, {"version", TZINF_VERSION}, {"command", command}, {"seed", seed}};
    if (timestamp) m["timestamp"] = utc_now();
    return m;
}

SigmaSpec parse_sigma(const std::string& s, std::uint64_t seed) {
    SigmaSpec spec;
    spec.seed = seed;
    if (s == "ols") {
        spec.mode = SigmaMode::ols_full;
    } else if (s == "reid") {
        spec.mode = SigmaMode::reid;
    } else if (s.rfind("known:", 0) == 0) {
        spec.mode = SigmaMode::known;
        try {
            size_t used = 0;
            spec.value = std::stod(s.substr(6), &used);
            if (used != s.size() - 6) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw InputError("--sigma known:<value> needs a number, got '" + s + "'");
        }
        if (!(spec.value > 0.0)) throw InputError("--sigma known value must be positive");
    } else {
        throw InputError("--sigma must be known:<value>, ols or reid");
    }
    return spec;
}

struct AnalyzeArgs {
    std::string input;
    std::string response;
    std::string lambda;
    std::string methods = "tz-v,tz-m,tz-ms";
    std::string target = "partial";
    double alpha = 0.1;
    std::string sigma;
    double cutoff = 0.0;
    double lambda_high = 0.0;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string exclude;
    bool intercept = false;
    bool svg = false;
    bool timestamp = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const std::string raw = read_file(a.input);
    const Table table = read_table(raw);
    const auto excluded = split_list(a.exclude);
    for (const auto& e : excluded) {
        if (std::find(table.columns.begin(), table.columns.end(), e) == table.columns.end()) {
            throw InputError("--exclude names unknown column '" + e + "'");
        }
    }
    const auto rit = std::find(table.columns.begin(), table.columns.end(), a.response);
    if (rit == table.columns.end()) throw InputError("response column '" + a.response + "' not found in header");
    const auto rcol = static_cast<Eigen::Index>(rit - table.columns.begin());

    std::vector<Eigen::Index> pred;
    std::vector<std::string> names;
    for (size_t k = 0; k < table.columns.size(); ++k) {
        if (static_cast<Eigen::Index>(k) == rcol) continue;
        if (std::find(excluded.begin(), excluded.end(), table.columns[k]) != excluded.end()) continue;
        pred.push_back(static_cast<Eigen::Index>(k));
        names.push_back(table.columns[k]);
    }
    if (pred.empty()) throw InputError("no predictor columns remain");
    const DesignMatrix X(table.values(Eigen::all, pred), names);
    const ResponseVector y(table.values.col(rcol));
    const auto n = static_cast<double>(X.rows());

    AnalysisOptions opts;
    opts.alpha = a.alpha;
    opts.include_intercept = a.intercept;
    opts.methods.clear();
    const TargetKind target = parse_target_kind(a.target);
    opts.target = (target == TargetKind::full) ? TargetKind::full : TargetKind::partial;
    for (const auto& m : split_list(a.methods)) opts.methods.push_back(parse_method(m));
    if (target == TargetKind::stable_t && std::find(opts.methods.begin(), opts.methods.end(), Method::stab_t) == opts.methods.end())
        opts.methods.push_back(Method::stab_t);
    if (target == TargetKind::stable_l1 && std::find(opts.methods.begin(), opts.methods.end(), Method::stab_l1) == opts.methods.end())
        opts.methods.push_back(Method::stab_l1);
    if (opts.methods.empty()) throw InputError("--method lists no methods");
    if (a.cutoff > 0.0) opts.stable_cutoff = a.cutoff;
    if (a.lambda_high > 0.0) opts.lambda_high = a.lambda_high * n;

    if (a.sigma.empty()) {
        opts.sigma.mode = X.rows() > X.cols() + (a.intercept ? 1 : 0) ? SigmaMode::ols_full : SigmaMode::reid;
        opts.sigma.seed = a.seed;
    } else {
        opts.sigma = parse_sigma(a.sigma, a.seed);
    }

    double lambda_obs = 0.0;
    if (a.lambda == "cv") {
        CvOptions cv;
        cv.seed = a.seed;
        cv.include_intercept = a.intercept;
        lambda_obs = cv_select_lambda(X, y, cv).lambda_min;
        opts.lambda_from_cv = true;
    } else {
        try {
            size_t used = 0;
            lambda_obs = std::stod(a.lambda, &used);
            if (used != a.lambda.size()) throw std::invalid_argument(a.lambda);
        } catch (const std::exception&) {
            throw InputError("--lambda must be a number or 'cv', got '" + a.lambda + "'");
        }
        if (!(lambda_obs > 0.0)) throw InputError("--lambda must be positive");
    }

    const Analysis an = analyze(X, y, lambda_obs * n, opts);

    Json results = Json::array();
    for (const auto& r : an.results) results.push_back(result_to_json(r));
    auto names_of = [&](const IndexList& idx) {
        std::vector<std::string> v;
        for (int j : idx) v.push_back(X.name(j));
        return v;
    };
    Json methods = Json::array();
    for (Method m : opts.methods) methods.push_back(to_string(m));
    Json payload = {
        {"input", {{"path", a.input}, {"n", X.rows()}, {"p", X.cols()}, {"response", a.response}, {"predictors", names}}},
        {"settings",
         {{"lambda", lambda_obs},
          {"lambda_sum", lambda_obs * n},
          {"lambda_source", a.lambda == "cv" ? "cv" : "user"},
          {"alpha", a.alpha},
          {"target", to_string(target)},
          {"methods", methods},
          {"sigma", an.sigma},
          {"sigma_mode", opts.sigma.mode == SigmaMode::known ? "known"
                         : opts.sigma.mode == SigmaMode::ols_full ? "ols" : "reid"},
          {"stable_cutoff", an.stable_cutoff},
          {"lambda_high", an.lambda_high / n},
          {"intercept", a.intercept}}},
        {"fit",
         {{"active_set", names_of(an.fit.active_set)},
          {"signs", an.fit.signs},
          {"intercept", an.fit.intercept ? Json(*an.fit.intercept) : Json(nullptr)},
          {"kkt_violation", an.fit.kkt_violation},
          {"high_value_t", names_of(an.high_value_t)},
          {"high_value_l1", names_of(an.high_value_l1)}}},
        {"results", results},
    };
    ReportDocument doc{metadata("analyze", a.seed, a.timestamp), fnv1a_hex(raw), payload};

    std::filesystem::create_directories(a.out);
    const std::filesystem::path dir(a.out);
    write_file(dir / "report.json", doc.to_json().dump(2) + "\n");
    write_file(dir / "report.csv", results_to_csv(an.results));
    if (a.svg) write_file(dir / "intervals.svg", interval_plot_svg(an.results, "Selected variables, " +
                                                                              std::to_string(static_cast<int>(std::round(100 * (1 - a.alpha)))) +
                                                                              "% intervals"));

    out << "lambda = " << lambda_obs << " (per observation), sigma = " << an.sigma << ", selected "
        << an.fit.active_set.size() << " of " << X.cols() << " variables\n";
    if (std::find(opts.methods.begin(), opts.methods.end(), Method::stab_t) != opts.methods.end()) {
        out << "high-value (t) variables:";
        for (const auto& s : names_of(an.high_value_t)) out << ' ' << s;
        out << '\n';
    }
    out << std::left << std::setw(14) << "variable" << std::setw(10) << "method" << std::right << std::setw(11)
        << "estimate" << std::setw(12) << "lower" << std::setw(12) << "upper" << std::setw(10) << "p-value" << '\n';
    for (const auto& r : an.results) {
        out << std::left << std::setw(14) << r.name << std::setw(10) << to_string(r.method) << std::right
            << std::setprecision(4) << std::setw(11) << r.point_estimate << std::setw(12) << r.interval.lower
            << std::setw(12) << r.interval.upper << std::setw(10) << r.p_value << (r.failed ? "  FAILED" : "") << '\n';
    }
    return ok;
}

struct SimulateArgs {
    std::string config;
    int replications = 0;
    int threads = 0;
    std::string out = ".";
    bool svg = false;
    bool timestamp = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    Json j;
    try {
        j = Json::parse(read_file(a.config));
    } catch (const Json::parse_error& e) {
        throw InputError("config is not valid JSON: " + std::string(e.what()));
    }
    StudyConfig cfg = config_from_json(j);
    if (a.replications > 0) cfg.replications = a.replications;
    if (a.threads > 0) cfg.threads = a.threads;
    // The thread count never changes the results, so it stays out of the report.
    StudyReport rep = run_study(cfg);
    rep.config.threads = 0;

    ReportDocument doc{metadata("simulate", cfg.seed, a.timestamp), fnv1a_hex(j.dump()), study_to_json(rep)};
    std::filesystem::create_directories(a.out);
    const std::filesystem::path dir(a.out);
    write_file(dir / "study.json", doc.to_json().dump(2) + "\n");
    write_file(dir / "study.csv", study_to_csv(rep));
    if (a.svg) {
        std::ostringstream title;
        title << "n=" << cfg.n << ", p=" << cfg.p << ", lambda=" << std::setprecision(3) << rep.calibration.lambda;
        write_file(dir / "lengths.svg", length_boxplot_svg(rep, title.str()));
    }
    out << "replications " << rep.replications << " (failed " << rep.failed_replications << "), lambda "
        << rep.calibration.lambda << ", signal " << rep.calibration.signal << '\n';
    out << std::left << std::setw(12) << "method" << std::right << std::setw(10) << "intervals" << std::setw(10)
        << "coverage" << std::setw(12) << "median len" << std::setw(10) << "inf %" << '\n';
    for (const auto& m : rep.methods) {
        out << std::left << std::setw(12) << to_string(m.method) << std::right << std::setw(10) << m.intervals
            << std::setw(10) << std::setprecision(3) << m.coverage << std::setw(12) << m.median_length
            << std::setw(10) << 100.0 * m.infinite_proportion << '\n';
    }
    return ok;
}

struct CalibrateArgs {
    int n = 100;
    int p = 50;
    std::string design = "independent";
    double rho = 0.0;
    int blocks = 5;
    int reps = 1000;
    std::uint64_t seed = 1;
    bool json = false;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
    DesignScheme d;
    if (a.design == "independent") d.kind = DesignKind::independent;
    else if (a.design == "block_equicorr") d.kind = DesignKind::block_equicorr;
    else if (a.design == "toeplitz") d.kind = DesignKind::toeplitz;
    else throw InputError("--design must be independent, block_equicorr or toeplitz");
    d.rho = a.rho;
    d.blocks = a.blocks;
    if (a.n < 2 || a.p < 1) throw InputError("--n must be >= 2 and --p >= 1");
    if (a.reps < 100) throw InputError("--reps must be >= 100");
    d.validate(a.p);
    const DeltaCalibration cal = calibrate_delta(a.n, a.p, d, a.reps, a.seed);
    const double lam = universal_lambda(a.n, a.p);
    if (a.json) {
        out << Json{{"n", a.n}, {"p", a.p}, {"delta_low", cal.delta_low}, {"delta_high", cal.delta_high},
                    {"lambda_universal", lam}, {"lambda_universal_sum", lam * a.n}}
                   .dump(2)
            << '\n';
    } else {
        out << std::fixed << std::setprecision(4) << "delta_low  " << cal.delta_low << "\ndelta_high " << cal.delta_high
            << "\nlambda_universal " << lam << " (per observation), " << lam * a.n << " (sum scale)\n";
    }
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Selective inference for lasso-selected coefficients via truncated Gaussian pivots", "tzinf"};
    app.set_version_flag("--version", TZINF_VERSION);
    app.require_subcommand(1);

    AnalyzeArgs aa;
    auto* an = app.add_subcommand("analyze", "Fit the lasso to a data file and report selective intervals");
    an->add_option("input", aa.input, "Comma- or tab-delimited file with a header row")->required();
    an->add_option("--response", aa.response, "Name of the response column")->required();
    an->add_option("--lambda", aa.lambda, "Per-observation penalty, or 'cv' for 10-fold cross-validation")->required();
    an->add_option("--method", aa.methods, "Comma list of naive,bonferroni,tz-v,tz-m,tz-ms,stab-t,stab-l1")
        ->capture_default_str();
    an->add_option("--target", aa.target, "full | partial | stable-t | stable-l1")->capture_default_str();
    an->add_option("--alpha", aa.alpha, "Miscoverage level")->capture_default_str();
    an->add_option("--sigma", aa.sigma, "known:<value> | ols | reid (default: ols when n > p, else reid)");
    an->add_option("--cutoff", aa.cutoff, "Stable-t threshold (default: normal quantile at 1 - alpha/2p)");
    an->add_option("--lambda-high", aa.lambda_high, "Stable-l1 penalty, per observation");
    an->add_option("--seed", aa.seed, "Seed for cross-validation folds")->capture_default_str();
    an->add_option("--out", aa.out, "Output directory")->capture_default_str();
    an->add_option("--exclude", aa.exclude, "Comma list of columns to ignore");
    an->add_flag("--intercept", aa.intercept, "Fit an unpenalized intercept (centers the data)");
    an->add_flag("--svg", aa.svg, "Also write intervals.svg");
    an->add_flag("--timestamp", aa.timestamp, "Record the wall-clock time in the report metadata");

    SimulateArgs sa;
    auto* si = app.add_subcommand("simulate", "Run a simulation study from a JSON config");
    si->add_option("config", sa.config, "Study configuration (JSON)")->required();
    si->add_option("--replications", sa.replications, "Override the configured replication count");
    si->add_option("--threads", sa.threads, "Worker threads (default: TZINF_THREADS or all cores)");
    si->add_option("--out", sa.out, "Output directory")->capture_default_str();
    si->add_flag("--svg", sa.svg, "Also write lengths.svg");
    si->add_flag("--timestamp", sa.timestamp, "Record the wall-clock time in the report metadata");

    CalibrateArgs ca;
    auto* cal = app.add_subcommand("calibrate", "Signal sizes and universal threshold for an (n, p) design");
    cal->add_option("--n", ca.n)->capture_default_str();
    cal->add_option("--p", ca.p)->capture_default_str();
    cal->add_option("--design", ca.design, "independent | block_equicorr | toeplitz")->capture_default_str();
    cal->add_option("--rho", ca.rho)->capture_default_str();
    cal->add_option("--blocks", ca.blocks)->capture_default_str();
    cal->add_option("--reps", ca.reps)->capture_default_str();
    cal->add_option("--seed", ca.seed)->capture_default_str();
    cal->add_flag("--json", ca.json, "Print JSON instead of text");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion& e) {
        out << TZINF_VERSION << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    try {
        if (an->parsed()) return cmd_analyze(aa, out);
        if (si->parsed()) return cmd_simulate(sa, out);
        if (cal->parsed()) return cmd_calibrate(ca, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return numerical_error;
    }
    return input_error;
}

} // namespace cli
} // namespace tzinf
