#include "tzinf/geometry.hpp"

#include "tzinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace tzinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& XS) {
    if (XS.cols() > XS.rows()) throw RankError("selected columns outnumber observations");
    Eigen::LLT<Eigen::MatrixXd> llt(XS.transpose() * XS);
    if (llt.info() != Eigen::Success) throw RankError("Gram matrix of the selected columns is singular");
    const Eigen::VectorXd d = Eigen::MatrixXd(llt.matrixL()).diagonal().cwiseAbs2();
    if (d.size() > 0 && d.minCoeff() <= 1e-12 * d.maxCoeff()) {
        throw RankError("selected columns are numerically collinear");
    }
    return llt;
}

int position_of(const IndexList& S, int j) {
    auto it = std::find(S.begin(), S.end(), j);
    if (it == S.end()) throw InputError("variable " + std::to_string(j) + " is not in the column set");
    return static_cast<int>(it - S.begin());
}

void check_model(const DesignMatrix& X, const IndexList& M, const SignList& s) {
    if (M.size() != s.size()) throw InputError("active set and sign list differ in length");
    for (int m : M)
        if (m < 0 || m >= X.cols()) throw InputError("active index out of range");
    for (int v : s)
        if (v != 1 && v != -1) throw InputError("signs must be +1 or -1");
}

bool contains_index(const IndexList& M, int j) { return std::find(M.begin(), M.end(), j) != M.end(); }

// Which constraint bounds a constant-(M, s) piece on one side, and the model
// obtained by crossing it.
struct Crossing {
    enum Kind { None, Drop, EnterPos, EnterNeg } kind = None;
    int var = -1;
    bool tie = false;
};

struct Piece {
    IndexList M;
    SignList s;
    Eigen::VectorXd a0, a1;  // beta_M(z) = a0 + a1 z
    double lo = -kInf, hi = kInf;
    Crossing at_lo, at_hi;
};

class Sweeper {
public:
    Sweeper(const DesignMatrix& X, const LineDecomposition& line, double lambda, const PartitionOptions& opts,
            double zscale)
        : X_(X), line_(line), lambda_(lambda), opts_(opts) {
        Xtnu_ = X.values().transpose() * line.nu;
        Xtc_ = X.values().transpose() * line.c;
        cnorm_ = line.c.norm();
        tie_tol_ = 1e-9 * zscale;
        match_tol_ = 1e-6 * zscale;
        opts_.lasso.penalty = lambda;
        opts_.lasso.include_intercept = false;
    }

    double tie_tol() const { return tie_tol_; }

    Piece make_piece(IndexList M, SignList s) const {
        Piece P;
        const Eigen::Index p = X_.cols();
        Eigen::VectorXd g0, g1;
        Eigen::VectorXd ginv_diag;
        if (M.empty()) {
            g0 = -Xtnu_;
            g1 = -Xtc_;
        } else {
            const Eigen::MatrixXd XM = X_.columns(M);
            const auto llt = factor_gram(XM);
            Eigen::VectorXd sv(static_cast<Eigen::Index>(M.size())), rhs0(sv.size()), rhs1(sv.size());
            for (size_t k = 0; k < M.size(); ++k) {
                sv(k) = s[k];
                rhs0(k) = Xtnu_(M[k]);
                rhs1(k) = Xtc_(M[k]);
            }
            P.a0 = llt.solve(rhs0 - lambda_ * sv);
            P.a1 = llt.solve(rhs1);
            g0 = X_.values().transpose() * (XM * P.a0) - Xtnu_;
            g1 = X_.values().transpose() * (XM * P.a1) - Xtc_;
            ginv_diag = llt.solve(Eigen::MatrixXd::Identity(sv.size(), sv.size())).diagonal();
        }

        std::vector<double> lo_c, hi_c;
        auto consider = [&](double gamma, double delta, double zero_tol, Crossing cr) {
            if (std::abs(gamma) <= zero_tol) return;
            const double t = delta / gamma;
            if (gamma > 0) {
                if (t < P.hi) {
                    P.hi = t;
                    P.at_hi = cr;
                }
                hi_c.push_back(t);
            } else {
                if (t > P.lo) {
                    P.lo = t;
                    P.at_lo = cr;
                }
                lo_c.push_back(t);
            }
        };

        for (size_t k = 0; k < M.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double tol = 1e-12 * std::sqrt(ginv_diag(kk)) * cnorm_;
            consider(-s[k] * P.a1(kk), s[k] * P.a0(kk), tol, {Crossing::Drop, M[k]});
        }
        std::vector<char> in_model(static_cast<size_t>(p), 0);
        for (int m : M) in_model[static_cast<size_t>(m)] = 1;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (in_model[static_cast<size_t>(j)]) continue;
            const double tol = 1e-12 * std::sqrt(X_.column_sq_norms()(j)) * cnorm_;
            consider(g1(j), lambda_ - g0(j), tol, {Crossing::EnterNeg, static_cast<int>(j)});
            consider(-g1(j), lambda_ + g0(j), tol, {Crossing::EnterPos, static_cast<int>(j)});
        }
        auto ties = [&](const std::vector<double>& cands, double best) {
            if (std::isinf(best)) return false;
            int n = 0;
            for (double t : cands)
                if (std::abs(t - best) <= tie_tol_) ++n;
            return n > 1;
        };
        P.at_hi.tie = ties(hi_c, P.hi);
        P.at_lo.tie = ties(lo_c, P.lo);
        P.M = std::move(M);
        P.s = std::move(s);
        return P;
    }

    Eigen::VectorXd beta_at(const Piece& P, double z) const {
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(X_.cols());
        for (size_t k = 0; k < P.M.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            beta(P.M[k]) = P.a0(kk) + P.a1(kk) * z;
        }
        return beta;
    }

    LassoFit solve_at(double z, const Eigen::VectorXd& beta0) const {
        return fit_lasso_from(X_, ResponseVector(line_.point(z)), opts_.lasso, beta0);
    }

    // Next piece beyond `boundary` in direction dir (+1 right, -1 left), not
    // looking past `limit`.
    Piece step(const Piece& cur, double boundary, int dir, double limit, int& nudges) const {
        const Crossing& cr = dir > 0 ? cur.at_hi : cur.at_lo;
        if (!cr.tie && cr.kind != Crossing::None) {
            IndexList M = cur.M;
            SignList s = cur.s;
            if (cr.kind == Crossing::Drop) {
                const int pos = position_of(M, cr.var);
                M.erase(M.begin() + pos);
                s.erase(s.begin() + pos);
            } else {
                auto it = std::lower_bound(M.begin(), M.end(), cr.var);
                const auto pos = it - M.begin();
                M.insert(it, cr.var);
                s.insert(s.begin() + pos, cr.kind == Crossing::EnterPos ? 1 : -1);
            }
            std::optional<Piece> P;
            try {
                P = make_piece(M, s);
            } catch (const RankError&) {
            }
            if (P && reaches(*P, boundary, dir)) {
                const double far = dir > 0 ? std::min(P->hi, limit) : std::max(P->lo, limit);
                const double mid = 0.5 * (boundary + far);
                const LassoFit fit = solve_at(mid, beta_at(*P, mid));
                if (fit.active_set == P->M && fit.signs == P->s) return *P;
            }
        }

        const Eigen::VectorXd beta0 = beta_at(cur, boundary);
        for (int k = 0; k <= opts_.max_nudges; ++k) {
            const double eps = 1e-7 * (1.0 + std::abs(boundary)) * std::pow(10.0, k);
            double zt = boundary + dir * eps;
            if (dir * (zt - limit) >= 0) zt = 0.5 * (boundary + limit);
            const LassoFit fit = solve_at(zt, beta0);
            if (fit.active_set == cur.M && fit.signs == cur.s) continue;
            Piece P;
            try {
                P = make_piece(fit.active_set, fit.signs);
            } catch (const RankError&) {
                continue;
            }
            if (P.lo <= zt + match_tol_ && P.hi >= zt - match_tol_ && reaches(P, boundary, dir)) {
                ++nudges;
                return P;
            }
        }
        std::ostringstream msg;
        msg.precision(12);
        msg << "degenerate selection boundary at z = " << boundary << "; epsilon steps did not resolve the next piece";
        throw NumericalError(msg.str());
    }

private:
    bool reaches(const Piece& P, double boundary, int dir) const {
        if (dir > 0) return P.lo <= boundary + match_tol_ && P.hi > boundary + tie_tol_;
        return P.hi >= boundary - match_tol_ && P.lo < boundary - tie_tol_;
    }

    const DesignMatrix& X_;
    const LineDecomposition& line_;
    double lambda_;
    PartitionOptions opts_;
    Eigen::VectorXd Xtnu_, Xtc_;
    double cnorm_ = 0.0;
    double tie_tol_ = 0.0;
    double match_tol_ = 0.0;
};

std::pair<double, double> segment_extent(const LinePartition& part, size_t i) {
    const Segment& seg = part.segments[i];
    const double lo = i == 0 ? part.left_extent : seg.z_lo;
    const double hi = i + 1 == part.segments.size() ? part.right_extent : seg.z_hi;
    return {lo, hi};
}

template <class Pred>
TruncationSet collect(const LinePartition& part, Pred pred) {
    std::vector<Interval> out;
    for (size_t i = 0; i < part.segments.size(); ++i) {
        if (!pred(part.segments[i])) continue;
        const auto [lo, hi] = segment_extent(part, i);
        out.push_back({lo, hi});
    }
    return TruncationSet(std::move(out), part.merge_tol);
}

TruncationSet require_nonempty(TruncationSet set, const char* what) {
    if (set.empty()) throw EmptyEventError(std::string("conditioning event never occurs on the line: ") + what);
    return set;
}

} // namespace

bool Polyhedron::contains(const Eigen::VectorXd& y, double tol) const {
    if (y.size() != A.cols()) throw InputError("point dimension does not match polyhedron");
    return ((A * y) - b).maxCoeff() <= tol;
}

LineDecomposition decompose_line(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    if (eta.size() != y.size()) throw InputError("eta and y differ in length");
    const double nn = eta.squaredNorm();
    if (!(nn > 0.0) || !std::isfinite(nn)) throw InputError("contrast vector eta must be nonzero and finite");
    LineDecomposition line;
    line.eta = eta;
    line.c = eta / nn;
    line.z_obs = eta.dot(y);
    line.nu = y - line.c * line.z_obs;
    return line;
}

Eigen::MatrixXd gram_inverse(const DesignMatrix& X, const IndexList& S) {
    const auto llt = factor_gram(X.columns(S));
    return llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(S.size())));
}

Eigen::VectorXd coefficient_contrast(const DesignMatrix& X, const IndexList& S, int j) {
    const int pos = position_of(S, j);
    const Eigen::MatrixXd XS = X.columns(S);
    const auto llt = factor_gram(XS);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S.size()));
    e(pos) = 1.0;
    return XS * llt.solve(e);
}

Polyhedron polyhedron_for_model_signs(const DesignMatrix& X, const IndexList& M, const SignList& s, double lambda) {
    check_model(X, M, s);
    const Eigen::Index n = X.rows(), p = X.cols();
    const auto m = static_cast<Eigen::Index>(M.size());
    Polyhedron P;
    if (m == 0) {
        P.A.resize(2 * p, n);
        P.A.topRows(p) = X.values().transpose();
        P.A.bottomRows(p) = -X.values().transpose();
        P.b = Eigen::VectorXd::Constant(2 * p, lambda);
        return P;
    }
    IndexList rest;
    for (int j = 0; j < p; ++j)
        if (!contains_index(M, j)) rest.push_back(j);
    const auto q = static_cast<Eigen::Index>(rest.size());

    const Eigen::MatrixXd XM = X.columns(M);
    const auto llt = factor_gram(XM);
    Eigen::VectorXd sv(m);
    for (Eigen::Index k = 0; k < m; ++k) sv(k) = s[static_cast<size_t>(k)];
    const Eigen::MatrixXd pinv = llt.solve(XM.transpose());  // m x n
    const Eigen::VectorXd ginv_s = llt.solve(sv);

    P.A.resize(m + 2 * q, n);
    P.b.resize(m + 2 * q);
    P.A.topRows(m) = -(sv.asDiagonal() * pinv);
    P.b.head(m) = -lambda * sv.cwiseProduct(ginv_s);
    if (q > 0) {
        const Eigen::MatrixXd Xr = X.columns(rest);
        const Eigen::MatrixXd cross = Xr.transpose() * XM;                     // q x m
        const Eigen::MatrixXd resid = Xr.transpose() - cross * pinv;           // X_r'(I - P_M)
        const Eigen::VectorXd shift = cross * ginv_s;
        P.A.middleRows(m, q) = resid;
        P.b.segment(m, q) = lambda * (Eigen::VectorXd::Ones(q) - shift);
        P.A.bottomRows(q) = -resid;
        P.b.tail(q) = lambda * (Eigen::VectorXd::Ones(q) + shift);
    }
    return P;
}

SliceBounds truncation_interval(const Polyhedron& P, const LineDecomposition& line, double ray_tol) {
    if (P.A.cols() != line.c.size() || P.A.rows() != P.b.size()) {
        throw InputError("polyhedron and line dimensions disagree");
    }
    const Eigen::VectorXd Ac = P.A * line.c;
    const Eigen::VectorXd Anu = P.A * line.nu;
    const double cnorm = line.c.norm();
    const double nunorm = line.nu.norm();
    SliceBounds out{-kInf, kInf, kInf};
    for (Eigen::Index j = 0; j < P.A.rows(); ++j) {
        const double rownorm = P.A.row(j).norm();
        const double slack = P.b(j) - Anu(j);
        if (std::abs(Ac(j)) <= ray_tol * rownorm * cnorm) {
            out.v_zero = std::min(out.v_zero, slack);
            if (slack < -1e-10 * (std::abs(P.b(j)) + rownorm * nunorm)) {
                throw EmptyEventError("line is parallel to a violated constraint");
            }
            continue;
        }
        const double t = slack / Ac(j);
        if (Ac(j) > 0) out.v_plus = std::min(out.v_plus, t);
        else out.v_minus = std::max(out.v_minus, t);
    }
    if (out.v_minus > out.v_plus) throw EmptyEventError("line misses the polyhedron");
    return out;
}

TruncationSet full_target_truncation(const DesignMatrix& X, const ResponseVector& y, int j, double lambda) {
    const Eigen::Index p = X.cols();
    if (j < 0 || j >= p) throw InputError("variable index out of range");
    if (X.rows() != y.size()) throw InputError("dimension mismatch between X and y");
    if (X.rows() <= p) throw RankError("full-target closed form requires n > p");
    IndexList all(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) all[static_cast<size_t>(k)] = k;
    const Eigen::VectorXd eta = coefficient_contrast(X, all, j);
    const LineDecomposition line = decompose_line(eta, y.values());
    const double nn = eta.squaredNorm();

    double xr;
    if (p == 1) {
        xr = -X.col(j).dot(line.nu);
    } else {
        IndexList others;
        for (int k = 0; k < p; ++k)
            if (k != j) others.push_back(k);
        const DesignMatrix Xo(X.columns(others));
        LassoOptions opts;
        opts.penalty = lambda;
        const LassoFit fit = fit_lasso(Xo, ResponseVector(line.nu), opts);
        const Eigen::VectorXd r = Xo.values() * fit.coefficients - line.nu;
        xr = X.col(j).dot(r);
    }
    const double a = nn * (xr - lambda);
    const double b = nn * (xr + lambda);
    return TruncationSet({{-kInf, a}, {b, kInf}});
}

LinePartition line_partition(const DesignMatrix& X, const LineDecomposition& line, double lambda, double z_min,
                             double z_max, const PartitionOptions& opts, const LassoFit* start_fit) {
    if (line.nu.size() != X.rows()) throw InputError("line dimension does not match design rows");
    if (!(std::isfinite(z_min) && std::isfinite(z_max) && z_min < z_max)) {
        throw InputError("working range must be finite with z_min < z_max");
    }
    if (line.z_obs < z_min || line.z_obs > z_max) throw InputError("working range must contain z_obs");
    if (!(lambda > 0.0)) throw InputError("line partition needs a positive penalty");
    if (opts.max_segments < 1) throw InputError("max_segments must be >= 1");

    const double zscale = (z_max - z_min) / 40.0;
    Sweeper sw(X, line, lambda, opts, zscale);

    LassoFit fit0;
    if (start_fit) {
        fit0 = *start_fit;
    } else {
        LassoOptions lo = opts.lasso;
        lo.penalty = lambda;
        lo.include_intercept = false;
        fit0 = fit_lasso(X, ResponseVector(line.point(line.z_obs)), lo);
    }
    const Piece start = sw.make_piece(fit0.active_set, fit0.signs);
    const double slack = 1e-6 * zscale;
    if (line.z_obs < start.lo - slack || line.z_obs > start.hi + slack) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "observed fit is inconsistent with its own (M, s) region: z_obs = " << line.z_obs << " but region is ["
            << start.lo << ", " << start.hi << "]";
        throw NumericalError(msg.str());
    }

    LinePartition part;
    part.z_min = z_min;
    part.z_max = z_max;
    part.lambda = lambda;
    part.merge_tol = opts.merge_tol;

    auto over_budget = [&](size_t count) {
        if (count > static_cast<size_t>(opts.max_segments)) {
            throw NumericalError("line partition exceeded " + std::to_string(opts.max_segments) +
                                 " segments; instance is pathological or the range is too wide");
        }
    };

    std::vector<Segment> right;
    Piece cur = start;
    double b = start.hi;
    while (b < z_max) {
        Piece nxt = sw.step(cur, b, +1, z_max, part.nudges);
        right.push_back({b, std::min(nxt.hi, z_max), nxt.M, nxt.s});
        over_budget(right.size() + 1);
        b = nxt.hi;
        cur = std::move(nxt);
    }
    part.right_extent = cur.hi;

    std::vector<Segment> left;
    cur = start;
    b = start.lo;
    while (b > z_min) {
        Piece nxt = sw.step(cur, b, -1, z_min, part.nudges);
        left.push_back({std::max(nxt.lo, z_min), b, nxt.M, nxt.s});
        over_budget(right.size() + left.size() + 1);
        b = nxt.lo;
        cur = std::move(nxt);
    }
    part.left_extent = cur.lo;

    part.segments.reserve(left.size() + right.size() + 1);
    part.segments.assign(left.rbegin(), left.rend());
    part.segments.push_back({std::max(start.lo, z_min), std::min(start.hi, z_max), start.M, start.s});
    part.segments.insert(part.segments.end(), right.begin(), right.end());
    return part;
}

TruncationSet model_truncation(const LinePartition& part, const IndexList& M) {
    return require_nonempty(collect(part, [&](const Segment& s) { return s.active == M; }), "active set");
}

TruncationSet model_sign_truncation(const LinePartition& part, const IndexList& M, const SignList& s) {
    return require_nonempty(collect(part, [&](const Segment& seg) { return seg.active == M && seg.signs == s; }),
                            "active set and signs");
}

TruncationSet variable_truncation(const LinePartition& part, int j) {
    return require_nonempty(collect(part, [&](const Segment& s) { return contains_index(s.active, j); }),
                            "variable selected");
}

TruncationSet stable_t_truncation(const LinePartition& part, const DesignMatrix& X, const LineDecomposition& line,
                                  int j, const IndexList& H, double cutoff, double sigma) {
    if (!(cutoff > 0.0)) throw InputError("stable-t cutoff must be positive");
    if (!(sigma > 0.0)) throw InputError("sigma must be positive");
    const double thr = cutoff * sigma;
    const double cnorm = line.c.norm();
    TruncationSet out;
    for (size_t i = 0; i < part.segments.size(); ++i) {
        const Segment& seg = part.segments[i];
        if (!contains_index(seg.active, j)) continue;
        if (!std::all_of(H.begin(), H.end(), [&](int h) { return contains_index(seg.active, h); })) continue;
        const auto [lo, hi] = segment_extent(part, i);
        TruncationSet piece = TruncationSet::single(lo, hi);

        const Eigen::MatrixXd XM = X.columns(seg.active);
        const Eigen::MatrixXd W = XM * gram_inverse(X, seg.active);
        for (size_t k = 0; k < seg.active.size() && !piece.empty(); ++k) {
            const Eigen::VectorXd xt = W.col(static_cast<Eigen::Index>(k)).normalized();
            const double ct = line.c.dot(xt);
            const double nt = line.nu.dot(xt);
            const bool high = contains_index(H, seg.active[k]);
            if (std::abs(ct) <= 1e-12 * cnorm) {
                if ((std::abs(nt) > thr) != high) piece = TruncationSet();
                continue;
            }
            const double sg = ct > 0 ? 1.0 : -1.0;
            const double ck = (-sg * nt - thr) / std::abs(ct);
            const double dk = (-sg * nt + thr) / std::abs(ct);
            const TruncationSet cond = high ? TruncationSet({{-kInf, ck}, {dk, kInf}}) : TruncationSet::single(ck, dk);
            piece = piece.intersect(cond);
        }
        out = out.unite(piece, part.merge_tol);
    }
    return require_nonempty(std::move(out), "variable selected with the observed high-value set");
}

TruncationSet stable_l1_truncation(const LinePartition& at_lambda, const LinePartition& at_lambda_high, int j,
                                   const IndexList& H) {
    const TruncationSet sel = variable_truncation(at_lambda, j);
    const TruncationSet high = collect(at_lambda_high, [&](const Segment& s) { return s.active == H; });
    return require_nonempty(sel.intersect(high, at_lambda.merge_tol), "variable selected with the observed high-value set");
}

TruncationSet stable_l1_truncation(const DesignMatrix& X, const LineDecomposition& line, int j, double lambda,
                                   double lambda_high, const IndexList& H, double z_min, double z_max,
                                   const PartitionOptions& opts) {
    if (!(lambda_high > lambda)) throw InputError("lambda_high must exceed lambda");
    const LinePartition a = line_partition(X, line, lambda, z_min, z_max, opts);
    const LinePartition b = line_partition(X, line, lambda_high, z_min, z_max, opts);
    return stable_l1_truncation(a, b, j, H);
}

TruncationSet grid_truncation(const Selector& selector, const LineDecomposition& line, const std::vector<double>& grid,
                              double refine_tol) {
    if (grid.size() < 2) throw InputError("grid needs at least two points");
    if (!std::is_sorted(grid.begin(), grid.end())) throw InputError("grid must be sorted");
    if (!(refine_tol > 0.0)) throw InputError("refine_tol must be positive");

    auto eval = [&](double z) {
        try {
            return selector(line.point(z));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "selector failed at z = " << z << ": " << e.what();
            throw NumericalError(msg.str());
        }
    };
    auto refine = [&](double a, double b, bool at_a) {
        while (b - a > refine_tol) {
            const double m = 0.5 * (a + b);
            if (eval(m) == at_a) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    std::vector<Interval> out;
    bool prev = eval(grid.front());
    double start = grid.front();
    for (size_t k = 1; k < grid.size(); ++k) {
        const bool now = eval(grid[k]);
        if (now == prev) continue;
        const double edge = refine(grid[k - 1], grid[k], prev);
        if (prev) out.push_back({start, edge});
        else start = edge;
        prev = now;
    }
    if (prev) out.push_back({start, grid.back()});
    return TruncationSet(std::move(out));
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InputError("grid needs finite lo < hi and positive step");
    }
    const auto n = static_cast<size_t>(std::ceil((hi - lo) / step));
    std::vector<double> g;
    g.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    g.push_back(hi);
    return g;
}

} // namespace tzinf
