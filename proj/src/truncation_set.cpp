#include "tzinf/truncation_set.hpp"

#include "tzinf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tzinf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TruncationSet::TruncationSet(std::vector<Interval> intervals, double merge_tol) {
    for (const auto& iv : intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi)) throw InputError("interval endpoint is NaN");
        if (iv.lo > iv.hi) throw InputError("interval with lo > hi");
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : intervals) {
        if (!intervals_.empty() && iv.lo - intervals_.back().hi <= merge_tol) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }
}

TruncationSet TruncationSet::whole_line() { return TruncationSet({{-kInf, kInf}}); }

TruncationSet TruncationSet::single(double lo, double hi) { return TruncationSet({{lo, hi}}); }

double TruncationSet::infimum() const {
    if (intervals_.empty()) throw EmptyEventError("empty truncation set has no infimum");
    return intervals_.front().lo;
}

double TruncationSet::supremum() const {
    if (intervals_.empty()) throw EmptyEventError("empty truncation set has no supremum");
    return intervals_.back().hi;
}

bool TruncationSet::contains(double x, double tol) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [&](const Interval& iv) { return x >= iv.lo - tol && x <= iv.hi + tol; });
}

double TruncationSet::distance(double x) const {
    double best = kInf;
    for (const auto& iv : intervals_) {
        if (x >= iv.lo && x <= iv.hi) return 0.0;
        best = std::min(best, x < iv.lo ? iv.lo - x : x - iv.hi);
    }
    return best;
}

double TruncationSet::nearest(double x) const {
    double best = std::numeric_limits<double>::quiet_NaN();
    double dist = kInf;
    for (const auto& iv : intervals_) {
        if (x >= iv.lo && x <= iv.hi) return x;
        const double cand = x < iv.lo ? iv.lo : iv.hi;
        if (std::abs(cand - x) < dist) {
            dist = std::abs(cand - x);
            best = cand;
        }
    }
    return best;
}

TruncationSet TruncationSet::intersect(const TruncationSet& other, double merge_tol) const {
    std::vector<Interval> out;
    size_t i = 0, k = 0;
    while (i < intervals_.size() && k < other.intervals_.size()) {
        const auto& a = intervals_[i];
        const auto& b = other.intervals_[k];
        const double lo = std::max(a.lo, b.lo);
        const double hi = std::min(a.hi, b.hi);
        if (lo <= hi) out.push_back({lo, hi});
        if (a.hi < b.hi) ++i;
        else ++k;
    }
    return TruncationSet(std::move(out), merge_tol);
}

TruncationSet TruncationSet::unite(const TruncationSet& other, double merge_tol) const {
    std::vector<Interval> all = intervals_;
    all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
    return TruncationSet(std::move(all), merge_tol);
}

TruncationSet TruncationSet::clip(double lo, double hi) const {
    return intersect(TruncationSet::single(lo, hi));
}

bool TruncationSet::subset_of(const TruncationSet& other, double tol) const {
    for (const auto& iv : intervals_) {
        const bool inside = std::any_of(other.intervals_.begin(), other.intervals_.end(), [&](const Interval& o) {
            return iv.lo >= o.lo - tol && iv.hi <= o.hi + tol;
        });
        if (!inside) return false;
    }
    return true;
}

double TruncationSet::endpoint_distance(const TruncationSet& other) const {
    if (intervals_.size() != other.intervals_.size()) return kInf;
    auto gap = [](double a, double b) {
        if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : kInf;
        return std::abs(a - b);
    };
    double worst = 0.0;
    for (size_t i = 0; i < intervals_.size(); ++i) {
        worst = std::max(worst, gap(intervals_[i].lo, other.intervals_[i].lo));
        worst = std::max(worst, gap(intervals_[i].hi, other.intervals_[i].hi));
    }
    return worst;
}

std::string TruncationSet::to_string() const {
    if (intervals_.empty()) return "{}";
    std::ostringstream os;
    os.precision(10);
    for (size_t i = 0; i < intervals_.size(); ++i) {
        if (i) os << " U ";
        os << '[' << intervals_[i].lo << ", " << intervals_[i].hi << ']';
    }
    return os.str();
}

} // namespace tzinf
