#pragma once

#include <string>
#include <vector>

namespace tzinf {

struct Interval {
    double lo;
    double hi;
};

// Ordered disjoint union of closed intervals on the extended real line.
// Intervals separated by a gap no larger than the merge tolerance are fused.
class TruncationSet {
public:
    TruncationSet() = default;
    explicit TruncationSet(std::vector<Interval> intervals, double merge_tol = 0.0);

    static TruncationSet whole_line();
    static TruncationSet single(double lo, double hi);

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    bool empty() const noexcept { return intervals_.empty(); }
    size_t size() const noexcept { return intervals_.size(); }
    auto begin() const noexcept { return intervals_.begin(); }
    auto end() const noexcept { return intervals_.end(); }

    double infimum() const;
    double supremum() const;

    bool contains(double x, double tol = 0.0) const;
    // Distance from x to the nearest support point (0 inside).
    double distance(double x) const;
    // Nearest support point to x.
    double nearest(double x) const;

    TruncationSet intersect(const TruncationSet& other, double merge_tol = 0.0) const;
    TruncationSet unite(const TruncationSet& other, double merge_tol = 0.0) const;
    TruncationSet clip(double lo, double hi) const;

    // Every interval of *this lies inside some interval of other, with slack tol.
    bool subset_of(const TruncationSet& other, double tol = 0.0) const;

    // Largest endpoint discrepancy to other when both have the same number of
    // intervals; +inf otherwise. Matching infinite endpoints count as zero.
    double endpoint_distance(const TruncationSet& other) const;

    std::string to_string() const;

private:
    std::vector<Interval> intervals_;
};

} // namespace tzinf
