#pragma once

#include <span>
#include <string>
#include <vector>

namespace kdsel {

/// Dense row-major set of n points in d dimensions. Immutable after
/// construction; safe for concurrent shared reads.
class PointSet {
public:
    /// coords.size() must be a positive multiple of dim; all values finite.
    PointSet(int dim, std::vector<double> coords);

    /// Parse a plain-text point file: one point per line, whitespace-separated
    /// decimals, '#'-prefixed comment lines and blank lines skipped. With
    /// expect_unit_cube every coordinate is verified to lie in [0,1].
    static PointSet load(const std::string& path, bool expect_unit_cube);

    /// Writes the same format back with 17 significant digits, which
    /// round-trips doubles exactly.
    void save(const std::string& path) const;

    int dim() const { return dim_; }
    int count() const { return count_; }

    const double* point(int i) const { return coords_.data() + static_cast<std::size_t>(i) * dim_; }
    std::span<const double> row(int i) const { return {point(i), static_cast<std::size_t>(dim_)}; }
    double coord(int i, int j) const { return coords_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<double>& data() const { return coords_; }

    /// True iff every coordinate lies in [0,1] (closed; boundary accepted).
    bool in_unit_cube() const;

private:
    int dim_;
    int count_;
    std::vector<double> coords_;
};

/// Ordered subset of row indices of a parent set: strictly increasing,
/// duplicate-free, all in [0, parent_count).
class IndexSubset {
public:
    IndexSubset(int parent_count, std::vector<int> members);

    int parent_count() const { return parent_count_; }
    int size() const { return static_cast<int>(members_.size()); }
    const std::vector<int>& members() const { return members_; }

    void save(const std::string& path) const;
    static IndexSubset load(const std::string& path, int parent_count);

    bool operator==(const IndexSubset& other) const = default;

private:
    int parent_count_;
    std::vector<int> members_;
};

/// Materializes the rows of S, in index order.
PointSet gather(const PointSet& points, const IndexSubset& subset);

}  // namespace kdsel
