#include "kdsel/pointset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kdsel/errors.hpp"

namespace kdsel {

PointSet::PointSet(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ < 1) throw ContractError("PointSet: dimension must be >= 1");
    if (coords_.empty() || coords_.size() % static_cast<std::size_t>(dim_) != 0)
        throw ContractError("PointSet: coordinate count must be a positive multiple of dim");
    count_ = static_cast<int>(coords_.size() / static_cast<std::size_t>(dim_));
    for (double c : coords_)
        if (!std::isfinite(c)) throw ParseError("PointSet: non-finite coordinate");
}

PointSet PointSet::load(const std::string& path, bool expect_unit_cube) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open point file: " + path);

    std::vector<double> coords;
    int dim = -1;
    int lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                throw ParseError("point file " + path + ": bad number '" + tok + "' at line " +
                                 std::to_string(lineno));
            }
            if (used != tok.size())
                throw ParseError("point file " + path + ": bad number '" + tok + "' at line " +
                                 std::to_string(lineno));
            if (!std::isfinite(v))
                throw ParseError("point file " + path + ": non-finite value at line " +
                                 std::to_string(lineno));
            row.push_back(v);
        }
        if (dim < 0) {
            dim = static_cast<int>(row.size());
            if (dim == 0) throw ParseError("point file " + path + ": empty data line " + std::to_string(lineno));
        } else if (static_cast<int>(row.size()) != dim) {
            throw ParseError("point file " + path + ": ragged row at line " + std::to_string(lineno) +
                             " (expected " + std::to_string(dim) + " columns, got " +
                             std::to_string(row.size()) + ")");
        }
        if (expect_unit_cube)
            for (double v : row)
                if (v < 0.0 || v > 1.0)
                    throw DomainError("point file " + path + ": coordinate " + std::to_string(v) +
                                      " outside [0,1] at line " + std::to_string(lineno));
        coords.insert(coords.end(), row.begin(), row.end());
    }
    if (dim <= 0) throw ParseError("point file " + path + ": no data lines");
    return PointSet(dim, std::move(coords));
}

void PointSet::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[32];
    for (int i = 0; i < count_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", coord(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

bool PointSet::in_unit_cube() const {
    for (double c : coords_)
        if (c < 0.0 || c > 1.0) return false;
    return true;
}

IndexSubset::IndexSubset(int parent_count, std::vector<int> members)
    : parent_count_(parent_count), members_(std::move(members)) {
    if (parent_count_ < 1) throw ContractError("IndexSubset: parent_count must be >= 1");
    if (members_.empty()) throw ContractError("IndexSubset: must be non-empty");
    if (static_cast<int>(members_.size()) > parent_count_)
        throw ContractError("IndexSubset: more members than parent points");
    int prev = -1;
    for (int idx : members_) {
        if (idx <= prev) throw ContractError("IndexSubset: indices must be strictly increasing");
        if (idx < 0 || idx >= parent_count_) throw ContractError("IndexSubset: index out of range");
        prev = idx;
    }
}

void IndexSubset::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (int idx : members_) out << idx << '\n';
    if (!out) throw IoError("write failed: " + path);
}

IndexSubset IndexSubset::load(const std::string& path, int parent_count) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open index file: " + path);
    std::vector<int> members;
    int v;
    while (in >> v) members.push_back(v);
    return IndexSubset(parent_count, std::move(members));
}

PointSet gather(const PointSet& points, const IndexSubset& subset) {
    if (subset.parent_count() != points.count())
        throw ContractError("gather: subset parent_count does not match point set");
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(subset.size()) * points.dim());
    for (int idx : subset.members()) {
        const double* p = points.point(idx);
        coords.insert(coords.end(), p, p + points.dim());
    }
    return PointSet(points.dim(), std::move(coords));
}

}  // namespace kdsel
