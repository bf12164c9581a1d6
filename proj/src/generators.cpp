#include "kdsel/generators.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kdsel/errors.hpp"
#include "kdsel/kernels.hpp"
#include "kdsel/rng.hpp"

#ifndef KDSEL_SOBOL_TABLE_DEFAULT
#define KDSEL_SOBOL_TABLE_DEFAULT "data/new-joe-kuo-6.64"
#endif

namespace kdsel {

SobolTable SobolTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open direction-number table: " + path);

    SobolTable table;
    std::vector<std::uint32_t> v;

    // Dimension 1: van der Corput in base 2, v_k = 2^(31-k).
    for (int k = 0; k < 32; ++k) v.push_back(1u << (31 - k));
    int dims = 1;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || !std::isdigit(static_cast<unsigned char>(line[first])))
            continue;  // header or blank

        std::istringstream ls(line);
        unsigned long d_col, s, a;
        if (!(ls >> d_col >> s >> a) || s == 0)
            throw ParseError("direction table " + path + ": malformed row at line " +
                             std::to_string(lineno));
        if (d_col != static_cast<unsigned long>(dims) + 1)
            throw ParseError("direction table " + path + ": expected dimension " +
                             std::to_string(dims + 1) + " at line " + std::to_string(lineno));

        std::vector<std::uint32_t> m(s);
        for (unsigned long i = 0; i < s; ++i) {
            unsigned long mi;
            if (!(ls >> mi))
                throw ParseError("direction table " + path + ": missing m value at line " +
                                 std::to_string(lineno));
            if (mi % 2 == 0 || mi >= (1ul << (i + 1)))
                throw ParseError("direction table " + path + ": invalid m value at line " +
                                 std::to_string(lineno));
            m[i] = static_cast<std::uint32_t>(mi);
        }

        std::uint32_t row[32];
        const unsigned long lead = s < 32 ? s : 32;
        for (unsigned long k = 0; k < lead; ++k) row[k] = m[k] << (31 - k);
        for (unsigned long k = s; k < 32; ++k) {
            std::uint32_t x = row[k - s] ^ (row[k - s] >> s);
            for (unsigned long t = 1; t < s; ++t)
                if ((a >> (s - 1 - t)) & 1ul) x ^= row[k - t];
            row[k] = x;
        }
        v.insert(v.end(), row, row + 32);
        ++dims;
    }
    if (dims < 2) throw ParseError("direction table " + path + ": no dimension rows");
    table.max_dim_ = dims;
    table.v_ = std::move(v);
    return table;
}

const SobolTable& default_sobol_table() {
    static const SobolTable table = [] {
        const char* env = std::getenv("KDSEL_SOBOL_TABLE");
        const std::string path = (env && *env) ? env : KDSEL_SOBOL_TABLE_DEFAULT;
        return SobolTable::load(path);
    }();
    return table;
}

PointSet sobol(int n, int d, const SobolTable& table) {
    if (n < 1) throw ContractError("sobol: need n >= 1");
    if (d < 1 || d > table.max_dim())
        throw ConfigError("sobol: dimension " + std::to_string(d) +
                          " outside table support (1.." + std::to_string(table.max_dim()) + ")");

    std::vector<double> coords(static_cast<std::size_t>(n) * d, 0.0);
    std::vector<std::uint32_t> state(static_cast<std::size_t>(d), 0u);
    constexpr double scale = 0x1.0p-32;
    for (int i = 1; i < n; ++i) {
        // Gray-code order: flip the direction indexed by the lowest zero bit
        // of i-1, so consecutive points differ in one direction number.
        const int c = std::countr_one(static_cast<std::uint32_t>(i - 1));
        for (int j = 0; j < d; ++j) {
            state[static_cast<std::size_t>(j)] ^= table.directions(j)[c];
            coords[static_cast<std::size_t>(i) * d + j] =
                static_cast<double>(state[static_cast<std::size_t>(j)]) * scale;
        }
    }
    return PointSet(d, std::move(coords));
}

PointSet sobol(int n, int d) { return sobol(n, d, default_sobol_table()); }

PointSet fibonacci(int m) {
    if (m < 1) throw ContractError("fibonacci: need m >= 1");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<double> coords(static_cast<std::size_t>(m) * 2);
    for (int k = 0; k < m; ++k) {
        const double y = static_cast<double>(k) * phi;
        coords[static_cast<std::size_t>(k) * 2] = static_cast<double>(k) / m;
        coords[static_cast<std::size_t>(k) * 2 + 1] = y - std::floor(y);
    }
    return PointSet(2, std::move(coords));
}

PointSet sample_uniform(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ContractError("sample_uniform: need n >= 1, d >= 1");
    Rng rng(seed);
    std::vector<double> coords(static_cast<std::size_t>(n) * d);
    for (double& c : coords) c = rng.uniform();
    return PointSet(d, std::move(coords));
}

PointSet sample_target(const ScoreModel& target, int n, std::uint64_t seed) {
    if (n < 1) throw ContractError("sample_target: need n >= 1");
    Rng rng(seed);
    const int d = target.dim();
    std::vector<double> coords(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) target.sample(rng, coords.data() + static_cast<std::size_t>(i) * d);
    return PointSet(d, std::move(coords));
}

PointSet generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GeneratorSpec::Kind::sobol:
            return sobol(spec.count, spec.dim);
        case GeneratorSpec::Kind::fibonacci:
            if (spec.dim != 2) throw ConfigError("fibonacci generator is 2-D only");
            return fibonacci(spec.count);
        case GeneratorSpec::Kind::iid_uniform:
            return sample_uniform(spec.count, spec.dim, spec.seed);
        case GeneratorSpec::Kind::iid_gaussian_mixture: {
            const auto target = spec.target ? spec.target : make_default_mixture_score();
            if (spec.dim != target->dim())
                throw ConfigError("generator dim does not match the mixture target");
            return sample_target(*target, spec.count, spec.seed);
        }
        case GeneratorSpec::Kind::iid_beta_product: {
            const auto target = spec.target ? spec.target : make_default_beta_score();
            if (spec.dim != target->dim())
                throw ConfigError("generator dim does not match the beta target");
            return sample_target(*target, spec.count, spec.seed);
        }
    }
    throw ConfigError("unknown generator kind");
}

}  // namespace kdsel
