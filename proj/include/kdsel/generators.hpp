#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kdsel/pointset.hpp"

namespace kdsel {

class ScoreModel;

/// Sobol' direction numbers in the standard Joe-Kuo text layout: a header
/// line, then one row "d s a m_1 ... m_s" per dimension starting at d = 2
/// (dimension 1 is the built-in van der Corput recursion).
class SobolTable {
public:
    static SobolTable load(const std::string& path);

    int max_dim() const { return max_dim_; }

    /// 32 direction integers for 0-based dimension index j < max_dim(),
    /// each scaled so that value = x * 2^-32.
    const std::uint32_t* directions(int j) const { return v_.data() + static_cast<std::size_t>(j) * 32; }

private:
    SobolTable() = default;
    int max_dim_ = 0;
    std::vector<std::uint32_t> v_;
};

/// Shared table loaded once per process from the KDSEL_SOBOL_TABLE
/// environment variable, falling back to the path baked in at build time.
const SobolTable& default_sobol_table();

/// First n points of the Sobol' sequence (Gray-code construction, 32 bits),
/// including the initial all-zeros point. Deterministic.
PointSet sobol(int n, int d, const SobolTable& table);
PointSet sobol(int n, int d);

/// The 2-D Fibonacci set {(k/m, frac(k*phi)) : k = 0..m-1}, phi golden ratio.
PointSet fibonacci(int m);

/// n IID uniform draws from [0,1)^d.
PointSet sample_uniform(int n, int d, std::uint64_t seed);

/// n IID draws from a score model's target distribution.
PointSet sample_target(const ScoreModel& target, int n, std::uint64_t seed);

/// Declarative generator request, mainly for the CLI.
struct GeneratorSpec {
    enum class Kind { sobol, fibonacci, iid_uniform, iid_gaussian_mixture, iid_beta_product };

    Kind kind = Kind::sobol;
    int dim = 2;
    int count = 0;
    std::uint64_t seed = 0;
    /// Target for the IID target kinds; the bundled defaults are used when
    /// null (two-well mixture / Beta(2,4) product).
    std::shared_ptr<const ScoreModel> target;
};

PointSet generate(const GeneratorSpec& spec);

}  // namespace kdsel
