#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsdde/errors.hpp"
#include "nsdde/matrix.hpp"
#include "nsdde/rng.hpp"

namespace nsdde {

// One-step transition probabilities exp(eps * Q) of the embedded chain.
struct TransitionMatrix {
    Matrix p;
    double eps = 0.0;

    std::size_t mode_count() const { return p.rows; }
};

struct ChainSample {
    std::vector<int> modes;  // 1-based mode indices; modes[0] == i0
    std::uint64_t seed = 0;
};

struct GeneratorViolation {
    std::size_t row = 0;
    std::size_t col = 0;  // == row for a row-sum violation
    std::string detail;
};

// A valid generator has nonnegative off-diagonal entries and zero row sums.
inline std::optional<GeneratorViolation> validate_generator(const Matrix& q) {
    constexpr double kRowSumTol = 1e-12;
    if (q.rows == 0 || q.rows != q.cols) {
        return GeneratorViolation{0, 0, "generator must be square and nonempty"};
    }
    for (std::size_t i = 0; i < q.rows; ++i) {
        for (std::size_t j = 0; j < q.cols; ++j) {
            if (i != j && q(i, j) < 0.0) {
                return GeneratorViolation{i, j, "negative off-diagonal entry"};
            }
        }
    }
    for (std::size_t i = 0; i < q.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.cols; ++j) s += q(i, j);
        if (std::abs(s) > kRowSumTol) {
            return GeneratorViolation{i, i, "row sum " + std::to_string(s) + " != 0"};
        }
    }
    return std::nullopt;
}

// exp(eps*Q) by scaling and squaring: halve eps*Q until its induced infinity
// norm is at most 0.5, sum the Taylor series until the term norm drops below
// 1e-16, then square back. Mode counts are tiny, so robustness beats
// sophistication here.
inline TransitionMatrix transition_matrix(const Matrix& q, double eps) {
    if (auto v = validate_generator(q)) {
        throw ConfigError("invalid generator: " + v->detail);
    }
    if (!(eps > 0.0)) throw ConfigError("transition_matrix requires eps > 0");

    Matrix scaled = q;
    scaled *= eps;
    int squarings = 0;
    while (scaled.row_sum_norm() > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }

    Matrix sum = Matrix::identity(q.rows);
    Matrix term = Matrix::identity(q.rows);
    for (int k = 1; k <= 64; ++k) {
        term = term * scaled;
        term *= 1.0 / static_cast<double>(k);
        sum += term;
        if (term.row_sum_norm() < 1e-16) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;

    if (!sum.all_finite()) throw DomainError("transition matrix is not finite");
    return TransitionMatrix{std::move(sum), eps};
}

// Inverse-CDF draw over one row: the smallest j with cumulative probability
// strictly above u. Ties therefore resolve to the smallest index.
inline int next_mode(const TransitionMatrix& p, int mode, SplitMix64& rng) {
    const std::size_t i = static_cast<std::size_t>(mode - 1);
    const double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t j = 0; j < p.mode_count(); ++j) {
        cum += p.p(i, j);
        if (u < cum) return static_cast<int>(j) + 1;
    }
    return static_cast<int>(p.mode_count());  // guard against row-sum rounding
}

inline ChainSample sample_chain(const TransitionMatrix& p, int i0, long n_steps, std::uint64_t seed) {
    if (i0 < 1 || static_cast<std::size_t>(i0) > p.mode_count()) {
        throw ConfigError("initial mode out of range");
    }
    ChainSample out;
    out.seed = seed;
    out.modes.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.modes.push_back(i0);
    SplitMix64 rng(seed);
    int mode = i0;
    for (long n = 0; n < n_steps; ++n) {
        mode = next_mode(p, mode, rng);
        out.modes.push_back(mode);
    }
    return out;
}

// ||Q||_inf: the largest entry in absolute value.
inline double q_norm_inf(const Matrix& q) {
    return q.max_abs();
}

// Uniform bound on the Taylor tail entries of exp(eps*Q):
// exp(m0*||Q||inf) - 1 - m0*||Q||inf.
inline double tau_bound(std::size_t m0, double q_inf) {
    if (q_inf < 0.0) throw ConfigError("tau_bound requires q_inf >= 0");
    const double x = static_cast<double>(m0) * q_inf;
    const double v = std::exp(x) - 1.0 - x;
    if (!std::isfinite(v)) throw DomainError("tau_bound overflow");
    return v;
}

// Switching-overhead constant of the step-size analysis:
// (sum_j p_j) * (exp(m0*||Q||inf) - (m0-1)*||Q||inf + 1).
inline double r0_constant(const std::vector<double>& p, std::size_t m0, double q_inf) {
    if (p.size() != m0 || m0 == 0) throw ConfigError("r0_constant: weight count must equal m0");
    double p_sum = 0.0;
    for (double w : p) {
        if (!(w > 0.0)) throw ConfigError("r0_constant requires positive weights");
        p_sum += w;
    }
    const double v = p_sum * (std::exp(static_cast<double>(m0) * q_inf)
                              - static_cast<double>(m0 - 1) * q_inf + 1.0);
    if (!std::isfinite(v)) throw DomainError("r0_constant overflow");
    return v;
}

} // namespace nsdde
