#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nsdde/errors.hpp"
#include "nsdde/expr.hpp"
#include "nsdde/markov.hpp"
#include "nsdde/matrix.hpp"
#include "nsdde/rng.hpp"

namespace nsdde {

// Sampled checks quantify over all of R^d; draws are standard normals scaled
// by these radii in rotation, so small, unit, and large regimes all get hit.
inline constexpr double kSampleRadii[3] = {0.1, 1.0, 10.0};

// Variable tables shared by every coefficient expression of a d-dimensional
// system. Scalar systems additionally accept x and y as aliases for x1, y1.
inline VarTable state_pair_vars(int d) {
    VarTable t;
    t.slot_count = 2 * d;
    for (int i = 0; i < d; ++i) t.names.emplace_back("x" + std::to_string(i + 1), i);
    for (int i = 0; i < d; ++i) t.names.emplace_back("y" + std::to_string(i + 1), d + i);
    if (d == 1) {
        t.names.emplace_back("x", 0);
        t.names.emplace_back("y", 1);
    }
    return t;
}

inline VarTable delayed_state_vars(int d) {
    VarTable t;
    t.slot_count = d;
    for (int i = 0; i < d; ++i) t.names.emplace_back("y" + std::to_string(i + 1), i);
    if (d == 1) t.names.emplace_back("y", 0);
    return t;
}

inline VarTable time_var() {
    VarTable t;
    t.slot_count = 1;
    t.names.emplace_back("t", 0);
    return t;
}

// Coefficients of one switching mode: neutral term G (over the delayed
// state), drift f and diffusion g (over current and delayed state).
struct ModeCoefficients {
    std::vector<Expr> G;               // d entries, over (y)
    std::vector<Expr> f;               // d entries, over (x, y)
    std::vector<std::vector<Expr>> g;  // d x m grid, over (x, y)

    // out[k] = G_k(y)
    void eval_G(std::span<const double> y, std::span<double> out) const {
        for (std::size_t k = 0; k < G.size(); ++k) out[k] = G[k].eval(y);
    }

    // slots must hold (x1..xd, y1..yd)
    void eval_f(std::span<const double> slots, std::span<double> out) const {
        for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].eval(slots);
    }

    // out is row-major d x m
    void eval_g(std::span<const double> slots, std::span<double> out) const {
        const std::size_t m = g.empty() ? 0 : g[0].size();
        for (std::size_t k = 0; k < g.size(); ++k) {
            for (std::size_t l = 0; l < m; ++l) out[k * m + l] = g[k][l].eval(slots);
        }
    }
};

struct SystemSpec {
    int d = 0;   // state dimension
    int m = 0;   // Brownian dimension
    int m0 = 0;  // mode count
    Matrix Q;    // m0 x m0 generator
    double r = 0.0;      // delay bound
    double kappa = 0.0;  // neutral contraction constant, in (0, 1)
    Expr delta;          // delay function over (t)
    std::vector<ModeCoefficients> modes;

    const ModeCoefficients& mode(int i) const {  // 1-based
        return modes[static_cast<std::size_t>(i - 1)];
    }

    void validate() const {
        if (d < 1 || m < 1 || m0 < 1) throw ConfigError("system dimensions must be positive");
        if (!(r > 0.0)) throw ConfigError("delay bound r must be positive");
        if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
        if (Q.rows != static_cast<std::size_t>(m0) || Q.cols != static_cast<std::size_t>(m0)) {
            throw ConfigError("generator shape does not match mode count");
        }
        if (modes.size() != static_cast<std::size_t>(m0)) {
            throw ConfigError("coefficient count does not match mode count");
        }
        for (const auto& mc : modes) {
            if (mc.G.size() != static_cast<std::size_t>(d) || mc.f.size() != static_cast<std::size_t>(d) ||
                mc.g.size() != static_cast<std::size_t>(d)) {
                throw ConfigError("coefficient shapes do not match state dimension");
            }
            for (const auto& row : mc.g) {
                if (row.size() != static_cast<std::size_t>(m)) {
                    throw ConfigError("diffusion shape does not match Brownian dimension");
                }
            }
        }
    }
};

// The scalar two-mode system of the worked example, its two frozen-mode
// subsystems, and their shared delay 2 - cos t on [-3, 0].
inline SystemSpec builtin_system(const std::string& id) {
    const VarTable xy = state_pair_vars(1);
    const VarTable y_only = delayed_state_vars(1);

    auto make_mode = [&](const char* G, const char* f, const char* g) {
        ModeCoefficients mc;
        mc.G.push_back(parse_expr(G, y_only));
        mc.f.push_back(parse_expr(f, xy));
        mc.g.push_back({parse_expr(g, xy)});
        return mc;
    };
    const ModeCoefficients mode1 = make_mode("0.05*y", "-1.1*x + 0.2*y", "0.3*x*cos(y)");
    const ModeCoefficients mode2 = make_mode("0.1*y", "0.2*x + 0.1*y", "0.2*sin(y)");

    SystemSpec s;
    s.d = 1;
    s.m = 1;
    s.r = 3.0;
    s.kappa = 0.1;
    s.delta = parse_expr("2 - cos(t)", time_var());

    if (id == "coupled-yy1") {
        s.m0 = 2;
        s.Q = Matrix(2, 2);
        s.Q(0, 0) = -1.0; s.Q(0, 1) = 1.0;
        s.Q(1, 0) = 3.0;  s.Q(1, 1) = -3.0;
        s.modes = {mode1, mode2};
    } else if (id == "mode1-yy2") {
        s.m0 = 1;
        s.Q = Matrix(1, 1);
        s.modes = {mode1};
    } else if (id == "mode2-yy3") {
        s.m0 = 1;
        s.Q = Matrix(1, 1);
        s.modes = {mode2};
    } else {
        throw ConfigError("unknown builtin system '" + id + "'");
    }
    s.validate();
    return s;
}

struct CheckEntry {
    std::string name;
    bool passed = true;
    std::string detail;  // first counterexample, empty when passed
};

struct StructureReport {
    std::vector<CheckEntry> entries;

    bool all_passed() const {
        for (const auto& e : entries) {
            if (!e.passed) return false;
        }
        return true;
    }

    const CheckEntry* find(const std::string& name) const {
        for (const auto& e : entries) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }
};

namespace detail {

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline std::string format_point(std::span<const double> v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ")";
    return os.str();
}

} // namespace detail

// Sampled falsifier for the structural standing assumptions. Failures are
// report entries, never exceptions; sampling is deterministic given seed.
// The contraction and range checks can refute a bad spec but cannot prove a
// good one.
inline StructureReport check_structure(const SystemSpec& spec, long samples, std::uint64_t seed,
                                       double horizon = 30.0) {
    constexpr double kTol = 1e-12;
    static constexpr double kRadii[] = {0.1, 1.0, 10.0};
    StructureReport report;
    const std::size_t d = static_cast<std::size_t>(spec.d);
    const std::size_t m = static_cast<std::size_t>(spec.m);

    {
        CheckEntry e{"generator", true, ""};
        if (auto v = validate_generator(spec.Q)) {
            e.passed = false;
            e.detail = v->detail + " at (" + std::to_string(v->row + 1) + ", " + std::to_string(v->col + 1) + ")";
        }
        report.entries.push_back(std::move(e));
    }

    {
        CheckEntry e{"origin", true, ""};
        std::vector<double> zero2(2 * d, 0.0), zero1(d, 0.0);
        std::vector<double> fv(d), gv(d * m), Gv(d);
        for (int i = 1; i <= spec.m0 && e.passed; ++i) {
            try {
                spec.mode(i).eval_f(zero2, fv);
                spec.mode(i).eval_g(zero2, gv);
                spec.mode(i).eval_G(zero1, Gv);
            } catch (const DomainError& err) {
                e.passed = false;
                e.detail = "coefficient undefined at origin in mode " + std::to_string(i) + ": " + err.what();
                break;
            }
            for (double v : fv) {
                if (std::abs(v) > kTol) { e.passed = false; e.detail = "f(0,0," + std::to_string(i) + ") != 0"; }
            }
            for (double v : gv) {
                if (std::abs(v) > kTol) { e.passed = false; e.detail = "g(0,0," + std::to_string(i) + ") != 0"; }
            }
            for (double v : Gv) {
                if (std::abs(v) > kTol) { e.passed = false; e.detail = "G(0," + std::to_string(i) + ") != 0"; }
            }
        }
        report.entries.push_back(std::move(e));
    }

    {
        CheckEntry e{"contraction", true, ""};
        SplitMix64 rng = SplitMix64::stream(seed, 1);
        std::vector<double> x(d), y(d), gx(d), gy(d), diff(d);
        for (long s = 0; s < samples && e.passed; ++s) {
            const double radius = kRadii[static_cast<std::size_t>(s % 3)];
            rng.fill_gaussian(x);
            rng.fill_gaussian(y);
            for (auto& v : x) v *= radius;
            for (auto& v : y) v *= radius;
            const int i = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(spec.m0));
            try {
                spec.mode(i).eval_G(x, gx);
                spec.mode(i).eval_G(y, gy);
            } catch (const DomainError& err) {
                e.passed = false;
                e.detail = std::string("G undefined at sample: ") + err.what();
                break;
            }
            for (std::size_t k = 0; k < d; ++k) diff[k] = gx[k] - gy[k];
            double dx = 0.0;
            for (std::size_t k = 0; k < d; ++k) dx += (x[k] - y[k]) * (x[k] - y[k]);
            const double lhs = detail::norm2(diff);
            const double rhs = spec.kappa * std::sqrt(dx);
            if (lhs > rhs + kTol) {
                e.passed = false;
                e.detail = "|G(x,i)-G(y,i)| = " + std::to_string(lhs) + " > kappa|x-y| = " +
                           std::to_string(rhs) + " at x=" + detail::format_point(x) + ", y=" +
                           detail::format_point(y) + ", i=" + std::to_string(i);
            }
        }
        report.entries.push_back(std::move(e));
    }

    {
        CheckEntry e{"delta-range", true, ""};
        const long grid = std::max<long>(samples, 2);
        for (long k = 0; k < grid && e.passed; ++k) {
            const double t = horizon * static_cast<double>(k) / static_cast<double>(grid - 1);
            double v = 0.0;
            try {
                const double slot[1] = {t};
                v = spec.delta.eval(slot);
            } catch (const DomainError& err) {
                e.passed = false;
                e.detail = "delta undefined at t=" + std::to_string(t) + ": " + err.what();
                break;
            }
            if (v < -kTol || v > spec.r + kTol) {
                e.passed = false;
                e.detail = "delta(" + std::to_string(t) + ") = " + std::to_string(v) +
                           " outside [0, " + std::to_string(spec.r) + "]";
            }
        }
        report.entries.push_back(std::move(e));
    }

    return report;
}

} // namespace nsdde
