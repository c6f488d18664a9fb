#pragma once

// Small deterministic maximizers shared by the rate optimizers: a scan over a
// fixed grid followed by golden-section refinement in the bracket around the
// best grid point, and a monotone-boundary bisection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace diamond::search {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class GridQuality { fast, standard, fine };

struct SearchOptions {
    int lambda_points = 99;       // interior time-fraction grid 1/(n+1) .. n/(n+1)
    int compression_points = 160; // log grid for 1/sigma^2 over [u_min, u_max]
    int boundary_scan_points = 41;
    int simplex_steps = 20;       // power-split simplex step = 1/simplex_steps
    int mac_split_points = 11;
    int refine_starts = 6;        // incumbents refined locally after the coarse scan
    double u_min = 1e-4;
    double u_max = 1e4;
    double x_tolerance = 1e-10;   // golden-section bracket width
    int bisection_iterations = 60;

    static SearchOptions for_quality(GridQuality q) {
        SearchOptions o;
        switch (q) {
            case GridQuality::fast:
                o.lambda_points = 33;
                o.compression_points = 48;
                o.boundary_scan_points = 25;
                o.simplex_steps = 10;
                o.mac_split_points = 7;
                o.refine_starts = 4;
                o.x_tolerance = 1e-8;
                o.bisection_iterations = 45;
                break;
            case GridQuality::standard:
                break;
            case GridQuality::fine:
                o.lambda_points = 199;
                o.compression_points = 320;
                o.boundary_scan_points = 81;
                o.simplex_steps = 40;
                o.mac_split_points = 21;
                o.refine_starts = 10;
                o.x_tolerance = 1e-12;
                o.bisection_iterations = 70;
                break;
        }
        return o;
    }
};

struct Maximum {
    double x = 0.0;
    double value = kNegInf;
};

inline std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linear_grid needs at least two points");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    auto g = linear_grid(std::log(lo), std::log(hi), n);
    for (double& x : g) x = std::exp(x);
    return g;
}

/// Interior time-fraction grid k/(n+1), k = 1..n.
inline std::vector<double> lambda_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) g[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) / (n + 1);
    return g;
}

/// Golden-section maximization on [lo, hi] assuming unimodality.
template <class F>
Maximum golden_section(F&& f, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

/// Scans `grid` (lowest index wins ties), then refines by golden section
/// between the neighbours of the best point. `to_x` maps the search coordinate
/// back to the argument of f, so refinement can run in a transformed domain.
template <class F, class ToX>
Maximum grid_then_golden(F&& f, std::span<const double> grid, double tol, ToX&& to_x) {
    if (grid.empty()) throw std::invalid_argument("grid_then_golden: empty grid");
    std::size_t best = 0;
    double best_value = kNegInf;
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = f(to_x(grid[i]));
        if (values[i] > best_value) {
            best_value = values[i];
            best = i;
        }
    }
    Maximum out{to_x(grid[best]), best_value};
    if (best_value == kNegInf || grid.size() < 2) return out;
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[best + 1 == grid.size() ? best : best + 1];
    const Maximum refined = golden_section([&](double t) { return f(to_x(t)); }, lo, hi, tol);
    if (refined.value > out.value) out = {to_x(refined.x), refined.value};
    return out;
}

template <class F>
Maximum grid_then_golden(F&& f, std::span<const double> grid, double tol) {
    return grid_then_golden(std::forward<F>(f), grid, tol, [](double t) { return t; });
}

/// Given pred(good) == true and pred(bad) == false, narrows the pair toward
/// the switching point and returns the last good argument.
template <class P>
double bisect_boundary(P&& pred, double good, double bad, int iterations) {
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (good + bad);
        if (pred(mid))
            good = mid;
        else
            bad = mid;
    }
    return good;
}

}  // namespace diamond::search
