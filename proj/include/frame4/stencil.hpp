#pragma once

// Grid numerics shared by curves and frames: finite-difference stencils,
// midpoint interpolation and cumulative quadrature on equispaced grids.
//
// Grids may be split into pieces at "break" sample indices (junctions of
// piecewise definitions). Stencils never reach across a break; a break sample
// belongs to both neighbouring pieces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "frame4/error.hpp"

namespace frame4::detail {

/// Fornberg's algorithm: weights w_k such that
/// f^(order)(x0) ~ sum_k w_k f(nodes[k]).
inline std::vector<double> fornberg_weights(std::span<const double> nodes, double x0, int order) {
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) w[i] = c[i][order];
    return w;
}

/// Inclusive [first, last] sample ranges between consecutive breaks.
inline std::vector<std::pair<std::size_t, std::size_t>> pieces(std::size_t count,
                                                                std::span<const std::size_t> breaks) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t lo = 0;
    for (std::size_t b : breaks) {
        if (b == 0 || b + 1 >= count || b <= lo) continue;
        out.emplace_back(lo, b);
        lo = b;
    }
    out.emplace_back(lo, count - 1);
    return out;
}

/// Stencil start index: centred when possible, otherwise shifted to stay in
/// [lo, hi]. `width` points are used.
inline std::size_t stencil_start(std::size_t i, std::size_t lo, std::size_t hi, std::size_t width) {
    const std::size_t half = (width - 1) / 2;
    std::size_t start = i >= lo + half ? i - half : lo;
    if (start + width - 1 > hi) start = hi + 1 - width;
    return start;
}

/// Weight tables for a fixed stencil width, keyed by the offset of the
/// evaluation point inside the stencil.
class StencilTable {
public:
    StencilTable(std::size_t width, int order) : width_(width) {
        std::vector<double> nodes(width);
        for (std::size_t k = 0; k < width; ++k) nodes[k] = static_cast<double>(k);
        for (std::size_t at = 0; at < width; ++at) table_.push_back(fornberg_weights(nodes, static_cast<double>(at), order));
    }
    std::size_t width() const { return width_; }
    const std::vector<double>& weights(std::size_t at) const { return table_[at]; }

private:
    std::size_t width_;
    std::vector<std::vector<double>> table_;
};

/// Fourth-order accurate derivative of sampled values (order 1 or 2). Central
/// five-point stencils in the interior, one-sided stencils of width
/// order + 4 near piece ends.
template <class T>
std::vector<T> differentiate(std::span<const T> f, double h, int order, std::span<const std::size_t> breaks) {
    const std::size_t n = f.size();
    const StencilTable central(5, order);
    const StencilTable sided(static_cast<std::size_t>(order) + 4, order);
    const double scale = 1.0 / std::pow(h, order);
    std::vector<T> out(n);
    for (auto [lo, hi] : pieces(n, breaks)) {
        if (hi - lo + 1 < sided.width())
            throw Error(ErrorKind::InvalidArgument, "piece too short for a fourth-order stencil");
        for (std::size_t i = lo; i <= hi; ++i) {
            const StencilTable& tab = (i >= lo + 2 && i + 2 <= hi) ? central : sided;
            const std::size_t start = stencil_start(i, lo, hi, tab.width());
            const auto& w = tab.weights(i - start);
            T acc = w[0] * f[start];
            for (std::size_t k = 1; k < tab.width(); ++k) acc = acc + w[k] * f[start + k];
            out[i] = scale * acc;
        }
    }
    return out;
}

/// Piece containing the interval [s_i, s_{i+1}].
inline void piece_bounds_for(std::size_t i, const std::vector<std::pair<std::size_t, std::size_t>>& ps,
                             std::size_t& lo, std::size_t& hi) {
    for (auto [a, b] : ps) {
        if (i >= a && i < b) {
            lo = a;
            hi = b;
            return;
        }
    }
    lo = ps.back().first;
    hi = ps.back().second;
}

/// Cubic Lagrange interpolation at the midpoint of every interval
/// [s_i, s_{i+1}]; out[i] approximates f(s_i + h/2).
template <class T>
std::vector<T> midpoints(std::span<const T> f, std::span<const std::size_t> breaks) {
    const std::size_t n = f.size();
    const auto ps = pieces(n, breaks);
    std::vector<T> out(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t lo = 0, hi = n - 1;
        piece_bounds_for(i, ps, lo, hi);
        if (hi - lo + 1 < 4) throw Error(ErrorKind::InvalidArgument, "piece too short for cubic interpolation");
        std::size_t start = i >= lo + 1 ? i - 1 : lo;
        if (start + 3 > hi) start = hi - 3;
        static const std::array<std::array<double, 4>, 3> w{{
            {5.0 / 16, 15.0 / 16, -5.0 / 16, 1.0 / 16},   // evaluation at node 0.5
            {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16},   // at 1.5
            {1.0 / 16, -5.0 / 16, 15.0 / 16, 5.0 / 16},   // at 2.5
        }};
        const auto& ww = w[i - start];
        T acc = ww[0] * f[start];
        for (std::size_t k = 1; k < 4; ++k) acc = acc + ww[k] * f[start + k];
        out[i] = acc;
    }
    return out;
}

/// Cumulative integral F(s_i) - F(s_anchor) of sampled values, using the
/// fourth-order rule obtained by integrating the cubic through four
/// neighbouring samples over each interval.
template <class T>
std::vector<T> cumulative_integral(std::span<const T> f, double h, std::size_t anchor, std::span<const std::size_t> breaks,
                                   const T& zero) {
    const std::size_t n = f.size();
    const auto ps = pieces(n, breaks);
    static const std::array<std::array<double, 4>, 3> w{{
        {9.0 / 24, 19.0 / 24, -5.0 / 24, 1.0 / 24},   // interval [0, 1] of nodes 0..3
        {-1.0 / 24, 13.0 / 24, 13.0 / 24, -1.0 / 24}, // [1, 2]
        {1.0 / 24, -5.0 / 24, 19.0 / 24, 9.0 / 24},   // [2, 3]
    }};
    std::vector<T> step(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t lo = 0, hi = n - 1;
        piece_bounds_for(i, ps, lo, hi);
        if (hi - lo + 1 < 4) throw Error(ErrorKind::InvalidArgument, "piece too short for quadrature");
        std::size_t start = i >= lo + 1 ? i - 1 : lo;
        if (start + 3 > hi) start = hi - 3;
        const auto& ww = w[i - start];
        T acc = ww[0] * f[start];
        for (std::size_t k = 1; k < 4; ++k) acc = acc + ww[k] * f[start + k];
        step[i] = h * acc;
    }
    std::vector<T> out(n, zero);
    for (std::size_t i = anchor + 1; i < n; ++i) out[i] = out[i - 1] + step[i - 1];
    for (std::size_t i = anchor; i-- > 0;) out[i] = out[i + 1] - step[i];
    return out;
}

/// Five-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre5(F&& f, double a, double b) {
    static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                             0.9061798459386640};
    static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                             0.2369268850561891, 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) acc += w[k] * f(mid + half * x[k]);
    return acc * half;
}

/// Equispaced grid with spacing h that contains `anchor` exactly and covers
/// as much of [lo, hi] as fits.
inline std::vector<double> anchored_grid(double lo, double hi, double h, double anchor) {
    const double eps = 1e-9;
    const long kmin = -static_cast<long>(std::floor((anchor - lo) / h + eps));
    const long kmax = static_cast<long>(std::floor((hi - anchor) / h + eps));
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(kmax - kmin + 1));
    for (long k = kmin; k <= kmax; ++k) s.push_back(anchor + static_cast<double>(k) * h);
    return s;
}

}  // namespace frame4::detail
