#pragma once

// Sampled frames, coefficient matrices and transformations between frames,
// together with the frame equation Z' = X Z and the transformation equation
// G' = X1 G - G X0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "frame4/error.hpp"
#include "frame4/linalg.hpp"
#include "frame4/pattern.hpp"
#include "frame4/stencil.hpp"

namespace frame4 {

namespace tol {
inline constexpr double frame_orthogonality = 1e-8;
inline constexpr double tangent_defect = 1e-8;
inline constexpr double pattern = 1e-6;
inline constexpr double grid_match = 1e-9;
}  // namespace tol

/// Frame along a curve: rows of Z(s_i) are the frame vectors, row 0 the tangent.
struct FramePath {
    std::vector<double> s;
    std::vector<Mat4> Z;
    std::optional<FrameType> declared_type;
    std::vector<std::size_t> breaks;

    std::size_t size() const { return s.size(); }
    double h() const { return s.size() > 1 ? (s.back() - s.front()) / static_cast<double>(s.size() - 1) : 0.0; }

    double max_orthogonality_defect() const {
        double d = 0.0;
        for (const auto& z : Z) d = std::max(d, orthogonality_defect(z));
        return d;
    }
};

/// Coefficient matrices X(s_i) with Z' = X Z.
struct CoefficientPath {
    std::vector<double> s;
    std::vector<Skew4> X;
    /// Catalog id when the pattern is declared; channels then hold the
    /// on-pattern entries x1, x2, x3 per sample.
    std::optional<int> pattern;
    std::vector<std::array<double, 3>> channels;
    std::vector<std::size_t> breaks;
    /// Optional exact evaluator, used by the integrators at interval midpoints.
    std::function<Skew4(double)> field;
    /// X is the same at every sample; integration then uses the exponential.
    bool constant = false;

    std::size_t size() const { return s.size(); }
    double h() const { return s.size() > 1 ? (s.back() - s.front()) / static_cast<double>(s.size() - 1) : 0.0; }
};

/// G(s_i) = Z1(s_i) Z0(s_i)^{-1} between two frames of one curve.
struct TransformPath {
    std::vector<double> s;
    std::vector<Mat4> G;
    /// Rotation angle of the normal block, when the transformation has one.
    std::vector<double> theta;
    int epsilon = 1;
    int kappa = 1;

    std::size_t size() const { return s.size(); }

    /// Largest deviation from the block form diag(1, G-bar).
    double tangent_fix_defect() const {
        double d = 0.0;
        for (const auto& g : G) {
            d = std::max(d, std::abs(g(0, 0) - 1.0));
            for (int k = 1; k < 4; ++k) d = std::max({d, std::abs(g(0, k)), std::abs(g(k, 0))});
        }
        return d;
    }
};

inline void check_equispaced(const std::vector<double>& s) {
    if (s.size() < 8) throw Error(ErrorKind::InvalidArgument, "grid needs at least 8 samples");
    const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs((s[i] - s[i - 1]) - h) > 1e-6 * h) throw Error(ErrorKind::InvalidArgument, "grid is not equispaced");
}

inline bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol::grid_match * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

/// Fills `channels` from X for the declared pattern id.
inline CoefficientPath declare_pattern(CoefficientPath c, int id) {
    const auto& cat = PatternCatalog::instance();
    const auto pos = cat.channels(id);
    c.pattern = id;
    c.channels.assign(c.X.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < c.X.size(); ++i)
        for (std::size_t k = 0; k < pos.size() && k < 3; ++k) c.channels[i][k] = c.X[i](pos[k].first, pos[k].second);
    return c;
}

/// Builds a CoefficientPath whose X carries only the given channels on the
/// pattern positions.
inline CoefficientPath coefficients_from_channels(std::vector<double> s, const std::vector<std::array<double, 3>>& ch,
                                                   int id) {
    const auto pos = PatternCatalog::instance().channels(id);
    CoefficientPath c;
    c.s = std::move(s);
    c.X.resize(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i)
        for (std::size_t k = 0; k < pos.size(); ++k) c.X[i].set(pos[k].first, pos[k].second, ch[i][k]);
    c.pattern = id;
    c.channels = ch;
    return c;
}

/// Largest off-pattern entry over all samples.
inline double pattern_residual(const CoefficientPath& c, int id) {
    const auto& cat = PatternCatalog::instance();
    double r = 0.0;
    for (const auto& x : c.X) r = std::max(r, cat.residual(x, id));
    return r;
}

/// Off-pattern entries measured against the size of the tangent row
/// |X(0, .)| at the same sample, floored at `floor`.
inline double relative_pattern_residual(const CoefficientPath& c, int id, double floor) {
    const auto& cat = PatternCatalog::instance();
    double r = 0.0;
    for (const auto& x : c.X) r = std::max(r, cat.residual(x, id) / std::max(x.first_row().norm(), floor));
    return r;
}

namespace detail {

template <class F0, class Fm, class F1>
Mat4 rk4_step(const Mat4& y, double h, const F0& at_start, const Fm& at_mid, const F1& at_end) {
    const Mat4 k1 = at_start(y);
    const Mat4 k2 = at_mid(y + 0.5 * h * k1);
    const Mat4 k3 = at_mid(y + 0.5 * h * k2);
    const Mat4 k4 = at_end(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// X at interval midpoints: exact when a field is attached, otherwise cubic
/// interpolation of the samples.
inline std::vector<Skew4> coefficient_midpoints(const CoefficientPath& c) {
    if (c.field) {
        std::vector<Skew4> mid(c.size() - 1);
        for (std::size_t i = 0; i + 1 < c.size(); ++i) mid[i] = c.field(0.5 * (c.s[i] + c.s[i + 1]));
        return mid;
    }
    return midpoints<Skew4>(c.X, c.breaks);
}

}  // namespace detail

/// Solves Z' = X Z from Z(s_0) = z0 with classical RK4 (step = grid spacing)
/// and row-anchored re-orthonormalization after every step. Constant
/// coefficients are integrated exactly with the matrix exponential.
inline FramePath integrate_frame(const CoefficientPath& coeffs, const Mat4& z0) {
    check_equispaced(coeffs.s);
    if (orthogonality_defect(z0) > tol::orthogonal_input)
        throw Error(ErrorKind::InvalidArgument, "initial frame is not orthogonal");
    FramePath out;
    out.s = coeffs.s;
    out.breaks = coeffs.breaks;
    out.Z.resize(coeffs.size());
    out.Z[0] = z0;
    if (coeffs.constant) {
        for (std::size_t i = 1; i < coeffs.size(); ++i) out.Z[i] = mat_exp(coeffs.X[0], coeffs.s[i] - coeffs.s[0]) * z0;
    } else {
        const auto mid = detail::coefficient_midpoints(coeffs);
        for (std::size_t i = 0; i + 1 < coeffs.size(); ++i) {
            const double h = coeffs.s[i + 1] - coeffs.s[i];
            const Mat4& x0 = coeffs.X[i].matrix();
            const Mat4& xm = mid[i].matrix();
            const Mat4& x1 = coeffs.X[i + 1].matrix();
            auto f0 = [&](const Mat4& z) -> Mat4 { return x0 * z; };
            auto fm = [&](const Mat4& z) -> Mat4 { return xm * z; };
            auto f1 = [&](const Mat4& z) -> Mat4 { return x1 * z; };
            out.Z[i + 1] = reorthonormalize(detail::rk4_step(out.Z[i], h, f0, fm, f1));
        }
    }
    if (coeffs.pattern) out.declared_type = PatternCatalog::instance().type_of(*coeffs.pattern);
    return out;
}

/// X(s_i) = antisym(Z'(s_i) Z(s_i)^T) with fourth-order differences of Z.
/// The pattern is left undeclared.
inline CoefficientPath extract_coefficients(const FramePath& frame) {
    check_equispaced(frame.s);
    const auto dz = detail::differentiate<Mat4>(frame.Z, frame.h(), 1, frame.breaks);
    CoefficientPath c;
    c.s = frame.s;
    c.breaks = frame.breaks;
    c.X.resize(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) c.X[i] = antisymmetrize(dz[i] * frame.Z[i].transpose());
    return c;
}

/// Solves G' = X1 G - G X0 from G(s_0) = g0 by RK4 with re-orthonormalization.
inline TransformPath solve_transform(const CoefficientPath& x0, const CoefficientPath& x1, const Mat4& g0) {
    if (!same_grid(x0.s, x1.s)) throw Error(ErrorKind::InvalidArgument, "coefficient grids differ");
    check_equispaced(x0.s);
    if (orthogonality_defect(g0) > tol::orthogonal_input)
        throw Error(ErrorKind::InvalidArgument, "initial transformation is not orthogonal");
    const auto mid0 = detail::coefficient_midpoints(x0);
    const auto mid1 = detail::coefficient_midpoints(x1);
    TransformPath out;
    out.s = x0.s;
    out.G.resize(x0.size());
    out.G[0] = g0;
    for (std::size_t i = 0; i + 1 < x0.size(); ++i) {
        const double h = x0.s[i + 1] - x0.s[i];
        auto rhs = [](const Skew4& a, const Skew4& b) {
            return [&a, &b](const Mat4& g) -> Mat4 { return b.matrix() * g - g * a.matrix(); };
        };
        const auto f0 = rhs(x0.X[i], x1.X[i]);
        const auto fm = rhs(mid0[i], mid1[i]);
        const auto f1 = rhs(x0.X[i + 1], x1.X[i + 1]);
        out.G[i + 1] = reorthonormalize(detail::rk4_step(out.G[i], h, f0, fm, f1));
    }
    return out;
}

/// Applies a transformation path to a frame pointwise: Z1 = G Z0.
inline FramePath apply_transform(const TransformPath& g, const FramePath& z0) {
    if (!same_grid(g.s, z0.s)) throw Error(ErrorKind::InvalidArgument, "transformation and frame grids differ");
    FramePath out;
    out.s = z0.s;
    out.breaks = z0.breaks;
    out.Z.resize(z0.size());
    for (std::size_t i = 0; i < z0.size(); ++i) out.Z[i] = g.G[i] * z0.Z[i];
    return out;
}

struct PatternMatch {
    int mask_id = 0;
    Permutation permutation;
    double residual = 0.0;
};

struct ClassifyResult {
    std::vector<PatternMatch> matches;
    /// All 16 x 6 (mask, permutation) residuals, mask-major.
    std::vector<PatternMatch> table;
    bool degenerate = false;
    double max_entry = 0.0;

    std::set<FrameType> types() const {
        std::set<FrameType> out;
        for (const auto& m : matches) out.insert(PatternCatalog::instance().type_of(m.mask_id));
        return out;
    }

    /// Smallest residual over all masks of type t (any permutation).
    double best_residual(FrameType t) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& m : table)
            if (PatternCatalog::instance().type_of(m.mask_id) == t) best = std::min(best, m.residual);
        return best;
    }
};

/// Reports every (mask, permutation) such that all off-mask entries of
/// P X P^T stay within tol over the whole path. A path whose entries all vanish
/// matches everything and is flagged degenerate.
inline ClassifyResult classify_pattern(const CoefficientPath& coeffs, double tolerance) {
    const auto& cat = PatternCatalog::instance();
    ClassifyResult result;
    for (const auto& x : coeffs.X) result.max_entry = std::max(result.max_entry, x.max_abs());
    result.degenerate = result.max_entry <= tolerance;
    for (int id = 0; id < PatternCatalog::kCount; ++id) {
        for (const auto& p : s3_permutations()) {
            double r = 0.0;
            for (const auto& x : coeffs.X) r = std::max(r, cat.residual(permute(x, p), id));
            PatternMatch m{id, p, r};
            result.table.push_back(m);
            if (r <= tolerance) result.matches.push_back(m);
        }
    }
    return result;
}

}  // namespace frame4
