#pragma once

// Constructors and conversions for generalized Bishop frames of types B, C,
// D and F, plus the aggregate frame verifier.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frame4/curve.hpp"
#include "frame4/error.hpp"
#include "frame4/frame.hpp"
#include "frame4/linalg.hpp"
#include "frame4/pattern.hpp"
#include "frame4/stencil.hpp"

namespace frame4 {

namespace tol {
inline constexpr double two_regular = 1e-6;
inline constexpr double avoidance = 1e-10;
inline constexpr double normal_input = 1e-10;
inline constexpr double q_orthogonal = 1e-12;
}  // namespace tol

/// Three orthonormal normals at the first sample.
using NormalSet = std::array<Vec4, 3>;

namespace detail {

inline Mat4 initial_frame(const Vec4& t0, const std::optional<NormalSet>& normals) {
    Mat4 z = Mat4::Zero();
    z.row(0) = t0.normalized().transpose();
    if (!normals) return complete_to_rotation(z, 1);
    for (int k = 0; k < 3; ++k) z.row(k + 1) = (*normals)[static_cast<std::size_t>(k)].transpose();
    if (orthogonality_defect(z) > tol::normal_input)
        throw Error(ErrorKind::InvalidArgument, "initial normals must be orthonormal and orthogonal to T(s0)");
    return z;
}

inline void check_curve(const CurvePath& curve) {
    check_equispaced(curve.s);
    if (curve.T.size() != curve.size() || curve.Tp.size() != curve.size() || curve.Tpp.size() != curve.size())
        throw Error(ErrorKind::InvalidArgument, "curve path columns have inconsistent lengths");
}

/// Transports rows 2.. of z along a unit field u with derivative du by the
/// rotation-minimizing law N' = -(u'.N) u. Rows [0, fixed) are pinned to the
/// given samples after each step.
template <class Pin>
FramePath transport_normals(const std::vector<double>& s, const std::vector<std::size_t>& breaks, const Mat4& z0,
                            const std::vector<Vec4>& u, const std::vector<Vec4>& du, int fixed, const Pin& pin) {
    const auto um = midpoints<Vec4>(u, breaks);
    const auto dum = midpoints<Vec4>(du, breaks);
    FramePath out;
    out.s = s;
    out.breaks = breaks;
    out.Z.resize(s.size());
    out.Z[0] = z0;
    auto rhs = [fixed](const Vec4& uu, const Vec4& duu) {
        return [fixed, uu, duu](const Mat4& z) -> Mat4 {
            Mat4 d = Mat4::Zero();
            for (int k = fixed; k < 4; ++k) d.row(k) = -(duu.dot(z.row(k).transpose())) * uu.transpose();
            return d;
        };
    };
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double h = s[i + 1] - s[i];
        Mat4 z = rk4_step(out.Z[i], h, rhs(u[i], du[i]), rhs(um[i], dum[i]), rhs(u[i + 1], du[i + 1]));
        pin(z, i + 1);
        out.Z[i + 1] = reorthonormalize(z);
    }
    return out;
}

}  // namespace detail

/// Bishop (rotation minimizing) frame: N_i' = -(T'.N_i) T, i.e. Z' = X_B Z
/// with b_i = T'.N_i. Default initial normals complete T(s0) to a rotation.
inline FramePath rmf_bishop(const CurvePath& curve, const std::optional<NormalSet>& normals = std::nullopt) {
    detail::check_curve(curve);
    const Mat4 z0 = detail::initial_frame(curve.T[0], normals);
    // row 0 evolves with T itself; the normals are transported along T
    FramePath out = detail::transport_normals(curve.s, curve.breaks, z0, curve.T, curve.Tp, 1,
                                              [&](Mat4& z, std::size_t i) { z.row(0) = curve.T[i].normalized().transpose(); });
    out.declared_type = FrameType::B;
    return out;
}

/// Bishop frame by the double reflection method: each step reflects the frame
/// in the bisector of the chord, then in the plane exchanging the reflected
/// and the true tangent. Independent of the ODE route above.
inline FramePath rmf_double_reflection(const CurvePath& curve, const std::optional<NormalSet>& normals = std::nullopt) {
    detail::check_curve(curve);
    FramePath out;
    out.s = curve.s;
    out.breaks = curve.breaks;
    out.Z.resize(curve.size());
    out.Z[0] = detail::initial_frame(curve.T[0], normals);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const Vec4 v1 = curve.gamma[i + 1] - curve.gamma[i];
        const double c1 = v1.squaredNorm();
        Mat4 z = out.Z[i];
        auto reflect = [](const Vec4& x, const Vec4& v, double c) { return c > 0.0 ? Vec4(x - (2.0 / c) * v.dot(x) * v) : x; };
        const Vec4 t_left = reflect(curve.T[i], v1, c1);
        const Vec4 v2 = curve.T[i + 1] - t_left;
        const double c2 = v2.squaredNorm();
        for (int k = 1; k < 4; ++k) {
            const Vec4 r_left = reflect(z.row(k).transpose(), v1, c1);
            z.row(k) = reflect(r_left, v2, c2).transpose();
        }
        z.row(0) = curve.T[i + 1].normalized().transpose();
        out.Z[i + 1] = reorthonormalize(z);
    }
    out.declared_type = FrameType::B;
    return out;
}

/// Bishop curvatures b_i = T'.N_i sampled directly from the curve.
inline CoefficientPath bishop_coefficients(const CurvePath& curve, const FramePath& frame) {
    if (!same_grid(curve.s, frame.s)) throw Error(ErrorKind::InvalidArgument, "curve and frame grids differ");
    std::vector<std::array<double, 3>> ch(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i)
        for (int k = 0; k < 3; ++k) ch[i][static_cast<std::size_t>(k)] = curve.Tp[i].dot(frame.Z[i].row(k + 1).transpose());
    auto c = coefficients_from_channels(curve.s, ch, 0);
    c.breaks = curve.breaks;
    return c;
}

/// Frenet frame: Gram-Schmidt of (gamma', gamma'', gamma''') completed to a
/// rotation. Type F with f1 > 0, f2 > 0.
inline FramePath frenet_type_f(const CurvePath& curve) {
    detail::check_curve(curve);
    FramePath out;
    out.s = curve.s;
    out.breaks = curve.breaks;
    out.Z.resize(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double gram = frenet_gram(curve.T[i], curve.Tp[i], curve.Tpp[i]);
        if (!(gram >= tol::frenet_gram))
            throw Error(ErrorKind::RankDeficient,
                        "Gram determinant " + std::to_string(gram) + " at s = " + std::to_string(curve.s[i]));
        const Vec4 t = curve.T[i].normalized();
        const Vec4 f1 = (curve.Tp[i] - curve.Tp[i].dot(t) * t).normalized();
        Vec4 f2 = curve.Tpp[i] - curve.Tpp[i].dot(t) * t;
        f2 = (f2 - f2.dot(f1) * f1).normalized();
        Mat4 z;
        z.row(0) = t.transpose();
        z.row(1) = f1.transpose();
        z.row(2) = f2.transpose();
        z.row(3) = complete_orthonormal(t, f1, f2).transpose();
        out.Z[i] = reorthonormalize(z);
    }
    out.declared_type = FrameType::F;
    return out;
}

/// Type D frame (T, D1, D2, D3) with D1 = T'/|T'| and D2, D3 rotation
/// minimizing along the D1 field.
inline FramePath type_d_construct(const CurvePath& curve) {
    detail::check_curve(curve);
    std::vector<Vec4> d1(curve.size()), dd1(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double k = curve.Tp[i].norm();
        if (!(k >= tol::two_regular))
            throw Error(ErrorKind::Not2Regular, "|T'| = " + std::to_string(k) + " at s = " + std::to_string(curve.s[i]));
        d1[i] = curve.Tp[i] / k;
        dd1[i] = (curve.Tpp[i] - curve.Tpp[i].dot(d1[i]) * d1[i]) / k;
    }
    Mat4 partial = Mat4::Zero();
    partial.row(0) = curve.T[0].normalized().transpose();
    partial.row(1) = (d1[0] - d1[0].dot(partial.row(0).transpose()) * partial.row(0).transpose()).normalized().transpose();
    const Mat4 z0 = complete_to_rotation(partial, 2);
    FramePath out = detail::transport_normals(curve.s, curve.breaks, z0, d1, dd1, 2, [&](Mat4& z, std::size_t i) {
        z.row(0) = curve.T[i].normalized().transpose();
        z.row(1) = d1[i].transpose();
    });
    out.declared_type = FrameType::D;
    return out;
}

/// Block transformation diag(1, G-bar) taking a type F frame to a type D frame:
/// G-bar = [[eps, 0, 0], [0, cos t, k*eps sin t], [0, sin t, -k*eps cos t]].
inline Mat4 f_to_d_transform(double theta, int epsilon, int kappa) {
    Mat4 g = Mat4::Zero();
    const double c = std::cos(theta), s = std::sin(theta);
    const double ke = static_cast<double>(kappa * epsilon);
    g(0, 0) = 1.0;
    g(1, 1) = epsilon;
    g(2, 2) = c;
    g(2, 3) = ke * s;
    g(3, 2) = s;
    g(3, 3) = -ke * c;
    return g;
}

struct FToD {
    CoefficientPath d;
    TransformPath transform;
};

/// Type D curvatures from type F curvatures:
///   d1 = eps f1, d2 = eps f2 cos(theta), d3 = eps f2 sin(theta),
///   theta = theta0 - kappa eps int f3 ds.
/// The D frame is G F with G = f_to_d_transform(theta, eps, kappa).
inline FToD type_d_from_f(const CoefficientPath& f, int epsilon = 1, int kappa = 1, double theta0 = 0.0) {
    if (!f.pattern || *f.pattern != PatternCatalog::canonical(FrameType::F))
        throw Error(ErrorKind::PatternMismatch, "type_d_from_f expects coefficients declared with the canonical type F mask");
    if (std::abs(epsilon) != 1 || std::abs(kappa) != 1) throw Error(ErrorKind::InvalidArgument, "signs must be +1 or -1");
    check_equispaced(f.s);
    std::vector<double> f3(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) f3[i] = f.channels[i][2];
    const auto int_f3 = detail::cumulative_integral<double>(f3, f.h(), 0, f.breaks, 0.0);
    FToD out;
    std::vector<std::array<double, 3>> d(f.size());
    out.transform.s = f.s;
    out.transform.epsilon = epsilon;
    out.transform.kappa = kappa;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double theta = theta0 - kappa * epsilon * int_f3[i];
        const auto& fc = f.channels[i];
        d[i] = {epsilon * fc[0], epsilon * fc[1] * std::cos(theta), epsilon * fc[1] * std::sin(theta)};
        out.transform.theta.push_back(theta);
        out.transform.G.push_back(f_to_d_transform(theta, epsilon, kappa));
    }
    out.d = coefficients_from_channels(f.s, d, PatternCatalog::canonical(FrameType::D));
    out.d.breaks = f.breaks;
    return out;
}

inline void require_bishop(const FramePath& frame) {
    if (frame.declared_type) {
        if (*frame.declared_type != FrameType::B) throw Error(ErrorKind::PatternMismatch, "frame is not declared type B");
        return;
    }
    const double r = pattern_residual(extract_coefficients(frame), PatternCatalog::canonical(FrameType::B));
    if (r > tol::pattern) throw Error(ErrorKind::PatternMismatch, "type B residual " + std::to_string(r));
}

/// Another Bishop frame of the same curve: diag(1, q) Z pointwise. Its
/// curvature row becomes b q^T.
inline FramePath rotate_bishop(const FramePath& bishop, const Mat3& q) {
    if (orthogonality_defect(q) > tol::q_orthogonal) throw Error(ErrorKind::InvalidArgument, "Q is not orthogonal");
    require_bishop(bishop);
    const Mat4 m = embed_normal_block(q);
    FramePath out = bishop;
    for (auto& z : out.Z) z = m * z;
    out.declared_type = FrameType::B;
    return out;
}

inline CoefficientPath rotate_bishop_coefficients(const CoefficientPath& b, const Mat3& q) {
    if (!b.pattern || *b.pattern != 0) throw Error(ErrorKind::PatternMismatch, "expected type B coefficients");
    std::vector<std::array<double, 3>> ch(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Vec3 r = q * Vec3(b.channels[i][0], b.channels[i][1], b.channels[i][2]);
        ch[i] = {r[0], r[1], r[2]};
    }
    auto out = coefficients_from_channels(b.s, ch, 0);
    out.breaks = b.breaks;
    if (b.field) {
        auto f = b.field;
        out.field = [f, q](double s) { return Skew4::from_first_row(q * f(s).first_row()); };
    }
    return out;
}

/// Quasi-uniform directions on the unit sphere (Fibonacci lattice).
inline std::vector<Vec3> fibonacci_sphere(std::size_t count) {
    std::vector<Vec3> out;
    out.reserve(count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return out;
}

struct AvoidedDirection {
    Vec3 xi = Vec3::UnitY();
    /// min_i |xi x b_hat(s_i)|: sine of the smallest angle between the line
    /// through xi and the lines through the samples.
    double margin = 0.0;
};

/// Direction search on RP^2 for a line never parallel to b(s). Samples with
/// |b| below 1e-6 carry no direction and are ignored.
inline AvoidedDirection find_avoided_direction(std::span<const Vec3> b, std::size_t grid = 4096) {
    std::vector<Vec3> dirs;
    dirs.reserve(b.size());
    for (const auto& v : b)
        if (v.norm() >= tol::two_regular) dirs.push_back(v.normalized());
    AvoidedDirection best;
    if (dirs.empty()) {
        best.margin = 1.0;
        return best;
    }
    // margin^2 = 1 - max (xi.b)^2; a candidate is abandoned as soon as it
    // cannot beat the incumbent
    auto margin_sq = [&](const Vec3& xi, double cutoff) {
        double worst = 0.0;
        for (const auto& d : dirs) {
            const double c = xi.dot(d);
            worst = std::max(worst, c * c);
            if (1.0 - worst <= cutoff) break;
        }
        return 1.0 - worst;
    };
    double best_sq = -1.0;
    for (const auto& xi : fibonacci_sphere(grid)) {
        const double m = margin_sq(xi, best_sq);
        if (m > best_sq) {
            best_sq = m;
            best.xi = xi;
        }
    }
    double radius = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(grid));
    for (int round = 0; round < 3; ++round) {
        const Vec3 u = best.xi.unitOrthogonal();
        const Vec3 v = best.xi.cross(u);
        const Vec3 centre = best.xi;
        for (int k = 0; k < 12; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 12.0;
            const Vec3 cand = (centre + radius * (std::cos(a) * u + std::sin(a) * v)).normalized();
            const double m = margin_sq(cand, best_sq);
            if (m > best_sq) {
                best_sq = m;
                best.xi = cand;
            }
        }
        radius *= 0.25;
    }
    best.margin = std::sqrt(std::max(0.0, best_sq));
    return best;
}

/// Transformation from a Bishop frame to a type C frame,
/// diag(1, s1, 1, s1*s3) diag(1, R(theta)) with R(theta) the rotation
/// [[cos, 0, sin], [0, 1, 0], [-sin, 0, cos]] of normals 1 and 3. For
/// s1 == s3 this is [[1,0,0,0],[0,s1 cos,0,s1 sin],[0,0,1,0],[0,-sin,0,cos]].
inline Mat4 b_to_c_transform(double theta, int sign1, int sign3) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat4 g = Mat4::Identity();
    g(1, 1) = sign1 * c;
    g(1, 3) = sign1 * s;
    g(3, 1) = -sign1 * sign3 * s;
    g(3, 3) = sign1 * sign3 * c;
    return g;
}

struct TypeCResult {
    FramePath frame;
    CoefficientPath coeffs;
    TransformPath transform;
};

/// Applies G(theta_i) to a Bishop frame sample by sample.
inline TypeCResult type_c_from_angles(const FramePath& bishop, const CoefficientPath& b, const std::vector<double>& theta,
                                      int sign1, int sign3) {
    if (std::abs(sign1) != 1 || std::abs(sign3) != 1) throw Error(ErrorKind::InvalidArgument, "signs must be +1 or -1");
    if (!same_grid(bishop.s, b.s) || theta.size() != b.size())
        throw Error(ErrorKind::InvalidArgument, "frame, coefficient and angle grids differ");
    TypeCResult out;
    out.frame = bishop;
    out.frame.declared_type = FrameType::C;
    out.transform.s = b.s;
    out.transform.theta = theta;
    out.transform.epsilon = sign1;
    out.transform.kappa = sign3;
    out.transform.G.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.transform.G[i] = b_to_c_transform(theta[i], sign1, sign3);
        out.frame.Z[i] = out.transform.G[i] * bishop.Z[i];
    }
    // c = G-bar b; c3 = sign3 * theta'
    std::vector<double> th(theta);
    const auto dtheta = detail::differentiate<double>(th, b.h(), 1, b.breaks);
    std::vector<std::array<double, 3>> c(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& bi = b.channels[i];
        const Vec4 row = out.transform.G[i] * Vec4(0.0, bi[0], bi[1], bi[2]);
        c[i] = {row[1], row[2], sign3 * dtheta[i]};
    }
    out.coeffs = coefficients_from_channels(b.s, c, PatternCatalog::canonical(FrameType::C));
    out.coeffs.breaks = b.breaks;
    return out;
}

/// Type C frame from a Bishop frame whose curvature vector is never parallel
/// to e2: (cos theta, sin theta) = (b1, b3)/sqrt(b1^2 + b3^2), giving
///   c1 = sign1 sqrt(b1^2 + b3^2), c2 = b2,
///   c3 = sign3 (b3' b1 - b3 b1')/(b1^2 + b3^2).
inline TypeCResult type_c_from_bishop(const FramePath& bishop, const CoefficientPath& b, int sign1 = 1, int sign3 = 1) {
    if (!b.pattern || *b.pattern != 0) throw Error(ErrorKind::PatternMismatch, "expected type B coefficients");
    check_equispaced(b.s);
    std::vector<double> theta(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& bi = b.channels[i];
        const double r2 = bi[0] * bi[0] + bi[2] * bi[2];
        if (!(r2 >= tol::avoidance))
            throw Error(ErrorKind::AvoidanceFailed,
                        "b1^2 + b3^2 = " + std::to_string(r2) + " at s = " + std::to_string(b.s[i]));
        const double raw = std::atan2(bi[2], bi[0]);
        if (i == 0) {
            theta[i] = raw;
            continue;
        }
        const double step = std::remainder(raw - theta[i - 1], 2.0 * std::numbers::pi);
        if (std::abs(step) > 0.5 * std::numbers::pi)
            throw Error(ErrorKind::ResolutionError, "angle jumps by " + std::to_string(step) + " rad at s = " + std::to_string(b.s[i]));
        theta[i] = theta[i - 1] + step;
    }
    return type_c_from_angles(bishop, b, theta, sign1, sign3);
}

struct TypeCPipeline {
    FramePath bishop;
    CoefficientPath b;
    AvoidedDirection direction;
    Mat3 q = Mat3::Identity();
    FramePath rotated;
    CoefficientPath rotated_b;
    TypeCResult result;
};

/// Type C frame of a 2-regular curve: Bishop frame, avoided direction xi,
/// rotation of the normals sending xi to e2, then type_c_from_bishop.
inline TypeCPipeline type_c_via_avoided_direction(const CurvePath& curve, int sign1 = 1, int sign3 = 1,
                                                  std::size_t grid = 4096) {
    TypeCPipeline p;
    p.bishop = rmf_bishop(curve);
    p.b = bishop_coefficients(curve, p.bishop);
    std::vector<Vec3> rows(p.b.size());
    for (std::size_t i = 0; i < p.b.size(); ++i) rows[i] = Vec3(p.b.channels[i][0], p.b.channels[i][1], p.b.channels[i][2]);
    p.direction = find_avoided_direction(rows, grid);
    p.q = map_direction_to_e2(p.direction.xi);
    p.rotated = rotate_bishop(p.bishop, p.q);
    p.rotated_b = rotate_bishop_coefficients(p.b, p.q);
    p.result = type_c_from_bishop(p.rotated, p.rotated_b, sign1, sign3);
    return p;
}

struct VerifyReport {
    double orthogonality_defect = 0.0;
    std::optional<double> tangent_defect;
    std::array<double, 4> best_residual{};
    bool degenerate = false;
    FrameType expected = FrameType::B;
    double tolerance = tol::pattern;
    bool passed = false;
};

/// Orthonormality, tangent agreement and pattern residuals of a frame.
inline VerifyReport verify_frame(const FramePath& frame, const CurvePath* curve, FrameType expected,
                                 double tolerance = tol::pattern) {
    VerifyReport r;
    r.expected = expected;
    r.tolerance = tolerance;
    r.orthogonality_defect = frame.max_orthogonality_defect();
    if (curve) {
        if (!same_grid(curve->s, frame.s)) throw Error(ErrorKind::InvalidArgument, "curve and frame grids differ");
        double d = 0.0;
        for (std::size_t i = 0; i < frame.size(); ++i)
            d = std::max(d, (frame.Z[i].row(0).transpose() - curve->T[i]).cwiseAbs().maxCoeff());
        r.tangent_defect = d;
    }
    const auto cls = classify_pattern(extract_coefficients(frame), tolerance);
    for (FrameType t : kAllFrameTypes) r.best_residual[static_cast<std::size_t>(t)] = cls.best_residual(t);
    r.degenerate = cls.degenerate;
    const bool pattern_ok = r.degenerate || r.best_residual[static_cast<std::size_t>(expected)] <= tolerance;
    r.passed = r.orthogonality_defect <= tol::frame_orthogonality &&
               (!r.tangent_defect || *r.tangent_defect <= tol::tangent_defect) && pattern_ok;
    return r;
}

inline VerifyReport verify_frame(const FramePath& frame, const CurvePath& curve, FrameType expected,
                                 double tolerance = tol::pattern) {
    return verify_frame(frame, &curve, expected, tolerance);
}

}  // namespace frame4
