#pragma once

// Named example curves and coefficient systems, with the admissibility
// detectors used to check them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "frame4/constructors.hpp"
#include "frame4/curve.hpp"
#include "frame4/error.hpp"
#include "frame4/frame.hpp"
#include "frame4/linalg.hpp"
#include "frame4/pattern.hpp"

namespace frame4 {

enum class Admissibility { Admits, Fails, Unknown };

inline const char* admissibility_name(Admissibility a) {
    switch (a) {
        case Admissibility::Admits: return "admits";
        case Admissibility::Fails: return "fails";
        case Admissibility::Unknown: return "unknown";
    }
    return "unknown";
}

enum class PresetSource { Curve, Tangent, Coefficients };

struct Preset {
    std::string name;
    std::string description;
    PresetSource source = PresetSource::Curve;
    Interval domain;
    RawCurve raw;                       // Curve
    TangentField tangent;               // Tangent
    Vec4 origin = Vec4::Zero();         // Tangent, Coefficients: gamma at the anchor
    std::optional<double> anchor;       // grid contains this value exactly
    /// Bishop curvatures (b1, b2, b3) and their derivatives (Coefficients).
    std::function<Vec3(double)> bishop_b;
    std::function<Vec3(double)> bishop_db;
    /// Constant coefficient matrix, when the preset is exp(sX).
    std::optional<Skew4> constant_x;
    /// Exact position, when known in closed form.
    std::function<Vec4(double)> closed_form;
    std::map<FrameType, Admissibility> expected;
};

namespace detail {

/// e^x with everything below e^-700 flushed to zero.
inline double flushed_exp(double x) { return x < -700.0 ? 0.0 : std::exp(x); }

/// exp(g(s)) and its derivative g'(s) exp(g(s)) for a bump branch.
struct Bump {
    double value = 0.0;
    double derivative = 0.0;
};

inline Bump bump_left(double s) {  // e^{1/s}, s < 0
    if (s >= 0.0) return {};
    const double e = flushed_exp(1.0 / s);
    return {e, e == 0.0 ? 0.0 : -e / (s * s)};
}

inline Bump bump_right(double s, double start) {  // e^{-1/(s - start)}, s > start
    if (s <= start) return {};
    const double u = s - start;
    const double e = flushed_exp(-1.0 / u);
    return {e, e == 0.0 ? 0.0 : e / (u * u)};
}

inline Bump bump_between(double s, double a, double b) {  // e^{-1/((s - a)(b - s))}, a < s < b
    if (s <= a || s >= b) return {};
    const double u = (s - a) * (b - s);
    const double e = flushed_exp(-1.0 / u);
    const double du = (b - s) - (s - a);
    return {e, e == 0.0 ? 0.0 : e * du / (u * u)};
}

inline std::map<FrameType, Admissibility> expect(Admissibility b, Admissibility c, Admissibility d, Admissibility f) {
    return {{FrameType::B, b}, {FrameType::C, c}, {FrameType::D, d}, {FrameType::F, f}};
}

inline Preset line_preset() {
    Preset p;
    p.name = "line";
    p.description = "unit-speed straight line (t, 0, 0, 0)";
    p.domain = {0.0, 1.0};
    p.raw.position = [](double t) { return Vec4(t, 0, 0, 0); };
    p.raw.velocity = [](double) { return Vec4(1, 0, 0, 0); };
    p.raw.acceleration = [](double) { return Vec4::Zero().eval(); };
    p.raw.jerk = [](double) { return Vec4::Zero().eval(); };
    p.closed_form = p.raw.position;
    // X vanishes identically, which matches every pattern
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Admits, Admissibility::Admits);
    return p;
}

inline Preset circle_preset() {
    Preset p;
    p.name = "circle";
    p.description = "planar unit circle (cos t, sin t, 0, 0)";
    p.domain = {0.0, 2.0 * std::numbers::pi};
    p.raw.position = [](double t) { return Vec4(std::cos(t), std::sin(t), 0, 0); };
    p.raw.velocity = [](double t) { return Vec4(-std::sin(t), std::cos(t), 0, 0); };
    p.raw.acceleration = [](double t) { return Vec4(-std::cos(t), -std::sin(t), 0, 0); };
    p.raw.jerk = [](double t) { return Vec4(std::sin(t), -std::cos(t), 0, 0); };
    p.closed_form = p.raw.position;
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Admits, Admissibility::Admits);
    return p;
}

inline Preset helix_preset() {
    Preset p;
    p.name = "helix4d";
    p.description = "helix (cos t, sin t, cos 2t, sin 2t), speed sqrt(5)";
    p.domain = {0.0, 2.0 * std::numbers::pi};
    p.raw.position = [](double t) { return Vec4(std::cos(t), std::sin(t), std::cos(2 * t), std::sin(2 * t)); };
    p.raw.velocity = [](double t) {
        return Vec4(-std::sin(t), std::cos(t), -2 * std::sin(2 * t), 2 * std::cos(2 * t));
    };
    p.raw.acceleration = [](double t) {
        return Vec4(-std::cos(t), -std::sin(t), -4 * std::cos(2 * t), -4 * std::sin(2 * t));
    };
    p.raw.jerk = [](double t) { return Vec4(std::sin(t), -std::cos(t), 8 * std::sin(2 * t), -8 * std::cos(2 * t)); };
    p.closed_form = p.raw.position;
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Admits, Admissibility::Admits);
    return p;
}

inline Skew4 exp_c_matrix() { return Skew4::from_upper({2, 1, 0, 0, 1, 0}); }

inline Preset exp_c_preset() {
    Preset p;
    p.name = "expC";
    p.description = "curve framed by exp(sX) for a constant type C matrix X";
    p.source = PresetSource::Tangent;
    p.domain = {0.0, 4.0};
    p.anchor = 0.0;
    const Skew4 x = exp_c_matrix();
    p.constant_x = x;
    p.tangent.tangent = [x](double s) { return Vec4(mat_exp(x, s).row(0).transpose()); };
    p.tangent.derivative = [x](double s) { return Vec4((x.matrix() * mat_exp(x, s)).row(0).transpose()); };
    p.tangent.second_derivative = [x](double s) {
        return Vec4((x.matrix() * x.matrix() * mat_exp(x, s)).row(0).transpose());
    };
    p.closed_form = [](double s) {
        const double r = std::numbers::sqrt2;
        const double a = std::sin(r * s), b = std::cos(r * s), c = std::sin(s), d = std::cos(s);
        return Vec4(a * d / r, c * a / r, (-c * a - r * d * b) / r, (a * d - r * c * b) / r);
    };
    p.origin = p.closed_form(0.0);
    // constant (nonzero) curvature vector, so D and F exist as well
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Admits, Admissibility::Unknown);
    return p;
}

inline Preset gamma_no_d_preset() {
    Preset p;
    p.name = "gammaNoD";
    p.description = "(t, e^{-1/t}, 0, 0) for t > 0, (t, 0, e^{1/t}, 0) for t < 0";
    p.domain = {-1.0, 1.0};
    p.raw.junction = 0.0;
    p.raw.position = [](double t) {
        if (t > 0) return Vec4(t, flushed_exp(-1.0 / t), 0, 0);
        if (t < 0) return Vec4(t, 0, flushed_exp(1.0 / t), 0);
        return Vec4::Zero().eval();
    };
    p.raw.velocity = [](double t) {
        if (t > 0) return Vec4(1, flushed_exp(-1.0 / t) / (t * t), 0, 0);
        if (t < 0) return Vec4(1, 0, -flushed_exp(1.0 / t) / (t * t), 0);
        return Vec4(1, 0, 0, 0);
    };
    p.raw.acceleration = [](double t) {
        if (t > 0) {
            const double e = flushed_exp(-1.0 / t);
            return e == 0.0 ? Vec4::Zero().eval() : Vec4(0, e * (1 / std::pow(t, 4) - 2 / std::pow(t, 3)), 0, 0);
        }
        if (t < 0) {
            const double e = flushed_exp(1.0 / t);
            return e == 0.0 ? Vec4::Zero().eval() : Vec4(0, 0, e * (1 / std::pow(t, 4) + 2 / std::pow(t, 3)), 0);
        }
        return Vec4::Zero().eval();
    };
    p.raw.jerk = [](double t) {
        if (t > 0) {
            const double e = flushed_exp(-1.0 / t);
            return e == 0.0 ? Vec4::Zero().eval()
                            : Vec4(0, e * (1 / std::pow(t, 6) - 6 / std::pow(t, 5) + 6 / std::pow(t, 4)), 0, 0);
        }
        if (t < 0) {
            const double e = flushed_exp(1.0 / t);
            return e == 0.0 ? Vec4::Zero().eval()
                            : Vec4(0, 0, -e * (1 / std::pow(t, 6) + 6 / std::pow(t, 5) + 6 / std::pow(t, 4)), 0);
        }
        return Vec4::Zero().eval();
    };
    p.closed_form = p.raw.position;
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Fails, Admissibility::Fails);
    return p;
}

inline Preset no_f_preset() {
    Preset p;
    p.name = "noF";
    p.description = "2-regular curve whose halves lie in the hyperplanes z = 0 (s >= 0) and y = 0 (s <= 0)";
    p.source = PresetSource::Tangent;
    p.domain = {-1.0, 1.0};
    p.anchor = 0.0;
    p.tangent.junction = 0.0;
    p.tangent.tangent = [](double s) {
        if (s > 0) {
            const double e = flushed_exp(-1.0 / s);
            const double q = s * s + e * e + 1.0;
            return Vec4(2 * s / q, 2 * e / q, 0, (s * s + e * e - 1.0) / q);
        }
        if (s < 0) {
            const double e = flushed_exp(1.0 / s);
            const double q = s * s + e * e + 1.0;
            return Vec4(2 * s / q, 0, 2 * e / q, (s * s + e * e - 1.0) / q);
        }
        return Vec4(0, 0, 0, -1);
    };
    p.expected = expect(Admissibility::Admits, Admissibility::Admits, Admissibility::Admits, Admissibility::Fails);
    return p;
}

inline Preset bump_preset(bool with_tail) {
    Preset p;
    p.name = with_tail ? "bumpNoC" : "bumpYesC";
    p.description = with_tail ? "Bishop curvatures supported on s < 0 and s > 2 (b1), (0, 1) (b2), (1, 2) (b3)"
                              : "Bishop curvatures supported on s < 0 (b1), (0, 1) (b2), (1, 2) (b3)";
    p.source = PresetSource::Coefficients;
    p.domain = {-1.0, 3.0};
    p.anchor = 0.0;
    p.bishop_b = [with_tail](double s) {
        const double b1 = bump_left(s).value + (with_tail ? bump_right(s, 2.0).value : 0.0);
        return Vec3(b1, bump_between(s, 0.0, 1.0).value, bump_between(s, 1.0, 2.0).value);
    };
    p.bishop_db = [with_tail](double s) {
        const double b1 = bump_left(s).derivative + (with_tail ? bump_right(s, 2.0).derivative : 0.0);
        return Vec3(b1, bump_between(s, 0.0, 1.0).derivative, bump_between(s, 1.0, 2.0).derivative);
    };
    // b vanishes at s = 0, 1 (and 2), so the curve is not 2-regular
    p.expected = expect(Admissibility::Admits, with_tail ? Admissibility::Fails : Admissibility::Admits,
                        Admissibility::Fails, Admissibility::Fails);
    return p;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
    return {"line", "circle", "helix4d", "expC", "gammaNoD", "noF", "bumpNoC", "bumpYesC"};
}

inline Preset get_preset(const std::string& name) {
    if (name == "line") return detail::line_preset();
    if (name == "circle") return detail::circle_preset();
    if (name == "helix4d") return detail::helix_preset();
    if (name == "expC") return detail::exp_c_preset();
    if (name == "gammaNoD") return detail::gamma_no_d_preset();
    if (name == "noF") return detail::no_f_preset();
    if (name == "bumpNoC") return detail::bump_preset(true);
    if (name == "bumpYesC") return detail::bump_preset(false);
    throw Error(ErrorKind::UnknownPreset, "no preset named '" + name + "'");
}

/// Equispaced grid for a coefficient or tangent preset.
inline std::vector<double> preset_grid(const Preset& p, int density) {
    const int n = samples_for(p.domain, density);
    const double h = p.domain.length() / (n - 1);
    return detail::anchored_grid(p.domain.lo, p.domain.hi, h, p.anchor.value_or(p.domain.lo));
}

/// Bishop (or constant) coefficients of a coefficient preset on grid s.
inline CoefficientPath preset_coefficients(const Preset& p, const std::vector<double>& s) {
    CoefficientPath c;
    c.s = s;
    if (p.constant_x) {
        c.X.assign(s.size(), *p.constant_x);
        c.constant = true;
        const Skew4 x = *p.constant_x;
        c.field = [x](double) { return x; };
        return declare_pattern(c, PatternCatalog::canonical(FrameType::C));
    }
    if (!p.bishop_b) throw Error(ErrorKind::InvalidArgument, "preset '" + p.name + "' has no coefficient closures");
    std::vector<std::array<double, 3>> ch(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 b = p.bishop_b(s[i]);
        ch[i] = {b[0], b[1], b[2]};
    }
    c = coefficients_from_channels(s, ch, 0);
    auto f = p.bishop_b;
    c.field = [f](double x) { return Skew4::from_first_row(f(x)); };
    return c;
}

struct BishopCurve {
    CurvePath curve;
    FramePath frame;
    CoefficientPath b;
};

/// Integrates Z' = X_B Z from Z(s_0) = I and recovers the curve from row 0,
/// with gamma = origin at the anchor.
inline BishopCurve bishop_curve_from_coefficients(const Preset& p, int density) {
    BishopCurve out;
    const auto s = preset_grid(p, density);
    out.b = preset_coefficients(p, s);
    out.frame = integrate_frame(out.b, Mat4::Identity());
    out.frame.declared_type = FrameType::B;
    auto& c = out.curve;
    c.s = s;
    c.T.resize(s.size());
    c.Tp.resize(s.size());
    c.Tpp.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Mat4& z = out.frame.Z[i];
        const Vec3 b = p.bishop_b(s[i]);
        const Vec3 db = p.bishop_db(s[i]);
        c.T[i] = z.row(0).transpose();
        c.Tp[i] = Vec4::Zero();
        c.Tpp[i] = -b.squaredNorm() * c.T[i];
        for (int k = 0; k < 3; ++k) {
            c.Tp[i] += b[k] * z.row(k + 1).transpose();
            c.Tpp[i] += db[k] * z.row(k + 1).transpose();
        }
    }
    c.gamma = detail::cumulative_integral<Vec4>(c.T, c.h(), c.index_of(p.anchor.value_or(s.front())), c.breaks, Vec4::Zero());
    for (auto& g : c.gamma) g += p.origin;
    return out;
}

/// Arc-length samples of a preset at the given density (samples per unit of
/// domain length).
inline CurvePath sample_curve(const Preset& p, int density = kDefaultGridDensity) {
    switch (p.source) {
        case PresetSource::Curve: return arc_length_reparametrize(p.raw, p.domain, samples_for(p.domain, density));
        case PresetSource::Tangent:
            return curve_from_tangent(p.tangent, p.domain, samples_for(p.domain, density), p.origin, p.anchor);
        case PresetSource::Coefficients: return bishop_curve_from_coefficients(p, density).curve;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown preset source");
}

// ---------------------------------------------------------------------------
// Type D obstruction: one-sided limits of T'/|T'|

struct TypeDObstruction {
    double s_star = 0.0;
    Vec4 left = Vec4::Zero();
    Vec4 right = Vec4::Zero();
    double angle = 0.0;
    bool obstruction = false;
};

namespace detail {

/// Limit of T'/|T'| at sample i0 approached from one side (dir = -1 or +1):
/// the unit direction at the closest offset m = 2^k where |T'| is resolved,
/// improved by one Richardson step with offset 2m.
inline Vec4 one_sided_direction(const CurvePath& c, std::size_t i0, int dir) {
    const long n = static_cast<long>(c.size());
    auto at = [&](long m) -> std::optional<Vec4> {
        const long i = static_cast<long>(i0) + dir * m;
        if (i < 0 || i >= n) return std::nullopt;
        const Vec4& tp = c.Tp[static_cast<std::size_t>(i)];
        if (!(tp.norm() >= 1e-8)) return std::nullopt;
        return Vec4(tp.normalized());
    };
    for (long m = 1; m < n; m *= 2) {
        const auto u1 = at(m);
        if (!u1) continue;
        const auto u2 = at(2 * m);
        if (!u2) return *u1;
        return (2.0 * *u1 - *u2).normalized();
    }
    throw Error(ErrorKind::SideDegenerate, "|T'| below 1e-8 on the whole " + std::string(dir < 0 ? "left" : "right") + " side");
}

}  // namespace detail

inline TypeDObstruction detect_type_d_obstruction(const CurvePath& curve, double s_star) {
    TypeDObstruction r;
    r.s_star = s_star;
    const std::size_t i0 = curve.index_of(s_star);
    r.left = detail::one_sided_direction(curve, i0, -1);
    r.right = detail::one_sided_direction(curve, i0, +1);
    r.angle = std::acos(std::clamp(r.left.dot(r.right), -1.0, 1.0));
    r.obstruction = r.angle > 1e-3;
    return r;
}

// ---------------------------------------------------------------------------
// Type F obstruction: osculating 3-spaces on the two sides

struct SideSpan {
    int rank = 0;
    Vec4 normal = Vec4::Zero();  // meaningful when rank == 3
    std::array<double, 4> eigenvalues{};
};

struct TypeFObstruction {
    double s_star = 0.0;
    SideSpan left;
    SideSpan right;
    /// Dimension of the intersection of the two 3-spans; -1 when the sides do
    /// not both span exactly three dimensions.
    int intersection_dim = -1;
    bool two_sided_split = false;
    bool obstruction = false;
};

namespace detail {

inline SideSpan side_span(const CurvePath& c, std::size_t i0, int dir, double window) {
    Mat4 scatter = Mat4::Zero();
    const long n = static_cast<long>(c.size());
    const long steps = std::max<long>(4, static_cast<long>(window / c.h()));
    for (long m = 1; m <= steps; ++m) {
        const long i = static_cast<long>(i0) + dir * m;
        if (i < 0 || i >= n) break;
        const auto k = static_cast<std::size_t>(i);
        for (const Vec4* v : {&c.T[k], &c.Tp[k], &c.Tpp[k]}) {
            const double len = v->norm();
            if (len > 1e-12) scatter += (*v / len) * (*v / len).transpose();
        }
    }
    const Eigen::SelfAdjointEigenSolver<Mat4> eig(scatter);
    SideSpan s;
    const auto ev = eig.eigenvalues();  // ascending
    for (int k = 0; k < 4; ++k) s.eigenvalues[static_cast<std::size_t>(k)] = ev[k];
    const double top = ev[3];
    for (int k = 0; k < 4; ++k)
        if (ev[k] > 1e-10 * top) ++s.rank;
    s.normal = eig.eigenvectors().col(0);
    return s;
}

}  // namespace detail

/// Spans of {gamma', gamma'', gamma'''} on either side of s_star (within
/// `window` arc length). Both sides spanning hyperplanes that differ means no
/// frame of type F can be continuous across s_star.
inline TypeFObstruction detect_type_f_obstruction(const CurvePath& curve, double s_star, double window = 0.5) {
    TypeFObstruction r;
    r.s_star = s_star;
    const std::size_t i0 = curve.index_of(s_star);
    r.left = detail::side_span(curve, i0, -1, window);
    r.right = detail::side_span(curve, i0, +1, window);
    if (r.left.rank == 3 && r.right.rank == 3) {
        r.two_sided_split = true;
        const double c = std::abs(r.left.normal.dot(r.right.normal));
        r.intersection_dim = c > 1.0 - 1e-9 ? 3 : 2;
        r.obstruction = r.intersection_dim <= 2;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Type C by angle plans

/// Rotation angle theta(s) for the transformation to type C, built from
/// rotated Bishop curvatures b~ = Q b. Samples are classified as
///   null:        |b| < 1e-10 max|b|
///   free:        (b1, b3) ~ 0 relative to |b| (b along e2)
///   constrained: otherwise; theta must equal phi = atan2(b3, b1) mod pi.
/// Inside constrained runs theta follows phi continuously. Across gaps that
/// contain free samples theta turns smoothly to the next run's phi. Across
/// null-only gaps (isolated zeros of b) theta must stay put, so any mismatch
/// with the next run shows up in the residual.
struct AnglePlan {
    std::vector<double> theta;
    std::vector<int> kind;  // 0 null, 1 free, 2 constrained
    /// max over constrained samples of (r/|b|) |sin(phi - theta)|, the
    /// relative size of the off-pattern entry the plan leaves behind.
    double residual = 0.0;
    std::size_t constrained = 0;
};

namespace detail {

inline double wrap_half_pi(double a) { return std::remainder(a, std::numbers::pi); }

/// C-infinity step from 0 (x <= 0) to 1 (x >= 1).
inline double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = flushed_exp(-1.0 / x), b = flushed_exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

}  // namespace detail

inline AnglePlan type_c_angle_plan(const std::vector<double>& s, std::span<const Vec3> bt) {
    const std::size_t n = bt.size();
    AnglePlan plan;
    plan.theta.assign(n, 0.0);
    plan.kind.assign(n, 0);
    double maxb = 0.0;
    for (const auto& v : bt) maxb = std::max(maxb, v.norm());
    std::vector<double> phi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double nb = bt[i].norm();
        const double r = std::hypot(bt[i][0], bt[i][2]);
        if (!(nb >= 1e-10 * maxb) || nb == 0.0) plan.kind[i] = 0;
        else if (r <= 1e-9 * nb) plan.kind[i] = 1;
        else {
            plan.kind[i] = 2;
            phi[i] = std::atan2(bt[i][2], bt[i][0]);
            ++plan.constrained;
        }
    }
    if (plan.constrained == 0) return plan;

    std::size_t first = 0;
    while (plan.kind[first] != 2) ++first;
    for (std::size_t i = 0; i <= first; ++i) plan.theta[i] = phi[first];
    std::size_t last = first;  // last constrained sample handled
    for (std::size_t i = first + 1; i < n; ++i) {
        if (plan.kind[i] != 2) continue;
        if (i == last + 1) {
            plan.theta[i] = plan.theta[last] + detail::wrap_half_pi(phi[i] - phi[last]);
        } else {
            // gap (last, i)
            std::size_t ff = n, lf = 0;
            for (std::size_t k = last + 1; k < i; ++k)
                if (plan.kind[k] == 1) {
                    ff = std::min(ff, k);
                    lf = k;
                }
            const double from = plan.theta[last];
            if (ff == n) {
                for (std::size_t k = last + 1; k <= i; ++k) plan.theta[k] = from;
            } else {
                const double to = from + detail::wrap_half_pi(phi[i] - from);
                const double width = s[lf] - s[ff];
                for (std::size_t k = last + 1; k <= i; ++k) {
                    const double x = width > 0.0 ? (s[k] - s[ff]) / width : (k >= ff ? 1.0 : 0.0);
                    plan.theta[k] = from + (to - from) * detail::smooth_step(x);
                }
            }
        }
        last = i;
    }
    for (std::size_t i = last + 1; i < n; ++i) plan.theta[i] = plan.theta[last];

    for (std::size_t i = 0; i < n; ++i) {
        if (plan.kind[i] != 2) continue;
        const double r = std::hypot(bt[i][0], bt[i][2]);
        plan.residual = std::max(plan.residual, r / bt[i].norm() * std::abs(std::sin(phi[i] - plan.theta[i])));
    }
    return plan;
}

struct SweepEntry {
    Vec3 xi;
    /// The pointwise construction applies (b1^2 + b3^2 never below 1e-10).
    bool avoidance_ok = false;
    double residual = 0.0;
};

struct TypeCSweep {
    std::vector<SweepEntry> entries;
    std::size_t avoidance_failures = 0;
    std::size_t best = 0;
    double best_residual = 0.0;
    /// Off-pattern entries of the type C frame built for the best direction,
    /// relative to |X(0, .)| (floored at 1e-6 max|b|).
    std::optional<double> frame_residual;
    bool success = false;
};

/// Type C frame of a coefficient preset for one direction xi.
inline TypeCResult type_c_from_plan(const FramePath& bishop, const CoefficientPath& b, const Vec3& xi, AnglePlan* plan_out = nullptr) {
    const Mat3 q = map_direction_to_e2(xi);
    const auto rotated = rotate_bishop(bishop, q);
    const auto rb = rotate_bishop_coefficients(b, q);
    std::vector<Vec3> bt(rb.size());
    for (std::size_t i = 0; i < rb.size(); ++i) bt[i] = Vec3(rb.channels[i][0], rb.channels[i][1], rb.channels[i][2]);
    auto plan = type_c_angle_plan(rb.s, bt);
    auto out = type_c_from_angles(rotated, rb, plan.theta, 1, 1);
    if (plan_out) *plan_out = std::move(plan);
    return out;
}

/// Sweeps directions xi (Fibonacci grid plus the coordinate axes), rotates the
/// Bishop curvatures so that xi goes to e2 and scores the best angle plan.
/// The best direction is then checked on actual frames. This is evidence,
/// not a proof, either way.
inline TypeCSweep empirical_type_c_sweep(const Preset& p, std::size_t grid_q = 4096, int density = kDefaultGridDensity,
                                         bool verify_best = true) {
    TypeCSweep out;
    const auto s = preset_grid(p, density);
    const auto b = preset_coefficients(p, s);
    std::vector<Vec3> raw(b.size());
    double maxb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        raw[i] = Vec3(b.channels[i][0], b.channels[i][1], b.channels[i][2]);
        maxb = std::max(maxb, raw[i].norm());
    }
    auto dirs = fibonacci_sphere(grid_q);
    dirs.push_back(Vec3::UnitX());
    dirs.push_back(Vec3::UnitY());
    dirs.push_back(Vec3::UnitZ());
    std::vector<Vec3> bt(raw.size());
    out.best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Mat3 q = map_direction_to_e2(dirs[d]);
        double min_r2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            bt[i] = q * raw[i];
            min_r2 = std::min(min_r2, bt[i][0] * bt[i][0] + bt[i][2] * bt[i][2]);
        }
        SweepEntry e{dirs[d], min_r2 >= tol::avoidance, type_c_angle_plan(s, bt).residual};
        if (!e.avoidance_ok) ++out.avoidance_failures;
        if (e.residual < out.best_residual) {
            out.best_residual = e.residual;
            out.best = d;
        }
        out.entries.push_back(e);
    }
    out.success = out.best_residual <= 1e-5;
    if (verify_best) {
        const FramePath bishop = [&] {
            auto f = integrate_frame(b, Mat4::Identity());
            f.declared_type = FrameType::B;
            return f;
        }();
        const auto c = type_c_from_plan(bishop, b, dirs[out.best]);
        out.frame_residual = relative_pattern_residual(extract_coefficients(c.frame), PatternCatalog::canonical(FrameType::C),
                                                       1e-6 * maxb);
        out.success = out.success && *out.frame_residual <= 1e-5;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Type C for curves inside a hyperplane

struct HyperplaneCertificate {
    bool in_hyperplane = false;
    Vec4 normal = Vec4::Zero();
    double max_offset = 0.0;
    FramePath frame;
    ClassifyResult classification;
    bool certified = false;
};

/// Smallest principal direction of the positions and the largest distance of
/// the curve from the best-fit hyperplane.
inline std::pair<Vec4, double> fit_hyperplane(const CurvePath& curve) {
    Vec4 mean = Vec4::Zero();
    for (const auto& g : curve.gamma) mean += g;
    mean /= static_cast<double>(curve.size());
    Mat4 scatter = Mat4::Zero();
    for (const auto& g : curve.gamma) scatter += (g - mean) * (g - mean).transpose();
    const Eigen::SelfAdjointEigenSolver<Mat4> eig(scatter);
    const Vec4 normal = eig.eigenvectors().col(0);
    double off = 0.0;
    for (const auto& g : curve.gamma) off = std::max(off, std::abs((g - mean).dot(normal)));
    return {normal, off};
}

/// A curve in a hyperplane with normal n has the Bishop frame
/// (T, N1, N2, n) with N1, N2 transported inside the hyperplane. n is
/// constant, so the coefficient matrix has a zero last row and fits a type C
/// pattern.
inline HyperplaneCertificate certify_hyperplane_type_c(const CurvePath& curve, double tolerance = tol::pattern) {
    HyperplaneCertificate cert;
    const auto [normal, off] = fit_hyperplane(curve);
    cert.normal = normal;
    cert.max_offset = off;
    cert.in_hyperplane = off <= 1e-9;
    if (!cert.in_hyperplane) return cert;
    const Vec4 t0 = curve.T[0].normalized();
    // T(s0) leaves the fitted hyperplane by rounding only
    const Vec4 n0 = (normal - normal.dot(t0) * t0).normalized();
    Mat4 partial = Mat4::Zero();
    partial.row(0) = t0.transpose();
    partial.row(1) = n0.transpose();
    const Mat4 full = complete_to_rotation(partial, 2);
    const NormalSet normals{Vec4(full.row(2).transpose()), Vec4(full.row(3).transpose()), n0};
    cert.frame = rmf_bishop(curve, normals);
    cert.frame.declared_type = FrameType::C;
    cert.classification = classify_pattern(extract_coefficients(cert.frame), tolerance);
    cert.certified = cert.classification.types().contains(FrameType::C);
    return cert;
}

}  // namespace frame4
