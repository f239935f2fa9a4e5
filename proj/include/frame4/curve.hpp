#pragma once

// Curves in E^4: arc-length reparametrization, derivative estimation,
// regularity diagnostics and reconstruction from a tangent field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frame4/error.hpp"
#include "frame4/linalg.hpp"
#include "frame4/stencil.hpp"

namespace frame4 {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

namespace tol {
inline constexpr double speed_floor = 1e-8;
inline constexpr double unit_tangent = 1e-8;
inline constexpr double regular_min = 1e-6;
inline constexpr double frenet_gram = 1e-10;
}  // namespace tol

/// Default sampling density: samples per unit of domain length.
inline constexpr int kDefaultGridDensity = 2048;

/// Input descriptor used by the gallery and the CLI.
struct CurveSpec {
    std::string kind;  // preset name, or "sampled"
    std::map<std::string, double> params;
    Interval domain;
    int sample_count = 2 * kDefaultGridDensity + 1;
};

inline int samples_for(const Interval& domain, int density) {
    return static_cast<int>(std::lround(domain.length() * density)) + 1;
}

/// A curve in an arbitrary (not necessarily arc-length) parameter t. Derivative
/// closures are optional; missing ones are replaced by finite differences.
struct RawCurve {
    std::function<Vec4(double)> position;
    std::function<Vec4(double)> velocity;
    std::function<Vec4(double)> acceleration;
    std::function<Vec4(double)> jerk;
    /// Parameter value where a piecewise definition switches branches. The
    /// arc-length grid is anchored there (s = 0) and stencils never cross it.
    std::optional<double> junction;
};

/// A unit tangent field in arc length with optional analytic derivatives.
struct TangentField {
    std::function<Vec4(double)> tangent;
    std::function<Vec4(double)> derivative;
    std::function<Vec4(double)> second_derivative;
    std::optional<double> junction;
};

/// Arc-length sampled curve. T is the unit tangent, Tp = dT/ds, Tpp = d2T/ds2.
struct CurvePath {
    std::vector<double> s;
    std::vector<Vec4> gamma;
    std::vector<Vec4> T;
    std::vector<Vec4> Tp;
    std::vector<Vec4> Tpp;
    /// Sample indices of piecewise junctions.
    std::vector<std::size_t> breaks;

    std::size_t size() const { return s.size(); }
    double h() const { return s.size() > 1 ? (s.back() - s.front()) / static_cast<double>(s.size() - 1) : 0.0; }

    /// Index of the sample closest to `value`.
    std::size_t index_of(double value) const {
        const auto it = std::lower_bound(s.begin(), s.end(), value);
        if (it == s.begin()) return 0;
        if (it == s.end()) return s.size() - 1;
        const std::size_t i = static_cast<std::size_t>(it - s.begin());
        return (value - s[i - 1] <= s[i] - value) ? i - 1 : i;
    }
};

struct RegularityReport {
    bool is_regular = false;
    bool is_2_regular = false;
    double min_speed = 0.0;
    double min_Tp_norm = 0.0;
    double min_frenet_gram = 0.0;
    bool frenet_rank_ok = false;
};

namespace detail {

/// Fritsch-Carlson monotone cubic interpolant through increasing data.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)), m_(x_.size()) {
        const std::size_t n = x_.size();
        std::vector<double> d(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t k = 1; k + 1 < n; ++k) m_[k] = (d[k - 1] * d[k] <= 0.0) ? 0.0 : 0.5 * (d[k - 1] + d[k]);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (d[k] == 0.0) {
                m_[k] = m_[k + 1] = 0.0;
                continue;
            }
            const double a = m_[k] / d[k];
            const double b = m_[k + 1] / d[k];
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double t = 3.0 / std::sqrt(r);
                m_[k] = t * a * d[k];
                m_[k + 1] = t * b * d[k];
            }
        }
    }

    std::size_t interval(double x) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    double operator()(double x) const {
        const std::size_t k = interval(x);
        const double hk = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / hk;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * hk * m_[k] + (-2 * t3 + 3 * t2) * y_[k + 1] +
               (t3 - t2) * hk * m_[k + 1];
    }

private:
    std::vector<double> x_, y_, m_;
};

inline Vec4 fd_velocity(const std::function<Vec4(double)>& pos, double t) {
    const double h = 1e-3;
    return (pos(t - 2 * h) - 8.0 * pos(t - h) + 8.0 * pos(t + h) - pos(t + 2 * h)) / (12.0 * h);
}

/// T' and T'' in arc length from parameter derivatives (v, a, j).
inline void tangent_derivatives(const Vec4& v, const Vec4& a, const Vec4* j, Vec4& tp, Vec4* tpp) {
    const double sigma = v.norm();
    const Vec4 t = v / sigma;
    const Vec4 pa = a - a.dot(t) * t;
    tp = pa / (sigma * sigma);
    if (j && tpp) {
        const Vec4 tdot = pa / sigma;  // dT/dt
        const Vec4 dpa = *j - j->dot(t) * t - a.dot(tdot) * t - a.dot(t) * tdot;
        const double sdot = a.dot(t);
        *tpp = (dpa / (sigma * sigma) - 2.0 * sdot * pa / (sigma * sigma * sigma)) / sigma;
    }
}

inline std::vector<std::size_t> junction_breaks(const std::vector<double>& s, std::optional<double> junction_s) {
    if (!junction_s) return {};
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s[i] - *junction_s) < std::abs(s[best] - *junction_s)) best = i;
    return {best};
}

}  // namespace detail

/// Recomputes Tp and Tpp from the T samples by fourth-order finite
/// differences (one-sided at piece ends, never across junctions).
inline CurvePath derivatives(const CurvePath& path) {
    CurvePath out = path;
    out.Tp = detail::differentiate<Vec4>(path.T, path.h(), 1, path.breaks);
    out.Tpp = detail::differentiate<Vec4>(path.T, path.h(), 2, path.breaks);
    return out;
}

/// Resamples a regular curve on an equispaced arc-length grid of about n
/// samples. Without a junction the grid starts at s = 0 on domain.lo; with a
/// junction, s = 0 sits exactly on the junction.
inline CurvePath arc_length_reparametrize(const RawCurve& raw, const Interval& domain, int n) {
    if (!(domain.lo < domain.hi)) throw Error(ErrorKind::InvalidArgument, "empty domain");
    if (n < 16) throw Error(ErrorKind::InvalidArgument, "sample count below 16");
    auto velocity = [&](double t) { return raw.velocity ? raw.velocity(t) : detail::fd_velocity(raw.position, t); };
    auto speed = [&](double t) {
        const double v = velocity(t).norm();
        if (!(v >= tol::speed_floor))
            throw Error(ErrorKind::NotRegular, "speed " + std::to_string(v) + " at t = " + std::to_string(t));
        return v;
    };

    // Cumulative length table; every table node doubles as a regularity probe.
    const std::size_t m = static_cast<std::size_t>(std::max(4 * n, 64));
    std::vector<double> knots;
    if (raw.junction && *raw.junction > domain.lo && *raw.junction < domain.hi) {
        const double frac = (*raw.junction - domain.lo) / domain.length();
        const std::size_t ml = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(frac * m)));
        const std::size_t mr = std::max<std::size_t>(8, m - ml);
        for (std::size_t k = 0; k < ml; ++k) knots.push_back(domain.lo + (*raw.junction - domain.lo) * k / ml);
        for (std::size_t k = 0; k <= mr; ++k) knots.push_back(*raw.junction + (domain.hi - *raw.junction) * k / mr);
    } else {
        for (std::size_t k = 0; k <= m; ++k) knots.push_back(domain.lo + domain.length() * k / m);
    }
    std::vector<double> cum(knots.size(), 0.0);
    for (std::size_t k = 0; k < knots.size(); ++k) {
        speed(knots[k]);
        if (k > 0) cum[k] = cum[k - 1] + detail::gauss_legendre5(speed, knots[k - 1], knots[k]);
    }
    const double total = cum.back();
    const double h = total / (n - 1);

    std::vector<double> table_s;  // grid values in table coordinates
    double s_offset = 0.0;
    if (raw.junction && *raw.junction > domain.lo && *raw.junction < domain.hi) {
        const auto jt = std::lower_bound(knots.begin(), knots.end(), *raw.junction);
        s_offset = cum[static_cast<std::size_t>(jt - knots.begin())];
        table_s = detail::anchored_grid(0.0, total, h, s_offset);
    } else {
        for (int i = 0; i < n; ++i) table_s.push_back(h * i);
        table_s.back() = total;
    }

    const detail::MonotoneCubic inverse(cum, knots);
    CurvePath path;
    path.s.reserve(table_s.size());
    std::vector<double> tvals;
    for (double target : table_s) {
        target = std::clamp(target, 0.0, total);
        const std::size_t k = inverse.interval(target);
        double t = std::clamp(inverse(target), knots[k], knots[k + 1]);
        for (int it = 0; it < 8; ++it) {
            const double len = cum[k] + detail::gauss_legendre5(speed, knots[k], t);
            const double dt = (len - target) / speed(t);
            t = std::clamp(t - dt, knots[k], knots[k + 1]);
            if (std::abs(dt) <= 1e-15 * std::max(1.0, std::abs(t))) break;
        }
        tvals.push_back(t);
        path.s.push_back(target - s_offset);
    }
    if (raw.junction) path.breaks = detail::junction_breaks(path.s, 0.0);

    const std::size_t count = path.s.size();
    path.gamma.resize(count);
    path.T.resize(count);
    path.Tp.resize(count);
    path.Tpp.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec4 v = velocity(tvals[i]);
        path.gamma[i] = raw.position(tvals[i]);
        path.T[i] = v.normalized();
        if (raw.acceleration) {
            const Vec4 a = raw.acceleration(tvals[i]);
            Vec4 jv;
            if (raw.jerk) jv = raw.jerk(tvals[i]);
            detail::tangent_derivatives(v, a, raw.jerk ? &jv : nullptr, path.Tp[i], raw.jerk ? &path.Tpp[i] : nullptr);
        }
    }
    if (!raw.acceleration || !raw.jerk) {
        const CurvePath fd = derivatives(path);
        if (!raw.acceleration) path.Tp = fd.Tp;
        path.Tpp = fd.Tpp;
    }
    return path;
}

/// Reconstructs gamma(s) = origin + integral of T from `anchor` (default:
/// domain.lo) on an equispaced grid of n samples containing the anchor.
inline CurvePath curve_from_tangent(const TangentField& field, const Interval& domain, int n, const Vec4& origin,
                                    std::optional<double> anchor = std::nullopt) {
    if (!(domain.lo < domain.hi)) throw Error(ErrorKind::InvalidArgument, "empty domain");
    if (n < 16) throw Error(ErrorKind::InvalidArgument, "sample count below 16");
    const double h = domain.length() / (n - 1);
    const double a = anchor.value_or(field.junction.value_or(domain.lo));
    CurvePath path;
    path.s = detail::anchored_grid(domain.lo, domain.hi, h, a);
    const std::size_t count = path.s.size();
    path.T.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        path.T[i] = field.tangent(path.s[i]);
        const double defect = std::abs(path.T[i].norm() - 1.0);
        if (!(defect <= tol::unit_tangent))
            throw Error(ErrorKind::NotUnit, "|T| - 1 = " + std::to_string(defect) + " at s = " + std::to_string(path.s[i]));
    }
    if (field.junction) path.breaks = detail::junction_breaks(path.s, *field.junction);
    const std::size_t anchor_index = path.index_of(a);
    path.gamma = detail::cumulative_integral<Vec4>(path.T, h, anchor_index, path.breaks, Vec4::Zero());
    for (auto& g : path.gamma) g += origin;

    const CurvePath fd = derivatives(path);
    path.Tp = fd.Tp;
    path.Tpp = fd.Tpp;
    if (field.derivative)
        for (std::size_t i = 0; i < count; ++i) path.Tp[i] = field.derivative(path.s[i]);
    if (field.second_derivative)
        for (std::size_t i = 0; i < count; ++i) path.Tpp[i] = field.second_derivative(path.s[i]);
    return path;
}

/// Gram determinant of {T, Tp, Tpp}; equals that of {gamma', gamma'', gamma'''}
/// for an arc-length curve.
inline double frenet_gram(const Vec4& t, const Vec4& tp, const Vec4& tpp) {
    Eigen::Matrix<double, 3, 4> m;
    m.row(0) = t.transpose();
    m.row(1) = tp.transpose();
    m.row(2) = tpp.transpose();
    return (m * m.transpose()).determinant();
}

inline RegularityReport regularity_report(const CurvePath& path) {
    RegularityReport r;
    const auto velocity = detail::differentiate<Vec4>(path.gamma, path.h(), 1, path.breaks);
    r.min_speed = r.min_Tp_norm = r.min_frenet_gram = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.size(); ++i) {
        r.min_speed = std::min(r.min_speed, velocity[i].norm());
        r.min_Tp_norm = std::min(r.min_Tp_norm, path.Tp[i].norm());
        r.min_frenet_gram = std::min(r.min_frenet_gram, frenet_gram(path.T[i], path.Tp[i], path.Tpp[i]));
    }
    r.is_regular = r.min_speed > tol::regular_min;
    r.is_2_regular = r.is_regular && r.min_Tp_norm > tol::regular_min;
    r.frenet_rank_ok = r.min_frenet_gram > tol::frenet_gram;
    return r;
}

/// Piecewise sextic Lagrange interpolant through sampled positions. Used to
/// turn sampled CSV input into a RawCurve.
inline RawCurve raw_curve_from_samples(std::vector<double> t, std::vector<Vec4> positions) {
    if (t.size() != positions.size() || t.size() < 16)
        throw Error(ErrorKind::InvalidArgument, "need at least 16 samples with matching columns");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw Error(ErrorKind::InvalidArgument, "sample parameter must be strictly increasing");
    struct Data {
        std::vector<double> t;
        std::vector<Vec4> p;
    };
    auto data = std::make_shared<Data>(Data{std::move(t), std::move(positions)});
    auto eval = [data](double x, int order) {
        const auto& ts = data->t;
        const auto it = std::upper_bound(ts.begin(), ts.end(), x);
        std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
        k = std::min(k, ts.size() - 2);
        const std::size_t width = 6;
        std::size_t start = k >= 2 ? k - 2 : 0;
        if (start + width > ts.size()) start = ts.size() - width;
        const auto w = detail::fornberg_weights(std::span<const double>(ts.data() + start, width), x, order);
        Vec4 acc = Vec4::Zero();
        for (std::size_t j = 0; j < width; ++j) acc += w[j] * data->p[start + j];
        return acc;
    };
    RawCurve raw;
    raw.position = [eval](double x) { return eval(x, 0); };
    raw.velocity = [eval](double x) { return eval(x, 1); };
    return raw;
}

}  // namespace frame4
