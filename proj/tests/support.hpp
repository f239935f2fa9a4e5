#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "frame4/frame4.hpp"

namespace frame4::testing {

inline Skew4 random_skew(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::array<double, 6> a{};
    for (auto& x : a) x = u(rng);
    return Skew4::from_upper(a);
}

inline Mat3 random_rotation3(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = n(rng);
    Eigen::HouseholderQR<Mat3> qr(m);
    Mat3 q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

/// Smooth so(4)-valued field: each entry a0 + a1 sin(w1 s + p1) + a2 cos(w2 s).
struct SmoothSkewField {
    std::array<std::array<double, 5>, 6> c{};

    explicit SmoothSkewField(std::mt19937_64& rng, double amplitude = 1.0) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> w(0.5, 3.0);
        for (auto& e : c) e = {amplitude * u(rng), amplitude * u(rng), w(rng), u(rng) * 3.0, amplitude * u(rng)};
    }

    Skew4 operator()(double s) const {
        std::array<double, 6> a{};
        for (std::size_t k = 0; k < 6; ++k)
            a[k] = c[k][0] + c[k][1] * std::sin(c[k][2] * s + c[k][3]) + c[k][4] * std::cos(0.7 * c[k][2] * s);
        return Skew4::from_upper(a);
    }
};

inline std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return s;
}

inline CoefficientPath sample_field(const std::function<Skew4(double)>& f, const std::vector<double>& s) {
    CoefficientPath c;
    c.s = s;
    for (double x : s) c.X.push_back(f(x));
    c.field = f;
    return c;
}

/// Random trigonometric curve t -> sum_k a_k cos(k t) + b_k sin(k t) + t u.
struct TrigCurve {
    std::array<Vec4, 3> a, b;
    Vec4 u;

    explicit TrigCurve(std::mt19937_64& rng) {
        std::normal_distribution<double> n;
        for (int k = 0; k < 3; ++k) {
            for (int j = 0; j < 4; ++j) {
                a[static_cast<std::size_t>(k)][j] = n(rng) / (k + 1);
                b[static_cast<std::size_t>(k)][j] = n(rng) / (k + 1);
            }
        }
        for (int j = 0; j < 4; ++j) u[j] = 0.5 * n(rng);
    }

    Vec4 derivative(double t, int order) const {
        Vec4 out = order == 1 ? u : (order == 0 ? Vec4(t * u) : Vec4::Zero().eval());
        for (int k = 1; k <= 3; ++k) {
            const double w = k;
            const double wp = std::pow(w, order);
            // d^m/dt^m cos(wt) = w^m cos(wt + m pi/2)
            const double phase = order * std::numbers::pi / 2;
            out += wp * (a[static_cast<std::size_t>(k - 1)] * std::cos(w * t + phase) +
                         b[static_cast<std::size_t>(k - 1)] * std::sin(w * t + phase));
        }
        return out;
    }

    RawCurve raw() const {
        RawCurve r;
        const TrigCurve self = *this;
        r.position = [self](double t) { return self.derivative(t, 0); };
        r.velocity = [self](double t) { return self.derivative(t, 1); };
        r.acceleration = [self](double t) { return self.derivative(t, 2); };
        r.jerk = [self](double t) { return self.derivative(t, 3); };
        return r;
    }
};

/// Adaptive Simpson quadrature, used as an independent length oracle.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double eps, int depth = 40) {
    auto simpson = [&](double x0, double x1, double f0, double fm, double f1) { return (x1 - x0) / 6.0 * (f0 + 4 * fm + f1); };
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double x0, double x1, double f0, double fm, double f1, double whole, double e, int d) {
            const double m = 0.5 * (x0 + x1);
            const double lm = 0.5 * (x0 + m), rm = 0.5 * (m + x1);
            const double flm = f(lm), frm = f(rm);
            const double left = simpson(x0, m, f0, flm, fm), right = simpson(m, x1, fm, frm, f1);
            if (d <= 0 || std::abs(left + right - whole) <= 15 * e) return left + right + (left + right - whole) / 15;
            return rec(x0, m, f0, flm, fm, left, e / 2, d - 1) + rec(m, x1, fm, frm, f1, right, e / 2, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), eps, depth);
}

inline double max_abs_diff(const std::vector<Mat4>& a, const std::vector<Mat4>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return d;
}

}  // namespace frame4::testing
