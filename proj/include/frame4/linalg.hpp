#pragma once

// Fixed-size linear algebra for R^4, O(4) and so(4).
//
// Storage is Eigen's fixed-size types, so nothing here allocates. Frames are
// stored with the frame vectors as ROWS; row 0 is always the curve tangent.

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include <Eigen/Dense>

#include "frame4/error.hpp"

namespace frame4 {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

namespace tol {
inline constexpr double exp_orthogonality = 1e-12;
inline constexpr double reortho_orthogonality = 1e-13;
inline constexpr double reortho_pivot = 1e-9;
inline constexpr double orthogonal_input = 1e-10;
}  // namespace tol

/// Index pairs (i, j), i < j, of the upper triangle in row-major order:
/// 01 02 03 12 13 23. Used for the dense six-number encoding of so(4) and for
/// the sparsity masks.
inline constexpr std::array<std::pair<int, int>, 6> kUpperPairs{{
    {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
}};

/// Antisymmetric 4x4 matrix. The diagonal is exactly zero and
/// m(i, j) == -m(j, i) bit for bit.
class Skew4 {
public:
    Skew4() : m_(Mat4::Zero()) {}

    static Skew4 from_upper(const std::array<double, 6>& upper) {
        Skew4 x;
        for (std::size_t k = 0; k < 6; ++k) x.set(kUpperPairs[k].first, kUpperPairs[k].second, upper[k]);
        return x;
    }

    /// Block form [[0, row], [-row^T, 0]] used by Bishop frames.
    static Skew4 from_first_row(const Vec3& row) {
        Skew4 x;
        for (int j = 0; j < 3; ++j) x.set(0, j + 1, row[j]);
        return x;
    }

    void set(int i, int j, double v) {
        if (i == j) return;
        m_(i, j) = v;
        m_(j, i) = -v;
    }

    double operator()(int i, int j) const { return m_(i, j); }
    const Mat4& matrix() const { return m_; }

    std::array<double, 6> upper() const {
        std::array<double, 6> u{};
        for (std::size_t k = 0; k < 6; ++k) u[k] = m_(kUpperPairs[k].first, kUpperPairs[k].second);
        return u;
    }

    Vec3 first_row() const { return Vec3(m_(0, 1), m_(0, 2), m_(0, 3)); }

    double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

    Skew4 operator+(const Skew4& o) const { return raw(m_ + o.m_); }
    Skew4 operator-(const Skew4& o) const { return raw(m_ - o.m_); }
    Skew4 operator*(double a) const { return raw(m_ * a); }
    friend Skew4 operator*(double a, const Skew4& x) { return x * a; }

private:
    // Linear combinations of antisymmetric matrices stay exactly antisymmetric
    // in IEEE arithmetic, since negation is exact.
    static Skew4 raw(const Mat4& m) {
        Skew4 x;
        x.m_ = m;
        return x;
    }

    Mat4 m_;
};

inline Skew4 antisymmetrize(const Mat4& m) {
    Skew4 x;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) x.set(i, j, 0.5 * (m(i, j) - m(j, i)));
    return x;
}

inline double orthogonality_defect(const Mat4& r) {
    return (r.transpose() * r - Mat4::Identity()).cwiseAbs().maxCoeff();
}

inline double orthogonality_defect(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline bool all_finite(const Mat4& m) { return m.allFinite(); }

/// exp(s X) by scaling and squaring around a diagonal Pade(6,6) core.
///
/// For antisymmetric arguments the diagonal Pade approximant is exactly
/// orthogonal in exact arithmetic, so the result leaves O(4) only by rounding.
inline Mat4 mat_exp(const Skew4& x, double s) {
    // c_k = c_{k-1} (p + 1 - k) / (k (2p + 1 - k)), p = 6
    static constexpr std::array<double, 7> c = [] {
        std::array<double, 7> out{};
        out[0] = 1.0;
        for (int k = 1; k <= 6; ++k) out[k] = out[k - 1] * (6.0 + 1 - k) / (k * (13.0 - k));
        return out;
    }();

    Mat4 a = x.matrix() * s;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));
        a /= std::ldexp(1.0, squarings);
    }

    const Mat4 id = Mat4::Identity();
    const Mat4 a2 = a * a;
    const Mat4 a4 = a2 * a2;
    const Mat4 a6 = a4 * a2;
    const Mat4 u = a * (c[1] * id + c[3] * a2 + c[5] * a4);
    const Mat4 v = c[0] * id + c[2] * a2 + c[4] * a4 + c[6] * a6;
    Mat4 r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

/// Row-wise modified Gram-Schmidt, anchored at row 0: the direction of row 0
/// is kept exactly and later rows are orthogonalised against earlier ones.
/// Two passes bring the orthogonality defect down to a few ulps.
inline Mat4 reorthonormalize(const Mat4& z, double pivot_tol = tol::reortho_pivot) {
    Mat4 q = z;
    for (int k = 0; k < 4; ++k) {
        Eigen::RowVector4d v = q.row(k);
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < k; ++j) v -= v.dot(q.row(j)) * q.row(j);
            const double n = v.norm();
            if (pass == 0 && !(n >= pivot_tol))
                throw Error(ErrorKind::DegenerateRows, "Gram-Schmidt pivot " + std::to_string(n) + " on row " + std::to_string(k));
            v /= n;
        }
        q.row(k) = v;
    }
    return q;
}

/// Generalised cross product: the unit vector orthogonal to three rows,
/// oriented so that det[a; b; c; result] > 0.
inline Vec4 complete_orthonormal(const Vec4& a, const Vec4& b, const Vec4& c) {
    Vec4 out;
    for (int j = 0; j < 4; ++j) {
        Mat3 minor;
        int col = 0;
        for (int k = 0; k < 4; ++k) {
            if (k == j) continue;
            minor(0, col) = a[k];
            minor(1, col) = b[k];
            minor(2, col) = c[k];
            ++col;
        }
        // cofactor of entry (3, j) in the 4x4 matrix [a; b; c; *]
        out[j] = ((3 + j) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
    }
    return out.normalized();
}

/// Completes an orthonormal set of `count` leading rows (count in 1..3) to a
/// rotation (det = +1) by Gram-Schmidt over the standard basis.
inline Mat4 complete_to_rotation(const Mat4& partial, int count) {
    Mat4 z = Mat4::Zero();
    z.topRows(count) = partial.topRows(count);
    int filled = count;
    for (int e = 0; e < 4 && filled < 3; ++e) {
        Vec4 v = Vec4::Unit(e);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < filled; ++j) v -= v.dot(z.row(j).transpose()) * z.row(j).transpose();
        if (v.norm() > 0.5) z.row(filled++) = v.normalized().transpose();
    }
    z.row(3) = complete_orthonormal(z.row(0).transpose(), z.row(1).transpose(), z.row(2).transpose()).transpose();
    return z;
}

/// diag(1, q): acts on the three normal rows of a frame.
inline Mat4 embed_normal_block(const Mat3& q) {
    Mat4 m = Mat4::Identity();
    m.bottomRightCorner<3, 3>() = q;
    return m;
}

/// Orthogonal 3x3 map sending the unit direction xi to +e2 or -e2 (a
/// Householder reflection, or the identity when xi is already on the axis).
inline Mat3 map_direction_to_e2(const Vec3& xi) {
    const Vec3 u = xi.normalized();
    const Vec3 e2 = Vec3::UnitY();
    Vec3 v = u - e2;
    if (v.norm() < 1e-12) return Mat3::Identity();
    if ((u + e2).norm() < v.norm()) v = u + e2;
    return Mat3::Identity() - 2.0 * v * v.transpose() / v.squaredNorm();
}

}  // namespace frame4
