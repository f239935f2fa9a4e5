#pragma once

// Sparsity patterns of generalized Bishop coefficient matrices.
//
// A pattern is a set of at most three upper-triangle positions of a 4x4
// antisymmetric matrix with no empty row/column. There are 16 of them; the
// symmetric group S3 permuting frame vectors 1..3 splits them into four types.
//
// Pattern ids (stable, used in CSV output):
//   0      B  {01 02 03}
//   1..6   C  {01 02 13} {01 02 23} {01 03 23} {01 03 12} {02 03 12} {02 03 13}
//   7..9   D  {01 12 13} {02 12 23} {03 13 23}
//   10..15 F  {01 12 23} {03 12 13} {03 12 23} {01 13 23} {02 12 13} {02 13 23}

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "frame4/error.hpp"
#include "frame4/linalg.hpp"

namespace frame4 {

enum class FrameType { B = 0, C = 1, D = 2, F = 3 };

inline constexpr std::array<FrameType, 4> kAllFrameTypes{FrameType::B, FrameType::C, FrameType::D, FrameType::F};

inline char type_letter(FrameType t) { return "BCDF"[static_cast<int>(t)]; }

inline FrameType parse_frame_type(const std::string& s) {
    if (s == "B" || s == "b") return FrameType::B;
    if (s == "C" || s == "c") return FrameType::C;
    if (s == "D" || s == "d") return FrameType::D;
    if (s == "F" || s == "f") return FrameType::F;
    throw Error(ErrorKind::InvalidArgument, "unknown frame type '" + s + "'");
}

/// Upper-triangle flags in kUpperPairs order (01 02 03 12 13 23).
using Mask = std::array<bool, 6>;

/// Permutation of frame vectors fixing the tangent: row i of the permuted
/// frame is row map[i] of the original, map[0] == 0.
struct Permutation {
    std::array<int, 4> map{0, 1, 2, 3};

    bool operator==(const Permutation&) const = default;

    std::string str() const {
        return "(" + std::to_string(map[1]) + std::to_string(map[2]) + std::to_string(map[3]) + ")";
    }

    /// P with P(i, map[i]) = 1, so that P * Z permutes rows and the coefficient
    /// matrix transforms as P X P^T.
    Mat4 matrix() const {
        Mat4 p = Mat4::Zero();
        for (int i = 0; i < 4; ++i) p(i, map[i]) = 1.0;
        return p;
    }
};

inline const std::array<Permutation, 6>& s3_permutations() {
    static const std::array<Permutation, 6> perms{{
        {{0, 1, 2, 3}}, {{0, 1, 3, 2}}, {{0, 2, 1, 3}}, {{0, 2, 3, 1}}, {{0, 3, 1, 2}}, {{0, 3, 2, 1}},
    }};
    return perms;
}

/// Y(i, j) = X(map[i], map[j]).
inline Skew4 permute(const Skew4& x, const Permutation& p) {
    Skew4 y;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) y.set(i, j, x(p.map[i], p.map[j]));
    return y;
}

inline int upper_index(int i, int j) {
    if (i > j) std::swap(i, j);
    for (int k = 0; k < 6; ++k)
        if (kUpperPairs[k].first == i && kUpperPairs[k].second == j) return k;
    return -1;
}

class PatternCatalog {
public:
    static constexpr int kCount = 16;

    static const PatternCatalog& instance() {
        static const PatternCatalog catalog;
        return catalog;
    }

    const Mask& mask(int id) const { return masks_.at(static_cast<std::size_t>(id)); }
    FrameType type_of(int id) const { return types_.at(static_cast<std::size_t>(id)); }

    /// Canonical (lowest-id) representative of each type.
    static int canonical(FrameType t) {
        static constexpr std::array<int, 4> ids{0, 1, 7, 10};
        return ids[static_cast<std::size_t>(t)];
    }

    std::optional<int> find(const Mask& m) const {
        for (int id = 0; id < kCount; ++id)
            if (masks_[static_cast<std::size_t>(id)] == m) return id;
        return std::nullopt;
    }

    /// Mask of the pattern seen after permuting frame vectors by p: position
    /// (i, j) is on-pattern iff (map[i], map[j]) was on-pattern before.
    Mask permuted(const Mask& m, const Permutation& p) const {
        Mask out{};
        for (int k = 0; k < 6; ++k) {
            const auto [i, j] = kUpperPairs[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(upper_index(p.map[i], p.map[j]))];
        }
        return out;
    }

    std::set<int> orbit(int id) const {
        std::set<int> out;
        for (const auto& p : s3_permutations()) {
            const auto found = find(permuted(mask(id), p));
            if (!found) throw Error(ErrorKind::InvalidArgument, "catalog not closed under S3");
            out.insert(*found);
        }
        return out;
    }

    /// On-pattern positions (i, j), i < j, in upper-triangle order; their
    /// values are the channels x1, x2, x3.
    std::vector<std::pair<int, int>> channels(int id) const {
        std::vector<std::pair<int, int>> out;
        for (std::size_t k = 0; k < 6; ++k)
            if (mask(id)[k]) out.push_back(kUpperPairs[k]);
        return out;
    }

    /// Largest off-pattern entry of x.
    double residual(const Skew4& x, int id) const {
        double r = 0.0;
        for (std::size_t k = 0; k < 6; ++k)
            if (!mask(id)[k]) r = std::max(r, std::abs(x(kUpperPairs[k].first, kUpperPairs[k].second)));
        return r;
    }

private:
    PatternCatalog() {
        auto m = [](std::initializer_list<int> ks) {
            Mask out{};
            for (int k : ks) out[static_cast<std::size_t>(k)] = true;
            return out;
        };
        // upper indices: 01->0 02->1 03->2 12->3 13->4 23->5
        masks_ = {
            m({0, 1, 2}),                                                                          // B
            m({0, 1, 4}), m({0, 1, 5}), m({0, 2, 5}), m({0, 2, 3}), m({1, 2, 3}), m({1, 2, 4}),    // C
            m({0, 3, 4}), m({1, 3, 5}), m({2, 4, 5}),                                              // D
            m({0, 3, 5}), m({2, 3, 4}), m({2, 3, 5}), m({0, 4, 5}), m({1, 3, 4}), m({1, 4, 5}),    // F
        };
        for (int id = 0; id < kCount; ++id)
            types_[static_cast<std::size_t>(id)] = id == 0 ? FrameType::B : id <= 6 ? FrameType::C : id <= 9 ? FrameType::D : FrameType::F;
    }

    std::array<Mask, kCount> masks_{};
    std::array<FrameType, kCount> types_{};
};

}  // namespace frame4
