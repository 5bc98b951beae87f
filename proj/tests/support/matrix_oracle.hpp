#pragma once

// Independent reference implementation of TRS transforms as 4x4 homogeneous
// matrices, used to cross-check the library's pose algebra. Deliberately
// shares no code with scene::compose / scene::rotate beyond the plain data
// types; everything here is the textbook matrix formulation.

#include <array>
#include <cmath>

#include "m2ar/pose.hpp"

namespace m2ar::testsupport {

using Mat4 = std::array<double, 16>;  // row-major

inline Mat4 mat_identity() {
    return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
}

inline Mat4 mat_multiply(const Mat4& a, const Mat4& b) {
    Mat4 result{};
    for (int row = 0; row < 4; ++row) {
        for (int col = 0; col < 4; ++col) {
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) sum += a[row * 4 + k] * b[k * 4 + col];
            result[row * 4 + col] = sum;
        }
    }
    return result;
}

inline Mat4 translation_matrix(const scene::Vec3& p) {
    Mat4 m = mat_identity();
    m[3] = p.x;
    m[7] = p.y;
    m[11] = p.z;
    return m;
}

// Column-vector convention, Hamilton product: the matrix of v -> q v q*.
inline Mat4 rotation_matrix(const scene::Quat& q) {
    const double n = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w);
    const double x = q.x / n, y = q.y / n, z = q.z / n, w = q.w / n;
    Mat4 m = mat_identity();
    m[0] = 1 - 2 * (y * y + z * z);
    m[1] = 2 * (x * y - z * w);
    m[2] = 2 * (x * z + y * w);
    m[4] = 2 * (x * y + z * w);
    m[5] = 1 - 2 * (x * x + z * z);
    m[6] = 2 * (y * z - x * w);
    m[8] = 2 * (x * z - y * w);
    m[9] = 2 * (y * z + x * w);
    m[10] = 1 - 2 * (x * x + y * y);
    return m;
}

inline Mat4 scale_matrix(const scene::Vec3& s) {
    Mat4 m = mat_identity();
    m[0] = s.x;
    m[5] = s.y;
    m[10] = s.z;
    return m;
}

// A pose as a matrix: scale first, then rotate, then translate.
inline Mat4 trs_matrix(const scene::Pose& pose) {
    return mat_multiply(translation_matrix(pose.position),
                        mat_multiply(rotation_matrix(pose.rotation), scale_matrix(pose.scale)));
}

inline std::array<double, 3> transform_point(const Mat4& m, const std::array<double, 3>& p) {
    return {m[0] * p[0] + m[1] * p[1] + m[2] * p[2] + m[3],
            m[4] * p[0] + m[5] * p[1] + m[6] * p[2] + m[7],
            m[8] * p[0] + m[9] * p[1] + m[10] * p[2] + m[11]};
}

inline double max_abs_diff(const Mat4& a, const Mat4& b) {
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace m2ar::testsupport
