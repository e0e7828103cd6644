#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

#include "biharm/errors.hpp"

namespace biharm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Spectral norm. Uses the symmetric eigensolver when the matrix is symmetric.
double norm2(const Matrix& a);

/// max_i |v_i|, zero for an empty vector.
inline double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// ||a b - b a||_2 / max(||a||_2 ||b||_2, tiny).
double relative_commutator(const Matrix& a, const Matrix& b);

inline void require_same_size(const Vector& v, std::ptrdiff_t m, const char* what) {
    if (v.size() != m) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(m) + ", got " +
                                std::to_string(v.size()));
    }
}

inline void require_same_size(const Matrix& a, std::ptrdiff_t m, const char* what) {
    if (a.rows() != m || a.cols() != m) {
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(m) + "x" + std::to_string(m) +
                                " matrix, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

}  // namespace biharm
