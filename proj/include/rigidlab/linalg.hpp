#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace rigidlab {

/// Point or tangent vector on the circle (size 1) or the 2-torus (size 2).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;
using IntMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;
using IntVec = Eigen::Matrix<long long, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

/// Reduce to [0,1); values that round up to 1 are mapped to 0.
inline double wrap01(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

inline Vec wrap(const Vec& x) {
    Vec r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) r[i] = wrap01(x[i]);
    return r;
}

/// Signed representative of x mod 1 in [-1/2, 1/2).
inline double centered_mod1(double x) { return x - std::floor(x + 0.5); }

/// Sup-norm distance on the torus.
inline double torus_distance(const Vec& x, const Vec& y) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) m = std::max(m, std::abs(centered_mod1(x[i] - y[i])));
    return m;
}

inline Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

/// Smallest singular value of a 1x1 or 2x2 matrix.
inline double min_singular_value(const Mat& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().minCoeff();
}

inline double max_singular_value(const Mat& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().maxCoeff();
}

}  // namespace rigidlab
