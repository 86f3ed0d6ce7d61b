#pragma once

#include "rigidlab/linalg.hpp"
#include "rigidlab/maps.hpp"

#include <complex>
#include <functional>
#include <unordered_map>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr long long kEnumerationCap = 1LL << 18;
inline constexpr double kDedupTol = 1e-9;

using ScalarField = std::function<double(const Vec&)>;

struct PeriodicOrbit {
    Vec base_point;
    int period = 0;                 ///< least period
    std::vector<Vec> points;        ///< points[k] = f^k(base_point)
    std::vector<int> code;          ///< branch indices of the itinerary
    Mat orbit_differential;         ///< D_{f^{n-1}x} f ... D_x f
    double log_jacobian = 0.0;      ///< sum of log|det Df| along the orbit

    std::string code_string() const;
};

/// Orbits whose least period divides n, one per orbit, in order of first branch word.
std::vector<PeriodicOrbit> fixed_points_of_iterate(const ExpandingMap& f, int n,
                                                   long long cap = kEnumerationCap);

/// All orbits of least period 1..n_max, grouped by period.
std::vector<PeriodicOrbit> orbits_up_to(const ExpandingMap& f, int n_max,
                                        long long cap = kEnumerationCap);

/// |det(L^n - I)|, the number of fixed points of f^n for any map with linear part L.
long long fixed_point_count_of_linear_part(const IntMat& L, int n);

/// Number of fixed points of f^n counted over the returned orbits (sum of periods).
long long fixed_point_count(const std::vector<PeriodicOrbit>& orbits);

double birkhoff_sum(const PeriodicOrbit& orbit, const ScalarField& phi);

/// log|eigenvalue| / period for the eigenvalues of the orbit differential, ascending.
std::vector<double> lyapunov_exponents(const PeriodicOrbit& orbit);

/// Eigenvalues of a 1x1 or 2x2 real matrix.
std::vector<std::complex<double>> eigenvalues(const Mat& m);

/// CSV with columns period, code, points, log_jacobian, exponents.
std::string orbits_to_csv(const std::vector<PeriodicOrbit>& orbits);

/// Spatial index on torus points with a fixed matching tolerance.
class PointIndex {
public:
    explicit PointIndex(double tol) : tol_(tol) {}
    void insert(const Vec& p, std::size_t id);
    /// Returns the id of a stored point within tol of p, or -1.
    long long find(const Vec& p) const;
    /// Like find, also returning the distance of the match.
    long long find_nearest(const Vec& p, double* dist) const;

private:
    long long cell(double x) const;
    double tol_;
    std::vector<std::pair<Vec, std::size_t>> points_;
    std::unordered_multimap<long long, std::size_t> cells_;
};

}  // namespace rigidlab
