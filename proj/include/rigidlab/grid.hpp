#pragma once

#include "rigidlab/linalg.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace rigidlab {

/// Periodic function on [0,1)^dim sampled at the nodes i/N, interpolated by a
/// periodic cubic B-spline. Node (i, j) is stored at index i + N j.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int dim, int resolution, std::vector<double> values);

    static GridFunction constant(int dim, int resolution, double value);
    static GridFunction sample(int dim, int resolution, const std::function<double(const Vec&)>& fn);

    int dim() const { return dim_; }
    int resolution() const { return n_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t idx) const { return values_[idx]; }
    Vec node(std::size_t idx) const;

    /// Spline value; returns the stored sample exactly at nodes.
    double operator()(const Vec& x) const;
    /// Spline gradient.
    Vec gradient(const Vec& x) const;

    /// Four periodic indices and B-spline weights for one coordinate.
    struct Stencil {
        std::array<int, 4> idx;
        std::array<double, 4> w;
        int node = -1;  ///< node index when x is exactly a node, else -1
    };
    Stencil stencil(double x) const;
    /// Evaluate with precomputed stencils (one per coordinate).
    double evaluate(const Stencil* s) const;

    double sup_norm() const;
    double max_value() const;

    nlohmann::json to_json() const;
    std::string to_csv(const std::string& column = "value") const;

private:
    void fit();

    int dim_ = 1;
    int n_ = 0;
    std::vector<double> values_;
    std::vector<double> coeffs_;
};

/// Solve the cyclic system (c_{i-1} + 4 c_i + c_{i+1}) / 6 = v_i in place with stride.
void solve_periodic_spline(double* v, int n, std::ptrdiff_t stride);

bool is_power_of_two(long long n);

}  // namespace rigidlab
