#pragma once

#include "rigidlab/grid.hpp"
#include "rigidlab/trig_poly.hpp"

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr double kTailTol = 1e-12;
inline constexpr int kDllResolution = 1 << 16;

/// beta(y) = sum_{i>=0} alpha(a^i y) / d^{i+1}, sampled on a dyadic grid with exact phases.
GridFunction dll_beta(const TrigPoly& alpha, long long d, long long a, double tail_tol = kTailTol,
                      int resolution = kDllResolution);

/// Term-wise derivative of dll_beta; needs d > a for convergence.
GridFunction dll_beta_derivative(const TrigPoly& alpha, long long d, long long a, double tail_tol = kTailTol,
                                 int resolution = kDllResolution);

/// Sup-norm of beta(y) - beta(a y)/d - alpha(y)/d over the grid nodes.
double dll_functional_residual(const GridFunction& beta, const TrigPoly& alpha, long long d, long long a);

struct ScaleRow {
    double h = 0.0;
    double sup_difference = 0.0;
};

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double rss = 0.0;
};

struct HolderEstimate {
    int integer_part = 0;
    double exponent = 1.0;
    double confidence = 0.0;  ///< half-width of the slope interval (two standard errors)
    /// rss(pure power) - rss(power times |log h|); positive when the log model fits better.
    double log_correction_fit = 0.0;
    bool log_model_preferred = false;
    double h_min = 0.0, h_max = 0.0;
    int order_used = 0;  ///< difference order whose scaling determined the estimate
    bool saturated = false;
    std::vector<std::vector<ScaleRow>> tables;  ///< one table per difference order tried

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

struct HolderOptions {
    int max_order = 3;
    int min_log2_h = 6;   ///< largest scale 2^-6
    int max_log2_h = 14;  ///< smallest scale 2^-14
};

/// Least-squares fit of log(sup_difference) against log h, optionally after
/// dividing the data by |log h|.
PowerFit fit_power(const std::vector<ScaleRow>& rows, bool log_corrected);

HolderEstimate holder_exponent(const GridFunction& samples, const HolderOptions& opt = {});

enum class DllCase { I, II, III, IV };
std::string to_string(DllCase c);

struct DllClassification {
    DllCase dll_case = DllCase::I;
    double r0 = 0.0;
    int n = 0;          ///< r0 = n + theta with theta in (0, 1]
    double theta = 0.0;
    bool r0_integer = false;
    std::string prediction;
    nlohmann::json to_json() const;
};

/// Regularity class of beta given alpha in C^r; pass infinity for smooth alpha.
DllClassification classify_dll_case(double r, long long d, long long a);

}  // namespace rigidlab
