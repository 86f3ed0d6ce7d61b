#include "rigidlab/regularity.hpp"

#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace rigidlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Samples of sum_i (a^deriv / d)^i alpha^{(deriv)}(a^i y) / d at y = j/N.
GridFunction lacunary_series(const TrigPoly& alpha, int deriv, long long d, long long a, double tail_tol,
                             int resolution) {
    if (d < 2 || a < 2) throw PreconditionViolation("dll series needs integers d, a >= 2");
    if (!is_power_of_two(resolution) || resolution < 16) throw ConfigError("resolution must be a power of two >= 16");
    const double rate = std::pow(static_cast<double>(a), deriv) / static_cast<double>(d);
    if (rate >= 1.0) throw PreconditionViolation("series diverges: a^k >= d");
    const double bound = alpha.sup_bound(deriv);
    // tail after the first `terms` terms is bound * rate^terms / (d (1 - rate))
    int terms = 0;
    if (bound > 0.0) {
        double tail = bound / (static_cast<double>(d) * (1.0 - rate));
        while (tail >= tail_tol) {
            tail *= rate;
            ++terms;
        }
    }
    const long long N = resolution;
    std::vector<double> values(resolution, 0.0);
    parallel_for(values.size(), [&](std::size_t j) {
        double sum = 0.0, weight = 1.0 / static_cast<double>(d);
        long long apow = 1;  // a^i mod N
        for (int i = 0; i < terms; ++i) {
            double term = deriv == 0 ? alpha.constant() : 0.0;
            for (int k = 1; k <= alpha.degree(); ++k) {
                const long long ph = static_cast<long long>((static_cast<__int128>(k) * apow % N) * static_cast<long long>(j) % N);
                const double t = kTwoPi * static_cast<double>(ph) / static_cast<double>(N);
                const double ck = k <= static_cast<int>(alpha.cos_coeffs().size()) ? alpha.cos_coeffs()[k - 1] : 0.0;
                const double sk = k <= static_cast<int>(alpha.sin_coeffs().size()) ? alpha.sin_coeffs()[k - 1] : 0.0;
                const double w = std::pow(kTwoPi * k, deriv);
                switch (deriv % 4) {
                    case 0: term += w * (ck * std::cos(t) + sk * std::sin(t)); break;
                    case 1: term += w * (-ck * std::sin(t) + sk * std::cos(t)); break;
                    case 2: term += w * (-ck * std::cos(t) - sk * std::sin(t)); break;
                    default: term += w * (ck * std::sin(t) - sk * std::cos(t)); break;
                }
            }
            sum += weight * term;
            weight *= rate;
            apow = static_cast<long long>(static_cast<__int128>(apow) * a % N);
        }
        values[j] = sum;
    });
    return GridFunction(1, resolution, std::move(values));
}

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

GridFunction dll_beta(const TrigPoly& alpha, long long d, long long a, double tail_tol, int resolution) {
    return lacunary_series(alpha, 0, d, a, tail_tol, resolution);
}

GridFunction dll_beta_derivative(const TrigPoly& alpha, long long d, long long a, double tail_tol, int resolution) {
    return lacunary_series(alpha, 1, d, a, tail_tol, resolution);
}

double dll_functional_residual(const GridFunction& beta, const TrigPoly& alpha, long long d, long long a) {
    const long long N = beta.resolution();
    double worst = 0.0;
    for (long long j = 0; j < N; ++j) {
        const long long aj = static_cast<long long>(static_cast<__int128>(a) * j % N);
        const double r = beta.value(j) - beta.value(aj) / d - alpha(static_cast<double>(j) / N) / d;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

PowerFit fit_power(const std::vector<ScaleRow>& rows, bool log_corrected) {
    PowerFit fit;
    const std::size_t n = rows.size();
    if (n < 2) return fit;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(rows[i].h);
        ys[i] = std::log(rows[i].sup_difference);
        if (log_corrected) ys[i] -= std::log(std::abs(xs[i]));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        fit.rss += r * r;
    }
    if (n > 2) fit.slope_stderr = std::sqrt(fit.rss / static_cast<double>(n - 2) / sxx);
    return fit;
}

HolderEstimate holder_exponent(const GridFunction& samples, const HolderOptions& opt) {
    if (samples.dim() != 1) throw PreconditionViolation("Holder estimation works on 1-D samples");
    const int N = samples.resolution();
    if (N < (1 << opt.max_log2_h))
        throw InsufficientResolution("resolution " + std::to_string(N) + " below 2^" + std::to_string(opt.max_log2_h));
    if (opt.max_log2_h - opt.min_log2_h + 1 < 6) throw ConfigError("at least six dyadic scales are required");
    HolderEstimate est;
    est.h_max = std::ldexp(1.0, -opt.min_log2_h);
    est.h_min = std::ldexp(1.0, -opt.max_log2_h);
    const auto& v = samples.values();
    const double floor = 1e-12 * std::max(1.0, samples.sup_norm());
    const int n_scales = opt.max_log2_h - opt.min_log2_h + 1;

    for (int k = 1; k <= opt.max_order; ++k) {
        std::vector<double> binom(k + 1, 1.0);
        for (int j = 1; j <= k; ++j) binom[j] = binom[j - 1] * (k - j + 1) / j;
        std::vector<ScaleRow> rows(n_scales);
        parallel_for(rows.size(), [&](std::size_t s) {
            const int step = N >> (opt.min_log2_h + static_cast<int>(s));
            double sup = 0.0;
            for (int x = 0; x < N; ++x) {
                double acc = 0.0;
                for (int j = 0; j <= k; ++j)
                    acc += (((k - j) % 2) ? -binom[j] : binom[j]) * v[(x + static_cast<long long>(j) * step) % N];
                sup = std::max(sup, std::abs(acc));
            }
            rows[s] = {static_cast<double>(step) / N, sup};
        });
        std::vector<ScaleRow> usable;
        for (const auto& r : rows)
            if (r.sup_difference > floor) usable.push_back(r);
        est.tables.push_back(rows);
        est.order_used = k;
        if (usable.size() < 6) {
            // differences vanish below rounding: the data is smoother than this order resolves
            est.integer_part = k;
            est.exponent = 1.0;
            est.saturated = true;
            return est;
        }
        const auto pure = fit_power(usable, false);
        if (pure.slope >= k - 0.1) continue;
        const auto logged = fit_power(usable, true);
        est.integer_part = k - 1;
        est.exponent = std::clamp(pure.slope - (k - 1), 1e-6, 1.0);
        est.confidence = 2.0 * pure.slope_stderr;
        est.log_correction_fit = pure.rss - logged.rss;
        est.log_model_preferred = logged.rss < pure.rss;
        return est;
    }
    est.integer_part = opt.max_order;
    est.exponent = 1.0;
    est.saturated = true;
    return est;
}

nlohmann::json HolderEstimate::to_json() const {
    return {{"integer_part", integer_part},
            {"exponent", exponent},
            {"confidence_halfwidth", confidence},
            {"log_correction_fit", log_correction_fit},
            {"log_model_preferred", log_model_preferred},
            {"scale_range", {h_min, h_max}},
            {"order_used", order_used},
            {"saturated", saturated}};
}

std::string HolderEstimate::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "order,scale,sup_difference\n";
    for (std::size_t k = 0; k < tables.size(); ++k)
        for (const auto& r : tables[k]) os << k + 1 << ',' << r.h << ',' << r.sup_difference << '\n';
    return os.str();
}

std::string to_string(DllCase c) {
    switch (c) {
        case DllCase::I: return "I";
        case DllCase::II: return "II";
        case DllCase::III: return "III";
        default: return "IV";
    }
}

DllClassification classify_dll_case(double r, long long d, long long a) {
    if (d < 2 || a < 2) throw PreconditionViolation("classification needs integers d, a >= 2");
    DllClassification c;
    c.r0 = std::log(static_cast<double>(d)) / std::log(static_cast<double>(a));
    long long p = 1;
    int e = 0;
    while (p < d) {
        p *= a;
        ++e;
    }
    c.r0_integer = (p == d);
    if (c.r0_integer) {
        c.n = e - 1;
        c.theta = 1.0;
    } else {
        c.n = static_cast<int>(std::floor(c.r0));
        c.theta = c.r0 - c.n;
    }
    const bool equal = std::isfinite(r) && std::abs(r - c.r0) < 1e-9;
    const std::string n_str = std::to_string(c.n);
    if (equal) {
        c.dll_case = DllCase::IV;
        const std::string x = c.theta == 1.0 ? "x" : "x^{" + trim_number(c.theta) + "}";
        c.prediction = "C^{" + n_str + "+" + x + "|log x|}";
    } else if (r < c.r0) {
        c.dll_case = DllCase::I;
        c.prediction = "C^{" + trim_number(r) + "}";
    } else if (!c.r0_integer) {
        c.dll_case = DllCase::II;
        c.prediction = "C^{" + trim_number(c.r0) + "}";
    } else {
        c.dll_case = DllCase::III;
        c.prediction = "C^{" + n_str + "+x|log x|}";
    }
    return c;
}

nlohmann::json DllClassification::to_json() const {
    return {{"case", to_string(dll_case)}, {"r0", r0},         {"n", n},
            {"theta", theta},              {"r0_integer", r0_integer}, {"prediction", prediction}};
}

}  // namespace rigidlab
