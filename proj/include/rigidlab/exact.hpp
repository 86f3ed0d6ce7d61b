#pragma once

#include <gmpxx.h>

#include <vector>

namespace rigidlab {

using QMatrix = std::vector<std::vector<mpq_class>>;
using QVector = std::vector<mpq_class>;

/// Primitive integer basis of the rational kernel of M.
std::vector<std::vector<long long>> rational_kernel(const QMatrix& M);

/// Whether P m = t has an integer solution m, for an integer matrix P.
bool integer_solvable(const std::vector<std::vector<long long>>& P, const QVector& t);

}  // namespace rigidlab
