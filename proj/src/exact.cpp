#include "rigidlab/exact.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

namespace rigidlab {

std::vector<std::vector<long long>> rational_kernel(const QMatrix& M) {
    const int rows = static_cast<int>(M.size()), cols = static_cast<int>(M[0].size());
    auto A = M;
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (A[i][c] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(A[r], A[p]);
        for (int j = c + 1; j < cols; ++j) A[r][j] /= A[r][c];
        A[r][c] = 1;
        for (int i = 0; i < rows; ++i)
            if (i != r && A[i][c] != 0) {
                mpq_class f = A[i][c];
                for (int j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
            }
        pivots.push_back(c);
        ++r;
    }
    std::vector<std::vector<long long>> basis;
    for (int free = 0; free < cols; ++free) {
        if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
        std::vector<mpq_class> v(cols, 0);
        v[free] = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -A[k][free];
        mpz_class den = 1, g = 0;
        for (const auto& q : v) den = lcm(den, mpz_class(q.get_den()));
        std::vector<mpz_class> iv;
        for (const auto& q : v) {
            iv.push_back(mpz_class(q * den));
            g = gcd(g, iv.back());
        }
        std::vector<long long> out;
        for (auto& z : iv) out.push_back(mpz_class(z / g).get_si());
        basis.push_back(out);
    }
    return basis;
}

bool integer_solvable(const std::vector<std::vector<long long>>& P, const QVector& t) {
    for (const auto& q : t)
        if (q.get_den() != 1) return false;
    const int rows = static_cast<int>(P.size());
    if (rows == 0) return true;
    const int cols = static_cast<int>(P[0].size());
    std::vector<std::vector<mpz_class>> A(rows, std::vector<mpz_class>(cols));
    std::vector<mpz_class> rhs(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) A[i][j] = static_cast<long>(P[i][j]);
        rhs[i] = t[i].get_num();
    }
    // Diagonalize by unimodular row and column operations; row operations act on rhs too.
    int r = 0;
    for (; r < std::min(rows, cols); ++r) {
        while (true) {
            int pi = -1, pj = -1;
            for (int i = r; i < rows; ++i)
                for (int j = r; j < cols; ++j)
                    if (A[i][j] != 0 && (pi < 0 || abs(A[i][j]) < abs(A[pi][pj]))) pi = i, pj = j;
            if (pi < 0) goto done;
            std::swap(A[r], A[pi]);
            std::swap(rhs[r], rhs[pi]);
            for (int i = 0; i < rows; ++i) std::swap(A[i][r], A[i][pj]);
            bool clean = true;
            for (int i = r + 1; i < rows; ++i) {
                const mpz_class q = A[i][r] / A[r][r];
                for (int j = r; j < cols; ++j) A[i][j] -= q * A[r][j];
                rhs[i] -= q * rhs[r];
                if (A[i][r] != 0) clean = false;
            }
            for (int j = r + 1; j < cols; ++j) {
                const mpz_class q = A[r][j] / A[r][r];
                for (int i = r; i < rows; ++i) A[i][j] -= q * A[i][r];
                if (A[r][j] != 0) clean = false;
            }
            if (clean) break;
        }
    }
done:
    for (int i = 0; i < rows; ++i) {
        if (i < r) {
            if (rhs[i] % A[i][i] != 0) return false;
        } else if (rhs[i] != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace rigidlab
