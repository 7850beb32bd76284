#pragma once

// Independent oracles used by the test suites. Everything here is kept
// deliberately separate from the library's own computation paths: numeric
// quadrature of the Klein chart metric, dense row-reduction over F_p with
// row-weight pivoting, and brute-force enumerations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Quadrature

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Hyperbolic length of the affine Klein-chart segment from u to v, by
// quadrature of ds^2 = |dx|^2/(1-|x|^2) + (x.dx)^2/(1-|x|^2)^2.
inline double klein_segment_length(const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t n = u.size();
    auto speed = [&](double t) {
        double x2 = 0.0, xd = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = u[i] + t * (v[i] - u[i]);
            const double di = v[i] - u[i];
            x2 += xi * xi;
            xd += xi * di;
            d2 += di * di;
        }
        const double w = 1.0 - x2;
        return std::sqrt(d2 / w + xd * xd / (w * w));
    };
    return integrate(speed, 0.0, 1.0, 1e-13);
}

// ---------------------------------------------------------------------------
// Dense F_p linear algebra (row reduction with row-weight pivoting)

struct FpDense {
    int rows = 0, cols = 0;
    long long p = 2;
    std::vector<long long> a;  // row-major

    long long& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    long long at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

inline long long fp_inv(long long x, long long p) {
    // Fermat; p prime.
    long long r = 1, b = ((x % p) + p) % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// Row echelon with partial pivoting by row weight (fewest nonzeros first,
// ties by index). Returns rank; the matrix is left in echelon form.
inline int fp_row_reduce(FpDense& M) {
    const long long p = M.p;
    std::vector<int> weight(static_cast<std::size_t>(M.rows), 0);
    for (int r = 0; r < M.rows; ++r)
        for (int c = 0; c < M.cols; ++c)
            if (M.at(r, c) % p != 0) ++weight[static_cast<std::size_t>(r)];
    int rank = 0;
    for (int col = 0; col < M.cols && rank < M.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < M.rows; ++r) {
            if (M.at(r, col) % p == 0) continue;
            if (pivot < 0 || weight[static_cast<std::size_t>(r)] < weight[static_cast<std::size_t>(pivot)]) pivot = r;
        }
        if (pivot < 0) continue;
        for (int c = 0; c < M.cols; ++c) std::swap(M.at(rank, c), M.at(pivot, c));
        std::swap(weight[static_cast<std::size_t>(rank)], weight[static_cast<std::size_t>(pivot)]);
        const long long inv = fp_inv(M.at(rank, col), p);
        for (int c = col; c < M.cols; ++c) M.at(rank, c) = M.at(rank, c) * inv % p;
        for (int r = 0; r < M.rows; ++r) {
            if (r == rank) continue;
            const long long f = ((M.at(r, col) % p) + p) % p;
            if (f == 0) continue;
            for (int c = col; c < M.cols; ++c) {
                M.at(r, c) = ((M.at(r, c) - f * M.at(rank, c)) % p + p) % p;
            }
        }
        ++rank;
    }
    return rank;
}

inline int fp_rank(FpDense M) { return fp_row_reduce(M); }

// Kernel basis (columns of M as vectors over F_p).
inline std::vector<std::vector<long long>> fp_kernel(FpDense M) {
    const long long p = M.p;
    FpDense R = M;
    fp_row_reduce(R);
    // Identify pivot columns.
    std::vector<int> pivot_col;
    {
        int r = 0;
        for (int c = 0; c < R.cols && r < R.rows; ++c) {
            if (((R.at(r, c) % p) + p) % p != 0) {
                pivot_col.push_back(c);
                ++r;
            }
        }
    }
    std::vector<bool> is_pivot(static_cast<std::size_t>(R.cols), false);
    for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<std::vector<long long>> basis;
    for (int c = 0; c < R.cols; ++c) {
        if (is_pivot[static_cast<std::size_t>(c)]) continue;
        std::vector<long long> v(static_cast<std::size_t>(R.cols), 0);
        v[static_cast<std::size_t>(c)] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) {
            const long long coeff = ((R.at(static_cast<int>(r), c) % p) + p) % p;
            v[static_cast<std::size_t>(pivot_col[r])] = (p - coeff) % p;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

// Deterministic xorshift for reproducible sampling.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

}  // namespace oracle
