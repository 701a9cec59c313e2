#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They share no code with the library beyond the environment accessors.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace oracle {

// Solves M x = b by Gaussian elimination with partial pivoting, in long double.
inline std::vector<double> dense_solve(std::vector<std::vector<long double>> M, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(M[i][k]) > std::fabs(M[piv][k])) piv = i;
        if (M[piv][k] == 0.0L) throw std::runtime_error("singular dense system");
        std::swap(M[k], M[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            long double f = M[i][k] / M[k][k];
            if (f == 0.0L) continue;
            for (std::size_t j = k; j < n; ++j) M[i][j] -= f * M[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    std::vector<long double> xl(n);
    for (std::size_t k = n; k-- > 0;) {
        long double acc = b[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= M[k][j] * xl[j];
        xl[k] = acc / M[k][k];
        x[k] = double(xl[k]);
    }
    return x;
}

inline long double edge_weight(const rcm::StaticEnvironment& env, rcm::Site a, rcm::Site b) {
    rcm::Site d = b - a;
    int dir = d.x == 1 ? 0 : d.x == -1 ? 1 : d.y == 1 ? 2 : 3;
    return env.omega(a, dir);
}

// Killed Green function g_A(., y) from the dense system (D - W) g = e_y.
inline std::vector<double> dense_green(const rcm::StaticEnvironment& env, const std::vector<rcm::Site>& A,
                                       std::size_t y_index) {
    const std::size_t n = A.size();
    std::vector<std::vector<long double>> M(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (rcm::Site nb : rcm::neighbors(A[i])) {
            long double w = edge_weight(env, A[i], nb);
            M[i][i] += w;
            for (std::size_t j = 0; j < n; ++j)
                if (A[j] == nb) M[i][j] -= w;
        }
    }
    std::vector<long double> b(n, 0.0L);
    b[y_index] = 1.0L;
    return dense_solve(M, b);
}

// Dense generator of the killed walk on A (rows are starting sites).
inline std::vector<std::vector<double>> dense_generator(const rcm::StaticEnvironment& env, rcm::Speed sp,
                                                        const std::vector<rcm::Site>& A) {
    const std::size_t n = A.size();
    std::vector<std::vector<double>> Q(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double th = sp == rcm::Speed::vsrw ? 1.0 : env.mu(A[i]);
        for (rcm::Site nb : rcm::neighbors(A[i])) {
            double w = double(edge_weight(env, A[i], nb));
            Q[i][i] -= w / th;
            for (std::size_t j = 0; j < n; ++j)
                if (A[j] == nb) Q[i][j] += w / th;
        }
    }
    return Q;
}

// exp(tQ) by scaling and squaring with a Taylor core, adequate for small dense Q.
inline std::vector<std::vector<double>> dense_expm(const std::vector<std::vector<double>>& Q, double t) {
    const std::size_t n = Q.size();
    double norm = 0.0;
    for (auto& row : Q) {
        double s = 0.0;
        for (double v : row) s += std::fabs(v);
        norm = std::max(norm, s);
    }
    int squarings = 0;
    double scale = t;
    while (norm * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    using Mat = std::vector<std::vector<long double>>;
    auto mul = [n](const Mat& X, const Mat& Y) {
        Mat Z(n, std::vector<long double>(n, 0.0L));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (X[i][k] != 0.0L)
                    for (std::size_t j = 0; j < n; ++j) Z[i][j] += X[i][k] * Y[k][j];
        return Z;
    };
    Mat A(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = (long double)Q[i][j] * scale;
    Mat E(n, std::vector<long double>(n, 0.0L)), term(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) E[i][i] = term[i][i] = 1.0L;
    for (int k = 1; k <= 30; ++k) {
        term = mul(term, A);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) term[i][j] /= k;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) E[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) E = mul(E, E);
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = double(E[i][j]);
    return out;
}

// Potential kernel of the discrete-time simple random walk, a_dt(x) = sum_k [P(S_k=0) - P(S_k=x)].
// In the rotated coordinates (u,v) = (x+y, x-y) the walk has independent +-1 coordinates, so
// P(S_k = x) is a product of two binomial point masses, obtained here from the central
// binomial coefficient by short ratio products. Partial sums are taken over complete
// (even, odd) pairs; their tail is c/K + O(K^-2), removed by Richardson extrapolation.
inline double srw_potential_kernel(int x, int y, long k_max = 2000001) {
    if (x == 0 && y == 0) return 0.0;
    const int u = std::abs(x + y), v = std::abs(x - y);
    if (k_max % 2 == 0) ++k_max;
    long k_half = k_max / 2;
    if (k_half % 2 == 0) ++k_half;
    // P(Bin(k,1/2) = (k+w)/2) for w >= 0 of the parity of k, given the central mass
    auto shifted = [](long k, int w, double central) {
        if (k % 2 == 0) {
            long m = k / 2;
            double p = central;
            for (int i = 1; i <= w / 2; ++i) p *= double(m - i + 1) / double(m + i);
            return w > k ? 0.0 : p;
        }
        long j0 = (k + 1) / 2;
        double p = central;
        for (int i = 0; i < (w - 1) / 2; ++i) p *= double(k - (j0 + i)) / double(j0 + i + 1);
        return w > k ? 0.0 : p;
    };
    long double acc = 0.0L, acc_half = 0.0L;
    double c_even = 1.0;  // C(2m,m)/4^m
    for (long k = 0; k <= k_max; ++k) {
        double term = 0.0;
        if (k % 2 == 0) {
            long m = k / 2;
            if (m > 0) c_even *= double(2 * m - 1) / double(2 * m);
            term = c_even * c_even;
            if (u % 2 == 0) term -= shifted(k, u, c_even) * shifted(k, v, c_even);
        } else if (u % 2 == 1) {
            long m = (k - 1) / 2;
            double c_odd = c_even * double(2 * m + 1) / double(2 * (m + 1));
            term = -shifted(k, u, c_odd) * shifted(k, v, c_odd);
        }
        acc += term;
        if (k == k_half) acc_half = acc;
    }
    double K1 = double(k_half), K2 = double(k_max);
    return double((K2 * acc - K1 * acc_half) / (K2 - K1));
}

// Stationary variance of phi(x) - phi(0) for the Euler-Maruyama chain
// phi <- phi - h A phi + sqrt(2h) xi on the L x L torus, A the graph Laplacian.
// Mode by mode the stationary variance is 1 / (lambda (1 - h lambda / 2)); h = 0 gives
// the Gaussian free field with covariance A^+.
inline double torus_gradient_variance(int L, int dx, int dy, double h) {
    long double acc = 0.0L;
    const long double tp = 2.0L * std::numbers::pi_v<long double>;
    for (int k1 = 0; k1 < L; ++k1) {
        for (int k2 = 0; k2 < L; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            long double a1 = tp * k1 / L, a2 = tp * k2 / L;
            long double lam = 4.0L - 2.0L * std::cos(a1) - 2.0L * std::cos(a2);
            long double c = 1.0L / (lam * (1.0L - h * lam / 2.0L));
            acc += 2.0L * (1.0L - std::cos(a1 * dx + a2 * dy)) * c;
        }
    }
    return double(acc / ((long double)L * L));
}

}  // namespace oracle
