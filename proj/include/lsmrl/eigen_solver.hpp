#pragma once

// Eigenvalues of a dense real non-symmetric matrix: balancing, reduction to
// upper Hessenberg form by stabilized elimination, then Francis double-shift
// QR iteration down to real Schur form.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmrl {

struct eigen_options {
    Eigen::Index max_size = 4000;
    int max_iterations_per_eigenvalue = 60;
};

struct eigen_convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using row_matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline void balance(row_matrix& a)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                a.row(i) *= g;
                a.col(i) *= f;
            }
        }
    }
}

inline void to_hessenberg(row_matrix& a)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index m = 1; m < n - 1; ++m) {
        double x = 0.0;
        Eigen::Index pivot = m;
        for (Eigen::Index j = m; j < n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                pivot = j;
            }
        if (pivot != m) {
            for (Eigen::Index j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
            for (Eigen::Index j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
        }
        if (x == 0.0) continue;
        for (Eigen::Index i = m + 1; i < n; ++i) {
            double y = a(i, m - 1);
            if (y == 0.0) continue;
            y /= x;
            a(i, m - 1) = 0.0;
            for (Eigen::Index j = m; j < n; ++j) a(i, j) -= y * a(m, j);
            for (Eigen::Index j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
    }
}

inline double sign_of(double magnitude, double s)
{
    return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Eigenvalues of an upper Hessenberg matrix; `a` is destroyed.
inline std::vector<std::complex<double>> hessenberg_qr(row_matrix& a, int max_its)
{
    const Eigen::Index n = a.rows();
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = std::max<Eigen::Index>(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    Eigen::Index nn = n - 1;
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0;
    while (nn >= 0) {
        int its = 0;
        Eigen::Index l;
        do {
            for (l = nn; l > 0; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                w[static_cast<std::size_t>(nn)] = x + t;
                --nn;
            } else {
                y = a(nn - 1, nn - 1);
                double wprod = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + wprod;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
                        if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - wprod / z;
                    } else {
                        w[static_cast<std::size_t>(nn)] = {x + p, -z};
                        w[static_cast<std::size_t>(nn - 1)] = {x + p, z};
                    }
                    nn -= 2;
                } else {
                    if (its >= max_its)
                        throw eigen_convergence_error("eigen_spectrum: QR iteration did not converge after " +
                                                      std::to_string(its) + " iterations at index " +
                                                      std::to_string(nn));
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (Eigen::Index i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        wprod = -0.4375 * s * s;
                    }
                    ++its;
                    Eigen::Index m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - wprod) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (Eigen::Index i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (Eigen::Index k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (Eigen::Index j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const Eigen::Index mmin = nn < k + 3 ? nn : k + 3;
                            for (Eigen::Index i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k + 1 != nn) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (nn >= 0 && l + 1 < nn);
    }
    return w;
}

}  // namespace detail

/// All eigenvalues of a square real matrix, in no particular order.
inline std::vector<std::complex<double>> eigen_spectrum(const Eigen::MatrixXd& m, const eigen_options& opt = {})
{
    if (m.rows() != m.cols()) throw std::invalid_argument("eigen_spectrum: matrix must be square");
    if (m.rows() > opt.max_size)
        throw std::invalid_argument("eigen_spectrum: matrix of size " + std::to_string(m.rows()) +
                                    " exceeds the configured limit " + std::to_string(opt.max_size));
    if (!m.allFinite()) throw std::invalid_argument("eigen_spectrum: matrix has non-finite entries");
    if (m.rows() == 0) return {};
    detail::row_matrix a = m;
    detail::balance(a);
    detail::to_hessenberg(a);
    return detail::hessenberg_qr(a, opt.max_iterations_per_eigenvalue);
}

}  // namespace lsmrl
