#include "lfdd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lfdd/errors.hpp"

namespace lfdd {

namespace {

// Reduces symmetric `a` to tridiagonal form (diagonal d, subdiagonal e with
// e(0) unused) and overwrites `a` with the accumulated orthogonal transform.
void householder_tridiagonalize(Eigen::MatrixXd& a, Eigen::VectorXd& d, Eigen::VectorXd& e) {
    const int n = static_cast<int>(a.rows());
    d.resize(n);
    e.resize(n);
    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e(i) = a(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e(i) = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e(j) = g / h;
                    f += e(j) * a(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a(i, j);
                    g = e(j) - hh * f;
                    e(j) = g;
                    for (int k = 0; k <= j; ++k) a(j, k) -= f * e(k) + g * a(i, k);
                }
            }
        } else {
            e(i) = a(i, l);
        }
        d(i) = h;
    }
    d(0) = 0.0;
    e(0) = 0.0;
    for (int i = 0; i < n; ++i) {
        if (d(i) != 0.0) {
            for (int j = 0; j < i; ++j) {
                double g = 0.0;
                for (int k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (int k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d(i) = a(i, i);
        a(i, i) = 1.0;
        for (int j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

void implicit_ql(Eigen::VectorXd& d, Eigen::VectorXd& e, Eigen::MatrixXd& z) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e(i - 1) = e(i);
    if (n > 0) e(n - 1) = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d(m)) + std::abs(d(m + 1));
                if (std::abs(e(m)) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw NumericalError("implicit QL did not converge for eigenvalue " + std::to_string(l));
                double g = (d(l + 1) - d(l)) / (2.0 * e(l));
                double r = std::hypot(g, 1.0);
                g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    const double f = s * e(i);
                    const double b = c * e(i);
                    r = std::hypot(f, g);
                    e(i + 1) = r;
                    if (r == 0.0) {
                        d(i + 1) -= p;
                        e(m) = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d(i + 1) - p;
                    r = (d(i) - g) * s + 2.0 * c * b;
                    p = s * r;
                    d(i + 1) = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        const double t = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * t;
                        z(k, i) = c * z(k, i) - s * t;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d(l) -= p;
                e(l) = g;
                e(m) = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw InputError("symmetric_eigen: matrix must be square");
    const int n = static_cast<int>(a.rows());
    if (!a.allFinite()) throw NumericalError("symmetric_eigen: non-finite input");

    Eigen::MatrixXd z = a.triangularView<Eigen::Lower>();
    z.triangularView<Eigen::StrictlyUpper>() = z.transpose();
    Eigen::VectorXd d, e;
    householder_tridiagonalize(z, d, e);
    implicit_ql(d, e, z);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d(x) < d(y); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        out.values(k) = d(order[k]);
        out.vectors.col(k) = z.col(order[k]);
    }
    return out;
}

BandedMatrix::BandedMatrix(int n, int half_bandwidth)
    : n_(n), bw_(half_bandwidth), width_(2 * half_bandwidth + 1), band_(static_cast<size_t>(n) * width_, 0.0) {
    if (n < 1 || half_bandwidth < 0) throw InputError("BandedMatrix: invalid dimensions");
}

double BandedMatrix::operator()(int i, int j) const {
    if (std::abs(i - j) > bw_) return 0.0;
    return get(i, j);
}

void BandedMatrix::add(int i, int j, double value) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || std::abs(i - j) > bw_) {
        throw InputError("BandedMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside band");
    }
    ref(i, j) += value;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        const int lo = std::max(0, i - bw_), hi = std::min(n_ - 1, i + bw_);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += get(i, j) * x(j);
        y(i) = acc;
    }
    return y;
}

double BandedMatrix::max_abs() const {
    double m = 0.0;
    for (double v : band_) m = std::max(m, std::abs(v));
    return m;
}

double BandedMatrix::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - bw_); j < i; ++j) m = std::max(m, std::abs(get(i, j) - get(j, i)));
    return m;
}

Eigen::VectorXd BandedMatrix::solve_spd(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != n_) throw InputError("BandedMatrix::solve_spd: size mismatch");
    // L stored row-wise: lower[i * (bw+1) + (j - i + bw)] for i - bw <= j <= i.
    const int w = bw_ + 1;
    std::vector<double> lower(static_cast<size_t>(n_) * w, 0.0);
    auto L = [&](int i, int j) -> double& { return lower[static_cast<size_t>(i) * w + (j - i + bw_)]; };

    for (int i = 0; i < n_; ++i) {
        const int lo = std::max(0, i - bw_);
        for (int j = lo; j <= i; ++j) {
            double sum = get(i, j);
            for (int k = std::max(lo, j - bw_); k < j; ++k) sum -= L(i, k) * L(j, k);
            if (i == j) {
                if (!(sum > 0.0)) {
                    throw NumericalError("banded Cholesky: non-positive pivot " + std::to_string(sum) + " at row " +
                                         std::to_string(i) + " of " + std::to_string(n_));
                }
                L(i, i) = std::sqrt(sum);
            } else {
                L(i, j) = sum / L(j, j);
            }
        }
    }

    Eigen::VectorXd y(n_);
    for (int i = 0; i < n_; ++i) {
        double sum = rhs(i);
        for (int k = std::max(0, i - bw_); k < i; ++k) sum -= L(i, k) * y(k);
        y(i) = sum / L(i, i);
    }
    Eigen::VectorXd x(n_);
    for (int i = n_ - 1; i >= 0; --i) {
        double sum = y(i);
        for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) sum -= L(k, i) * x(k);
        x(i) = sum / L(i, i);
    }
    return x;
}

}  // namespace lfdd
