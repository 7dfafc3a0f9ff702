#pragma once

// Dense symmetric eigensolver and banded SPD solver used by the implicit
// step and the modal analysis.

#include <vector>

#include <Eigen/Core>

namespace lfdd {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // column k pairs with values(k); orthonormal
};

// Householder tridiagonalization followed by implicit QL with Wilkinson-type
// shifts. Only the lower triangle of `a` is trusted; the input is
// symmetrized first. Throws NumericalError if QL fails to converge.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

// Square matrix with entries only for |i - j| <= half_bandwidth. Both
// triangles are stored so that assembly errors (asymmetry) can be detected
// before factorization.
class BandedMatrix {
public:
    BandedMatrix(int n, int half_bandwidth);

    int size() const { return n_; }
    int half_bandwidth() const { return bw_; }

    double operator()(int i, int j) const;
    // Accumulates into entry (i, j); throws InputError outside the band.
    void add(int i, int j, double value);

    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    double max_abs() const;
    double max_asymmetry() const;

    // Cholesky factorization of the lower triangle followed by two
    // triangular solves. Throws NumericalError naming the failing row when a
    // pivot is not positive.
    Eigen::VectorXd solve_spd(const Eigen::VectorXd& rhs) const;

private:
    double& ref(int i, int j) { return band_[static_cast<size_t>(i) * width_ + (j - i + bw_)]; }
    double get(int i, int j) const { return band_[static_cast<size_t>(i) * width_ + (j - i + bw_)]; }

    int n_;
    int bw_;
    int width_;
    std::vector<double> band_;
};

}  // namespace lfdd
