#include "lfdd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/LU>

#include "lfdd/errors.hpp"
#include "lfdd/linalg.hpp"

namespace lfdd {

namespace {

constexpr double delta(int i, int j) { return i == j ? 1.0 : 0.0; }

void check_lame(double lambda, double mu) {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0) || !std::isfinite(lambda)) {
        throw InputError("inadmissible Lame parameters: need mu > 0 and 3*lambda + 2*mu > 0 (lambda=" +
                         std::to_string(lambda) + ", mu=" + std::to_string(mu) + ")");
    }
}

// X_{s,pm} = e_smn alpha_pn
std::array<double, 27> velocity_map(const Tensor2& alpha) {
    std::array<double, 27> x{};
    for (int s = 0; s < 3; ++s)
        for (int p = 0; p < 3; ++p)
            for (int m = 0; m < 3; ++m) {
                double acc = 0.0;
                for (int n = 0; n < 3; ++n) acc += permutation_sign(s, m, n) * alpha(p, n);
                x[(s * 3 + p) * 3 + m] = acc;
            }
    return x;
}

// Y_{s,kl} = X_{s,pm} C_pmkl, no symmetrization.
std::array<double, 27> velocity_operator(const Tensor2& alpha, const Tensor4& c) {
    const auto x = velocity_map(alpha);
    std::array<double, 27> y{};
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                double acc = 0.0;
                for (int p = 0; p < 3; ++p)
                    for (int m = 0; m < 3; ++m) acc += x[(s * 3 + p) * 3 + m] * c(p, m, k, l);
                y[(s * 3 + k) * 3 + l] = acc;
            }
    return y;
}

}  // namespace

int levi_civita(int i, int j, int k) {
    for (int idx : {i, j, k}) {
        if (idx < 1 || idx > 3) throw InputError("levi_civita index out of range {1,2,3}: " + std::to_string(idx));
    }
    return permutation_sign(i - 1, j - 1, k - 1);
}

// --- SymTensor2 ---

SymTensor2::SymTensor2(const Voigt6& packed) {
    for (int a = 0; a < 6; ++a) c_[a] = packed(a);
}

int SymTensor2::slot(int i, int j) {
    static constexpr int table[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
    return table[i][j];
}

SymTensor2 SymTensor2::basis(int a) {
    SymTensor2 e;
    e.c_[a] = 1.0;
    return e;
}

Tensor2 SymTensor2::to_matrix() const {
    Tensor2 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = c_[slot(i, j)];
    return m;
}

Voigt6 SymTensor2::packed() const {
    Voigt6 v;
    for (int a = 0; a < 6; ++a) v(a) = c_[a];
    return v;
}

double SymTensor2::dot(const SymTensor2& o) const {
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2] +
           2.0 * (c_[3] * o.c_[3] + c_[4] * o.c_[4] + c_[5] * o.c_[5]);
}

SymTensor2& SymTensor2::operator+=(const SymTensor2& o) {
    for (int a = 0; a < 6; ++a) c_[a] += o.c_[a];
    return *this;
}

SymTensor2& SymTensor2::operator-=(const SymTensor2& o) {
    for (int a = 0; a < 6; ++a) c_[a] -= o.c_[a];
    return *this;
}

SymTensor2& SymTensor2::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

SymTensor2 sym(const Tensor2& t) {
    SymTensor2 out;
    for (int a = 0; a < 6; ++a) {
        const auto [i, j] = SymTensor2::kPacking[a];
        out[a] = 0.5 * (t(i, j) + t(j, i));
    }
    return out;
}

Tensor2 skew(const Tensor2& t) { return 0.5 * (t - t.transpose()); }

// --- Tensor4 ---

double Tensor4::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

double Tensor4::symmetry_defect(const Symmetries& which) const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double x = (*this)(i, j, k, l);
                    if (which.minor_left) d = std::max(d, std::abs(x - (*this)(j, i, k, l)));
                    if (which.minor_right) d = std::max(d, std::abs(x - (*this)(i, j, l, k)));
                    if (which.major) d = std::max(d, std::abs(x - (*this)(k, l, i, j)));
                }
    return d;
}

double Tensor4::max_symmetry_defect() const { return symmetry_defect(sym_); }

Tensor2 Tensor4::contract(const Tensor2& t) const {
    Tensor2 out = Tensor2::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) acc += (*this)(i, j, k, l) * t(k, l);
            out(i, j) = acc;
        }
    return out;
}

Tensor4 isotropic_stiffness(double lambda, double mu) {
    check_lame(lambda, mu);
    Tensor4 c({true, true, true});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    c(i, j, k, l) = lambda * delta(i, j) * delta(k, l) +
                                    mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
    return c;
}

Tensor4 isotropic_compliance(double lambda, double mu) {
    check_lame(lambda, mu);
    const double shear = 1.0 / (4.0 * mu);
    const double vol = lambda / (2.0 * mu * (3.0 * lambda + 2.0 * mu));
    Tensor4 s({true, true, true});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    s(i, j, k, l) = shear * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k)) -
                                    vol * delta(i, j) * delta(k, l);
    return s;
}

SymTensor2 apply4(const Tensor4& c, const SymTensor2& e) { return sym(c.contract(e.to_matrix())); }

// --- Rank3Op, B, D ---

Vec3 Rank3Op::apply(const SymTensor2& e) const {
    Vec3 v = Vec3::Zero();
    for (int s = 0; s < 3; ++s) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) acc += (*this)(s, k, l) * e(k, l);
        v(s) = acc;
    }
    return v;
}

Tensor4 build_B(const Tensor2& alpha, const Tensor4& c) {
    const auto y = velocity_operator(alpha, c);
    // W_{ij,s} = e_sjr alpha_ir
    std::array<double, 27> w{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int s = 0; s < 3; ++s) {
                double acc = 0.0;
                for (int r = 0; r < 3; ++r) acc += permutation_sign(s, j, r) * alpha(i, r);
                w[(i * 3 + j) * 3 + s] = acc;
            }
    Tensor4 b({false, true, false});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double acc = 0.0;
                    for (int s = 0; s < 3; ++s) acc += w[(i * 3 + j) * 3 + s] * y[(s * 3 + k) * 3 + l];
                    b(i, j, k, l) = acc;
                }
    return b;
}

Rank3Op build_D(const Tensor2& alpha, const Tensor4& c) {
    const auto y = velocity_operator(alpha, c);
    Rank3Op d;
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                d(s, k, l) = 0.5 * (y[(s * 3 + k) * 3 + l] + y[(s * 3 + l) * 3 + k]);
    return d;
}

double dissipation_density(const Rank3Op& d, const SymTensor2& e) { return d.apply(e).squaredNorm(); }

Mat6 packed_operator(const Tensor4& c) {
    Mat6 m;
    for (int b = 0; b < 6; ++b) m.col(b) = sym(c.contract(SymTensor2::basis(b).to_matrix())).packed();
    return m;
}

const Mat6& packed_metric() {
    static const Mat6 g = [] {
        Voigt6 d;
        d << 1, 1, 1, 2, 2, 2;
        return Mat6(d.asDiagonal());
    }();
    return g;
}

// --- Material ---

double sample_positivity_bound(const Tensor4& c, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double lowest = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        SymTensor2 e;
        for (int a = 0; a < 6; ++a) e[a] = gauss(rng);
        const double q = apply4(c, e).dot(e) / e.dot(e);
        lowest = std::min(lowest, q);
    }
    return lowest;
}

Material::Material(double rho, const Tensor4& stiffness) : rho_(rho), c_(stiffness) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("mass density must be positive and finite");
    const double scale = c_.max_abs();
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("stiffness must be nonzero and finite");
    const double defect = c_.symmetry_defect({true, true, true});
    if (defect > 1e-12 * scale) {
        throw InputError("stiffness lacks minor/major symmetry (defect " + std::to_string(defect) + ")");
    }
    c_ = Tensor4(c_.data(), {true, true, true});

    a0_ = sample_positivity_bound(c_, 10000, 0x5eedULL);
    if (!(a0_ > 0.0)) throw InputError("stiffness is not positive definite on symmetric tensors");

    const Mat6 cm = packed_operator(c_);
    Eigen::FullPivLU<Mat6> lu(cm);
    if (!lu.isInvertible()) throw InputError("stiffness is singular on symmetric tensors");
    const Mat6 sm = lu.inverse();
    s_ = Tensor4({true, true, true});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double mult = (k == l) ? 1.0 : 2.0;
                    s_(i, j, k, l) = sm(SymTensor2::slot(i, j), SymTensor2::slot(k, l)) / mult;
                }
}

Material Material::isotropic(double rho, double lambda, double mu) {
    Material m(rho, isotropic_stiffness(lambda, mu));
    m.s_ = isotropic_compliance(lambda, mu);
    return m;
}

Tensor2 Material::acoustic_tensor() const {
    Tensor2 a;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) a(i, k) = c_(i, 0, k, 0);
    return a;
}

double Material::max_wave_speed() const {
    const auto eig = symmetric_eigen(Eigen::MatrixXd(acoustic_tensor()));
    return std::sqrt(eig.values.maxCoeff() / rho_);
}

}  // namespace lfdd
