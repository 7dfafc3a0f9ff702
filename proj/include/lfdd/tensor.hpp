#pragma once

// Small dense tensors in three dimensions and the dislocation-mechanics
// operators built from them.
//
// Index conventions: all storage and loops are 0-based. Only levi_civita()
// takes the 1-based indices used in index notation, and validates them.
//
// Symmetric tensors are packed in the order (11, 22, 33, 23, 13, 12). Shear
// slots hold the tensor component itself (eps_23, not 2*eps_23). Every
// contraction below unpacks to 3x3 and sums over full index ranges, so no
// Voigt factor bookkeeping is needed anywhere.

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace lfdd {

using Vec3 = Eigen::Vector3d;
using Tensor2 = Eigen::Matrix3d;
using Voigt6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Sign of the permutation (i, j, k) of (1, 2, 3); 0 on repeated indices.
// Throws InputError for indices outside {1, 2, 3}.
int levi_civita(int i, int j, int k);

// 0-based variant for internal loops; no range check.
constexpr int permutation_sign(int i, int j, int k) {
    return (i - j) * (j - k) * (k - i) / 2;
}

class SymTensor2 {
public:
    static constexpr std::array<std::array<int, 2>, 6> kPacking{
        {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

    SymTensor2() = default;
    explicit SymTensor2(const std::array<double, 6>& packed) : c_(packed) {}
    explicit SymTensor2(const Voigt6& packed);

    // Packed slot that holds component (i, j).
    static int slot(int i, int j);
    // Unit tensor for slot a: both (i, j) and (j, i) set to 1.
    static SymTensor2 basis(int a);

    double operator[](int a) const { return c_[a]; }
    double& operator[](int a) { return c_[a]; }
    double operator()(int i, int j) const { return c_[slot(i, j)]; }

    Tensor2 to_matrix() const;
    Voigt6 packed() const;
    const std::array<double, 6>& data() const { return c_; }

    // Full double contraction a_ij b_ij.
    double dot(const SymTensor2& o) const;

    SymTensor2& operator+=(const SymTensor2& o);
    SymTensor2& operator-=(const SymTensor2& o);
    SymTensor2& operator*=(double s);
    friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
    friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
    friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
    friend bool operator==(const SymTensor2&, const SymTensor2&) = default;

private:
    std::array<double, 6> c_{};
};

SymTensor2 sym(const Tensor2& t);
Tensor2 skew(const Tensor2& t);

struct Symmetries {
    bool minor_left = false;   // X_ijkl = X_jikl
    bool minor_right = false;  // X_ijkl = X_ijlk
    bool major = false;        // X_ijkl = X_klij
};

class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(Symmetries s) : sym_(s) {}
    // Row-major i, j, k, l.
    Tensor4(const std::array<double, 81>& entries, Symmetries s) : a_(entries), sym_(s) {}

    double operator()(int i, int j, int k, int l) const { return a_[index(i, j, k, l)]; }
    double& operator()(int i, int j, int k, int l) { return a_[index(i, j, k, l)]; }

    const Symmetries& symmetries() const { return sym_; }
    const std::array<double, 81>& data() const { return a_; }
    double max_abs() const;

    // Largest violation among the declared symmetries.
    double max_symmetry_defect() const;
    // Largest violation among the requested symmetries, declared or not.
    double symmetry_defect(const Symmetries& which) const;

    // General contraction X_ijkl t_kl; the result is not symmetric in general.
    Tensor2 contract(const Tensor2& t) const;

private:
    static constexpr int index(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }
    std::array<double, 81> a_{};
    Symmetries sym_{};
};

// C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk). Requires mu > 0 and
// 3 lambda + 2 mu > 0.
Tensor4 isotropic_stiffness(double lambda, double mu);
// Inverse of the above on symmetric tensors.
Tensor4 isotropic_compliance(double lambda, double mu);

// Full double contraction c_ijkl e_kl, symmetrized on output.
SymTensor2 apply4(const Tensor4& c, const SymTensor2& e);

// Third-order operator D_skl mapping symmetric strain to the dislocation
// velocity V_s = D_skl eps_kl. Symmetric in (k, l).
class Rank3Op {
public:
    double operator()(int s, int k, int l) const { return a_[(s * 3 + k) * 3 + l]; }
    double& operator()(int s, int k, int l) { return a_[(s * 3 + k) * 3 + l]; }
    Vec3 apply(const SymTensor2& e) const;
    const std::array<double, 27>& data() const { return a_; }

private:
    std::array<double, 27> a_{};
};

// B_ijkl = e_sjr alpha_ir e_smn alpha_pn C_pmkl, so that J = B : eps.
// Minor-right symmetric only.
Tensor4 build_B(const Tensor2& alpha, const Tensor4& c);

// D_skl = e_smn alpha_pn C_pmkl, symmetrized in (k, l).
Rank3Op build_D(const Tensor2& alpha, const Tensor4& c);

// |D : eps|^2, the pointwise dissipation T:J.
double dissipation_density(const Rank3Op& d, const SymTensor2& e);

// 6x6 matrix of a minor-symmetric fourth-order tensor acting on packed
// symmetric tensors: column b holds the packed image of SymTensor2::basis(b).
// Non-symmetric outputs are symmetrized.
Mat6 packed_operator(const Tensor4& c);

// Gram matrix of the double contraction in packed coordinates:
// a.dot(b) == a.packed()^T * packed_metric() * b.packed().
const Mat6& packed_metric();

class Material {
public:
    // Validates: rho > 0, all three symmetries of `stiffness` to 1e-12
    // relative, and a stochastic positivity bound (see positivity_bound()).
    Material(double rho, const Tensor4& stiffness);

    static Material isotropic(double rho, double lambda, double mu);

    double rho() const { return rho_; }
    const Tensor4& stiffness() const { return c_; }
    const Tensor4& compliance() const { return s_; }

    // Acoustic tensor for propagation along x1: A_ik = C_i1k1.
    Tensor2 acoustic_tensor() const;
    // sqrt(largest eigenvalue of the acoustic tensor / rho).
    double max_wave_speed() const;
    // Smallest Rayleigh quotient eps:C:eps / eps:eps over 10^4 random
    // symmetric eps (fixed seed). Positive for admissible materials.
    double positivity_bound() const { return a0_; }

private:
    double rho_;
    Tensor4 c_;
    Tensor4 s_;
    double a0_ = 0.0;
};

// Rayleigh-quotient sampler behind Material::positivity_bound(), exposed for
// callers that validate a stiffness without building a Material.
double sample_positivity_bound(const Tensor4& c, int samples, std::uint64_t seed);

}  // namespace lfdd
