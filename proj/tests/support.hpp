#pragma once

// Random inputs and brute-force reference implementations shared by the
// unit tests.

#include <random>

#include "lfdd/tensor.hpp"

namespace lfdd::test {

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine); }

    Tensor2 tensor() {
        Tensor2 t;
        for (int i = 0; i < 9; ++i) t(i / 3, i % 3) = normal();
        return t;
    }
    SymTensor2 strain() {
        SymTensor2 e;
        for (int a = 0; a < 6; ++a) e[a] = normal();
        return e;
    }
    Vec3 vec() { return Vec3(normal(), normal(), normal()); }
    Tensor4 isotropic() { return isotropic_stiffness(uniform(-0.15, 2.0), uniform(0.3, 2.0)); }

    // C = sum_ab P_ab E_a (x) E_b over an orthonormal basis E_a of symmetric
    // tensors, with P = Q Q^T + I: fully symmetric and positive definite.
    Tensor4 anisotropic() {
        Mat6 q;
        for (int i = 0; i < 36; ++i) q(i / 6, i % 6) = normal();
        const Mat6 p = q * q.transpose() + Mat6::Identity();
        std::array<Tensor2, 6> basis;
        for (int a = 0; a < 6; ++a) {
            basis[a] = SymTensor2::basis(a).to_matrix();
            if (a >= 3) basis[a] /= std::sqrt(2.0);
        }
        Tensor4 c({true, true, true});
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int i = 0; i < 81; ++i) {
                    const int ii = i / 27, jj = (i / 9) % 3, kk = (i / 3) % 3, ll = i % 3;
                    c(ii, jj, kk, ll) += p(a, b) * basis[a](ii, jj) * basis[b](kk, ll);
                }
        return c;
    }
};

// e_ijk from the explicit list of even permutations.
inline double eps3(int i, int j, int k) {
    if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) || (i == 2 && j == 0 && k == 1)) return 1.0;
    if ((i == 0 && j == 2 && k == 1) || (i == 2 && j == 1 && k == 0) || (i == 1 && j == 0 && k == 2)) return -1.0;
    return 0.0;
}

// Naive loop for (C:e)_ij.
inline Tensor2 contract_loop(const Tensor4& c, const Tensor2& e) {
    Tensor2 out = Tensor2::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) out(i, j) += c(i, j, k, l) * e(k, l);
    return out;
}

// V_s = e_smn alpha_pn T_pm
inline Vec3 velocity_loop(const Tensor2& alpha, const Tensor2& stress) {
    Vec3 v = Vec3::Zero();
    for (int s = 0; s < 3; ++s)
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
                for (int p = 0; p < 3; ++p) v(s) += eps3(s, m, n) * alpha(p, n) * stress(p, m);
    return v;
}

// J_ij = e_jrs alpha_ir V_s
inline Tensor2 flux_loop(const Tensor2& alpha, const Vec3& v) {
    Tensor2 j = Tensor2::Zero();
    for (int i = 0; i < 3; ++i)
        for (int jj = 0; jj < 3; ++jj)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) j(i, jj) += eps3(jj, r, s) * alpha(i, r) * v(s);
    return j;
}

}  // namespace lfdd::test
