#include <doctest.h>

#include <cmath>

#include "lfdd/errors.hpp"
#include "lfdd/fields.hpp"
#include "support.hpp"

using namespace lfdd;

TEST_SUITE("fields_grid") {

TEST_CASE("grid geometry and trapezoid weights") {
    const Grid1D g(-1.0, 2.0, 7);
    CHECK(g.h() == doctest::Approx(0.5));
    CHECK(g.x(0) == -1.0);
    CHECK(g.x(6) == 2.0);
    double sum = 0.0;
    for (int i = 0; i < 7; ++i) sum += g.weight(i);
    CHECK(sum == doctest::Approx(3.0).epsilon(1e-15));
    std::vector<double> lin(7);
    for (int i = 0; i < 7; ++i) lin[i] = g.x(i);
    CHECK(g.integrate(lin) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), InputError);
    CHECK_THROWS_AS(Grid1D(1.0, 1.0, 5), InputError);
}

TEST_CASE("derivatives are exact on linear fields") {
    const Grid1D g(0.3, 1.9, 17);
    std::vector<double> f(17);
    for (int i = 0; i < 17; ++i) f[i] = 4.0 - 2.5 * g.x(i);
    for (Closure cl : {Closure::SecondOrder, Closure::SummationByParts}) {
        for (double d : d_dx1(g, f, cl)) CHECK(d == doctest::Approx(-2.5).epsilon(1e-13));
    }
}

TEST_CASE("second-order closure is exact on quadratics") {
    const Grid1D g(0.0, 1.0, 11);
    std::vector<double> f(11);
    for (int i = 0; i < 11; ++i) f[i] = g.x(i) * g.x(i);
    const auto d = d_dx1(g, f);
    for (int i = 0; i < 11; ++i) CHECK(d[i] == doctest::Approx(2.0 * g.x(i)).epsilon(1e-12));
}

TEST_CASE("second-order convergence on a smooth field") {
    auto err = [](int n) {
        const Grid1D g(0.0, 1.0, n);
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = std::sin(3.0 * g.x(i));
        const auto d = d_dx1(g, f);
        double e = 0.0;
        for (int i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - 3.0 * std::cos(3.0 * g.x(i))));
        return e;
    };
    CHECK(err(41) / err(81) >= 3.5);
}

TEST_CASE("difference operators are linear") {
    test::Rng rng(21);
    const Grid1D g(0.0, 2.0, 25);
    std::vector<Vec3> u(25), w(25), z(25);
    const double a = rng.normal(), b = rng.normal();
    for (int i = 0; i < 25; ++i) {
        u[i] = rng.vec();
        w[i] = rng.vec();
        z[i] = a * u[i] + b * w[i];
    }
    const auto gu = grad_v(g, u), gw = grad_v(g, w), gz = grad_v(g, z);
    for (int i = 0; i < 25; ++i) CHECK((gz[i] - a * gu[i] - b * gw[i]).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("grad_v and div_stress fill only the x1 column") {
    const Grid1D g(0.0, 1.0, 9);
    std::vector<Vec3> v(9);
    std::vector<Tensor2> t(9);
    for (int i = 0; i < 9; ++i) {
        v[i] = Vec3(1.0, 2.0, 3.0) * g.x(i);
        t[i] = Tensor2::Constant(g.x(i));
    }
    for (const Tensor2& m : grad_v(g, v)) {
        CHECK(m.col(0).isApprox(Vec3(1.0, 2.0, 3.0), 1e-13));
        CHECK(m.rightCols(2).cwiseAbs().maxCoeff() == 0.0);
    }
    for (const Vec3& d : div_stress(g, t)) CHECK(d.isApprox(Vec3::Ones(), 1e-13));
}

TEST_CASE("summation by parts with trapezoid weights") {
    test::Rng rng(22);
    const Grid1D g(0.0, 1.5, 13);
    std::vector<double> f(13), q(13);
    for (int i = 0; i < 13; ++i) {
        f[i] = rng.normal();
        q[i] = rng.normal();
    }
    const auto df = d_dx1(g, f, Closure::SummationByParts);
    const auto dq = d_dx1(g, q, Closure::SummationByParts);
    double lhs = 0.0;
    for (int i = 0; i < 13; ++i) lhs += g.weight(i) * (f[i] * dq[i] + q[i] * df[i]);
    CHECK(lhs == doctest::Approx(f[12] * q[12] - f[0] * q[0]).epsilon(1e-13));
}

TEST_CASE("traction-free projection") {
    test::Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const Material m(1.0, t % 2 ? rng.anisotropic() : rng.isotropic());
        const SymTensor2 e = rng.strain();
        const SymTensor2 p = traction_free_projection(e, m.stiffness());
        const Tensor2 stress = test::contract_loop(m.stiffness(), p.to_matrix());
        const double scale = m.stiffness().max_abs();
        CHECK(stress.col(0).cwiseAbs().maxCoeff() <= 1e-13 * scale);
        for (int a : {1, 2, 3}) CHECK(p[a] == e[a]);
        const double e0 = e.dot(apply4(m.stiffness(), e)), e1 = p.dot(apply4(m.stiffness(), p));
        CHECK(e1 <= e0 * (1.0 + 1e-14));
        const SymTensor2 pp = traction_free_projection(p, m.stiffness());
        CHECK((pp.packed() - p.packed()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, p.packed().cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("apply_bcs touches only end nodes") {
    test::Rng rng(24);
    const Grid1D g(0.0, 1.0, 6);
    const Material m = Material::isotropic(1.0, 1.0, 1.0);
    FieldState s = FieldState::zero(g);
    for (int i = 0; i < 6; ++i) {
        s.eps[i] = rng.strain();
        s.v[i] = rng.vec();
    }
    const FieldState out = apply_bcs(s, {BcType::Clamped, BcType::TractionFree}, m);
    CHECK(out.v[0].norm() == 0.0);
    CHECK(out.eps[0] == s.eps[0]);
    CHECK(out.v[5] == s.v[5]);
    CHECK(apply4(m.stiffness(), out.eps[5]).to_matrix().col(0).norm() <= 1e-14);
    for (int i = 1; i < 5; ++i) {
        CHECK(out.eps[i] == s.eps[i]);
        CHECK(out.v[i] == s.v[i]);
    }
}

TEST_CASE("alpha from a potential A(x1) e1") {
    const Grid1D g(0.0, 1.0, 21);
    for (const auto& alpha : {alpha_from_psi(g, PsiField::linear(2.5)), alpha_from_psi(g, PsiField::sine(0.3, 4.0))}) {
        for (const Tensor2& a : alpha) {
            CHECK(a(0, 0) == 0.0);
            CHECK(a(1, 1) == a(2, 2));
            Tensor2 off = a;
            off(1, 1) = off(2, 2) = 0.0;
            CHECK(off.cwiseAbs().maxCoeff() == 0.0);
        }
    }
    for (const Tensor2& a : alpha_from_psi(g, PsiField::linear(2.5))) CHECK(a(1, 1) == -2.5);
    const auto sine = alpha_from_psi(g, PsiField::sine(0.3, 4.0));
    CHECK(sine[10](1, 1) == doctest::Approx(-0.3 * 4.0 * std::cos(4.0 * 0.5)).epsilon(1e-2));
    CHECK_THROWS_AS(PsiField::sampled({1.0, 2.0}).sample(g), InputError);
}

TEST_CASE("FieldState validation") {
    const Grid1D g(0.0, 1.0, 4);
    FieldState s = FieldState::zero(g);
    CHECK_NOTHROW(s.validate(g));
    s.omega[2](0, 1) = 1.0;
    CHECK_THROWS_AS(s.validate(g), InputError);
    s.omega[2](1, 0) = -1.0;
    CHECK_NOTHROW(s.validate(g));
    s.v.pop_back();
    CHECK_THROWS_AS(s.validate(g), InputError);
}

TEST_CASE("boundary tags") {
    CHECK(parse_bc_type("clamped") == BcType::Clamped);
    CHECK(parse_bc_type("traction_free") == BcType::TractionFree);
    CHECK(to_string(BcType::TractionFree) == "traction_free");
    CHECK_THROWS_AS(parse_bc_type("free"), InputError);
    const BoundaryCondition bc{BcType::TractionFree, BcType::Clamped};
    CHECK(bc.at(0, 5) == BcType::TractionFree);
    CHECK(bc.at(4, 5) == BcType::Clamped);
}

TEST_CASE("constraint residual field") {
    const Grid1D g(0.0, 1.0, 3);
    const Material m = Material::isotropic(1.0, 0.0, 1.0);
    FieldState s = FieldState::zero(g);
    for (auto& a : s.alpha) a(2, 2) = 1.0;
    for (auto& e : s.eps) e[4] = 0.25;
    for (double r : constraint_residual_field(s, m)) CHECK(r == doctest::Approx(0.5));
}

}  // TEST_SUITE
