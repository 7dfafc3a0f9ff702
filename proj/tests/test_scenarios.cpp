#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "lfdd/errors.hpp"
#include "lfdd/scenarios.hpp"
#include "lfdd/spectral.hpp"
#include "support.hpp"

using namespace lfdd;

TEST_SUITE("scenarios") {

TEST_CASE("scenario table") {
    const auto list = list_scenarios();
    REQUIRE(list.size() == 3);
    CHECK(list[0].name == "static_uniaxial");
    CHECK(list[1].name == "oscillating_shear");
    CHECK(list[2].name == "dissipative_homogeneous");
    for (const auto& s : list) CHECK_FALSE(s.description.empty());
}

TEST_CASE("matrix exponential agrees with Eigen's") {
    test::Rng rng(51);
    for (double scale : {1e-3, 0.3, 5.0}) {
        Eigen::MatrixXd a(9, 9);
        for (int i = 0; i < 81; ++i) a(i / 9, i % 9) = scale * rng.normal();
        a -= 4.5 * scale * Eigen::MatrixXd::Identity(9, 9);  // keep exp(a) of moderate size
        const Eigen::MatrixXd ref = a.exp();
        const Eigen::MatrixXd got = matrix_exponential(a);
        CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    CHECK(matrix_exponential(Eigen::MatrixXd::Zero(3, 3)).isIdentity(0.0));
}

TEST_CASE("static uniaxial state") {
    const Scenario s = static_uniaxial();
    const FieldState& st = s.config.initial_state;
    // Oracle: solve the 3x3 isotropic relation sigma = lambda tr(e) I + 2 mu e
    // for the principal strains under sigma = diag(1, 0, 0).
    Eigen::Matrix3d k = 2.0 * Eigen::Matrix3d::Ones();
    k.diagonal().array() += 6.0;
    const Eigen::Vector3d e = k.lu().solve(Eigen::Vector3d(1.0, 0.0, 0.0));
    CHECK(e(0) == doctest::Approx(5.0 / 36.0).epsilon(1e-15));
    for (int a = 0; a < 3; ++a) CHECK(st.eps[7][a] == doctest::Approx(e(a)).epsilon(1e-14));
    CHECK(s.oracle_residual <= 1e-10);
    const StaticDefects d = static_limit_check(st.eps, resolve_alpha(s.config.alpha_source, s.config.grid),
                                               s.config.material, s.config.grid);
    CHECK(d.equilibrium <= 1e-12);
    CHECK(d.constraint <= 1e-12);
    CHECK(s.config.bc.left == BcType::Clamped);
    CHECK(s.config.bc.right == BcType::Clamped);

    StaticUniaxialParams zero;
    zero.sigma0 = 0.0;
    const Scenario z = static_uniaxial(zero);
    for (const auto& e : z.config.initial_state.eps) CHECK(e.packed().norm() == 0.0);
}

TEST_CASE("static uniaxial stays put") {
    StaticUniaxialParams p;
    p.n_nodes = 41;
    for (Integrator integ : {Integrator::RK4, Integrator::BackwardEuler}) {
        p.time.integrator = integ;
        const Scenario s = static_uniaxial(p);
        const RunResult r = run(s.config);
        CHECK(relative_energy_distance(r.final_state, s.oracle(r.final_state.t), s.config.grid, s.config.material) <=
              1e-10);
        CHECK(r.record.energy.back() / r.record.energy.front() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("oscillating shear parameters") {
    const Scenario s = oscillating_shear();
    CHECK(s.angular_frequency == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.config.t_end == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(s.oracle_residual <= s.oracle_tolerance);
    CHECK(s.config.material.stiffness()(0, 0, 1, 1) == 0.0);

    OscillatingShearParams p;
    p.mode = 0;
    CHECK_THROWS_AS(oscillating_shear(p), InputError);
    p.mode = 1;
    p.amplitude = 0.0;
    const Scenario z = oscillating_shear(p);
    for (int i = 0; i < z.config.grid.n_nodes(); ++i) CHECK(z.oracle(0.7).eps[i].packed().norm() == 0.0);
    p.amplitude = 1.0;
    p.mode = 3;
    p.mu = 2.0;
    p.rho = 0.5;
    p.length = 2.0;
    CHECK(oscillating_shear(p).angular_frequency == doctest::Approx(3.0 * M_PI / 2.0 * std::sqrt(8.0)).epsilon(1e-15));
}

TEST_CASE("oscillating shear oracle is dissipation free and solves the wave equation") {
    const Scenario s = oscillating_shear();
    const double period = 2.0 * M_PI / s.angular_frequency;
    for (int q = 0; q < 100; ++q) {
        CHECK(dissipation_rate(s.oracle(q * period / 100.0), s.config.material, s.config.grid) <= 1e-12);
    }
    // Closed-form energy is constant: pi/4 for the defaults.
    for (double t : {0.0, 0.3, 1.1}) {
        CHECK(energy(s.oracle(t), s.config.material, s.config.grid) == doctest::Approx(M_PI / 4.0).epsilon(1e-4));
    }
}

TEST_CASE("oscillating shear converges under refinement") {
    auto error = [](int n) {
        OscillatingShearParams p;
        p.n_nodes = n;
        p.periods = 0.5;
        const Scenario s = oscillating_shear(p);
        const RunResult r = run(s.config);
        return relative_energy_distance(r.final_state, s.oracle(r.final_state.t), s.config.grid, s.config.material);
    };
    const double e1 = error(41), e2 = error(81);
    CHECK(e1 <= 1e-2);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("dissipative homogeneous oracle") {
    const Scenario s = dissipative_homogeneous();
    CHECK(s.slowest_decay_rate == doctest::Approx(1.0).epsilon(1e-12));  // mu alpha0^2
    CHECK(s.config.t_end == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(s.oracle_residual <= 1e-10);
    // Independent check of the oracle with Eigen's matrix exponential on the
    // 2x2 subsystem (eps_13, omega_13): d/dt eps_13 = -mu a0^2 eps_13.
    const FieldState o = s.oracle(2.0);
    CHECK(o.eps[3][4] == doctest::Approx(0.01 * std::exp(-2.0)).epsilon(1e-12));
    for (int a : {0, 1, 2, 3, 5}) CHECK(std::abs(o.eps[3][a]) <= 1e-16);
    CHECK(o.omega[3](0, 2) == -o.omega[3](2, 0));

    DissipativeHomogeneousParams p;
    p.g0 = 0.0;
    const Scenario z = dissipative_homogeneous(p);
    const RunResult r = run(z.config);
    for (double e : r.record.energy) CHECK(e == 0.0);
}

TEST_CASE("dissipative homogeneous run matches its oracle and decays monotonically") {
    DissipativeHomogeneousParams p;
    p.decay_times = 10.0;
    const Scenario s = dissipative_homogeneous(p);
    double worst = 0.0;
    const RunResult r = run(s.config, [&](long step, const FieldState& st) {
        if (step % 25) return;
        const FieldState o = s.oracle(st.t);
        for (int i = 0; i < st.size(); ++i) {
            worst = std::max(worst, (st.eps[i].packed() - o.eps[i].packed()).cwiseAbs().maxCoeff());
            worst = std::max(worst, (st.omega[i] - o.omega[i]).cwiseAbs().maxCoeff());
        }
    });
    CHECK(worst <= 1e-8 * 0.01);
    for (size_t k = 1; k < r.record.size(); ++k) {
        CHECK(r.record.energy[k] < r.record.energy[k - 1]);
        CHECK(r.record.max_residual[k] < r.record.max_residual[k - 1]);
    }
    CHECK(energy_budget(r.record) <= 1e-4 * r.record.energy[0]);  // coarse grid, dt = 0.25 CFL
}

TEST_CASE("anisotropic decay rates come from the energy-weighted spectrum") {
    DissipativeHomogeneousParams p;
    p.lambda = 1.3;
    p.mu = 0.7;
    p.alpha0 = 2.0;
    const Scenario s = dissipative_homogeneous(p);
    CHECK(s.slowest_decay_rate == doctest::Approx(0.7 * 4.0).epsilon(1e-12));
}

}  // TEST_SUITE
