#include "lfdd/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lfdd/dynamics.hpp"
#include "lfdd/fields.hpp"
#include "lfdd/scenarios.hpp"
#include "lfdd/spectral.hpp"

namespace lfdd {

namespace {

struct Sampler {
    std::mt19937_64 rng{0x1f2d};
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    Tensor2 tensor() {
        Tensor2 t;
        for (int i = 0; i < 9; ++i) t(i / 3, i % 3) = normal(rng);
        return t;
    }
    SymTensor2 strain() {
        SymTensor2 e;
        for (int a = 0; a < 6; ++a) e[a] = normal(rng);
        return e;
    }
    Tensor4 stiffness() { return isotropic_stiffness(-0.3 + 2.0 * unit(rng), 0.5 + 1.5 * unit(rng)); }
};

CheckResult verdict(std::string name, double measured, double tol) {
    return {std::move(name), measured <= tol, measured, tol, false};
}

CheckResult at_least(std::string name, double measured, double bound) {
    return {std::move(name), measured >= bound, measured, bound, true};
}

int trials(CheckLevel level) { return level == CheckLevel::Full ? 1000 : 200; }

CheckResult b_minor_symmetry(const CheckOptions& o) {
    Sampler s;
    double worst = 0.0;
    for (int t = 0; t < trials(o.level); ++t) {
        const Tensor4 b = o.build_b(s.tensor(), s.stiffness());
        worst = std::max(worst, b.symmetry_defect({false, true, false}));
    }
    return verdict("tensor.b_minor_symmetry", worst, 1e-15);
}

// (C:eps):(B:eps) = |D:eps|^2, relative to max(1, |V|^2).
CheckResult dissipation_identity(const CheckOptions& o) {
    Sampler s;
    double worst = 0.0;
    for (int t = 0; t < trials(o.level); ++t) {
        const Tensor2 a = s.tensor();
        const Tensor4 c = s.stiffness();
        const SymTensor2 e = s.strain();
        const Tensor2 stress = c.contract(e.to_matrix());
        const Tensor2 j = o.build_b(a, c).contract(e.to_matrix());
        const double vv = dissipation_density(build_D(a, c), e);
        worst = std::max(worst, std::abs((stress.array() * j.array()).sum() - vv) / std::max(1.0, vv));
    }
    return verdict("tensor.dissipation_identity", worst, 1e-12);
}

// B:eps against e_sjr alpha_ir V_s with V from an independent loop.
CheckResult b_flux_assembly(const CheckOptions& o) {
    Sampler s;
    double worst = 0.0;
    for (int t = 0; t < trials(o.level); ++t) {
        const Tensor2 a = s.tensor();
        const Tensor4 c = s.stiffness();
        const SymTensor2 e = s.strain();
        const Tensor2 stress = c.contract(e.to_matrix());
        Vec3 v = Vec3::Zero();
        for (int q = 0; q < 3; ++q)
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n)
                    for (int p = 0; p < 3; ++p) v(q) += permutation_sign(q, m, n) * a(p, n) * stress(p, m);
        Tensor2 j = Tensor2::Zero();
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 3; ++jj)
                for (int q = 0; q < 3; ++q)
                    for (int r = 0; r < 3; ++r) j(i, jj) += permutation_sign(q, jj, r) * a(i, r) * v(q);
        const Tensor2 got = o.build_b(a, c).contract(e.to_matrix());
        worst = std::max(worst, (got - j).cwiseAbs().maxCoeff() / std::max(1.0, j.cwiseAbs().maxCoeff()));
    }
    return verdict("tensor.b_flux_assembly", worst, 1e-13);
}

CheckResult compliance_inverse(const CheckOptions& o) {
    Sampler s;
    double worst = 0.0;
    for (int t = 0; t < trials(o.level) / 10; ++t) {
        const Material m = Material::isotropic(1.0, -0.3 + 2.0 * s.unit(s.rng), 0.5 + 1.5 * s.unit(s.rng));
        const Mat6 prod = packed_operator(m.compliance()) * packed_operator(m.stiffness());
        worst = std::max(worst, (prod - Mat6::Identity()).cwiseAbs().maxCoeff());
    }
    return verdict("tensor.compliance_inverse", worst, 1e-14);
}

CheckResult operator_linearity(const CheckOptions&) {
    const Grid1D grid(0.0, 1.0, 37);
    Sampler s;
    std::vector<double> f(grid.n_nodes()), g(grid.n_nodes()), h(grid.n_nodes());
    const double a = s.normal(s.rng), b = s.normal(s.rng);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        f[i] = s.normal(s.rng);
        g[i] = s.normal(s.rng);
        h[i] = a * f[i] + b * g[i];
    }
    double worst = 0.0;
    for (Closure cl : {Closure::SecondOrder, Closure::SummationByParts}) {
        const auto df = d_dx1(grid, f, cl), dg = d_dx1(grid, g, cl), dh = d_dx1(grid, h, cl);
        double scale = 1.0;
        for (double x : dh) scale = std::max(scale, std::abs(x));
        for (int i = 0; i < grid.n_nodes(); ++i) worst = std::max(worst, std::abs(dh[i] - a * df[i] - b * dg[i]) / scale);
    }
    return verdict("fields.derivative_linearity", worst, 1e-14);
}

CheckResult linear_exactness(const CheckOptions&) {
    const Grid1D grid(-0.5, 2.0, 23);
    std::vector<Vec3> v(grid.n_nodes());
    std::vector<Tensor2> t(grid.n_nodes(), Tensor2::Zero());
    const Vec3 slope(0.7, -1.3, 2.1), off(0.2, 0.4, -0.9);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        v[i] = off + grid.x(i) * slope;
        t[i].col(0) = v[i];
    }
    double worst = 0.0;
    for (Closure cl : {Closure::SecondOrder, Closure::SummationByParts}) {
        const auto g = grad_v(grid, v, cl);
        const auto d = div_stress(grid, t, cl);
        for (int i = 0; i < grid.n_nodes(); ++i) {
            worst = std::max({worst, (g[i].col(0) - slope).cwiseAbs().maxCoeff(), (d[i] - slope).cwiseAbs().maxCoeff()});
        }
    }
    return verdict("fields.linear_exactness", worst, 1e-13);
}

CheckResult alpha_structure(const CheckOptions&) {
    const Grid1D grid(0.0, 2.0, 41);
    double worst = 0.0;
    for (const PsiField& psi : {PsiField::linear(1.7), PsiField::sine(0.4, 3.0)}) {
        for (const Tensor2& a : alpha_from_psi(grid, psi)) {
            Tensor2 off = a;
            off(1, 1) = off(2, 2) = 0.0;
            worst = std::max({worst, std::abs(a(1, 1) - a(2, 2)), off.cwiseAbs().maxCoeff()});
        }
    }
    return verdict("fields.alpha_structure", worst, 0.0);
}

std::vector<Scenario> small_scenarios(Integrator integ) {
    TimeParams tp;
    tp.integrator = integ;
    StaticUniaxialParams sp;
    sp.n_nodes = 41;
    sp.transit_times = 2.0;
    sp.time = tp;
    OscillatingShearParams op;
    op.n_nodes = 61;
    op.time = tp;
    DissipativeHomogeneousParams dp;
    dp.decay_times = 10.0;
    dp.time = tp;
    if (integ == Integrator::BackwardEuler) dp.time.dt = 0.05;
    return {static_uniaxial(sp), oscillating_shear(op), dissipative_homogeneous(dp)};
}

CheckResult contraction(const CheckOptions&, Integrator integ) {
    double worst = 0.0;
    for (const Scenario& s : small_scenarios(integ)) {
        const SimRecord r = run(s.config).record;
        for (size_t k = 1; k < r.size(); ++k) {
            worst = std::max(worst, (r.energy[k] - r.energy[k - 1]) / std::max(r.energy[0], 1e-300));
        }
    }
    return integ == Integrator::RK4 ? verdict("dynamics.contraction_rk4", worst, 1e-10)
                                    : verdict("dynamics.contraction_backward_euler", worst, 1e-12);
}

// alpha = 0 and traction-free ends: pure elastodynamics conserves energy up
// to the RK4 truncation.
CheckResult conservative(const CheckOptions& o) {
    const Grid1D grid(0.0, 1.0, 41);
    const Material m = Material::isotropic(1.0, 1.0, 1.0);
    FieldState init = FieldState::zero(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        init.v[i] = Vec3(std::sin(M_PI * grid.x(i)), 0.5 * std::sin(2 * M_PI * grid.x(i)), 0.0);
    }
    SimConfig c{grid, m, {BcType::Clamped, BcType::Clamped}, std::vector<Tensor2>(grid.n_nodes(), Tensor2::Zero()),
                init};
    c.dt = 0.25 * cfl_dt(grid, m);
    c.t_end = o.level == CheckLevel::Full ? 10.0 : 2.0;
    const SimRecord r = run(c).record;
    double worst = 0.0;
    for (double e : r.energy) worst = std::max(worst, std::abs(e - r.energy[0]) / r.energy[0]);
    return verdict("dynamics.conservative_without_dislocations", worst, 1e-6);
}

// T:J = |V|^2 pointwise along a trajectory.
CheckResult trajectory_dissipation(const CheckOptions& o) {
    DissipativeHomogeneousParams p;
    p.decay_times = 5.0;
    const Scenario s = dissipative_homogeneous(p);
    const Tensor4& c = s.config.material.stiffness();
    double worst = 0.0;
    run(s.config, [&](long step, const FieldState& st) {
        if (step % 50 != 0) return;
        for (int i = 0; i < st.size(); ++i) {
            const Tensor2 e = st.eps[i].to_matrix();
            const Tensor2 t = c.contract(e);
            const Tensor2 j = o.build_b(st.alpha[i], c).contract(e);
            const double vv = dissipation_density(build_D(st.alpha[i], c), st.eps[i]);
            worst = std::max(worst, std::abs((t.array() * j.array()).sum() - vv) / std::max(vv, 1e-300));
        }
    });
    return verdict("dynamics.trajectory_dissipation_identity", worst, 1e-12);
}

CheckResult resolvent(const CheckOptions& o) {
    Sampler s;
    const Grid1D grid(0.0, 1.0, o.level == CheckLevel::Full ? 101 : 31);
    double worst = 0.0;
    for (BcType left : {BcType::Clamped, BcType::TractionFree}) {
        std::vector<Tensor2> alpha(grid.n_nodes());
        for (auto& a : alpha) a = s.tensor();
        const SlabSystem sys(grid, Material::isotropic(1.3, 0.7, 1.1), {left, BcType::Clamped}, alpha);
        for (double lam : {10.0, 100.0, 1000.0}) {
            std::vector<SymTensor2> f(grid.n_nodes());
            std::vector<Vec3> g(grid.n_nodes());
            for (auto& x : f) x = s.strain();
            for (auto& x : g) x = Vec3(s.normal(s.rng), s.normal(s.rng), s.normal(s.rng));
            worst = std::max(worst, sys.resolvent_residual(lam, f, g, sys.solve_resolvent(lam, f, g)));
        }
    }
    return verdict("dynamics.resolvent_residual", worst, 1e-10);
}

CheckResult long_time_constraint(const CheckOptions&) {
    const Scenario s = dissipative_homogeneous();
    const SimRecord r = run(s.config).record;
    return verdict("dynamics.long_time_constraint", r.max_residual.back() / r.max_residual.front(), 1e-8);
}

CheckResult monotone_velocity(const CheckOptions&) {
    DissipativeHomogeneousParams p;
    p.decay_times = 10.0;
    const SimRecord r = run(dissipative_homogeneous(p).config).record;
    double worst = 0.0;
    for (size_t k = 1; k < r.size(); ++k) worst = std::max(worst, r.max_residual[k] - r.max_residual[k - 1]);
    return verdict("dynamics.velocity_monotone", worst, 0.0);
}

CheckResult static_fixed_point(const CheckOptions&) {
    StaticUniaxialParams p;
    p.n_nodes = 51;
    const Scenario s = static_uniaxial(p);
    const RunResult r = run(s.config);
    const double drift = relative_energy_distance(r.final_state, s.oracle(0.0), s.config.grid, s.config.material);
    const StaticDefects d = static_limit_check(s.config.initial_state.eps, r.final_state.alpha, s.config.material,
                                               s.config.grid);
    return verdict("scenarios.static_fixed_point", std::max({drift, d.equilibrium, d.constraint}), 1e-10);
}

CheckResult oscillating_convergence(const CheckOptions& o) {
    auto error = [](int n) {
        OscillatingShearParams p;
        p.n_nodes = n;
        const Scenario s = oscillating_shear(p);
        const RunResult r = run(s.config);
        return relative_energy_distance(r.final_state, s.oracle(r.final_state.t), s.config.grid, s.config.material);
    };
    const int n = o.level == CheckLevel::Full ? 201 : 51;
    const double e1 = error(n), e2 = error(2 * n - 1);
    return at_least("scenarios.oscillating_error_ratio", e1 / e2, 3.5);
}

CheckResult oscillating_dissipation_free(const CheckOptions&) {
    const Scenario s = oscillating_shear();
    double worst = 0.0;
    const double period = 2.0 * M_PI / s.angular_frequency;
    for (int q = 0; q < 100; ++q) {
        worst = std::max(worst, dissipation_rate(s.oracle(q * period / 100.0), s.config.material, s.config.grid));
    }
    return verdict("scenarios.oscillating_dissipation_free", worst, 1e-12);
}

CheckResult eigen_orthonormality(const CheckOptions& o) {
    const Grid1D grid(0.0, 1.0, o.level == CheckLevel::Full ? 101 : 41);
    const Material m = Material::isotropic(1.5, 0.4, 0.9);
    const OperatorPair pair = assemble_operator(grid, m, {BcType::Clamped, BcType::TractionFree});
    const ModeSet ms = eigenmodes(pair);
    const Eigen::MatrixXd gram = ms.vectors.transpose() * pair.M.asDiagonal() * ms.vectors;
    const double defect = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    return verdict("spectral.mass_orthonormality", defect, 1e-10);
}

CheckResult eigen_residual(const CheckOptions& o) {
    const Grid1D grid(0.0, 1.0, o.level == CheckLevel::Full ? 101 : 41);
    const Material m = Material::isotropic(1.5, 0.4, 0.9);
    const OperatorPair pair = assemble_operator(grid, m, {BcType::TractionFree, BcType::TractionFree});
    const ModeSet ms = eigenmodes(pair);
    double worst = 0.0;
    for (int p = 0; p < ms.size(); ++p) {
        const Eigen::VectorXd mphi = pair.M.cwiseProduct(ms.vectors.col(p));
        const double lam2 = ms.frequencies(p) * ms.frequencies(p);
        worst = std::max(worst, (pair.K * ms.vectors.col(p) + lam2 * mphi).norm() / (mphi.norm() * std::max(lam2, 1.0)));
    }
    return verdict("spectral.eigen_residual", worst, 1e-9);
}

CheckResult bar_frequencies(const CheckOptions& o) {
    const double mu = 0.5, rho = 1.0, length = M_PI;
    const double c = std::sqrt(2.0 * mu / rho);
    auto errors = [&](int n) {
        const Grid1D grid(0.0, length, n);
        const ModeSet ms = eigenmodes(assemble_operator(grid, Material::isotropic(rho, 0.0, mu), {}));
        std::vector<double> err;
        int p = 0;
        for (int k = 0; k < ms.size() && p < 5; ++k) {
            if (ms.polarization[k](0) < 0.5) continue;
            ++p;
            err.push_back(std::abs(ms.frequencies(k) - p * M_PI * c / length));
        }
        return err;
    };
    const int n = o.level == CheckLevel::Full ? 101 : 41;
    const auto e1 = errors(n), e2 = errors(2 * n - 1);
    double worst = 1e300;
    for (size_t p = 0; p < e1.size(); ++p) worst = std::min(worst, e1[p] / e2[p]);
    return at_least("spectral.bar_frequency_error_ratio", worst, 3.5);
}

std::pair<CheckResult, CheckResult> classification(const CheckOptions&) {
    const Grid1D grid(0.0, 1.0, 41);
    const Material m = Material::isotropic(1.0, 0.0, 1.0);
    const ModeSet crossed = analyze(grid, m, {}, alpha_from_psi(grid, PsiField::linear(1.0)));
    Tensor2 screw = Tensor2::Zero();
    screw(2, 2) = 1.0;
    const ModeSet sc = analyze(grid, m, {}, std::vector<Tensor2>(grid.n_nodes(), screw));
    double longitudinal = 0.0, transverse = 1e300;
    for (int p = 0; p < crossed.size(); ++p) {
        if (crossed.polarization[p](0) > 0.5) longitudinal = std::max(longitudinal, crossed.residuals[p]);
    }
    for (int p = 0; p < sc.size(); ++p) {
        if (sc.polarization[p](2) > 0.5) transverse = std::min(transverse, sc.residuals[p]);
    }
    return {verdict("spectral.crossed_grid_longitudinal_residual", longitudinal, 1e-12),
            at_least("spectral.screw_transverse_residual", transverse, 1e-2)};
}

}  // namespace

BBuilder corrupted_b_builder() {
    return [](const Tensor2& alpha, const Tensor4& c) {
        Tensor4 b = build_B(alpha, c);
        auto data = b.data();
        for (double& x : data) x *= 1.01;
        return Tensor4(data, b.symmetries());
    };
}

std::vector<CheckResult> run_checks(const CheckOptions& o) {
    std::vector<CheckResult> out;
    out.push_back(b_minor_symmetry(o));
    out.push_back(dissipation_identity(o));
    out.push_back(b_flux_assembly(o));
    out.push_back(compliance_inverse(o));
    out.push_back(operator_linearity(o));
    out.push_back(linear_exactness(o));
    out.push_back(alpha_structure(o));
    out.push_back(contraction(o, Integrator::BackwardEuler));
    out.push_back(contraction(o, Integrator::RK4));
    out.push_back(conservative(o));
    out.push_back(trajectory_dissipation(o));
    out.push_back(resolvent(o));
    out.push_back(long_time_constraint(o));
    out.push_back(monotone_velocity(o));
    out.push_back(static_fixed_point(o));
    out.push_back(oscillating_dissipation_free(o));
    out.push_back(eigen_orthonormality(o));
    out.push_back(eigen_residual(o));
    const auto [longitudinal, transverse] = classification(o);
    out.push_back(longitudinal);
    out.push_back(transverse);
    if (o.level == CheckLevel::Full) {
        out.push_back(oscillating_convergence(o));
        out.push_back(bar_frequencies(o));
    }
    return out;
}

}  // namespace lfdd
