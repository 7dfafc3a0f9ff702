// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lfdd/dynamics.hpp"
#include "lfdd/scenarios.hpp"
#include "lfdd/spectral.hpp"

using namespace lfdd;

namespace {

struct Measure {
    bool passed;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Rng {
    std::mt19937_64 e{20240601};
    double n() { return std::normal_distribution<double>(0.0, 1.0)(e); }
    double u(double a, double b) { return std::uniform_real_distribution<double>(a, b)(e); }
    Tensor2 tensor() {
        Tensor2 t;
        for (int i = 0; i < 9; ++i) t(i / 3, i % 3) = n();
        return t;
    }
    SymTensor2 strain() {
        SymTensor2 s;
        for (int a = 0; a < 6; ++a) s[a] = n();
        return s;
    }
};

Measure dissipation_identity() {
    const auto t0 = Clock::now();
    Rng rng;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Tensor2 a = rng.tensor();
        const Tensor4 c = isotropic_stiffness(rng.u(-0.15, 2.0), rng.u(0.3, 2.0));
        const SymTensor2 e = rng.strain();
        const Tensor2 t = c.contract(e.to_matrix());
        const Tensor2 j = build_B(a, c).contract(e.to_matrix());
        const double vv = dissipation_density(build_D(a, c), e);
        worst = std::max(worst, std::abs((t.array() * j.array()).sum() - vv) / std::max(1.0, vv));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 1.0,
            fmt("max rel defect %.3e (tol 1e-12)", worst) + fmt(", %.3f s (limit 1 s)", secs)};
}

Measure b_minor_symmetry() {
    Rng rng;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Tensor4 b = build_B(rng.tensor(), isotropic_stiffness(rng.u(-0.15, 2.0), rng.u(0.3, 2.0)));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) worst = std::max(worst, std::abs(b(i, j, p, q) - b(i, j, q, p)));
    }
    return {worst <= 1e-15, fmt("max |B_ijkl - B_ijlk| %.3e (tol 1e-15)", worst)};
}

std::vector<Scenario> all_scenarios(Integrator integ) {
    TimeParams tp;
    tp.integrator = integ;
    StaticUniaxialParams sp;
    sp.time = tp;
    OscillatingShearParams op;
    op.time = tp;
    DissipativeHomogeneousParams dp;
    dp.time = tp;
    return {static_uniaxial(sp), oscillating_shear(op), dissipative_homogeneous(dp)};
}

Measure contraction() {
    const auto t0 = Clock::now();
    // Backward Euler: any increase above round-off counts (1e-12 E(0) is far
    // inside the 1e-10 solver-residual allowance). RK4: 1e-10 E(0) per step.
    double be = -1e300, rk = -1e300;
    for (Integrator integ : {Integrator::BackwardEuler, Integrator::RK4}) {
        for (const Scenario& s : all_scenarios(integ)) {
            const SimRecord r = run(s.config).record;
            for (size_t k = 1; k < r.size(); ++k) {
                const double inc = (r.energy[k] - r.energy[k - 1]) / r.energy[0];
                (integ == Integrator::RK4 ? rk : be) = std::max(integ == Integrator::RK4 ? rk : be, inc);
            }
        }
    }
    const double secs = seconds_since(t0);
    return {be <= 1e-12 && rk <= 1e-10 && secs < 30.0,
            fmt("BE max step increase %.3e E0 (tol 1e-12)", be) + fmt(", RK4 %.3e E0 (tol 1e-10)", rk) +
                fmt(", %.1f s (limit 30 s)", secs)};
}

Measure energy_budget_check() {
    auto defect = [](double fraction) {
        DissipativeHomogeneousParams p;
        p.n_nodes = 201;
        p.time.cfl_fraction = fraction;
        const SimRecord r = run(dissipative_homogeneous(p).config).record;
        return energy_budget(r) / r.energy[0];
    };
    const double d1 = defect(0.25), d2 = defect(0.125);
    return {d1 <= 1e-6 && d1 / d2 >= 3.5,
            fmt("defect %.3e E0 (tol 1e-6)", d1) + fmt(", halved dt %.3e E0", d2) + fmt(", ratio %.2f (min 3.5)", d1 / d2)};
}

Measure static_example() {
    const Scenario s = static_uniaxial();
    const RunResult r = run(s.config);
    const double drift = relative_energy_distance(r.final_state, s.oracle(0.0), s.config.grid, s.config.material);
    const StaticDefects d = static_limit_check(s.config.initial_state.eps, r.final_state.alpha, s.config.material,
                                               s.config.grid);
    return {drift <= 1e-10 && d.equilibrium <= 1e-12 && d.constraint <= 1e-12,
            fmt("drift %.3e (tol 1e-10)", drift) + fmt(", equilibrium %.3e", d.equilibrium) +
                fmt(", constraint %.3e (tol 1e-12)", d.constraint)};
}

Measure oscillating_example() {
    // Period from the zero crossings of the projection of eps_11 onto the
    // mode shape, which varies as cos(w t).
    auto simulate = [](int n, double* period) {
        OscillatingShearParams p;
        p.n_nodes = n;
        const Scenario s = oscillating_shear(p);
        const Grid1D& g = s.config.grid;
        const double k = p.mode * M_PI / p.length;
        std::vector<double> shape(g.n_nodes());
        for (int i = 0; i < g.n_nodes(); ++i) shape[i] = std::cos(k * (g.x(i) - g.x_left()));
        std::vector<double> crossings;
        double prev_t = 0.0, prev_a = 0.0;
        const RunResult r = run(s.config, [&](long step, const FieldState& st) {
            double a = 0.0;
            for (int i = 0; i < g.n_nodes(); ++i) a += g.weight(i) * shape[i] * st.eps[i][0];
            if (step > 0 && (a > 0.0) != (prev_a > 0.0)) crossings.push_back(prev_t + (st.t - prev_t) * prev_a / (prev_a - a));
            prev_t = st.t;
            prev_a = a;
        });
        if (period) *period = crossings.size() >= 2 ? 2.0 * (crossings[1] - crossings[0]) : 0.0;
        return relative_energy_distance(r.final_state, s.oracle(r.final_state.t), g, s.config.material);
    };
    double period = 0.0;
    const double e1 = simulate(201, &period), e2 = simulate(401, nullptr);
    const OscillatingShearParams p;
    const double expected = 2.0 * p.length / (p.mode * std::sqrt(2.0 * p.mu / p.rho));
    const double perr = std::abs(period - expected) / expected;
    return {e1 <= 1e-3 && e1 / e2 >= 3.5 && perr <= 0.01,
            fmt("rel L2 error %.3e (tol 1e-3)", e1) + fmt(", refined %.3e", e2) + fmt(", ratio %.2f (min 3.5)", e1 / e2) +
                fmt(", period rel error %.2e (tol 1e-2)", perr)};
}

Measure eigenproblem() {
    const double mu = 0.5, rho = 1.0, length = M_PI, c = std::sqrt(2.0 * mu / rho);
    double ortho = 0.0;
    auto errors = [&](int n) {
        const Grid1D g(0.0, length, n);
        const OperatorPair pair = assemble_operator(g, Material::isotropic(rho, 0.0, mu), {});
        const ModeSet ms = eigenmodes(pair);
        const Eigen::MatrixXd gram = ms.vectors.transpose() * pair.M.asDiagonal() * ms.vectors;
        ortho = std::max(ortho, (gram - Eigen::MatrixXd::Identity(ms.size(), ms.size())).cwiseAbs().maxCoeff());
        std::vector<double> err;
        for (int k = 0; k < ms.size() && err.size() < 5; ++k) {
            if (ms.polarization[k](0) < 0.5) continue;
            const double exact = (err.size() + 1) * M_PI * c / length;
            err.push_back(std::abs(ms.frequencies(k) - exact) / exact);
        }
        return err;
    };
    const auto e1 = errors(101), e2 = errors(201);
    double ratio = 1e300, worst = 0.0;
    for (size_t p = 0; p < e1.size(); ++p) {
        ratio = std::min(ratio, e1[p] / e2[p]);
        worst = std::max(worst, e2[p]);
    }
    return {e1.size() == 5 && ratio >= 3.5 && ortho <= 1e-10 && worst <= 1e-3,
            fmt("max rel freq error p<=5 %.3e (tol 1e-3)", worst) + fmt(", min ratio %.2f (min 3.5)", ratio) +
                fmt(", M-orthonormality %.3e (tol 1e-10)", ortho)};
}

Measure classification() {
    const Grid1D g(0.0, M_PI, 101);
    const Material m = Material::isotropic(1.0, 0.0, 0.5);
    const ModeSet crossed = analyze(g, m, {}, alpha_from_psi(g, PsiField::linear(1.0)));
    Tensor2 screw = Tensor2::Zero();
    screw(2, 2) = 1.0;
    const ModeSet sc = analyze(g, m, {}, std::vector<Tensor2>(g.n_nodes(), screw));
    double lon = 0.0, tr = 1e300;
    bool labels = true;
    for (int p = 0; p < crossed.size(); ++p) {
        if (crossed.polarization[p](0) < 0.5) continue;
        lon = std::max(lon, crossed.residuals[p]);
        labels = labels && crossed.labels[p] == CaseLabel::Case1;
    }
    for (int p = 0; p < sc.size(); ++p) {
        if (sc.polarization[p](2) < 0.5) continue;
        tr = std::min(tr, sc.residuals[p]);
        labels = labels && sc.labels[p] == CaseLabel::Case2;
    }
    return {labels && lon <= 1e-12 && tr >= 1e-2,
            fmt("crossed-grid longitudinal max residual %.3e (tol 1e-12)", lon) +
                fmt(", screw e3-transverse min residual %.3e (min 1e-2)", tr)};
}

Measure long_time() {
    const auto t0 = Clock::now();
    const Scenario s = dissipative_homogeneous();
    double scale = 0.0;
    for (const auto& e : s.config.initial_state.eps) scale = std::max(scale, e.packed().cwiseAbs().maxCoeff());
    double worst = 0.0;
    const RunResult r = run(s.config, [&](long, const FieldState& st) {
        const FieldState o = s.oracle(st.t);
        for (int i = 0; i < st.size(); ++i) {
            worst = std::max(worst, (st.eps[i].packed() - o.eps[i].packed()).cwiseAbs().maxCoeff());
            worst = std::max(worst, (st.omega[i] - o.omega[i]).cwiseAbs().maxCoeff());
        }
    });
    const double ratio = r.record.max_residual.back() / r.record.max_residual.front();
    const double secs = seconds_since(t0);
    return {ratio <= 1e-8 && worst / scale <= 1e-8 && secs < 10.0,
            fmt("t_end %.1f", s.config.t_end) + fmt(", final |D:eps| / initial %.3e (tol 1e-8)", ratio) +
                fmt(", max oracle deviation %.3e (tol 1e-8)", worst / scale) + fmt(", %.2f s (limit 10 s)", secs)};
}

Measure resolvent() {
    Rng rng;
    double worst = 0.0;
    const Grid1D g(0.0, 1.0, 101);
    for (BoundaryCondition bc : {BoundaryCondition{BcType::Clamped, BcType::Clamped},
                                 BoundaryCondition{BcType::TractionFree, BcType::Clamped}}) {
        std::vector<Tensor2> alpha(g.n_nodes());
        for (auto& a : alpha) a = rng.tensor();
        const SlabSystem sys(g, Material::isotropic(1.0, 1.0, 1.0), bc, alpha);
        for (double lam : {10.0, 100.0, 1000.0}) {
            for (int k = 0; k < 10; ++k) {
                std::vector<SymTensor2> f(g.n_nodes());
                std::vector<Vec3> gg(g.n_nodes());
                for (auto& x : f) x = rng.strain();
                for (auto& x : gg) x = Vec3(rng.n(), rng.n(), rng.n());
                worst = std::max(worst, sys.resolvent_residual(lam, f, gg, sys.solve_resolvent(lam, f, gg)));
            }
        }
    }
    return {worst <= 1e-10, fmt("max relative residual %.3e (tol 1e-10)", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Measure()>>> criteria = {
        {"dissipation identity", dissipation_identity},
        {"B minor symmetry", b_minor_symmetry},
        {"contraction", contraction},
        {"energy budget", energy_budget_check},
        {"static example", static_example},
        {"oscillating example", oscillating_example},
        {"eigenproblem", eigenproblem},
        {"case classification", classification},
        {"long-time constraint", long_time},
        {"resolvent solve", resolvent},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Measure m{false, ""};
        try {
            m = criteria[i].second();
        } catch (const std::exception& e) {
            m = {false, std::string("exception: ") + e.what()};
        }
        failed += m.passed ? 0 : 1;
        std::printf("[%s] %2zu %-22s %s\n", m.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), m.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
