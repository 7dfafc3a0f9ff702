#include "lfdd/scenarios.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "lfdd/errors.hpp"
#include "lfdd/linalg.hpp"
#include "lfdd/spectral.hpp"

namespace lfdd {

namespace {

void set_time(SimConfig& c, const TimeParams& t, double t_end) {
    c.integrator = t.integrator;
    c.dt = t.dt > 0.0 ? t.dt : t.cfl_fraction * cfl_dt(c.grid, c.material);
    c.t_end = t_end;
    c.record_every = t.record_every;
    c.snapshot_every = t.snapshot_every;
}

void check_oracle(Scenario& s) {
    if (!(s.oracle_residual <= s.oracle_tolerance)) {
        throw NumericalError(s.name + ": oracle residual " + std::to_string(s.oracle_residual) +
                             " exceeds its tolerance " + std::to_string(s.oracle_tolerance));
    }
}

double max_norm(const FieldRates& r) {
    double m = 0.0;
    for (size_t i = 0; i < r.eps.size(); ++i) {
        m = std::max({m, r.eps[i].packed().cwiseAbs().maxCoeff(), r.v[i].cwiseAbs().maxCoeff(),
                      r.omega[i].cwiseAbs().maxCoeff()});
    }
    return m;
}

std::string describe(const std::string& name) {
    for (const auto& info : list_scenarios())
        if (info.name == name) return info.description;
    return {};
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

double relative_energy_distance(const FieldState& a, const FieldState& b, const Grid1D& grid,
                                const Material& material) {
    FieldState d = a;
    for (int i = 0; i < d.size(); ++i) {
        d.eps[i] -= b.eps[i];
        d.v[i] -= b.v[i];
    }
    const double num = energy(d, material, grid);
    const double den = energy(b, material, grid);
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(2.0 * num);
}

Scenario static_uniaxial(const StaticUniaxialParams& p) {
    const Grid1D grid(p.x_left, p.x_right, p.n_nodes);
    const Material material = Material::isotropic(p.rho, p.lambda, p.mu);

    SymTensor2 stress;
    stress[0] = p.sigma0;
    const SymTensor2 eps0 = apply4(material.compliance(), stress);

    FieldState init = FieldState::zero(grid);
    init.eps.assign(grid.n_nodes(), eps0);
    init.alpha = alpha_from_psi(grid, PsiField::linear(p.slope));

    Scenario s{.name = "static_uniaxial",
               .description = describe("static_uniaxial"),
               .config = SimConfig{grid, material, BoundaryCondition{BcType::Clamped, BcType::Clamped},
                                   PsiField::linear(p.slope), init}};
    const double transit = grid.length() / material.max_wave_speed();
    set_time(s.config, p.time, p.transit_times * transit);
    s.oracle = [init](double t) {
        FieldState st = init;
        st.t = t;
        return st;
    };

    const SlabSystem sys(grid, material, s.config.bc, init.alpha);
    const StaticDefects d = static_limit_check(init.eps, init.alpha, material, grid);
    const double scale = std::max(1.0, std::abs(p.sigma0));
    s.oracle_residual = std::max({max_norm(sys.rhs(init)) / scale, d.equilibrium / scale, d.constraint / scale});
    s.oracle_tolerance = 1e-10;
    check_oracle(s);
    return s;
}

Scenario oscillating_shear(const OscillatingShearParams& p) {
    if (p.mode < 1) throw InputError("oscillating_shear: mode index must be >= 1");
    if (!(p.length > 0.0)) throw InputError("oscillating_shear: length must be positive");
    const Grid1D grid(p.x_left, p.x_left + p.length, p.n_nodes);
    const Material material = Material::isotropic(p.rho, 0.0, p.mu);
    const double k = p.mode * M_PI / p.length;
    const double w = k * std::sqrt(2.0 * p.mu / p.rho);
    const std::vector<Tensor2> alpha = alpha_from_psi(grid, PsiField::linear(p.slope));

    const double u0 = p.amplitude;
    const double xl = p.x_left;
    auto oracle = [grid, alpha, u0, k, w, xl](double t) {
        FieldState st = FieldState::zero(grid);
        st.alpha = alpha;
        st.t = t;
        for (int i = 0; i < grid.n_nodes(); ++i) {
            const double x = grid.x(i) - xl;
            st.eps[i][0] = u0 * k * std::cos(k * x) * std::cos(w * t);
            st.v[i](0) = -u0 * w * std::sin(k * x) * std::sin(w * t);
        }
        return st;
    };
    Scenario s{.name = "oscillating_shear",
               .description = describe("oscillating_shear"),
               .config = SimConfig{grid, material, BoundaryCondition{BcType::Clamped, BcType::Clamped},
                                   PsiField::linear(p.slope), oracle(0.0)}};
    s.oracle = oracle;
    s.angular_frequency = w;
    set_time(s.config, p.time, p.periods * 2.0 * M_PI / w);

    // Semi-discrete residual of the oracle: rhs(oracle) against its exact
    // time derivative, relative to the rate scale u0 k w.
    const SlabSystem sys(grid, material, s.config.bc, alpha);
    double res = 0.0;
    for (int q = 0; q < 8; ++q) {
        const double t = q * (2.0 * M_PI / w) / 8.0;
        const FieldRates r = sys.rhs(oracle(t));
        for (int i = 0; i < grid.n_nodes(); ++i) {
            const double x = grid.x(i) - xl;
            const double de = -u0 * k * w * std::cos(k * x) * std::sin(w * t);
            const double dv = -u0 * w * w * std::sin(k * x) * std::cos(w * t);
            Voigt6 ee = r.eps[i].packed();
            ee(0) -= de;
            Vec3 vv = r.v[i];
            vv(0) -= dv;
            res = std::max({res, ee.cwiseAbs().maxCoeff(), vv.cwiseAbs().maxCoeff(), r.omega[i].cwiseAbs().maxCoeff()});
        }
    }
    const double scale = std::abs(u0) * k * w;
    s.oracle_residual = scale > 0.0 ? res / scale : res;
    s.oracle_tolerance = std::pow(k * grid.h(), 2);
    check_oracle(s);
    return s;
}

Scenario dissipative_homogeneous(const DissipativeHomogeneousParams& p) {
    const Grid1D grid(p.x_left, p.x_right, p.n_nodes);
    const Material material = Material::isotropic(p.rho, p.lambda, p.mu);
    Tensor2 a = Tensor2::Zero();
    a(2, 2) = p.alpha0;
    const std::vector<Tensor2> alpha(grid.n_nodes(), a);

    FieldState init = FieldState::zero(grid);
    init.alpha = alpha;
    for (auto& e : init.eps) e[4] = p.g0;

    // Node-local generator on (packed eps, omega_23, omega_13, omega_12).
    const SlabSystem sys(grid, material, BoundaryCondition{}, alpha);
    const NodeOperator& op = sys.node_operator(0);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(9, 9);
    gen.topLeftCorner(6, 6) = -op.b_sym;
    gen.bottomLeftCorner(3, 6) = -op.j_skew;

    // Decay rates: eigenvalues of B_sym, self-adjoint in the energy product.
    const Mat6 metric = packed_metric() * packed_operator(material.stiffness());
    Eigen::LLT<Mat6> llt(metric);
    const Mat6 l_inv = llt.matrixL().solve(Mat6::Identity());
    Mat6 sym_b = l_inv * (metric * op.b_sym) * l_inv.transpose();
    sym_b = 0.5 * (sym_b + sym_b.transpose());
    const SymmetricEigen eig = symmetric_eigen(Eigen::MatrixXd(sym_b));
    const double top = eig.values.cwiseAbs().maxCoeff();
    double rate = 0.0;
    for (int i = 0; i < 6; ++i) {
        if (eig.values(i) > 1e-10 * top) {
            rate = eig.values(i);
            break;
        }
    }
    if (!(rate > 0.0)) throw InputError("dissipative_homogeneous: alpha0 and mu must give a nonzero decay rate");

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(9);
    x0.head<6>() = init.eps[0].packed();
    auto oracle = [grid, init, gen, x0](double t) {
        const Eigen::VectorXd x = matrix_exponential(gen * t) * x0;
        FieldState st = init;
        st.t = t;
        const SymTensor2 e{Voigt6(x.head<6>())};
        Tensor2 w = Tensor2::Zero();
        w(1, 2) = x(6);
        w(2, 1) = -x(6);
        w(0, 2) = x(7);
        w(2, 0) = -x(7);
        w(0, 1) = x(8);
        w(1, 0) = -x(8);
        for (int i = 0; i < grid.n_nodes(); ++i) {
            st.eps[i] = e;
            st.omega[i] = w;
        }
        return st;
    };
    Scenario s{.name = "dissipative_homogeneous",
               .description = describe("dissipative_homogeneous"),
               .config = SimConfig{grid, material, BoundaryCondition{BcType::Clamped, BcType::Clamped}, alpha, init}};
    s.oracle = oracle;
    s.slowest_decay_rate = rate;
    set_time(s.config, p.time, p.decay_times / rate);

    // rhs(oracle(t)) against generator * oracle(t).
    const SlabSystem clamped(grid, material, s.config.bc, alpha);
    double res = 0.0;
    for (double t : {0.0, 1.0 / rate, 5.0 / rate}) {
        const FieldState st = oracle(t);
        const FieldRates r = clamped.rhs(st);
        Eigen::VectorXd xs(9);
        xs.head<6>() = st.eps[0].packed();
        xs(6) = st.omega[0](1, 2);
        xs(7) = st.omega[0](0, 2);
        xs(8) = st.omega[0](0, 1);
        const Eigen::VectorXd dx = gen * xs;
        for (int i = 0; i < grid.n_nodes(); ++i) {
            res = std::max({res, (r.eps[i].packed() - dx.head<6>()).cwiseAbs().maxCoeff(), r.v[i].cwiseAbs().maxCoeff(),
                            std::abs(r.omega[i](1, 2) - dx(6)), std::abs(r.omega[i](0, 2) - dx(7)),
                            std::abs(r.omega[i](0, 1) - dx(8))});
        }
    }
    const double scale = std::max(std::abs(p.g0) * top, 1e-300);
    s.oracle_residual = p.g0 == 0.0 ? res : res / scale;
    s.oracle_tolerance = 1e-10;
    check_oracle(s);
    return s;
}

std::vector<ScenarioInfo> list_scenarios() {
    return {
        {"static_uniaxial", "uniform uniaxial stress under a crossed-grid dislocation field; stationary"},
        {"oscillating_shear", "clamped standing wave U = U0 sin(k x) cos(w t) under a crossed-grid dislocation field"},
        {"dissipative_homogeneous", "uniform shear eps_13 = g0 relaxing under a uniform screw field alpha0 e3 (x) e3"},
    };
}

}  // namespace lfdd
