#include "lfdd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "lfdd/errors.hpp"
#include "lfdd/linalg.hpp"

namespace lfdd {

namespace {

using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

// Packed strain slots of the column-1 components (11, 21, 31).
constexpr int kColumnSlots[3] = {0, 5, 4};

// a -> packed sym(a (x) e1)
const Mat63& sym_grad_map() {
    static const Mat63 m = [] {
        Mat63 e = Mat63::Zero();
        e(0, 0) = 1.0;
        e(5, 1) = 0.5;
        e(4, 2) = 0.5;
        return e;
    }();
    return m;
}

// packed stress -> T_i1
const Mat36& column_map() {
    static const Mat36 m = [] {
        Mat36 e = Mat36::Zero();
        for (int i = 0; i < 3; ++i) e(i, kColumnSlots[i]) = 1.0;
        return e;
    }();
    return m;
}

Tensor2 antisym_from(const Vec3& c) {
    // c = (w23, w13, w12)
    Tensor2 w = Tensor2::Zero();
    w(1, 2) = c(0);
    w(2, 1) = -c(0);
    w(0, 2) = c(1);
    w(2, 0) = -c(1);
    w(0, 1) = c(2);
    w(1, 0) = -c(2);
    return w;
}

// skew(a (x) e1)
Tensor2 skew_grad(const Vec3& a) {
    Tensor2 g = Tensor2::Zero();
    g.col(0) = a;
    return skew(g);
}

struct SparseRow {
    int cols[2];
    double vals[2];
};

// Rows of the summation-by-parts first-derivative matrix.
std::vector<SparseRow> sbp_rows(const Grid1D& grid) {
    const int n = grid.n_nodes();
    const double h = grid.h();
    std::vector<SparseRow> rows(n);
    rows[0] = {{0, 1}, {-1.0 / h, 1.0 / h}};
    rows[n - 1] = {{n - 2, n - 1}, {-1.0 / h, 1.0 / h}};
    for (int i = 1; i < n - 1; ++i) rows[i] = {{i - 1, i + 1}, {-0.5 / h, 0.5 / h}};
    return rows;
}

FieldState advanced(const FieldState& s, const FieldRates& r, double h) {
    FieldState out = s;
    for (size_t i = 0; i < out.eps.size(); ++i) {
        out.eps[i] += h * r.eps[i];
        out.v[i] += h * r.v[i];
        out.omega[i] += h * r.omega[i];
    }
    return out;
}

bool finite_state(const FieldState& s) {
    for (size_t i = 0; i < s.eps.size(); ++i) {
        if (!s.eps[i].packed().allFinite() || !s.v[i].allFinite() || !s.omega[i].allFinite()) return false;
    }
    return true;
}

}  // namespace

std::string to_string(Integrator i) { return i == Integrator::RK4 ? "rk4" : "backward_euler"; }

std::vector<Tensor2> resolve_alpha(const AlphaSource& source, const Grid1D& grid) {
    if (const auto* psi = std::get_if<PsiField>(&source)) return alpha_from_psi(grid, *psi);
    const auto& field = std::get<std::vector<Tensor2>>(source);
    if (static_cast<int>(field.size()) != grid.n_nodes()) throw InputError("alpha field length does not match grid");
    for (const auto& a : field) {
        if (!a.allFinite()) throw InputError("alpha field is not finite");
    }
    return field;
}

double cfl_dt(const Grid1D& grid, const Material& material) { return grid.h() / material.max_wave_speed(); }

void validate(const SimConfig& c) {
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("time.dt", "must be positive and finite");
    if (!(c.t_end >= c.dt) || !std::isfinite(c.t_end)) throw ConfigError("time.t_end", "must be finite and >= dt");
    if (c.record_every < 1) throw ConfigError("time.record_every", "must be >= 1");
    if (c.snapshot_every < 0) throw ConfigError("time.snapshot_every", "must be >= 0");
    if (!(c.cfl_safety > 0.0)) throw ConfigError("time.cfl_safety", "must be positive");
    std::vector<Tensor2> alpha;
    try {
        alpha = resolve_alpha(c.alpha_source, c.grid);
    } catch (const InputError& e) {
        throw ConfigError("alpha", e.what());
    }
    FieldState probe = c.initial_state;
    probe.alpha = alpha;
    try {
        probe.validate(c.grid);
    } catch (const InputError& e) {
        throw ConfigError("initial", e.what());
    }
    if (c.integrator == Integrator::RK4) {
        const double limit = c.cfl_safety * cfl_dt(c.grid, c.material);
        if (c.dt > limit) {
            throw ConfigError("time.dt", "RK4 step " + std::to_string(c.dt) + " violates the CFL bound " +
                                             std::to_string(limit) + " (cfl_safety * h / c_max)");
        }
        const SlabSystem sys(c.grid, c.material, c.bc, alpha);
        const double kappa = sys.max_dissipative_eigenvalue();
        if (c.dt * kappa > 2.5) {
            throw ConfigError("time.dt", "RK4 step too large for the dissipative rate " + std::to_string(kappa) +
                                             " (need dt * rate <= 2.5)");
        }
    }
}

// --- SlabSystem ---

SlabSystem::SlabSystem(Grid1D grid, Material material, BoundaryCondition bc, std::vector<Tensor2> alpha)
    : grid_(grid), material_(std::move(material)), bc_(bc), alpha_(std::move(alpha)) {
    const int n = grid_.n_nodes();
    if (static_cast<int>(alpha_.size()) != n) throw InputError("SlabSystem: alpha field length does not match grid");
    const Tensor4& c = material_.stiffness();
    stiffness_ = packed_operator(c);
    energy_metric_ = packed_metric() * stiffness_;

    Mat6 projector;
    for (int b = 0; b < 6; ++b) projector.col(b) = traction_free_projection(SymTensor2::basis(b), c).packed();

    ops_.resize(n);
    for (int i = 0; i < n; ++i) {
        const Tensor4 bt = build_B(alpha_[i], c);
        const Rank3Op d = build_D(alpha_[i], c);
        NodeOperator& op = ops_[i];
        for (int b = 0; b < 6; ++b) {
            const SymTensor2 e = SymTensor2::basis(b);
            const Tensor2 j = bt.contract(e.to_matrix());
            op.b_sym.col(b) = sym(j).packed();
            const Tensor2 w = skew(j);
            op.j_skew.col(b) = Vec3(w(1, 2), w(0, 2), w(0, 1));
            op.velocity.col(b) = d.apply(e);
        }
        op.projector = traction_free(i) ? projector : Mat6::Identity();
    }
}

bool SlabSystem::clamped(int node) const {
    const int n = grid_.n_nodes();
    return (node == 0 || node == n - 1) && bc_.at(node, n) == BcType::Clamped;
}

bool SlabSystem::traction_free(int node) const {
    const int n = grid_.n_nodes();
    return (node == 0 || node == n - 1) && bc_.at(node, n) == BcType::TractionFree;
}

std::vector<Vec3> SlabSystem::sbp_derivative(std::span<const Vec3> f) const {
    const int n = grid_.n_nodes();
    const double h = grid_.h();
    std::vector<Vec3> d(n);
    d[0] = (f[1] - f[0]) / h;
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

FieldRates SlabSystem::rhs(const FieldState& s) const {
    const int n = grid_.n_nodes();
    if (s.size() != n) throw InputError("rhs: state length does not match grid");
    FieldRates r;
    r.eps.resize(n);
    r.v.resize(n);
    r.omega.resize(n);

    const auto dv = sbp_derivative(s.v);
    std::vector<Vec3> traction(n);
    for (int i = 0; i < n; ++i) {
        const Voigt6 e = s.eps[i].packed();
        traction[i] = column_map() * (stiffness_ * e);
        const NodeOperator& op = ops_[i];
        r.eps[i] = SymTensor2(Voigt6(op.projector * (sym_grad_map() * dv[i] - op.b_sym * e)));
        r.omega[i] = skew_grad(dv[i]) - antisym_from(op.j_skew * e);
    }
    const auto div = sbp_derivative(traction);
    const double inv_rho = 1.0 / material_.rho();
    for (int i = 0; i < n; ++i) r.v[i] = clamped(i) ? Vec3::Zero() : Vec3(inv_rho * div[i]);
    return r;
}

FieldState SlabSystem::step_rk4(const FieldState& s, double dt) const {
    const FieldRates k1 = rhs(s);
    const FieldRates k2 = rhs(advanced(s, k1, 0.5 * dt));
    const FieldRates k3 = rhs(advanced(s, k2, 0.5 * dt));
    const FieldRates k4 = rhs(advanced(s, k3, dt));
    FieldState out = s;
    const double w = dt / 6.0;
    for (int i = 0; i < s.size(); ++i) {
        out.eps[i] += w * (k1.eps[i] + 2.0 * k2.eps[i] + 2.0 * k3.eps[i] + k4.eps[i]);
        out.v[i] += w * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
        out.omega[i] += w * (k1.omega[i] + 2.0 * k2.omega[i] + 2.0 * k3.omega[i] + k4.omega[i]);
    }
    out.t = s.t + dt;
    return apply_bcs(std::move(out), bc_, material_);
}

void SlabSystem::project_admissible(std::vector<SymTensor2>& f, std::vector<Vec3>& g) const {
    const int n = grid_.n_nodes();
    for (int node : {0, n - 1}) {
        if (clamped(node)) g[node].setZero();
        if (traction_free(node)) f[node] = SymTensor2(Voigt6(ops_[node].projector * f[node].packed()));
    }
}

ResolventSolution SlabSystem::solve_resolvent(double lambda, std::span<const SymTensor2> f_in,
                                              std::span<const Vec3> g_in) const {
    const int n = grid_.n_nodes();
    if (!(lambda > 0.0)) throw InputError("solve_resolvent: lambda must be positive");
    if (static_cast<int>(f_in.size()) != n || static_cast<int>(g_in.size()) != n) {
        throw InputError("solve_resolvent: data length does not match grid");
    }
    std::vector<SymTensor2> f(f_in.begin(), f_in.end());
    std::vector<Vec3> g(g_in.begin(), g_in.end());
    project_admissible(f, g);

    // eps_m = G_m (sym grad v_m + f_m),  G_m = (lambda + P B P)^{-1} P
    std::vector<Mat6> green(n);
    std::vector<Eigen::Matrix3d> k(n);
    std::vector<Vec3> forcing(n);
    for (int m = 0; m < n; ++m) {
        const NodeOperator& op = ops_[m];
        const Mat6 lhs = lambda * Mat6::Identity() + op.projector * op.b_sym * op.projector;
        Eigen::PartialPivLU<Mat6> lu(lhs);
        green[m] = lu.solve(op.projector);
        const Mat6 cg = stiffness_ * green[m];
        k[m] = column_map() * cg * sym_grad_map();
        forcing[m] = column_map() * (cg * f[m].packed());
    }

    std::vector<int> dof(n, -1);
    int n_free = 0;
    for (int i = 0; i < n; ++i) {
        if (!clamped(i)) dof[i] = n_free++;
    }

    const auto rows = sbp_rows(grid_);
    std::vector<std::vector<std::pair<int, double>>> cols(n);  // column m of D: (j, D_jm)
    for (int j = 0; j < n; ++j)
        for (int q = 0; q < 2; ++q) cols[rows[j].cols[q]].emplace_back(j, rows[j].vals[q]);

    const double rho = material_.rho();
    BandedMatrix a(3 * n_free, 8);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n_free);
    for (int j = 0; j < n; ++j) {
        if (dof[j] < 0) continue;
        const double w = grid_.weight(j);
        for (int c = 0; c < 3; ++c) {
            a.add(3 * dof[j] + c, 3 * dof[j] + c, w * lambda * rho);
            rhs(3 * dof[j] + c) += w * g[j](c);
        }
    }
    for (int m = 0; m < n; ++m) {
        for (const auto& [j, djm] : cols[m]) {
            if (dof[j] < 0) continue;
            const double q = grid_.weight(j) * djm;
            for (int c = 0; c < 3; ++c) rhs(3 * dof[j] + c) += q * forcing[m](c);
            for (int t = 0; t < 2; ++t) {
                const int kk = rows[m].cols[t];
                if (dof[kk] < 0) continue;
                const Eigen::Matrix3d block = -q * rows[m].vals[t] * k[m];
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) a.add(3 * dof[j] + r, 3 * dof[kk] + c, block(r, c));
            }
        }
    }

    const double asym = a.max_asymmetry();
    if (asym > 1e-10 * a.max_abs()) {
        throw NumericalError("resolvent system is not symmetric (defect " + std::to_string(asym) + ", scale " +
                             std::to_string(a.max_abs()) + ")");
    }
    const Eigen::VectorXd x = a.solve_spd(rhs);

    ResolventSolution u;
    u.v.assign(n, Vec3::Zero());
    for (int i = 0; i < n; ++i) {
        if (dof[i] >= 0) u.v[i] = x.segment<3>(3 * dof[i]);
    }
    const auto dv = sbp_derivative(u.v);
    u.eps.resize(n);
    for (int m = 0; m < n; ++m) {
        u.eps[m] = SymTensor2(Voigt6(green[m] * (sym_grad_map() * dv[m] + f[m].packed())));
    }
    return u;
}

double SlabSystem::resolvent_residual(double lambda, std::span<const SymTensor2> f_in, std::span<const Vec3> g_in,
                                      const ResolventSolution& u) const {
    const int n = grid_.n_nodes();
    std::vector<SymTensor2> f(f_in.begin(), f_in.end());
    std::vector<Vec3> g(g_in.begin(), g_in.end());
    project_admissible(f, g);

    const double rho = material_.rho();
    const auto dv = sbp_derivative(u.v);
    std::vector<Vec3> traction(n);
    for (int i = 0; i < n; ++i) traction[i] = column_map() * (stiffness_ * u.eps[i].packed());
    const auto div = sbp_derivative(traction);

    double res2 = 0.0, data2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const NodeOperator& op = ops_[i];
        const Voigt6 e = u.eps[i].packed();
        const Voigt6 re = lambda * e - op.projector * (sym_grad_map() * dv[i] - op.b_sym * e) - f[i].packed();
        const Vec3 rv = clamped(i) ? Vec3(lambda * rho * u.v[i]) : Vec3(lambda * rho * u.v[i] - div[i] - g[i]);
        const double w = grid_.weight(i);
        res2 += w * (re.dot(energy_metric_ * re) + rv.squaredNorm() / rho);
        data2 += w * (f[i].packed().dot(energy_metric_ * f[i].packed()) + g[i].squaredNorm() / rho);
    }
    return data2 > 0.0 ? std::sqrt(res2 / data2) : std::sqrt(res2);
}

FieldState SlabSystem::step_backward_euler(const FieldState& s, double dt) const {
    const int n = grid_.n_nodes();
    if (!(dt > 0.0)) throw InputError("step_backward_euler: dt must be positive");
    const double lambda = 1.0 / dt;
    std::vector<SymTensor2> f(n);
    std::vector<Vec3> g(n);
    for (int i = 0; i < n; ++i) {
        f[i] = lambda * s.eps[i];
        g[i] = lambda * material_.rho() * s.v[i];
    }
    const ResolventSolution u = solve_resolvent(lambda, f, g);
    const double residual = resolvent_residual(lambda, f, g, u);
    if (!(residual <= 1e-8)) {
        throw NumericalError("backward Euler resolvent residual " + std::to_string(residual) + " exceeds 1e-8");
    }

    FieldState out = s;
    out.eps = u.eps;
    out.v = u.v;
    const auto dv = sbp_derivative(out.v);
    for (int i = 0; i < n; ++i) {
        out.omega[i] = s.omega[i] + dt * (skew_grad(dv[i]) - antisym_from(ops_[i].j_skew * out.eps[i].packed()));
    }
    out.t = s.t + dt;
    return apply_bcs(std::move(out), bc_, material_);
}

double SlabSystem::energy(const FieldState& s) const {
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        const Voigt6 e = s.eps[i].packed();
        acc += grid_.weight(i) * 0.5 * (material_.rho() * s.v[i].squaredNorm() + e.dot(energy_metric_ * e));
    }
    return acc;
}

double SlabSystem::dissipation_rate(const FieldState& s) const {
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) acc += grid_.weight(i) * velocity(i, s.eps[i]).squaredNorm();
    return acc;
}

double SlabSystem::max_constraint_residual(const FieldState& s) const {
    double m = 0.0;
    for (int i = 0; i < s.size(); ++i) m = std::max(m, velocity(i, s.eps[i]).norm());
    return m;
}

double SlabSystem::max_dissipative_eigenvalue() const {
    // B_sym is self-adjoint for <a, b> = a^T E b with E = energy_metric_;
    // with E = L L^T its spectrum is that of L^{-1} (E B_sym) L^{-T}.
    const Eigen::LLT<Mat6> llt(0.5 * (energy_metric_ + energy_metric_.transpose()));
    const Mat6 l_inv = llt.matrixL().solve(Mat6::Identity());
    double kappa = 0.0;
    for (const NodeOperator& op : ops_) {
        Mat6 s = l_inv * (energy_metric_ * op.b_sym) * l_inv.transpose();
        s = 0.5 * (s + s.transpose());
        kappa = std::max(kappa, symmetric_eigen(Eigen::MatrixXd(s)).values.maxCoeff());
    }
    return kappa;
}

// --- free functions ---

FieldRates rhs(const FieldState& state, const Grid1D& grid, const Material& material, const BoundaryCondition& bc) {
    return SlabSystem(grid, material, bc, state.alpha).rhs(state);
}

FieldState step_rk4(const FieldState& state, const SimConfig& config) {
    return SlabSystem(config.grid, config.material, config.bc, resolve_alpha(config.alpha_source, config.grid))
        .step_rk4(state, config.dt);
}

FieldState step_backward_euler(const FieldState& state, const SimConfig& config) {
    return SlabSystem(config.grid, config.material, config.bc, resolve_alpha(config.alpha_source, config.grid))
        .step_backward_euler(state, config.dt);
}

double energy(const FieldState& state, const Material& material, const Grid1D& grid) {
    return SlabSystem(grid, material, {}, state.alpha).energy(state);
}

double dissipation_rate(const FieldState& state, const Material& material, const Grid1D& grid) {
    return SlabSystem(grid, material, {}, state.alpha).dissipation_rate(state);
}

RunResult run(const SimConfig& config, const StepObserver& observer) {
    validate(config);
    const SlabSystem sys(config.grid, config.material, config.bc, resolve_alpha(config.alpha_source, config.grid));

    FieldState state = config.initial_state;
    state.alpha = sys.alpha();
    state.t = 0.0;
    state = apply_bcs(std::move(state), config.bc, config.material);

    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9)));
    const double dt = config.t_end / static_cast<double>(n_steps);

    RunResult result;
    SimRecord& rec = result.record;
    auto record = [&](long step) {
        const double e = sys.energy(state);
        const double d = sys.dissipation_rate(state);
        if (!std::isfinite(e) || !std::isfinite(d)) {
            throw NumericalError("non-finite energy at step " + std::to_string(step), step);
        }
        double cum = 0.0;
        if (!rec.times.empty()) {
            cum = rec.cumulative_dissipation.back() + 0.5 * (rec.dissipation_rate.back() + d) * (state.t - rec.times.back());
        }
        rec.steps.push_back(step);
        rec.times.push_back(state.t);
        rec.energy.push_back(e);
        rec.dissipation_rate.push_back(d);
        rec.cumulative_dissipation.push_back(cum);
        rec.max_residual.push_back(sys.max_constraint_residual(state));
    };

    record(0);
    if (config.snapshot_every > 0) rec.snapshots.push_back({0, state});
    if (observer) observer(0, state);

    for (long step = 1; step <= n_steps; ++step) {
        try {
            state = config.integrator == Integrator::RK4 ? sys.step_rk4(state, dt) : sys.step_backward_euler(state, dt);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (step " + std::to_string(step) + ")", step);
        }
        state.t = static_cast<double>(step) * dt;
        if (!finite_state(state)) {
            throw NumericalError("non-finite state at step " + std::to_string(step), step);
        }
        if (step % config.record_every == 0 || step == n_steps) record(step);
        if (config.snapshot_every > 0 && (step % config.snapshot_every == 0 || step == n_steps)) {
            rec.snapshots.push_back({step, state});
        }
        if (observer) observer(step, state);
    }
    result.final_state = std::move(state);
    return result;
}

double energy_budget(const SimRecord& record) {
    if (record.size() < 2) throw InputError("energy_budget: record needs at least two samples");
    double defect = 0.0;
    for (size_t k = 0; k < record.size(); ++k) {
        defect = std::max(defect, std::abs(record.energy[k] - record.energy[0] + record.cumulative_dissipation[k]));
    }
    return defect;
}

}  // namespace lfdd
