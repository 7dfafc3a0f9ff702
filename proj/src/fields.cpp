#include "lfdd/fields.hpp"

#include <cmath>

#include <Eigen/LU>

#include "lfdd/errors.hpp"

namespace lfdd {

Grid1D::Grid1D(double x_left, double x_right, int n_nodes) : x_left_(x_left), x_right_(x_right), n_(n_nodes) {
    if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_right > x_left)) {
        throw InputError("grid requires finite x_right > x_left");
    }
    if (n_nodes < 3) throw InputError("grid requires at least 3 nodes, got " + std::to_string(n_nodes));
}

double Grid1D::x(int i) const {
    if (i == n_ - 1) return x_right_;
    return x_left_ + i * h();
}

double Grid1D::integrate(std::span<const double> f) const {
    if (static_cast<int>(f.size()) != n_) throw InputError("integrate: field length does not match grid");
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) acc += weight(i) * f[i];
    return acc;
}

BcType BoundaryCondition::at(int node, int n_nodes) const {
    if (node == 0) return left;
    if (node == n_nodes - 1) return right;
    throw InputError("boundary condition requested at interior node " + std::to_string(node));
}

std::string to_string(BcType t) { return t == BcType::Clamped ? "clamped" : "traction_free"; }

BcType parse_bc_type(const std::string& s) {
    if (s == "clamped") return BcType::Clamped;
    if (s == "traction_free") return BcType::TractionFree;
    throw InputError("unknown boundary condition '" + s + "' (expected clamped or traction_free)");
}

FieldState FieldState::zero(const Grid1D& grid) {
    const auto n = static_cast<size_t>(grid.n_nodes());
    FieldState s;
    s.eps.assign(n, SymTensor2{});
    s.v.assign(n, Vec3::Zero());
    s.omega.assign(n, Tensor2::Zero());
    s.alpha.assign(n, Tensor2::Zero());
    return s;
}

void FieldState::validate(const Grid1D& grid) const {
    const auto n = static_cast<size_t>(grid.n_nodes());
    if (eps.size() != n || v.size() != n || omega.size() != n || alpha.size() != n) {
        throw InputError("field state lengths do not match the grid (" + std::to_string(n) + " nodes)");
    }
    for (size_t i = 0; i < n; ++i) {
        if ((omega[i] + omega[i].transpose()).cwiseAbs().maxCoeff() != 0.0) {
            throw InputError("omega is not antisymmetric at node " + std::to_string(i));
        }
    }
}

std::vector<double> d_dx1(const Grid1D& grid, std::span<const double> f, Closure closure) {
    const int n = grid.n_nodes();
    if (static_cast<int>(f.size()) != n) throw InputError("d_dx1: field length does not match grid");
    const double h = grid.h();
    std::vector<double> out(n);
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    if (closure == Closure::SecondOrder) {
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else {
        out[0] = (f[1] - f[0]) / h;
        out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    }
    return out;
}

std::vector<Tensor2> grad_v(const Grid1D& grid, std::span<const Vec3> v, Closure closure) {
    const int n = grid.n_nodes();
    if (static_cast<int>(v.size()) != n) throw InputError("grad_v: field length does not match grid");
    std::vector<Tensor2> out(n, Tensor2::Zero());
    std::vector<double> comp(n);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < n; ++j) comp[j] = v[j](i);
        const auto d = d_dx1(grid, comp, closure);
        for (int j = 0; j < n; ++j) out[j](i, 0) = d[j];
    }
    return out;
}

std::vector<Vec3> div_stress(const Grid1D& grid, std::span<const Tensor2> stress, Closure closure) {
    const int n = grid.n_nodes();
    if (static_cast<int>(stress.size()) != n) throw InputError("div_stress: field length does not match grid");
    std::vector<Vec3> out(n, Vec3::Zero());
    std::vector<double> comp(n);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < n; ++j) comp[j] = stress[j](i, 0);
        const auto d = d_dx1(grid, comp, closure);
        for (int j = 0; j < n; ++j) out[j](i) = d[j];
    }
    return out;
}

SymTensor2 traction_free_projection(const SymTensor2& e, const Tensor4& c) {
    // Correction lives in span{basis(11), basis(12), basis(13)}, which is the
    // C-orthogonal complement of {T_i1 = 0}.
    static constexpr int slots[3] = {0, 5, 4};
    const Tensor2 t = c.contract(e.to_matrix());
    Eigen::Matrix3d m;
    for (int k = 0; k < 3; ++k) {
        const Tensor2 tk = c.contract(SymTensor2::basis(slots[k]).to_matrix());
        for (int i = 0; i < 3; ++i) m(i, k) = tk(i, 0);
    }
    const Vec3 x = m.partialPivLu().solve(Vec3(t(0, 0), t(1, 0), t(2, 0)));
    SymTensor2 out = e;
    for (int k = 0; k < 3; ++k) out[slots[k]] -= x(k);
    return out;
}

FieldState apply_bcs(FieldState state, const BoundaryCondition& bc, const Material& material) {
    const int n = state.size();
    if (n < 2) throw InputError("apply_bcs: state has fewer than 2 nodes");
    for (int node : {0, n - 1}) {
        if (bc.at(node, n) == BcType::Clamped) {
            state.v[node].setZero();
        } else {
            state.eps[node] = traction_free_projection(state.eps[node], material.stiffness());
        }
    }
    return state;
}

PsiField PsiField::linear(double slope) {
    PsiField p;
    p.profile = Profile::Linear;
    p.amplitude = slope;
    return p;
}

PsiField PsiField::sine(double amplitude, double wavenumber) {
    PsiField p;
    p.profile = Profile::Sine;
    p.amplitude = amplitude;
    p.wavenumber = wavenumber;
    return p;
}

PsiField PsiField::sampled(std::vector<double> values) {
    PsiField p;
    p.profile = Profile::Samples;
    p.samples = std::move(values);
    return p;
}

std::vector<double> PsiField::sample(const Grid1D& grid) const {
    const int n = grid.n_nodes();
    std::vector<double> a(n);
    switch (profile) {
        case Profile::Linear:
            for (int i = 0; i < n; ++i) a[i] = amplitude * grid.x(i);
            break;
        case Profile::Sine:
            for (int i = 0; i < n; ++i) a[i] = amplitude * std::sin(wavenumber * grid.x(i));
            break;
        case Profile::Samples:
            if (static_cast<int>(samples.size()) != n) throw InputError("psi samples do not match the grid");
            a = samples;
            break;
    }
    for (double x : a) {
        if (!std::isfinite(x)) throw InputError("psi potential is not finite");
    }
    return a;
}

std::vector<Tensor2> alpha_from_psi(const Grid1D& grid, const PsiField& psi, Closure closure) {
    const auto a = psi.sample(grid);
    std::vector<double> slope;
    if (psi.profile == PsiField::Profile::Linear) {
        // Differences of c*x1 are exact up to rounding of the node
        // coordinates; use the slope itself so uniform alpha is uniform.
        slope.assign(a.size(), psi.amplitude);
    } else {
        slope = d_dx1(grid, a, closure);
    }
    std::vector<Tensor2> alpha(a.size(), Tensor2::Zero());
    for (size_t i = 0; i < a.size(); ++i) {
        alpha[i](1, 1) = -slope[i];
        alpha[i](2, 2) = -slope[i];
    }
    return alpha;
}

std::vector<double> constraint_residual_field(const FieldState& state, const Material& material) {
    std::vector<double> r(state.eps.size());
    for (size_t i = 0; i < r.size(); ++i) {
        r[i] = build_D(state.alpha[i], material.stiffness()).apply(state.eps[i]).norm();
    }
    return r;
}

}  // namespace lfdd
