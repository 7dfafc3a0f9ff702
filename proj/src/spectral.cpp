#include "lfdd/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "lfdd/errors.hpp"
#include "lfdd/linalg.hpp"

namespace lfdd {

namespace {

constexpr double kRepeatTol = 1e-8;

// Per-element strain e = sym(g (x) e1) with g the element difference quotient.
SymTensor2 element_strain(const Vec3& g) {
    Tensor2 m = Tensor2::Zero();
    m.col(0) = g;
    return sym(m);
}

struct ElementData {
    std::vector<Rank3Op> d;  // D at element midpoints
};

ElementData element_operators(std::span<const Tensor2> alpha, const Material& material) {
    ElementData out;
    out.d.reserve(alpha.size() - 1);
    for (size_t e = 0; e + 1 < alpha.size(); ++e) {
        out.d.push_back(build_D(0.5 * (alpha[e] + alpha[e + 1]), material.stiffness()));
    }
    return out;
}

// Element values V_e = D_e : sym(d phi) for one nodal field.
std::vector<Vec3> element_velocities(std::span<const Vec3> mode, const ElementData& ops, double h) {
    std::vector<Vec3> v(ops.d.size());
    for (size_t e = 0; e < ops.d.size(); ++e) v[e] = ops.d[e].apply(element_strain((mode[e + 1] - mode[e]) / h));
    return v;
}

double strain_energy(std::span<const Vec3> mode, const Material& material, double h) {
    const Tensor2 a = material.acoustic_tensor();
    double acc = 0.0;
    for (size_t e = 0; e + 1 < mode.size(); ++e) {
        const Vec3 g = (mode[e + 1] - mode[e]) / h;
        acc += h * g.dot(a * g);
    }
    return acc;
}

void check_alpha(std::span<const Tensor2> alpha, const Grid1D& grid) {
    if (static_cast<int>(alpha.size()) != grid.n_nodes()) throw InputError("alpha field length does not match grid");
}

}  // namespace

std::string to_string(CaseLabel c) { return c == CaseLabel::Case1 ? "Case1" : "Case2"; }

OperatorPair assemble_operator(const Grid1D& grid, const Material& material, const BoundaryCondition& bc) {
    const int n = grid.n_nodes();
    const double h = grid.h();
    const Tensor2 a = material.acoustic_tensor();

    // Component-major numbering: when the acoustic tensor is diagonal the
    // matrix is exactly block diagonal and the eigensolver keeps the
    // polarizations unmixed.
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i) {
        const bool end = i == 0 || i == n - 1;
        if (!(end && bc.at(i, n) == BcType::Clamped)) free_nodes.push_back(i);
    }
    const int nf = static_cast<int>(free_nodes.size());
    std::vector<int> local(n, -1);
    for (int k = 0; k < nf; ++k) local[free_nodes[k]] = k;
    auto dof = [&](int node, int comp) { return local[node] < 0 ? -1 : comp * nf + local[node]; };

    OperatorPair out;
    out.n_nodes = n;
    for (int c = 0; c < 3; ++c) {
        for (int node : free_nodes) {
            out.dof_node.push_back(node);
            out.dof_comp.push_back(c);
        }
    }
    const int m = 3 * nf;
    out.K = Eigen::MatrixXd::Zero(m, m);
    out.M = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < m; ++k) out.M(k) = material.rho() * grid.weight(out.dof_node[k]);
    for (int e = 0; e + 1 < n; ++e) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                const double s = a(r, c) / h;
                if (s == 0.0) continue;
                const int pr = dof(e, r), pc = dof(e, c), qr = dof(e + 1, r), qc = dof(e + 1, c);
                if (pr >= 0 && pc >= 0) out.K(pr, pc) -= s;
                if (qr >= 0 && qc >= 0) out.K(qr, qc) -= s;
                if (pr >= 0 && qc >= 0) out.K(pr, qc) += s;
                if (qr >= 0 && pc >= 0) out.K(qr, pc) += s;
            }
        }
    }
    return out;
}

ModeSet eigenmodes(const OperatorPair& pair) {
    const int m = static_cast<int>(pair.K.rows());
    if (pair.K.cols() != m || pair.M.size() != m) throw InputError("eigenmodes: K and M sizes differ");
    const double scale = std::max(1.0, pair.K.cwiseAbs().maxCoeff());
    if ((pair.K - pair.K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("eigenmodes: stiffness matrix is not symmetric");
    }
    if (m > 0 && !(pair.M.minCoeff() > 0.0)) throw InputError("eigenmodes: mass matrix must be positive");

    ModeSet out;
    if (m == 0) return out;
    const Eigen::VectorXd s = pair.M.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd a = -(s.asDiagonal() * pair.K * s.asDiagonal());
    const SymmetricEigen eig = symmetric_eigen(a);

    const double top = std::max(0.0, eig.values.maxCoeff());
    out.frequencies.resize(m);
    for (int p = 0; p < m; ++p) {
        const double lam = eig.values(p);
        out.frequencies(p) = lam <= 1e-12 * top ? 0.0 : std::sqrt(lam);
    }
    out.vectors = s.asDiagonal() * eig.vectors;

    for (int p = 0; p + 1 < m; ++p) {
        const double f0 = out.frequencies(p), f1 = out.frequencies(p + 1);
        if (std::abs(f1 - f0) <= kRepeatTol * std::max(std::abs(f0), std::abs(f1))) out.repeated_eigenvalue_flag = true;
        if (f0 == 0.0 && f1 == 0.0) out.repeated_eigenvalue_flag = true;
    }

    const int n = pair.n_nodes > 0 ? pair.n_nodes : (pair.dof_node.empty() ? 0 : 1 + *std::max_element(pair.dof_node.begin(), pair.dof_node.end()));
    out.node_mass.assign(n, 0.0);
    for (int k = 0; k < m && !pair.dof_node.empty(); ++k) out.node_mass[pair.dof_node[k]] = pair.M(k);
    out.modes.assign(m, std::vector<Vec3>(n, Vec3::Zero()));
    out.polarization.assign(m, Vec3::Zero());
    for (int p = 0; p < m; ++p) {
        for (int k = 0; k < m; ++k) {
            const double x = out.vectors(k, p);
            if (!pair.dof_node.empty()) out.modes[p][pair.dof_node[k]](pair.dof_comp[k]) = x;
            const int comp = pair.dof_comp.empty() ? 0 : pair.dof_comp[k];
            out.polarization[p](comp) += pair.M(k) * x * x;
        }
    }
    return out;
}

double mode_constraint_residual(std::span<const Vec3> mode, std::span<const Tensor2> alpha, const Material& material,
                                const Grid1D& grid) {
    check_alpha(alpha, grid);
    if (static_cast<int>(mode.size()) != grid.n_nodes()) throw InputError("mode length does not match grid");
    const double h = grid.h();
    const double energy = strain_energy(mode, material, h);
    if (!(energy > 0.0)) return 0.0;
    const auto v = element_velocities(mode, element_operators(alpha, material), h);
    double acc = 0.0;
    for (const Vec3& x : v) acc += h * x.squaredNorm();
    return std::sqrt(acc / energy);
}

void compute_residuals(ModeSet& ms, std::span<const Tensor2> alpha, const Material& material, const Grid1D& grid) {
    check_alpha(alpha, grid);
    const int m = ms.size();
    const double h = grid.h();
    const ElementData ops = element_operators(alpha, material);

    int start = 0;
    while (start < m) {
        int end = start + 1;
        while (end < m) {
            const double f0 = ms.frequencies(end - 1), f1 = ms.frequencies(end);
            if (std::abs(f1 - f0) > kRepeatTol * std::max(std::abs(f0), std::abs(f1)) || (f0 == 0.0) != (f1 == 0.0)) break;
            ++end;
        }
        const int k = end - start;
        if (k > 1 && ms.frequencies(start) > 0.0) {
            std::vector<std::vector<Vec3>> vel(k);
            for (int a = 0; a < k; ++a) vel[a] = element_velocities(ms.modes[start + a], ops, h);
            Eigen::MatrixXd gram(k, k);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b <= a; ++b) {
                    double acc = 0.0;
                    for (size_t e = 0; e < vel[a].size(); ++e) acc += h * vel[a][e].dot(vel[b][e]);
                    gram(a, b) = gram(b, a) = acc;
                }
            const SymmetricEigen rot = symmetric_eigen(gram);
            const Eigen::MatrixXd block = ms.vectors.middleCols(start, k) * rot.vectors;
            ms.vectors.middleCols(start, k) = block;
            std::vector<std::vector<Vec3>> old(ms.modes.begin() + start, ms.modes.begin() + end);
            std::vector<Vec3> old_pol(ms.polarization.begin() + start, ms.polarization.begin() + end);
            for (int a = 0; a < k; ++a) {
                auto& f = ms.modes[start + a];
                for (size_t j = 0; j < f.size(); ++j) {
                    f[j].setZero();
                    for (int b = 0; b < k; ++b) f[j] += rot.vectors(b, a) * old[b][j];
                }
                Vec3 pol = Vec3::Zero();
                for (size_t j = 0; j < f.size(); ++j) pol += ms.node_mass[j] * f[j].cwiseProduct(f[j]);
                ms.polarization[start + a] = pol;
            }
        }
        start = end;
    }

    ms.residuals.assign(m, 0.0);
    for (int p = 0; p < m; ++p) {
        ms.residuals[p] = ms.frequencies(p) == 0.0 ? 0.0 : mode_constraint_residual(ms.modes[p], alpha, material, grid);
    }
}

ModeSet classify(ModeSet ms, double tol) {
    if (static_cast<int>(ms.residuals.size()) != ms.size()) throw InputError("classify: residuals not computed");
    ms.labels.resize(ms.size());
    for (int p = 0; p < ms.size(); ++p) ms.labels[p] = ms.residuals[p] <= tol ? CaseLabel::Case1 : CaseLabel::Case2;
    return ms;
}

CaseSummary summarize(const ModeSet& ms) {
    CaseSummary s;
    for (CaseLabel l : ms.labels) (l == CaseLabel::Case1 ? s.case1 : s.case2)++;
    return s;
}

std::vector<double> project_initial_data(std::span<const Vec3> v0, const ModeSet& ms) {
    if (v0.size() != ms.node_mass.size()) throw InputError("project_initial_data: field length does not match modes");
    std::vector<double> c(ms.size(), 0.0);
    for (int p = 0; p < ms.size(); ++p)
        for (size_t j = 0; j < v0.size(); ++j) c[p] += ms.node_mass[j] * v0[j].dot(ms.modes[p][j]);
    return c;
}

StaticDefects static_limit_check(std::span<const SymTensor2> eps, std::span<const Tensor2> alpha,
                                 const Material& material, const Grid1D& grid) {
    check_alpha(alpha, grid);
    const int n = grid.n_nodes();
    if (static_cast<int>(eps.size()) != n) throw InputError("static_limit_check: strain length does not match grid");
    std::vector<Tensor2> stress(n);
    std::vector<double> eq(n), con(n);
    for (int i = 0; i < n; ++i) {
        stress[i] = apply4(material.stiffness(), eps[i]).to_matrix();
        con[i] = build_D(alpha[i], material.stiffness()).apply(eps[i]).squaredNorm();
    }
    const auto div = div_stress(grid, stress);
    for (int i = 0; i < n; ++i) eq[i] = div[i].squaredNorm();
    return {std::sqrt(grid.integrate(eq)), std::sqrt(grid.integrate(con))};
}

ModeSet analyze(const Grid1D& grid, const Material& material, const BoundaryCondition& bc,
                std::span<const Tensor2> alpha, double tol) {
    ModeSet ms = eigenmodes(assemble_operator(grid, material, bc));
    compute_residuals(ms, alpha, material, grid);
    return classify(std::move(ms), tol);
}

}  // namespace lfdd
