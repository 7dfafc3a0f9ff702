#pragma once

// Modal analysis of the limit system: the elastic wave operator
// d/dx1 (C_i1k1 d/dx1) on the slab, its generalized eigenpairs and the
// per-mode dislocation constraint residual.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfdd/fields.hpp"
#include "lfdd/tensor.hpp"

namespace lfdd {

// K is symmetric negative semidefinite, M diagonal positive. Degrees of
// freedom are (node, component) pairs with clamped nodes removed.
struct OperatorPair {
    Eigen::MatrixXd K;
    Eigen::VectorXd M;
    std::vector<int> dof_node;
    std::vector<int> dof_comp;
    int n_nodes = 0;
};

// Compact three-point stiffness (one acoustic block per element) and the
// trapezoidal lumped mass. Traction-free ends are natural.
OperatorPair assemble_operator(const Grid1D& grid, const Material& material, const BoundaryCondition& bc);

enum class CaseLabel { Case1, Case2 };
std::string to_string(CaseLabel c);

struct ModeSet {
    Eigen::VectorXd frequencies;           // ascending, >= 0
    Eigen::MatrixXd vectors;               // dof x mode, M-orthonormal
    std::vector<std::vector<Vec3>> modes;  // nodal fields, zero at clamped nodes
    std::vector<Vec3> polarization;        // mass fraction per component
    std::vector<double> node_mass;         // rho * w_j
    std::vector<double> residuals;
    std::vector<CaseLabel> labels;
    bool repeated_eigenvalue_flag = false;

    int size() const { return static_cast<int>(frequencies.size()); }
};

// Dense generalized eigensolve through the M^{-1/2} similarity transform.
// Throws InputError if K is not symmetric or M is not positive. Residuals
// and labels are left empty.
ModeSet eigenmodes(const OperatorPair& pair);

// ||D(alpha) : sym(d phi)||_L2 / sqrt(int sym(d phi) : C : sym(d phi)),
// with derivatives and alpha taken per element. 0 for a mode with no strain.
double mode_constraint_residual(std::span<const Vec3> mode, std::span<const Tensor2> alpha, const Material& material,
                                const Grid1D& grid);

// Fills modes.residuals. Within each cluster of equal frequencies the basis
// is first rotated to diagonalize the constraint Gram matrix, so that the
// residuals do not depend on the eigensolver's arbitrary choice of basis.
void compute_residuals(ModeSet& modes, std::span<const Tensor2> alpha, const Material& material, const Grid1D& grid);

ModeSet classify(ModeSet modes, double tol = 1e-8);

struct CaseSummary {
    int case1 = 0;
    int case2 = 0;
};
CaseSummary summarize(const ModeSet& modes);

// c_p = sum_j rho w_j v0_j . phi_p(x_j)
std::vector<double> project_initial_data(std::span<const Vec3> v0, const ModeSet& modes);

struct StaticDefects {
    double equilibrium = 0.0;  // ||div(C : eps)||_L2
    double constraint = 0.0;   // ||D(alpha) : eps||_L2
};
StaticDefects static_limit_check(std::span<const SymTensor2> eps, std::span<const Tensor2> alpha,
                                 const Material& material, const Grid1D& grid);

// assemble, solve, residuals, classify.
ModeSet analyze(const Grid1D& grid, const Material& material, const BoundaryCondition& bc,
                std::span<const Tensor2> alpha, double tol = 1e-8);

}  // namespace lfdd
