#pragma once

// Slab discretization: every field depends on x1 only, all tensor
// components are kept. Fields live at the nodes of a uniform grid.

#include <span>
#include <string>
#include <vector>

#include "lfdd/tensor.hpp"

namespace lfdd {

class Grid1D {
public:
    // Throws InputError unless x_right > x_left and n_nodes >= 3.
    Grid1D(double x_left, double x_right, int n_nodes);

    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    double length() const { return x_right_ - x_left_; }
    int n_nodes() const { return n_; }
    double h() const { return (x_right_ - x_left_) / (n_ - 1); }
    double x(int i) const;
    // Trapezoidal quadrature weight of node i.
    double weight(int i) const { return (i == 0 || i == n_ - 1) ? 0.5 * h() : h(); }

    double integrate(std::span<const double> f) const;

private:
    double x_left_, x_right_;
    int n_;
};

enum class BcType { Clamped, TractionFree };

// One tag per slab end. Clamped: v = 0. TractionFree: T_i1 = 0.
struct BoundaryCondition {
    BcType left = BcType::Clamped;
    BcType right = BcType::Clamped;

    BcType at(int node, int n_nodes) const;  // node must be 0 or n_nodes - 1
};

std::string to_string(BcType t);
BcType parse_bc_type(const std::string& s);  // "clamped" | "traction_free"

struct FieldState {
    std::vector<SymTensor2> eps;
    std::vector<Vec3> v;
    std::vector<Tensor2> omega;  // antisymmetric
    std::vector<Tensor2> alpha;  // frozen base dislocation density
    double t = 0.0;

    static FieldState zero(const Grid1D& grid);
    int size() const { return static_cast<int>(eps.size()); }
    // Throws InputError on length mismatch or non-antisymmetric omega.
    void validate(const Grid1D& grid) const;
};

// End stencils for the first-derivative operator. Interior nodes always use
// the centered difference (f_{i+1} - f_{i-1}) / 2h.
enum class Closure {
    // (-3 f0 + 4 f1 - f2) / 2h and its mirror: second order up to the ends.
    SecondOrder,
    // (f1 - f0) / h and its mirror. Together with trapezoidal weights this
    // satisfies summation by parts: sum_j w_j (f Dg + g Df)_j = [f g] at the
    // ends. The time integrators use this pairing so that the discrete energy
    // rate equals the boundary work minus the dissipation exactly.
    SummationByParts,
};

std::vector<double> d_dx1(const Grid1D& grid, std::span<const double> f, Closure closure = Closure::SecondOrder);

// (grad v)_i1 = d v_i / d x1; columns 2 and 3 are zero.
std::vector<Tensor2> grad_v(const Grid1D& grid, std::span<const Vec3> v, Closure closure = Closure::SecondOrder);

// (div T)_i = d T_i1 / d x1.
std::vector<Vec3> div_stress(const Grid1D& grid, std::span<const Tensor2> stress,
                             Closure closure = Closure::SecondOrder);

// C-orthogonal projection of a strain onto {eps : (C:eps)_i1 = 0}. Only
// eps_11, eps_12, eps_13 change; the projection never raises eps:C:eps.
SymTensor2 traction_free_projection(const SymTensor2& e, const Tensor4& c);

// Clamped ends get v = 0; traction-free ends get the strain projected so
// that T_i1 = 0 at the end node. Interior nodes are untouched.
FieldState apply_bcs(FieldState state, const BoundaryCondition& bc, const Material& material);

// Potential psi = A(x1) e1 for the stress-free base state alpha.
struct PsiField {
    enum class Profile { Linear, Sine, Samples };

    Profile profile = Profile::Linear;
    double amplitude = 1.0;   // Linear: slope c in A = c x1. Sine: A = amp sin(k x1).
    double wavenumber = 1.0;  // Sine only
    std::vector<double> samples;

    static PsiField linear(double slope);
    static PsiField sine(double amplitude, double wavenumber);
    static PsiField sampled(std::vector<double> values);

    // A at the grid nodes; throws InputError on size mismatch or non-finite values.
    std::vector<double> sample(const Grid1D& grid) const;
};

// alpha_pn = -(d1 A) delta_pn + (dp A) delta_n1 with A = A(x1):
// alpha_11 = 0, alpha_22 = alpha_33 = -d1 A, everything else 0.
std::vector<Tensor2> alpha_from_psi(const Grid1D& grid, const PsiField& psi,
                                    Closure closure = Closure::SecondOrder);

// Per node |D(alpha) : eps|, the constraint residual of the limit system.
std::vector<double> constraint_residual_field(const FieldState& state, const Material& material);

}  // namespace lfdd
