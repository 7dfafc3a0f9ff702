#pragma once

// Time integration of the linearized dislocation system on the slab:
//
//   d eps/dt   = sym(grad v) - J_(ij),        J = B(alpha, C) : eps
//   rho dv/dt  = div(C : eps)
//   d omega/dt = skew(grad v) - J_[ij]        (passive, never fed back)
//
// The energy 1/2 rho v.v + 1/2 eps:C:eps is non-increasing and its rate is
// -|V|^2 with V = D(alpha, C) : eps.

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "lfdd/fields.hpp"
#include "lfdd/tensor.hpp"

namespace lfdd {

enum class Integrator { RK4, BackwardEuler };

std::string to_string(Integrator i);

using AlphaSource = std::variant<PsiField, std::vector<Tensor2>>;

std::vector<Tensor2> resolve_alpha(const AlphaSource& source, const Grid1D& grid);

struct SimConfig {
    Grid1D grid;
    Material material;
    BoundaryCondition bc;
    AlphaSource alpha_source;
    FieldState initial_state;  // its alpha is replaced by alpha_source
    double dt = 0.0;
    double t_end = 0.0;
    Integrator integrator = Integrator::RK4;
    int record_every = 1;
    int snapshot_every = 0;  // 0 disables snapshots
    double cfl_safety = 0.5;
};

// h / c_max, the explicit stability scale of the wave part.
double cfl_dt(const Grid1D& grid, const Material& material);

// Throws ConfigError naming the offending field.
void validate(const SimConfig& config);

struct FieldRates {
    std::vector<SymTensor2> eps;
    std::vector<Vec3> v;
    std::vector<Tensor2> omega;
};

struct ResolventSolution {
    std::vector<SymTensor2> eps;
    std::vector<Vec3> v;
};

// Per-node linear maps on packed strain, precomputed from alpha and C.
struct NodeOperator {
    Mat6 b_sym;                          // eps -> J_(ij)
    Eigen::Matrix<double, 3, 6> j_skew;  // eps -> (J_[23], J_[13], J_[12])
    Eigen::Matrix<double, 3, 6> velocity;  // eps -> V
    Mat6 projector;                      // identity, or the traction-free projection at such ends
};

// Semi-discrete system for a fixed grid, material, boundary tags and base
// dislocation field. Immutable after construction.
class SlabSystem {
public:
    SlabSystem(Grid1D grid, Material material, BoundaryCondition bc, std::vector<Tensor2> alpha);

    const Grid1D& grid() const { return grid_; }
    const Material& material() const { return material_; }
    const BoundaryCondition& bc() const { return bc_; }
    const std::vector<Tensor2>& alpha() const { return alpha_; }
    const NodeOperator& node_operator(int i) const { return ops_[i]; }

    FieldRates rhs(const FieldState& state) const;

    FieldState step_rk4(const FieldState& state, double dt) const;
    FieldState step_backward_euler(const FieldState& state, double dt) const;

    // Solves (lambda I - A_h) U = (f, g / rho), i.e.
    //   lambda eps - P (sym grad v - B_sym eps) = f
    //   lambda rho v - div(C : eps)            = g
    // by eliminating eps node by node and solving the banded SPD system for v.
    // Data are first projected onto the admissible space (g = 0 at clamped
    // ends, f projected at traction-free ends).
    ResolventSolution solve_resolvent(double lambda, std::span<const SymTensor2> f, std::span<const Vec3> g) const;

    // ||(lambda - A_h) U - F||_H / ||F||_H for the projected data F; the
    // absolute residual when F = 0.
    double resolvent_residual(double lambda, std::span<const SymTensor2> f, std::span<const Vec3> g,
                              const ResolventSolution& u) const;

    void project_admissible(std::vector<SymTensor2>& f, std::vector<Vec3>& g) const;

    double energy(const FieldState& state) const;
    double dissipation_rate(const FieldState& state) const;
    double max_constraint_residual(const FieldState& state) const;
    // Pointwise dislocation velocity V at node i.
    Vec3 velocity(int node, const SymTensor2& e) const { return ops_[node].velocity * e.packed(); }
    // Largest eigenvalue of B_sym in the energy inner product over all nodes.
    double max_dissipative_eigenvalue() const;

private:
    std::vector<Vec3> sbp_derivative(std::span<const Vec3> f) const;
    bool clamped(int node) const;
    bool traction_free(int node) const;

    Grid1D grid_;
    Material material_;
    BoundaryCondition bc_;
    std::vector<Tensor2> alpha_;
    std::vector<NodeOperator> ops_;
    Mat6 stiffness_;      // packed stress from packed strain
    Mat6 energy_metric_;  // eps:C:eps = e^T energy_metric e
};

// Free-function forms; each builds a SlabSystem from the state's alpha.
FieldRates rhs(const FieldState& state, const Grid1D& grid, const Material& material, const BoundaryCondition& bc);
FieldState step_rk4(const FieldState& state, const SimConfig& config);
FieldState step_backward_euler(const FieldState& state, const SimConfig& config);
double energy(const FieldState& state, const Material& material, const Grid1D& grid);
double dissipation_rate(const FieldState& state, const Material& material, const Grid1D& grid);

struct Snapshot {
    long step = 0;
    FieldState state;
};

struct SimRecord {
    std::vector<long> steps;
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> dissipation_rate;        // int |V|^2 dx
    std::vector<double> cumulative_dissipation;  // trapezoid in time over the samples
    std::vector<double> max_residual;            // max over nodes of |V|
    std::vector<Snapshot> snapshots;

    size_t size() const { return times.size(); }
};

struct RunResult {
    SimRecord record;
    FieldState final_state;
};

using StepObserver = std::function<void(long step, const FieldState& state)>;

// Integrates from t = 0 to t_end. The step is shrunk to t_end / ceil(t_end /
// dt) so the run ends exactly at t_end. Initial data pass through apply_bcs.
// Throws NumericalError with the step index when the state stops being finite.
RunResult run(const SimConfig& config, const StepObserver& observer = {});

// max_k |E(t_k) - E(0) + int_0^t_k Ddot ds| over the recorded samples.
double energy_budget(const SimRecord& record);

}  // namespace lfdd
