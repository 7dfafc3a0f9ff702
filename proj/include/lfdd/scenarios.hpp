#pragma once

// Preset configurations with closed-form or brute-force reference solutions.

#include <functional>
#include <string>
#include <vector>

#include "lfdd/dynamics.hpp"

namespace lfdd {

struct Scenario {
    std::string name;
    std::string description;
    SimConfig config;
    // Reference state at time t (alpha included).
    std::function<FieldState(double t)> oracle{};
    // Residual of the oracle in the semi-discrete equations, checked when the
    // scenario is built; construction throws NumericalError above the tolerance.
    double oracle_residual = 0.0;
    double oracle_tolerance = 0.0;
    double angular_frequency = 0.0;    // oscillating_shear only
    double slowest_decay_rate = 0.0;   // dissipative_homogeneous only
};

// Shared time-stepping knobs. dt = cfl_fraction * h / c_max unless dt > 0.
struct TimeParams {
    Integrator integrator = Integrator::RK4;
    double cfl_fraction = 0.25;
    double dt = 0.0;
    int record_every = 1;
    int snapshot_every = 0;
};

struct StaticUniaxialParams {
    double sigma0 = 1.0;
    double lambda = 2.0;
    double mu = 3.0;
    double rho = 1.0;
    double slope = 1.0;  // A(x1) = slope * x1
    double x_left = 0.0;
    double x_right = 1.0;
    int n_nodes = 101;
    double transit_times = 10.0;  // t_end in units of L / c_max
    TimeParams time;
};

struct OscillatingShearParams {
    double mu = 0.5;
    double rho = 1.0;
    double x_left = 0.0;
    double length = 3.14159265358979323846;
    int mode = 1;
    double amplitude = 1.0;
    double slope = 1.0;
    int n_nodes = 201;
    double periods = 1.0;
    TimeParams time;
};

struct DissipativeHomogeneousParams {
    double mu = 1.0;
    double lambda = 0.0;
    double rho = 1.0;
    double g0 = 0.01;
    double alpha0 = 1.0;
    double x_left = 0.0;
    double x_right = 1.0;
    int n_nodes = 21;
    double decay_times = 50.0;  // t_end = decay_times / slowest decay rate
    TimeParams time;
};

Scenario static_uniaxial(const StaticUniaxialParams& p = {});
Scenario oscillating_shear(const OscillatingShearParams& p = {});
Scenario dissipative_homogeneous(const DissipativeHomogeneousParams& p = {});

struct ScenarioInfo {
    std::string name;
    std::string description;
};
std::vector<ScenarioInfo> list_scenarios();

// exp(a) by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

// ||a - b||_H / ||b||_H in the discrete energy norm (b = 0 gives the
// absolute norm of a).
double relative_energy_distance(const FieldState& a, const FieldState& b, const Grid1D& grid,
                                const Material& material);

}  // namespace lfdd
