#ifndef FPKFV_STEADY_HPP
#define FPKFV_STEADY_HPP

#include <optional>
#include <string>

#include "fpkfv/density.hpp"
#include "fpkfv/generator.hpp"

namespace fpkfv {

struct SteadyResult {
    DensityField pi_inf;
    double residual = 0.0; // max_i |(Q^T w)_i| at the returned mass vector w
    long iterations = 0;
    std::optional<double> gap_estimate; // 1 - |mu_2| of the step operator
};

/// Fixed-point iteration of the unconditionally stable step from the uniform
/// start, stopped when the l1 step difference falls below tol * dt.
SteadyResult steady_power(const Generator& gen, double dt, double tol, long max_iter);

/// Null-space solve: one row of Q^T is replaced by the unit-mass constraint and
/// the system is LU-factorized (sparse). Guarded by a size cap since the study
/// grids can be raised explicitly.
SteadyResult steady_direct(const Generator& gen, int size_cap = 2000);

/// Second-eigenvalue estimate of the step operator K = I + dt Q/(1+a dt) by
/// power iteration deflated against the stationary direction. Returns
/// 1 - |mu_2|; throws convergence_error when the iteration stalls.
double estimate_gap(const Generator& gen, double dt, double a, const DensityField& pi_inf,
                    long max_iter = 20000, double tol = 1e-10);

/// CSV `cell_id,x,y,pi` for 2D meshes.
void write_steady_csv(const DensityField& pi_inf, const Mesh& mesh, const std::string& path);

} // namespace fpkfv

#endif
