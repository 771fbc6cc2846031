#ifndef FPKFV_CONVERGENCE_HPP
#define FPKFV_CONVERGENCE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpkfv/mesh.hpp"
#include "fpkfv/velocity.hpp"

namespace fpkfv {

/// Manufactured problem on the periodic unit square with a known invariant
/// density pi ~ exp(-potential/D). The drift is assembled as
///   b = -grad(potential) + u / pi,   u = (psi_y, -psi_x),
/// which keeps pi invariant for any stream function psi; psi = 0 gives the
/// reversible case with exact Gibbs steady state.
struct ManufacturedProblem {
    double diffusion = 1.0;
    ScalarField2D potential;
    VectorField2D potential_gradient;
    ScalarField2D stream_gradient_x; // psi_x (zero for reversible problems)
    ScalarField2D stream_gradient_y; // psi_y
    ScalarField2D initial;           // unnormalized rho_0 shape

    double pi_unnormalized(double x, double y) const;
    std::array<double, 2> drift(double x, double y) const;
};

/// The reversible Gibbs case: b = -D grad(phi), pi ~ exp(-phi/D).
ManufacturedProblem reversible_gibbs_problem(double diffusion = 1.0);
/// Adds an incompressible cellular transport on top of the Gibbs measure.
ManufacturedProblem irreversible_cellular_problem(double diffusion = 1.0,
                                                  double stream_amplitude = 0.3);

struct StudyRow {
    double h = 0.0;
    double error_sq = 0.0; // squared chi^2-weighted error
    double runtime_seconds = 0.0;
    double running_slope = 0.0; // slope vs the previous row (0 for the first)
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;
    double fitted_slope = 0.0; // least-squares slope of log(error_sq) vs log(h)
};

/// Steady-state accuracy under refinement: numerical steady state of the
/// upwind generator vs the sampled exact density, error
/// sum_i (pi^inf_i - pi(y_i))^2 / pi(y_i) |C_i| per grid.
ConvergenceStudy steady_convergence_study(const ManufacturedProblem& problem,
                                          const std::vector<int>& grid_sizes);

/// Dynamic accuracy at a fixed time T against a refined self-reference
/// (refinement_factor x finer in each direction, mass-averaged back onto the
/// coarse grid); dt is tied to h on every grid.
ConvergenceStudy dynamic_convergence_study(const ManufacturedProblem& problem,
                                           const std::vector<int>& grid_sizes, double final_time,
                                           int refinement_factor = 4);

/// Merged CSV `h,err_steady_sq,err_dyn_sq,slope_running` (missing study: nan).
void write_study_csv(const std::optional<ConvergenceStudy>& steady,
                     const std::optional<ConvergenceStudy>& dynamic, const std::string& path);

} // namespace fpkfv

#endif
