#ifndef FPKFV_INTEGRATOR_HPP
#define FPKFV_INTEGRATOR_HPP

#include <functional>
#include <string>
#include <vector>

#include "fpkfv/density.hpp"
#include "fpkfv/generator.hpp"

namespace fpkfv {

struct StepperConfig {
    double dt = 0.01;
    double stabilizer = 0.0; // 0 means: pick with choose_stabilizer
    long n_steps = 0;
    long record_every = 0; // 0 = no mass snapshots
};

/// a = 1.01 max_i(-Q_ii); the minimal strict margin keeps the spectral gap of
/// the step operator as large as possible. All-zero generators get a = 1.
double choose_stabilizer(const Generator& gen);

/// One step of m' = m + dt/(1+a dt) Q^T m. Positivity- and mass-preserving for
/// every dt > 0 as long as a exceeds the max exit rate.
DensityField step_unconditional(const DensityField& m, const Generator& gen, double dt, double a);

struct Probe {
    std::string name;
    std::function<double(const DensityField& m, long step, double time)> eval;
};

struct Trajectory {
    std::vector<std::string> probe_names;
    std::vector<long> steps;
    std::vector<double> times;
    std::vector<std::vector<double>> probe_values; // probe_values[k][i] = probe k at steps[i]
    std::vector<long> snapshot_steps;
    std::vector<DensityField> snapshots;
};

/// Runs n_steps of step_unconditional, recording every probe each step and a
/// mass snapshot every record_every steps (the initial state is always row 0).
/// A probe returning a non-finite value aborts with the step index.
Trajectory evolve(const DensityField& m0, const Generator& gen, const StepperConfig& cfg,
                  const std::vector<Probe>& probes);

/// Classical 4-stage explicit step on dm/dt = Q^T m, used only to verify the
/// semi-discrete dissipation identities at small dt. Requires
/// |dt| * max_exit_rate < 0.5; negative dt integrates backward.
DensityField step_reference(const DensityField& m, const Generator& gen, double dt);

/// The probe set behind the standard CSV columns
/// (chi2, l1_to_steady, dirichlet, mass_total, min_density).
std::vector<Probe> standard_probes(const Generator& gen, const Mesh& mesh,
                                   const DensityField& pi_inf);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

} // namespace fpkfv

#endif
