#include "fpkfv/integrator.hpp"
#include "fpkfv/diagnostics.hpp"
#include "fpkfv/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

namespace fpkfv {

double choose_stabilizer(const Generator& gen) {
    const double max_rate = gen.max_exit_rate();
    if (max_rate <= 0.0) return 1.0;
    return 1.01 * max_rate;
}

DensityField step_unconditional(const DensityField& m, const Generator& gen, double dt, double a) {
    if (!(dt > 0.0)) throw validation_error("step_unconditional: dt must be positive");
    if (!(a > gen.max_exit_rate()))
        throw validation_error("step_unconditional: stabilizer too small (needs a > max exit rate)");

    const double factor = dt / (1.0 + a * dt);
    DensityField out = m;
    std::vector<double> incoming;
    gen.apply_transpose_offdiag(m.mass, incoming);
    for (int i = 0; i < gen.n; ++i) {
        // both terms nonnegative: the step is a convex redistribution
        out.mass[i] = (1.0 + factor * gen.diag[i]) * m.mass[i] + factor * incoming[i];
    }
    return out;
}

Trajectory evolve(const DensityField& m0, const Generator& gen, const StepperConfig& cfg,
                  const std::vector<Probe>& probes) {
    if (!(cfg.dt > 0.0)) throw validation_error("evolve: dt must be positive");
    const double a = cfg.stabilizer > 0.0 ? cfg.stabilizer : choose_stabilizer(gen);

    Trajectory traj;
    traj.probe_names.reserve(probes.size());
    for (const auto& p : probes) traj.probe_names.push_back(p.name);
    traj.probe_values.resize(probes.size());

    DensityField m = m0;
    for (long step = 0; step <= cfg.n_steps; ++step) {
        const double t = step * cfg.dt;
        traj.steps.push_back(step);
        traj.times.push_back(t);
        for (size_t k = 0; k < probes.size(); ++k) {
            const double v = probes[k].eval(m, step, t);
            if (!std::isfinite(v))
                throw convergence_error("evolve: probe '" + probes[k].name +
                                            "' returned a non-finite value at step " +
                                            std::to_string(step),
                                        v);
            traj.probe_values[k].push_back(v);
        }
        if (step == 0 || (cfg.record_every > 0 && step % cfg.record_every == 0)) {
            traj.snapshot_steps.push_back(step);
            traj.snapshots.push_back(m);
        }
        if (step < cfg.n_steps) m = step_unconditional(m, gen, cfg.dt, a);
    }
    return traj;
}

DensityField step_reference(const DensityField& m, const Generator& gen, double dt) {
    const double max_rate = gen.max_exit_rate();
    if (std::abs(dt) * max_rate >= 0.5)
        throw validation_error("step_reference: |dt| too large for the reference integrator");

    const int n = gen.n;
    std::vector<double> k1, k2, k3, k4, tmp(n);
    gen.apply_transpose(m.mass, k1);
    for (int i = 0; i < n; ++i) tmp[i] = m.mass[i] + 0.5 * dt * k1[i];
    gen.apply_transpose(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = m.mass[i] + 0.5 * dt * k2[i];
    gen.apply_transpose(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = m.mass[i] + dt * k3[i];
    gen.apply_transpose(tmp, k4);

    DensityField out = m;
    for (int i = 0; i < n; ++i)
        out.mass[i] = m.mass[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

std::vector<Probe> standard_probes(const Generator& gen, const Mesh& mesh,
                                   const DensityField& pi_inf) {
    // alpha is state-independent; build it once and close over it
    auto base = std::make_shared<DecompositionReport>(decompose(gen, mesh, pi_inf, pi_inf));
    DensityField pi_copy = pi_inf;

    std::vector<Probe> probes;
    probes.push_back({"chi2", [pi_copy](const DensityField& m, long, double) {
                          return chi2(m, pi_copy);
                      }});
    probes.push_back({"l1_to_steady", [pi_copy](const DensityField& m, long, double) {
                          return l1_distance(m, pi_copy);
                      }});
    probes.push_back({"dirichlet", [base, pi_copy](const DensityField& m, long, double) {
                          return dirichlet_form(*base, m, pi_copy);
                      }});
    probes.push_back({"mass_total", [](const DensityField& m, long, double) {
                          return m.total_mass();
                      }});
    probes.push_back({"min_density", [](const DensityField& m, long, double) {
                          double v = std::numeric_limits<double>::infinity();
                          for (int i = 0; i < m.size(); ++i) v = std::min(v, m.density(i));
                          return v;
                      }});
    return probes;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_trajectory_csv: cannot write '" + path + "'");
    out << "step,time";
    for (const auto& name : traj.probe_names) out << "," << name;
    out << "\n";
    out.precision(17);
    for (size_t i = 0; i < traj.steps.size(); ++i) {
        out << traj.steps[i] << "," << traj.times[i];
        for (const auto& column : traj.probe_values) out << "," << column[i];
        out << "\n";
    }
}

} // namespace fpkfv
