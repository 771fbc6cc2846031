#include "fpkfv/convergence.hpp"
#include "fpkfv/density.hpp"
#include "fpkfv/errors.hpp"
#include "fpkfv/generator.hpp"
#include "fpkfv/integrator.hpp"
#include "fpkfv/scenarios.hpp"
#include "fpkfv/steady.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

namespace fpkfv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mesh unit_periodic_grid(int n) {
    return build_structured_grid(0.0, 1.0, 0.0, 1.0, n, n, Topology::StructuredPeriodic);
}

DensityField sampled_exact_density(const Mesh& mesh, const ManufacturedProblem& p) {
    return DensityField::sample(mesh,
                                [&](double x, double y) { return p.pi_unnormalized(x, y); });
}

double chi2_weighted_error_sq(const DensityField& numeric, const DensityField& exact) {
    // sum (rho_i - pi_i)^2 / pi_i |C_i| over densities
    double acc = 0.0;
    for (int i = 0; i < numeric.size(); ++i) {
        const double d = numeric.density(i) - exact.density(i);
        acc += d * d / exact.density(i) * numeric.volume[i];
    }
    return acc;
}

void finish_slopes(ConvergenceStudy& study) {
    std::vector<double> lx, ly;
    for (size_t r = 0; r < study.rows.size(); ++r) {
        lx.push_back(std::log(study.rows[r].h));
        ly.push_back(std::log(study.rows[r].error_sq));
        if (r > 0) study.rows[r].running_slope = (ly[r] - ly[r - 1]) / (lx[r] - lx[r - 1]);
    }
    study.fitted_slope = fit_linear(lx, ly).slope;
}

} // namespace

double ManufacturedProblem::pi_unnormalized(double x, double y) const {
    return std::exp(-potential(x, y) / diffusion);
}

std::array<double, 2> ManufacturedProblem::drift(double x, double y) const {
    const auto grad = potential_gradient(x, y);
    double bx = -grad[0];
    double by = -grad[1];
    if (stream_gradient_x && stream_gradient_y) {
        const double pi_val = pi_unnormalized(x, y);
        bx += stream_gradient_y(x, y) / pi_val;
        by += -stream_gradient_x(x, y) / pi_val;
    }
    return {bx, by};
}

ManufacturedProblem reversible_gibbs_problem(double diffusion) {
    ManufacturedProblem p;
    p.diffusion = diffusion;
    p.potential = [](double x, double y) {
        return std::cos(kTwoPi * x) + 0.5 * std::cos(kTwoPi * y);
    };
    p.potential_gradient = [](double x, double y) -> std::array<double, 2> {
        return {-kTwoPi * std::sin(kTwoPi * x), -0.5 * kTwoPi * std::sin(kTwoPi * y)};
    };
    p.initial = [](double x, double y) {
        return 1.0 + 0.5 * std::sin(kTwoPi * x) * std::sin(kTwoPi * y);
    };
    return p;
}

ManufacturedProblem irreversible_cellular_problem(double diffusion, double stream_amplitude) {
    ManufacturedProblem p = reversible_gibbs_problem(diffusion);
    const double a = stream_amplitude;
    p.stream_gradient_x = [a](double x, double y) {
        return a * kTwoPi * std::cos(kTwoPi * x) * std::sin(kTwoPi * y);
    };
    p.stream_gradient_y = [a](double x, double y) {
        return a * kTwoPi * std::sin(kTwoPi * x) * std::cos(kTwoPi * y);
    };
    return p;
}

ConvergenceStudy steady_convergence_study(const ManufacturedProblem& problem,
                                          const std::vector<int>& grid_sizes) {
    ConvergenceStudy study;
    for (int n : grid_sizes) {
        const auto t0 = std::chrono::steady_clock::now();
        const Mesh mesh = unit_periodic_grid(n);
        const FaceField drift = sample_drift(
            mesh, VectorField2D([&](double x, double y) { return problem.drift(x, y); }));
        const Generator gen = build_upwind(mesh, drift, problem.diffusion);
        const SteadyResult steady = steady_direct(gen, std::max(2000, gen.n));
        const DensityField exact = sampled_exact_density(mesh, problem);

        StudyRow row;
        row.h = mesh_resolution(mesh);
        row.error_sq = chi2_weighted_error_sq(steady.pi_inf, exact);
        row.runtime_seconds = seconds_since(t0);
        study.rows.push_back(row);
    }
    finish_slopes(study);
    return study;
}

namespace {

// mass-average a fine solution (factor x factor blocks) onto the coarse grid
DensityField project_to_coarse(const DensityField& fine, const Mesh& fine_mesh,
                               const Mesh& coarse_mesh, int factor) {
    std::vector<double> mass(coarse_mesh.n_cells, 0.0);
    for (int iy = 0; iy < fine_mesh.ny; ++iy)
        for (int ix = 0; ix < fine_mesh.nx; ++ix)
            mass[coarse_mesh.cell_id(ix / factor, iy / factor)] +=
                fine.mass[fine_mesh.cell_id(ix, iy)];
    return DensityField::from_mass(coarse_mesh, std::move(mass));
}

DensityField evolve_to_time(const ManufacturedProblem& problem, const Mesh& mesh, double T) {
    const FaceField drift = sample_drift(
        mesh, VectorField2D([&](double x, double y) { return problem.drift(x, y); }));
    const Generator gen = build_upwind(mesh, drift, problem.diffusion);
    const double h = mesh_resolution(mesh);
    const long steps = static_cast<long>(std::ceil(T / h));
    const double dt = T / static_cast<double>(steps);
    const double a = choose_stabilizer(gen);

    DensityField m = DensityField::sample(mesh, problem.initial);
    for (long k = 0; k < steps; ++k) m = step_unconditional(m, gen, dt, a);
    return m;
}

} // namespace

ConvergenceStudy dynamic_convergence_study(const ManufacturedProblem& problem,
                                           const std::vector<int>& grid_sizes, double final_time,
                                           int refinement_factor) {
    if (refinement_factor < 2)
        throw validation_error("dynamic_convergence_study: refinement factor must be >= 2");

    ConvergenceStudy study;
    for (int n : grid_sizes) {
        const auto t0 = std::chrono::steady_clock::now();
        const Mesh coarse = unit_periodic_grid(n);
        const Mesh fine = unit_periodic_grid(n * refinement_factor);

        const DensityField coarse_sol = evolve_to_time(problem, coarse, final_time);
        const DensityField fine_sol = evolve_to_time(problem, fine, final_time);
        const DensityField reference = project_to_coarse(fine_sol, fine, coarse, refinement_factor);
        const DensityField weight = sampled_exact_density(coarse, problem);

        double err = 0.0;
        for (int i = 0; i < coarse.n_cells; ++i) {
            const double d = coarse_sol.density(i) - reference.density(i);
            err += d * d / weight.density(i) * coarse.cell_volume[i];
        }

        StudyRow row;
        row.h = mesh_resolution(coarse);
        row.error_sq = err;
        row.runtime_seconds = seconds_since(t0);
        study.rows.push_back(row);
    }
    finish_slopes(study);
    return study;
}

void write_study_csv(const std::optional<ConvergenceStudy>& steady,
                     const std::optional<ConvergenceStudy>& dynamic, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_study_csv: cannot write '" + path + "'");
    out << "h,err_steady_sq,err_dyn_sq,slope_running\n";
    out.precision(17);
    const size_t rows = steady ? steady->rows.size() : (dynamic ? dynamic->rows.size() : 0);
    for (size_t r = 0; r < rows; ++r) {
        const double h = steady ? steady->rows[r].h : dynamic->rows[r].h;
        out << h << ",";
        if (steady && r < steady->rows.size()) out << steady->rows[r].error_sq;
        else out << "nan";
        out << ",";
        if (dynamic && r < dynamic->rows.size()) out << dynamic->rows[r].error_sq;
        else out << "nan";
        const double slope = steady ? steady->rows[r].running_slope : dynamic->rows[r].running_slope;
        out << "," << slope << "\n";
    }
}

} // namespace fpkfv
