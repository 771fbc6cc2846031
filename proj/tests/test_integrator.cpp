#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fpkfv/diagnostics.hpp"
#include "fpkfv/errors.hpp"
#include "fpkfv/generator.hpp"
#include "fpkfv/integrator.hpp"
#include "fpkfv/scenarios.hpp"
#include "fpkfv/steady.hpp"
#include "fpkfv/velocity.hpp"
#include "test_support.hpp"

using namespace fpkfv;
using namespace fpkfv::testing;

TEST_CASE("stabilizer sits one percent above the max exit rate") {
    CHECK(choose_stabilizer(dense_generator({{-1, 1}, {1, -1}})) == doctest::Approx(1.01));
    CHECK(choose_stabilizer(dense_generator({{0.0}})) == 1.0);

    const Mesh m = build_structured_grid(-3, 4, -3, 3, 40, 40, Topology::StructuredNoFlux);
    const Generator g = build_upwind(m, sample_drift(m, vdp_drift(10.0, 0.0)), 0.1);
    const double a = choose_stabilizer(g);
    CHECK(a > g.max_exit_rate());
    CHECK(a <= 1.01 * g.max_exit_rate() * (1.0 + 1e-14));
}

TEST_CASE("one stable step matches the hand-evaluated kernel") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});
    const DensityField m = mass_field({1.0, 0.0});
    const DensityField next = step_unconditional(m, g, 1.0, 2.02);
    CHECK(next.mass[0] == doctest::Approx(1.0 - 1.0 / 3.02).epsilon(1e-15));
    CHECK(next.mass[1] == doctest::Approx(1.0 / 3.02).epsilon(1e-15));
}

TEST_CASE("steady mass is a fixed point for any step size") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});
    const DensityField pi = mass_field({2.0 / 3.0, 1.0 / 3.0});
    for (double dt : {1e-3, 1.0, 10.0, 1e3}) {
        const DensityField next = step_unconditional(pi, g, dt, 2.02);
        CHECK(std::abs(next.mass[0] - pi.mass[0]) <= 1e-14);
        CHECK(std::abs(next.mass[1] - pi.mass[1]) <= 1e-14);
    }
}

TEST_CASE("a too-small stabilizer is rejected") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});
    CHECK_THROWS_AS(step_unconditional(mass_field({1.0, 0.0}), g, 1.0, 1.5), validation_error);
}

TEST_CASE("positivity and mass survive wildly large steps") {
    const Mesh mesh = build_structured_grid(-4.5, 4.5, -4.5, 4.5, 30, 30, Topology::StructuredNoFlux);
    const DensityField pi = triple_banana_density(mesh);
    const FaceField u = stream_velocity(mesh, cellular_stream(0.1, 8, -4.5, 4.5, -4.5, 4.5));
    const Generator g = build_pi_symmetric(mesh, u, pi, 0.5);
    const double a = choose_stabilizer(g);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double dt : {1e-3, 1.0, 10.0, 1e3}) {
        DensityField m{std::vector<double>(mesh.n_cells), mesh.cell_volume};
        for (double& v : m.mass) v = unif(rng);
        m.normalize();
        for (int k = 0; k < 10; ++k) {
            const DensityField next = step_unconditional(m, g, dt, a);
            CHECK(next.min_mass() >= 0.0);
            CHECK(std::abs(next.total_mass() - m.total_mass()) <= 1e-14);
            m = next;
        }
    }
}

TEST_CASE("stable steps contract in l1") {
    const Mesh mesh = build_structured_grid(0, 1, 0, 1, 8, 8, Topology::StructuredPeriodic);
    const FaceField drift = stream_velocity(mesh, cellular_stream(2.0, 2, 0, 1, 0, 1));
    const Generator g = build_upwind(mesh, drift, 0.6);
    const double a = choose_stabilizer(g);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DensityField ma{std::vector<double>(mesh.n_cells), mesh.cell_volume};
        DensityField mb = ma;
        for (int i = 0; i < mesh.n_cells; ++i) {
            ma.mass[i] = unif(rng);
            mb.mass[i] = unif(rng);
        }
        ma.normalize();
        mb.normalize();
        const double dt = std::pow(10.0, -2.0 + 4.0 * unif(rng));
        const double before = l1_distance(ma, mb);
        const double after = l1_distance(step_unconditional(ma, g, dt, a),
                                         step_unconditional(mb, g, dt, a));
        CHECK(after <= before * (1.0 + 1e-14));
    }
}

TEST_CASE("chi-square divergence is non-increasing along the evolution") {
    const Generator g = dense_generator({{-2, 1, 1}, {1, -3, 2}, {3, 1, -4}});
    const SteadyResult steady = steady_direct(g);
    DensityField m = mass_field({0.7, 0.25, 0.05});
    const double a = choose_stabilizer(g);
    double prev = chi2(m, steady.pi_inf);
    for (int k = 0; k < 200; ++k) {
        m = step_unconditional(m, g, 0.5, a);
        const double cur = chi2(m, steady.pi_inf);
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("evolve records probes and snapshots") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});
    const DensityField m0 = mass_field({1.0, 0.0});

    SUBCASE("zero steps returns just the start") {
        const Trajectory t = evolve(m0, g, {0.1, 0.0, 0, 1}, {});
        REQUIRE(t.snapshots.size() == 1);
        CHECK(t.snapshots[0].mass[0] == 1.0);
    }
    SUBCASE("probe columns are dense, snapshots sparse") {
        std::vector<Probe> probes{{"total", [](const DensityField& m, long, double) {
                                       return m.total_mass();
                                   }}};
        const Trajectory t = evolve(m0, g, {0.1, 0.0, 10, 5}, probes);
        CHECK(t.probe_values[0].size() == 11);
        CHECK(t.snapshot_steps == std::vector<long>{0, 5, 10});
    }
    SUBCASE("a probe surfacing non-finite values aborts with the step index") {
        std::vector<Probe> probes{{"bad", [](const DensityField&, long step, double) {
                                       return step >= 3 ? std::nan("") : 0.0;
                                   }}};
        CHECK_THROWS_WITH_AS(evolve(m0, g, {0.1, 0.0, 10, 0}, probes), doctest::Contains("step 3"),
                             convergence_error);
    }
}

TEST_CASE("two evolutions never separate in l1") {
    const Mesh mesh = build_structured_grid(-4.5, 4.5, -4.5, 4.5, 16, 16, Topology::StructuredNoFlux);
    const DensityField pi = triple_banana_density(mesh);
    const Generator g = build_pi_symmetric(mesh, stream_velocity(mesh, [](double, double) {
                                               return 0.0;
                                           }),
                                           pi, 0.5);
    const double a = choose_stabilizer(g);

    DensityField ma = gaussian_mixture_init(mesh);
    DensityField mb = pi;
    double prev = l1_distance(ma, mb);
    for (int k = 0; k < 300; ++k) {
        ma = step_unconditional(ma, g, 0.01, a);
        mb = step_unconditional(mb, g, 0.01, a);
        const double cur = l1_distance(ma, mb);
        CHECK(cur <= prev * (1.0 + 1e-13));
        prev = cur;
    }
}

TEST_CASE("reference integrator preserves steady states and matches the matrix exponential") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});

    SUBCASE("steady input is unchanged") {
        const DensityField pi = mass_field({2.0 / 3.0, 1.0 / 3.0});
        const DensityField next = step_reference(pi, g, 0.1);
        CHECK(next.mass[0] == doctest::Approx(pi.mass[0]).epsilon(1e-12));
        CHECK(next.mass[1] == doctest::Approx(pi.mass[1]).epsilon(1e-12));
    }
    SUBCASE("two-state closed form") {
        // exp(Q^T t) on mass (1,0): m_0(t) = 2/3 + 1/3 exp(-3t)
        const DensityField m0 = mass_field({1.0, 0.0});
        DensityField m = m0;
        const double dt = 0.01;
        for (int k = 0; k < 10; ++k) m = step_reference(m, g, dt);
        const double expected = 2.0 / 3.0 + std::exp(-3.0 * 0.1) / 3.0;
        CHECK(m.mass[0] == doctest::Approx(expected).epsilon(1e-8));
        CHECK(m.mass[1] == doctest::Approx(1.0 - expected).epsilon(1e-8));
    }
    SUBCASE("step size guard") {
        CHECK_THROWS_AS(step_reference(mass_field({1.0, 0.0}), g, 0.3), validation_error);
    }
}

TEST_CASE("chi-square decay rate at time zero equals the negative Dirichlet form") {
    const Mesh mesh = build_structured_grid(0, 1, 0, 1, 12, 12, Topology::StructuredPeriodic);
    const FaceField drift = stream_velocity(mesh, cellular_stream(1.0, 2, 0, 1, 0, 1));
    const Generator g = build_upwind(mesh, drift, 0.5);
    const SteadyResult steady = steady_direct(g, 2000);

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    DensityField m{std::vector<double>(mesh.n_cells), mesh.cell_volume};
    for (int i = 0; i < mesh.n_cells; ++i) m.mass[i] = steady.pi_inf.mass[i] * unif(rng);
    m.normalize();

    const double dt = 1e-4 / g.max_exit_rate();
    const DensityField plus = step_reference(m, g, dt);
    const DensityField minus = step_reference(m, g, -dt);
    const double slope = (chi2(plus, steady.pi_inf) - chi2(minus, steady.pi_inf)) / (2.0 * dt);

    const DecompositionReport report = decompose(g, mesh, steady.pi_inf, m);
    const double dirichlet = dirichlet_form(report, m, steady.pi_inf);
    CHECK(-slope == doctest::Approx(dirichlet).epsilon(1e-4));
}

TEST_CASE("trajectory csv uses the standard column layout") {
    const Mesh mesh = build_structured_grid(-4.5, 4.5, -4.5, 4.5, 8, 8, Topology::StructuredNoFlux);
    const DensityField pi = triple_banana_density(mesh);
    const Generator g = build_pi_symmetric(mesh, stream_velocity(mesh, [](double, double) {
                                               return 0.0;
                                           }),
                                           pi, 0.5);
    const Trajectory t = evolve(gaussian_mixture_init(mesh), g, {0.01, 0.0, 5, 0},
                                standard_probes(g, mesh, pi));

    const std::string path = (std::filesystem::temp_directory_path() / "traj.csv").string();
    write_trajectory_csv(t, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,time,chi2,l1_to_steady,dirichlet,mass_total,min_density");
    std::remove(path.c_str());
}
