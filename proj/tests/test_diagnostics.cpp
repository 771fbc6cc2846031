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

TEST_CASE("reversible decompositions have no transport part") {
    const Mesh mesh = chain_mesh(2);
    const FaceField none{{0.0}};
    const Generator g = build_upwind(mesh, none, 1.0);
    const DensityField pi = mass_field({0.5, 0.5});
    const DensityField m = mass_field({0.8, 0.2});
    const DecompositionReport rep = decompose(g, mesh, pi, m);
    CHECK(rep.transport_part[0] == 0.0);
    CHECK(rep.steady_flux[0] == 0.0);
    CHECK(rep.flux[0] == doctest::Approx(rep.gradient_part[0]));
}

TEST_CASE("cyclic decomposition matches direct substitution") {
    const Mesh mesh = ring_mesh(3);
    const Generator g = cyclic_generator();
    const DensityField pi = mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3});
    const DensityField m = mass_field({0.5, 0.3, 0.2});
    const DecompositionReport rep = decompose(g, mesh, pi, m);

    // oracle by substitution: face (0,1): F_pi = 2/3 - 1/3 = 1/3,
    // g = 3 m, T = F_pi/2 (g_0 + g_1), alpha = 2/3 + 1/3 = 1
    const double g0 = 1.5, g1 = 0.9;
    CHECK(rep.steady_flux[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(rep.alpha[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.transport_part[0] == doctest::Approx((1.0 / 6) * (g0 + g1)).epsilon(1e-14));
    CHECK(rep.gradient_part[0] == doctest::Approx(0.5 * (g0 - g1)).epsilon(1e-14));

    // steady flux balances around every cell
    std::vector<double> net(3, 0.0);
    for (int f = 0; f < rep.n_faces(); ++f) {
        net[rep.face_cells[f][1]] += rep.steady_flux[f];
        net[rep.face_cells[f][0]] -= rep.steady_flux[f];
    }
    for (double v : net) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("flux reconstruction is exact for arbitrary states") {
    const Mesh mesh = build_structured_grid(0, 1, 0, 1, 9, 9, Topology::StructuredPeriodic);
    const FaceField drift = stream_velocity(mesh, cellular_stream(1.5, 3, 0, 1, 0, 1));
    const Generator g = build_upwind(mesh, drift, 0.3);
    const SteadyResult steady = steady_direct(g, 2000);

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    DensityField m{std::vector<double>(mesh.n_cells), mesh.cell_volume};
    for (double& v : m.mass) v = unif(rng);
    m.normalize();

    const DecompositionReport rep = decompose(g, mesh, steady.pi_inf, m);
    double scale = 0.0;
    for (int f = 0; f < rep.n_faces(); ++f)
        scale = std::max({scale, std::abs(rep.gradient_part[f]), std::abs(rep.transport_part[f])});
    for (int f = 0; f < rep.n_faces(); ++f) {
        const double rebuilt = rep.gradient_part[f] + rep.transport_part[f];
        CHECK(std::abs(rep.flux[f] - rebuilt) <= 1e-13 * scale);
    }
}

TEST_CASE("chi-square divergence hand values") {
    CHECK(chi2(mass_field({2.0 / 3, 1.0 / 3}), mass_field({2.0 / 3, 1.0 / 3})) == 0.0);
    // rho = (1/2,1/2), pi = (2/3,1/3) on unit cells
    const double v = chi2(mass_field({0.5, 0.5}), mass_field({2.0 / 3, 1.0 / 3}));
    CHECK(v == doctest::Approx(0.125).epsilon(1e-14));
    CHECK_THROWS_AS(chi2(mass_field({1.0, 0.0}), mass_field({1.0, 0.0})), validation_error);

    // the uncentered variant differs by exactly one for unit-mass inputs
    const double raw = chi2_uncentered(mass_field({0.5, 0.5}), mass_field({2.0 / 3, 1.0 / 3}));
    CHECK(raw - 1.0 == doctest::Approx(v).epsilon(1e-13));
}

TEST_CASE("kl divergence hand values and nonnegativity") {
    CHECK(kl_divergence(mass_field({0.5, 0.5}), mass_field({0.5, 0.5})) == 0.0);
    CHECK(kl_divergence(mass_field({1.0, 0.0}), mass_field({0.5, 0.5})) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        DensityField a = mass_field({unif(rng), unif(rng), unif(rng), unif(rng)});
        DensityField b = mass_field({unif(rng), unif(rng), unif(rng), unif(rng)});
        a.normalize();
        b.normalize();
        CHECK(kl_divergence(a, b) >= -1e-15);
    }
}

TEST_CASE("dirichlet form of the two-state symmetric walk") {
    const Mesh mesh = chain_mesh(2);
    const Generator g = build_upwind(mesh, FaceField{{0.0}}, 1.0);
    const DensityField pi = mass_field({0.5, 0.5});
    const DensityField m = mass_field({1.0, 0.0});
    const DecompositionReport rep = decompose(g, mesh, pi, m);
    // alpha = 1 per ordered pair, g = (2,0): (1/2) * 2 * 1 * (2-0)^2 = 4
    CHECK(dirichlet_form(rep, m, pi) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(rep.dirichlet == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("dirichlet form vanishes only at the steady state") {
    const Mesh mesh = ring_mesh(3);
    const Generator g = cyclic_generator();
    const DensityField pi = mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3});
    const DecompositionReport at_pi = decompose(g, mesh, pi, pi);
    CHECK(dirichlet_form(at_pi, pi, pi) == doctest::Approx(0.0));
    const DensityField off = mass_field({0.5, 0.25, 0.25});
    CHECK(dirichlet_form(at_pi, off, pi) > 0.0);
}

TEST_CASE("every two-state chain produces zero entropy") {
    const Generator g = dense_generator({{-1, 1}, {2, -2}});
    const EntropyProduction ep = entropy_production(g, mass_field({2.0 / 3, 1.0 / 3}));
    CHECK(ep.finite);
    CHECK(std::abs(ep.rate) <= 1e-15);
}

TEST_CASE("cyclic chain dissipates log 2") {
    const EntropyProduction ep =
        entropy_production(cyclic_generator(), mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK(ep.finite);
    CHECK(ep.rate == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("reversible Scharfetter-Gummel generator has no entropy production") {
    const Mesh mesh = build_structured_grid(-2, 2, 0, 1, 16, 1, Topology::StructuredNoFlux);
    const FaceField drift = sample_drift(mesh, VectorField2D([](double x, double) {
                                             return std::array<double, 2>{-x, 0.0};
                                         }));
    const Generator sg = build_b_scheme(mesh, drift, 1.0, BFunction::ScharfetterGummel);
    std::vector<double> gibbs(mesh.n_cells);
    for (int i = 0; i < mesh.n_cells; ++i)
        gibbs[i] = std::exp(-0.5 * mesh.center(i, 0) * mesh.center(i, 0));
    DensityField pi = DensityField::from_density(mesh, gibbs);
    pi.normalize();
    const EntropyProduction ep = entropy_production(sg, pi);
    CHECK(ep.finite);
    CHECK(ep.rate < 1e-12);
}

TEST_CASE("one-sided rates are flagged as non-finite entropy") {
    const Generator g = dense_generator({{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}});
    const EntropyProduction ep = entropy_production(g, mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK_FALSE(ep.finite);
    CHECK(std::isinf(ep.rate));
    CHECK(ep.flagged_pairs.size() == 3);
}

TEST_CASE("entropy production vanishes exactly when detailed balance holds") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        // random reversible chain: rates from a random measure and symmetric weights
        const int n = 5;
        std::vector<double> w(n);
        for (double& v : w) v = unif(rng);
        std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double s = unif(rng);
                q[i][j] = s / w[i];
                q[j][i] = s / w[j];
            }
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) sum += q[i][j];
            q[i][i] = -sum;
        }
        const Generator g = dense_generator(q);
        DensityField pi = mass_field(w);
        pi.normalize();

        const EntropyProduction ep = entropy_production(g, pi);
        CHECK(ep.finite);
        CHECK(ep.rate >= 0.0);
        CHECK(ep.rate <= 1e-10);
    }
}

TEST_CASE("entropy production is positive without detailed balance") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> q(4, std::vector<double>(4, 0.0));
        for (int i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) {
                    q[i][j] = unif(rng);
                    sum += q[i][j];
                }
            q[i][i] = -sum;
        }
        const Generator g = dense_generator(q);
        const SteadyResult steady = steady_direct(g);
        const EntropyProduction ep = entropy_production(g, steady.pi_inf);
        const double db = [&] {
            double worst = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    worst = std::max(worst, std::abs(g.rate_between(i, j) * steady.pi_inf.mass[i] -
                                                     g.rate_between(j, i) * steady.pi_inf.mass[j]));
            return worst;
        }();
        CHECK(ep.rate >= 0.0);
        if (db > 1e-10) CHECK(ep.rate > 0.0);
    }
}

TEST_CASE("transport never feeds the quadratic energy") {
    const Mesh mesh = ring_mesh(3);
    const Generator g = cyclic_generator();
    const DensityField pi = mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3});

    std::mt19937 rng(21);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DensityField m = mass_field({unif(rng), unif(rng), unif(rng)});
        m.normalize();
        const DecompositionReport rep = decompose(g, mesh, pi, m);
        const HamiltonianCheck check = hamiltonian_null_check(rep, m, pi);
        double scale = 0.0;
        for (double t : rep.transport_part) scale = std::max(scale, std::abs(t));
        CHECK(check.quadratic_sum <= 1e-13 * std::max(scale, 1.0));
    }
}

TEST_CASE("reversible transport sums are identically zero") {
    const Mesh mesh = chain_mesh(3);
    const Generator g = build_upwind(mesh, FaceField{{0.0, 0.0}}, 1.0);
    const SteadyResult steady = steady_direct(g);
    const DensityField m = mass_field({0.6, 0.3, 0.1});
    const DecompositionReport rep = decompose(g, mesh, steady.pi_inf, m);
    const HamiltonianCheck check =
        hamiltonian_null_check(rep, m, steady.pi_inf, [](double x) { return std::log(x) + 1.0; });
    CHECK(check.quadratic_sum <= 1e-14);
    CHECK(std::abs(check.phi_weighted_sum) <= 1e-14);
}

TEST_CASE("phi-weighted transport sum matches a direct summation oracle") {
    const Mesh mesh = build_structured_grid(0, 1, 0, 1, 6, 6, Topology::StructuredPeriodic);
    const FaceField drift = stream_velocity(mesh, cellular_stream(2.0, 2, 0, 1, 0, 1));
    const Generator g = build_upwind(mesh, drift, 0.5);
    const SteadyResult steady = steady_direct(g);

    std::mt19937 rng(77);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    DensityField m{std::vector<double>(mesh.n_cells), mesh.cell_volume};
    for (double& v : m.mass) v = unif(rng);
    m.normalize();

    const auto phi_prime = [](double x) { return std::log(x) + 1.0; };
    const DecompositionReport rep = decompose(g, mesh, steady.pi_inf, m);
    const HamiltonianCheck check = hamiltonian_null_check(rep, m, steady.pi_inf, phi_prime);

    // oracle: sum over ordered pairs of T_ij phi'(g_i) assembled from raw rates
    double expected = 0.0;
    for (int f = 0; f < mesh.n_faces(); ++f) {
        const auto [a, b] = rep.face_cells[f];
        const double wa = steady.pi_inf.mass[a], wb = steady.pi_inf.mass[b];
        const double fpi = g.rate_between(a, b) * wa - g.rate_between(b, a) * wb;
        const double ga = m.mass[a] / wa, gb = m.mass[b] / wb;
        expected += 0.5 * fpi * (ga + gb) * phi_prime(gb); // T into b
        expected += 0.5 * (-fpi) * (ga + gb) * phi_prime(ga); // T into a
    }
    CHECK(check.phi_weighted_sum == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("decomposition csv round trips through the expected header") {
    const Mesh mesh = ring_mesh(3);
    const DecompositionReport rep =
        decompose(cyclic_generator(), mesh, mass_field({1.0 / 3, 1.0 / 3, 1.0 / 3}),
                  mass_field({0.5, 0.3, 0.2}));
    const std::string path = (std::filesystem::temp_directory_path() / "decomp.csv").string();
    write_decomposition_csv(rep, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "face_i,face_j,alpha,F_pi,L,T");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
    std::remove(path.c_str());
}
