#include "fpkfv/steady.hpp"
#include "fpkfv/errors.hpp"
#include "fpkfv/integrator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <limits>

namespace fpkfv {

SteadyResult steady_power(const Generator& gen, double dt, double tol, long max_iter) {
    if (!(dt > 0.0) || !(tol > 0.0)) throw validation_error("steady_power: dt and tol must be positive");

    const double a = choose_stabilizer(gen);
    DensityField m{std::vector<double>(gen.n, 0.0), gen.cell_volume};
    for (int i = 0; i < gen.n; ++i) m.mass[i] = 1.0 / gen.n;

    double diff = std::numeric_limits<double>::infinity();
    long it = 0;
    for (; it < max_iter; ++it) {
        DensityField next = step_unconditional(m, gen, dt, a);
        diff = l1_distance(next, m);
        m = std::move(next);
        if (diff < tol * dt) break;
    }
    if (diff >= tol * dt)
        throw convergence_error("steady_power: no convergence after " + std::to_string(max_iter) +
                                    " iterations",
                                gen.stationarity_residual(m));

    m.normalize();
    SteadyResult out{std::move(m), 0.0, it + 1, std::nullopt};
    out.residual = gen.stationarity_residual(out.pi_inf);
    return out;
}

SteadyResult steady_direct(const Generator& gen, int size_cap) {
    if (gen.n > size_cap)
        throw validation_error("steady_direct: generator size " + std::to_string(gen.n) +
                               " exceeds cap " + std::to_string(size_cap));

    // Q^T w = 0 with the first equation replaced by sum_i w_i = 1
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(gen.rate.size() + 2 * gen.n);
    for (int j = 0; j < gen.n; ++j) {
        if (j != 0) trips.emplace_back(j, j, gen.diag[j]);
        for (int k = gen.row_ptr[j]; k < gen.row_ptr[j + 1]; ++k) {
            const int i = gen.col[k];
            if (i != 0) trips.emplace_back(i, j, gen.rate[k]);
        }
    }
    for (int j = 0; j < gen.n; ++j) trips.emplace_back(0, j, 1.0);

    Eigen::SparseMatrix<double> A(gen.n, gen.n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw convergence_error("steady_direct: LU factorization failed (reducible or "
                                "ill-conditioned generator)",
                                std::numeric_limits<double>::quiet_NaN());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(gen.n);
    rhs[0] = 1.0;
    Eigen::VectorXd w = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw convergence_error("steady_direct: solve failed",
                                std::numeric_limits<double>::quiet_NaN());

    DensityField pi{std::vector<double>(w.data(), w.data() + gen.n), gen.cell_volume};
    pi.normalize();
    SteadyResult out{std::move(pi), 0.0, 0, std::nullopt};
    out.residual = gen.stationarity_residual(out.pi_inf);
    return out;
}

namespace {

// deterministic start vector, orthogonal to the all-ones left eigenvector
std::vector<double> deflated_seed(int n) {
    std::vector<double> v(n);
    uint64_t s = 0x9e3779b97f4a7c15ull;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        s ^= s >> 30;
        s *= 0xbf58476d1ce4e5b9ull;
        s ^= s >> 27;
        s *= 0x94d049bb133111ebull;
        s ^= s >> 31;
        v[i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
        mean += v[i];
    }
    mean /= n;
    for (double& x : v) x -= mean;
    return v;
}

} // namespace

double estimate_gap(const Generator& gen, double dt, double a, const DensityField& pi_inf,
                    long max_iter, double tol) {
    if (!(a > gen.max_exit_rate())) throw validation_error("estimate_gap: stabilizer too small");
    const double factor = dt / (1.0 + a * dt);

    std::vector<double> v = deflated_seed(gen.n), qv;
    const long window = 50; // geometric mean over a window averages out complex-pair rotation
    std::vector<double> cumulative{0.0};
    double prev_estimate = -1.0;

    for (long it = 1; it <= max_iter; ++it) {
        gen.apply_transpose(v, qv);
        double total = 0.0;
        for (int i = 0; i < gen.n; ++i) {
            v[i] += factor * qv[i];
            total += v[i];
        }
        // deflate the stationary direction (left eigenvector is all-ones)
        double norm = 0.0;
        for (int i = 0; i < gen.n; ++i) {
            v[i] -= total * pi_inf.mass[i];
            norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) return 1.0; // iterate collapsed: spectrum below resolution
        cumulative.push_back(cumulative.back() + std::log(norm));
        for (int i = 0; i < gen.n; ++i) v[i] /= norm;

        if (it >= window && it % window == 0) {
            const double estimate = std::exp((cumulative[it] - cumulative[it - window]) / window);
            if (prev_estimate >= 0.0 && std::abs(estimate - prev_estimate) < tol)
                return 1.0 - estimate;
            prev_estimate = estimate;
        }
    }
    throw convergence_error("estimate_gap: power iteration did not settle",
                            prev_estimate >= 0.0 ? 1.0 - prev_estimate
                                                 : std::numeric_limits<double>::quiet_NaN());
}

void write_steady_csv(const DensityField& pi_inf, const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_steady_csv: cannot write '" + path + "'");
    out << "cell_id,x,y,pi\n";
    out.precision(17);
    for (int i = 0; i < mesh.n_cells; ++i) {
        const double x = mesh.center(i, 0);
        const double y = mesh.dim > 1 ? mesh.center(i, 1) : 0.0;
        out << i << "," << x << "," << y << "," << pi_inf.density(i) << "\n";
    }
}

} // namespace fpkfv
