#include "fpkfv/diagnostics.hpp"
#include "fpkfv/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace fpkfv {

namespace {

void require_positive(const DensityField& pi, const char* who) {
    for (int i = 0; i < pi.size(); ++i)
        if (!(pi.mass[i] > 0.0))
            throw validation_error(std::string(who) + ": steady measure not strictly positive at cell " +
                                   std::to_string(i));
}

} // namespace

DecompositionReport decompose(const Generator& gen, const Mesh& mesh, const DensityField& pi_inf,
                              const DensityField& m) {
    require_positive(pi_inf, "decompose");

    DecompositionReport rep;
    const int nf = mesh.n_faces();
    rep.face_cells.resize(nf);
    rep.alpha.resize(nf);
    rep.steady_flux.resize(nf);
    rep.gradient_part.resize(nf);
    rep.transport_part.resize(nf);
    rep.flux.resize(nf);

    for (int f = 0; f < nf; ++f) {
        const Face& face = mesh.faces[f];
        const int a = face.cell_a, b = face.cell_b;
        const double qab = gen.rate_between(a, b);
        const double qba = gen.rate_between(b, a);
        const double wa = pi_inf.mass[a], wb = pi_inf.mass[b];
        const double ga = m.mass[a] / wa, gb = m.mass[b] / wb;

        rep.face_cells[f] = {a, b};
        rep.alpha[f] = qab * wa + qba * wb;
        rep.steady_flux[f] = qab * wa - qba * wb;
        rep.gradient_part[f] = 0.5 * rep.alpha[f] * (ga - gb);
        rep.transport_part[f] = 0.5 * rep.steady_flux[f] * (ga + gb);
        rep.flux[f] = qab * m.mass[a] - qba * m.mass[b];
    }

    rep.chi2 = chi2(m, pi_inf);
    rep.kl = kl_divergence(m, pi_inf);
    rep.dirichlet = dirichlet_form(rep, m, pi_inf);
    return rep;
}

double chi2(const DensityField& m, const DensityField& pi_inf) {
    require_positive(pi_inf, "chi2");
    double acc = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double d = m.mass[i] - pi_inf.mass[i];
        acc += d * d / pi_inf.mass[i];
    }
    return acc;
}

double chi2_uncentered(const DensityField& m, const DensityField& pi_inf) {
    require_positive(pi_inf, "chi2_uncentered");
    double acc = 0.0;
    for (int i = 0; i < m.size(); ++i) acc += m.mass[i] * m.mass[i] / pi_inf.mass[i];
    return acc;
}

double kl_divergence(const DensityField& m, const DensityField& pi_inf) {
    require_positive(pi_inf, "kl_divergence");
    double acc = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        if (m.mass[i] > 0.0) acc += m.mass[i] * std::log(m.mass[i] / pi_inf.mass[i]);
    }
    return acc;
}

double dirichlet_form(const DecompositionReport& report, const DensityField& m,
                      const DensityField& pi_inf) {
    // one stored face covers both orientations: (1/2) * 2 * alpha (dg)^2
    double acc = 0.0;
    for (int f = 0; f < report.n_faces(); ++f) {
        const auto [a, b] = report.face_cells[f];
        const double dg = m.mass[b] / pi_inf.mass[b] - m.mass[a] / pi_inf.mass[a];
        acc += report.alpha[f] * dg * dg;
    }
    return acc;
}

EntropyProduction entropy_production(const Generator& gen, const DensityField& pi_inf) {
    require_positive(pi_inf, "entropy_production");

    // gather both directed rates per unordered pair
    std::map<std::pair<int, int>, std::array<double, 2>> pairs;
    for (int i = 0; i < gen.n; ++i)
        for (int k = gen.row_ptr[i]; k < gen.row_ptr[i + 1]; ++k) {
            const int j = gen.col[k];
            auto key = std::minmax(i, j);
            auto& slot = pairs[{key.first, key.second}];
            slot[i < j ? 0 : 1] = gen.rate[k];
        }

    EntropyProduction out;
    for (const auto& [key, rates] : pairs) {
        const double fwd = rates[0] * pi_inf.mass[key.first];
        const double bwd = rates[1] * pi_inf.mass[key.second];
        if (fwd > 0.0 && bwd > 0.0) {
            out.rate += (fwd - bwd) * std::log(fwd / bwd);
        } else if (fwd > 0.0 || bwd > 0.0) {
            out.finite = false;
            out.flagged_pairs.push_back(key);
        }
    }
    if (!out.finite) out.rate = std::numeric_limits<double>::infinity();
    return out;
}

HamiltonianCheck hamiltonian_null_check(const DecompositionReport& report, const DensityField& m,
                                        const DensityField& pi_inf,
                                        const std::function<double(double)>& phi_prime) {
    require_positive(pi_inf, "hamiltonian_null_check");
    HamiltonianCheck out;
    double quad = 0.0, phis = 0.0;
    for (int f = 0; f < report.n_faces(); ++f) {
        const auto [a, b] = report.face_cells[f];
        const double ga = m.mass[a] / pi_inf.mass[a];
        const double gb = m.mass[b] / pi_inf.mass[b];
        const double t = report.transport_part[f];
        quad += t * (gb - ga);
        if (phi_prime) phis += t * (phi_prime(gb) - phi_prime(ga));
    }
    out.quadratic_sum = std::abs(quad);
    out.phi_weighted_sum = phis;
    return out;
}

void write_decomposition_csv(const DecompositionReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_decomposition_csv: cannot write '" + path + "'");
    out << "face_i,face_j,alpha,F_pi,L,T\n";
    out.precision(17);
    for (int f = 0; f < report.n_faces(); ++f)
        out << report.face_cells[f][0] << "," << report.face_cells[f][1] << "," << report.alpha[f]
            << "," << report.steady_flux[f] << "," << report.gradient_part[f] << ","
            << report.transport_part[f] << "\n";
}

} // namespace fpkfv
