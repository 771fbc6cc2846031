#include "fpkfv/density.hpp"
#include "fpkfv/errors.hpp"

#include <cmath>
#include <numeric>

namespace fpkfv {

double DensityField::total_mass() const {
    // compensated sum: the unit-mass invariant is checked at 1e-14
    double sum = 0.0, carry = 0.0;
    for (double v : mass) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double DensityField::min_mass() const {
    double m = mass.empty() ? 0.0 : mass[0];
    for (double v : mass) m = std::min(m, v);
    return m;
}

void DensityField::normalize() {
    const double total = total_mass();
    if (!(total > 0.0) || !std::isfinite(total))
        throw validation_error("DensityField::normalize: total mass is not positive");
    for (double& v : mass) v /= total;
}

DensityField DensityField::from_mass(const Mesh& mesh, std::vector<double> mass) {
    if (static_cast<int>(mass.size()) != mesh.n_cells)
        throw validation_error("DensityField::from_mass: size mismatch");
    return {std::move(mass), mesh.cell_volume};
}

DensityField DensityField::from_density(const Mesh& mesh, const std::vector<double>& rho) {
    if (static_cast<int>(rho.size()) != mesh.n_cells)
        throw validation_error("DensityField::from_density: size mismatch");
    DensityField out{std::vector<double>(mesh.n_cells), mesh.cell_volume};
    for (int i = 0; i < mesh.n_cells; ++i) out.mass[i] = rho[i] * mesh.cell_volume[i];
    return out;
}

DensityField DensityField::sample(const Mesh& mesh,
                                  const std::function<double(double, double)>& rho) {
    if (mesh.dim != 2) throw validation_error("DensityField::sample: 2D mesh required");
    DensityField out{std::vector<double>(mesh.n_cells), mesh.cell_volume};
    for (int i = 0; i < mesh.n_cells; ++i)
        out.mass[i] = rho(mesh.center(i, 0), mesh.center(i, 1)) * mesh.cell_volume[i];
    out.normalize();
    return out;
}

DensityField DensityField::uniform(const Mesh& mesh) {
    DensityField out{mesh.cell_volume, mesh.cell_volume};
    out.normalize();
    return out;
}

double l1_distance(const DensityField& a, const DensityField& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.mass.size(); ++i) d += std::abs(a.mass[i] - b.mass[i]);
    return d;
}

} // namespace fpkfv
