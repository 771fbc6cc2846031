#ifndef FPKFV_VELOCITY_HPP
#define FPKFV_VELOCITY_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpkfv/mesh.hpp"

namespace fpkfv {

/// One scalar per stored face, interpreted along the stored orientation
/// cell_a -> cell_b; the value for the reversed orientation is the negative.
struct FaceField {
    std::vector<double> value;

    /// Value seen from `from_cell`: the stored value if from_cell == cell_a,
    /// its negative if from_cell == cell_b.
    double along(int face_index, const Face& f, int from_cell) const {
        return from_cell == f.cell_a ? value[face_index] : -value[face_index];
    }
    int size() const { return static_cast<int>(value.size()); }
};

using ScalarField2D = std::function<double(double, double)>;
using VectorField2D = std::function<std::array<double, 2>(double, double)>;
/// Generic vector field: fills b(y) for a point y of mesh.dim coordinates.
using VectorField = std::function<void(std::span<const double> y, std::span<double> b)>;

/// Normal drift component (b.n) per face, evaluated at the stored face
/// midpoint. Throws on non-finite values, naming the face.
FaceField sample_drift(const Mesh& mesh, const VectorField& b);
FaceField sample_drift(const Mesh& mesh, const VectorField2D& b);

/// Discretely divergence-free normal velocity from a 2D stream function:
/// (u.n) = (psi(end) - psi(start)) / area with the face endpoints taken in
/// counterclockwise order around cell_a. The per-cell weighted sum of face
/// values telescopes to the cyclic sum of vertex values, so it vanishes to
/// roundoff. Structured meshes only; periodic grids wrap the evaluation
/// points into the fundamental domain first.
FaceField stream_velocity(const Mesh& mesh, const ScalarField2D& psi);

/// Elementwise positive/negative parts along the stored orientation:
/// v = plus - minus, both nonnegative, at most one nonzero per face.
std::pair<FaceField, FaceField> split_pm(const FaceField& field);

/// max_i |sum_j area_ij * u_ij| over cells: the discrete divergence residual.
double max_cell_divergence(const Mesh& mesh, const FaceField& u);

/// Named 2D fields selectable from configs.
/// drifts:  "zero", "constant(ux,uy)", "vdp(alpha,delta)"
VectorField2D make_drift(const std::string& spec);
/// streams: "zero", "cellular(A,k)" on a given rectangle
ScalarField2D make_stream(const std::string& spec, double xmin, double xmax, double ymin,
                          double ymax);

/// Van der Pol drift b = (alpha(x - x^3/3 + y), delta - x).
VectorField2D vdp_drift(double alpha, double delta);

/// Sinusoidal cellular stream function A sin(k pi (x-a)/(b-a)) sin(k pi (y-c)/(d-c)).
ScalarField2D cellular_stream(double amplitude, double wave_number, double xmin, double xmax,
                              double ymin, double ymax);

} // namespace fpkfv

#endif
