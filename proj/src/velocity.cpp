#include "fpkfv/velocity.hpp"
#include "fpkfv/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fpkfv {

FaceField sample_drift(const Mesh& mesh, const VectorField& b) {
    FaceField out;
    out.value.resize(mesh.n_faces());
    std::vector<double> y(mesh.dim), bv(mesh.dim);
    for (int f = 0; f < mesh.n_faces(); ++f) {
        for (int k = 0; k < mesh.dim; ++k) y[k] = mesh.midpoint(f, k);
        b(y, bv);
        double bn = 0.0;
        for (int k = 0; k < mesh.dim; ++k) bn += bv[k] * mesh.normal(f, k);
        if (!std::isfinite(bn))
            throw validation_error("sample_drift: non-finite drift at face " + std::to_string(f) +
                                   " between cells " + std::to_string(mesh.faces[f].cell_a) + " and " +
                                   std::to_string(mesh.faces[f].cell_b));
        out.value[f] = bn;
    }
    return out;
}

FaceField sample_drift(const Mesh& mesh, const VectorField2D& b) {
    if (mesh.dim != 2) throw validation_error("sample_drift: 2D field on a non-2D mesh");
    return sample_drift(mesh, VectorField([&b](std::span<const double> y, std::span<double> out) {
                            auto v = b(y[0], y[1]);
                            out[0] = v[0];
                            out[1] = v[1];
                        }));
}

FaceField stream_velocity(const Mesh& mesh, const ScalarField2D& psi) {
    if (!mesh.structured() || mesh.dim != 2)
        throw validation_error("stream_velocity: requires a structured 2D mesh");

    const bool periodic = (mesh.topology == Topology::StructuredPeriodic);
    const double lx = mesh.xmax - mesh.xmin;
    const double ly = mesh.ymax - mesh.ymin;
    auto wrap = [&](double v, double lo, double len) {
        double t = std::fmod(v - lo, len);
        if (t < 0) t += len;
        return lo + t;
    };
    auto eval = [&](double x, double y) {
        if (periodic) {
            x = wrap(x, mesh.xmin, lx);
            y = wrap(y, mesh.ymin, ly);
        }
        return psi(x, y);
    };

    FaceField out;
    out.value.resize(mesh.n_faces());
    for (int f = 0; f < mesh.n_faces(); ++f) {
        const double pa = eval(mesh.face_vertex_a[2 * f], mesh.face_vertex_a[2 * f + 1]);
        const double pb = eval(mesh.face_vertex_b[2 * f], mesh.face_vertex_b[2 * f + 1]);
        out.value[f] = (pb - pa) / mesh.faces[f].area;
    }
    return out;
}

std::pair<FaceField, FaceField> split_pm(const FaceField& field) {
    FaceField plus, minus;
    plus.value.resize(field.value.size());
    minus.value.resize(field.value.size());
    for (size_t i = 0; i < field.value.size(); ++i) {
        const double v = field.value[i];
        plus.value[i] = v > 0.0 ? v : 0.0;
        minus.value[i] = v < 0.0 ? -v : 0.0;
    }
    return {plus, minus};
}

double max_cell_divergence(const Mesh& mesh, const FaceField& u) {
    std::vector<double> div(mesh.n_cells, 0.0);
    for (int f = 0; f < mesh.n_faces(); ++f) {
        const Face& face = mesh.faces[f];
        const double flux = face.area * u.value[f];
        div[face.cell_a] += flux;
        div[face.cell_b] -= flux;
    }
    double worst = 0.0;
    for (double d : div) worst = std::max(worst, std::abs(d));
    return worst;
}

VectorField2D vdp_drift(double alpha, double delta) {
    return [alpha, delta](double x, double y) -> std::array<double, 2> {
        return {alpha * (x - x * x * x / 3.0 + y), delta - x};
    };
}

ScalarField2D cellular_stream(double amplitude, double wave_number, double xmin, double xmax,
                              double ymin, double ymax) {
    const double kx = wave_number * std::numbers::pi / (xmax - xmin);
    const double ky = wave_number * std::numbers::pi / (ymax - ymin);
    return [=](double x, double y) {
        return amplitude * std::sin(kx * (x - xmin)) * std::sin(ky * (y - ymin));
    };
}

namespace {

// parses "name" or "name(a,b,...)"
bool parse_call(const std::string& spec, std::string& name, std::vector<double>& args) {
    args.clear();
    const auto open = spec.find('(');
    if (open == std::string::npos) {
        name = spec;
        return true;
    }
    if (spec.back() != ')') return false;
    name = spec.substr(0, open);
    std::string inner = spec.substr(open + 1, spec.size() - open - 2);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            args.push_back(std::stod(tok));
        } catch (...) {
            return false;
        }
    }
    return true;
}

[[noreturn]] void bad_spec(const std::string& what, const std::string& spec) {
    throw validation_error(what + ": cannot parse field spec '" + spec + "'");
}

} // namespace

VectorField2D make_drift(const std::string& spec) {
    std::string name;
    std::vector<double> args;
    if (!parse_call(spec, name, args)) bad_spec("make_drift", spec);
    if (name == "zero")
        return [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    if (name == "constant" && args.size() == 2)
        return [args](double, double) -> std::array<double, 2> { return {args[0], args[1]}; };
    if (name == "vdp" && args.size() == 2) return vdp_drift(args[0], args[1]);
    bad_spec("make_drift", spec);
}

ScalarField2D make_stream(const std::string& spec, double xmin, double xmax, double ymin,
                          double ymax) {
    std::string name;
    std::vector<double> args;
    if (!parse_call(spec, name, args)) bad_spec("make_stream", spec);
    if (name == "zero") return [](double, double) { return 0.0; };
    if (name == "cellular" && args.size() == 2)
        return cellular_stream(args[0], args[1], xmin, xmax, ymin, ymax);
    bad_spec("make_stream", spec);
}

} // namespace fpkfv
