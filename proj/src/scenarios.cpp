#include "fpkfv/scenarios.hpp"
#include "fpkfv/diagnostics.hpp"
#include "fpkfv/errors.hpp"
#include "fpkfv/io.hpp"
#include "fpkfv/random_walk.hpp"
#include "fpkfv/steady.hpp"
#include "fpkfv/velocity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

namespace fpkfv {

using nlohmann::json;

namespace {

constexpr double kDomainTol = 1e-9;

void check_sampling_domain(const Mesh& mesh) {
    if (!mesh.structured() || std::abs(mesh.xmin + 4.5) > kDomainTol ||
        std::abs(mesh.xmax - 4.5) > kDomainTol || std::abs(mesh.ymin + 4.5) > kDomainTol ||
        std::abs(mesh.ymax - 4.5) > kDomainTol)
        throw validation_error("sampling densities are defined on [-4.5,4.5]^2 only");
}

std::string format_amplitude(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

Topology topology_from(const std::string& name) {
    if (name == "noflux") return Topology::StructuredNoFlux;
    if (name == "periodic") return Topology::StructuredPeriodic;
    throw validation_error("unknown topology '" + name + "' (noflux|periodic)");
}

Mesh mesh_from_spec(const ScenarioConfig& cfg) {
    GridSpec g = cfg.grid;
    if (cfg.full_scale && !g.explicit_size) {
        g.nx *= 2;
        g.ny *= 2;
    }
    return build_structured_grid(g.xmin, g.xmax, g.ymin, g.ymax, g.nx, g.ny,
                                 topology_from(g.topology));
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

Generator build_custom_generator(const ScenarioConfig& cfg, const Mesh& mesh) {
    const FaceField drift = sample_drift(mesh, make_drift(cfg.drift.empty() ? "zero" : cfg.drift));
    if (cfg.scheme == "upwind") return build_upwind(mesh, drift, cfg.diffusion);
    if (cfg.scheme == "scharfetter-gummel")
        return build_b_scheme(mesh, drift, cfg.diffusion, BFunction::ScharfetterGummel);
    throw validation_error("unknown scheme '" + cfg.scheme + "' (upwind|scharfetter-gummel)");
}

// generator + known target for the steady/walk subcommands
struct Setup {
    Mesh mesh;
    Generator gen;
    std::optional<DensityField> target;
};

Setup build_setup(const ScenarioConfig& cfg) {
    Setup s;
    s.mesh = mesh_from_spec(cfg);
    if (cfg.scenario == "sample") {
        DensityField pi = triple_banana_density(s.mesh);
        const double amp = cfg.amplitudes.empty() ? 0.0 : cfg.amplitudes.front();
        const FaceField u = stream_velocity(
            s.mesh, cellular_stream(amp, cfg.wave_number, s.mesh.xmin, s.mesh.xmax, s.mesh.ymin,
                                    s.mesh.ymax));
        s.gen = build_pi_symmetric(s.mesh, u, pi, cfg.diffusion);
        s.target = std::move(pi);
    } else if (cfg.scenario == "vdp") {
        const FaceField drift = sample_drift(s.mesh, vdp_drift(cfg.vdp_alpha, cfg.vdp_delta));
        s.gen = build_upwind(s.mesh, drift, cfg.diffusion);
    } else if (cfg.scenario == "custom") {
        s.gen = build_custom_generator(cfg, s.mesh);
    } else {
        throw validation_error("scenario '" + cfg.scenario + "' has no generator setup");
    }
    return s;
}

DensityField steady_of(const Generator& gen, const ScenarioConfig& cfg) {
    if (gen.n <= 2000) return steady_direct(gen).pi_inf;
    return steady_power(gen, cfg.dt, 1e-9, 500000).pi_inf;
}

void check_run_invariants(const Trajectory& traj, const char* who) {
    for (const auto& snap : traj.snapshots) {
        if (snap.min_mass() < 0.0)
            throw convergence_error(std::string(who) + ": negative density produced", snap.min_mass());
        if (std::abs(snap.total_mass() - 1.0) > 1e-10)
            throw convergence_error(std::string(who) + ": mass drifted beyond 1e-10",
                                    snap.total_mass() - 1.0);
    }
}

} // namespace

ScenarioConfig default_config(const std::string& scenario) {
    ScenarioConfig cfg;
    cfg.scenario = scenario.empty() ? "sample" : scenario;
    if (cfg.scenario == "sample") {
        cfg.grid = {50, 50, -4.5, 4.5, -4.5, 4.5, "noflux", false};
        cfg.diffusion = 0.5;
        cfg.dt = 0.01;
        cfg.n_steps = 10000;
        cfg.record_every = 2000;
        cfg.amplitudes = {0.0, 0.1, 0.2};
        cfg.wave_number = 8.0;
    } else if (cfg.scenario == "vdp") {
        cfg.grid = {50, 50, -3.0, 4.0, -3.0, 3.0, "noflux", false};
        cfg.diffusion = 0.1; // the noise level of the oscillator
        cfg.dt = 0.05;
        cfg.n_steps = 40000;
        cfg.record_every = 5000;
        cfg.amplitudes = {};
    } else if (cfg.scenario == "image") {
        cfg.diffusion = 0.4;
        cfg.dt = 0.01;
        cfg.n_steps = 2000;
        cfg.record_every = 400;
        cfg.amplitudes = {1000.0};
        cfg.wave_number = 8.0;
    } else if (cfg.scenario == "custom") {
        cfg.grid = {32, 32, 0.0, 1.0, 0.0, 1.0, "periodic", false};
        cfg.diffusion = 1.0;
        cfg.dt = 0.01;
        cfg.n_steps = 1000;
        cfg.amplitudes = {};
    } else {
        throw validation_error("unknown scenario '" + scenario + "'");
    }
    return cfg;
}

ScenarioConfig parse_config(const std::string& json_text, const std::string& scenario_hint) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("config: JSON parse error: ") + e.what());
    }

    const std::string scenario = j.value("scenario", scenario_hint.empty() ? "sample" : scenario_hint);
    ScenarioConfig cfg = default_config(scenario);

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (g.contains("nx")) {
            cfg.grid.nx = g["nx"].get<int>();
            cfg.grid.explicit_size = true;
        }
        if (g.contains("ny")) {
            cfg.grid.ny = g["ny"].get<int>();
            cfg.grid.explicit_size = true;
        }
        if (g.contains("domain")) {
            const auto d = g["domain"].get<std::vector<double>>();
            if (d.size() != 4) throw validation_error("config: grid.domain needs [x0,x1,y0,y1]");
            cfg.grid.xmin = d[0];
            cfg.grid.xmax = d[1];
            cfg.grid.ymin = d[2];
            cfg.grid.ymax = d[3];
        }
        if (g.contains("topology")) cfg.grid.topology = g["topology"].get<std::string>();
    }

    cfg.diffusion = j.value("diffusion", cfg.diffusion);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.n_steps = j.value("n_steps", cfg.n_steps);
    cfg.record_every = j.value("record_every", cfg.record_every);
    if (j.contains("amplitudes")) cfg.amplitudes = j["amplitudes"].get<std::vector<double>>();
    cfg.wave_number = j.value("wave_number", cfg.wave_number);
    cfg.drift = j.value("drift", cfg.drift);
    cfg.stream = j.value("stream", cfg.stream);
    cfg.scheme = j.value("scheme", cfg.scheme);
    cfg.floor = j.value("floor", cfg.floor);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.full_scale = j.value("full_scale", cfg.full_scale);

    if (j.contains("vdp")) {
        cfg.vdp_alpha = j["vdp"].value("alpha", cfg.vdp_alpha);
        cfg.vdp_delta = j["vdp"].value("delta", cfg.vdp_delta);
    }
    if (j.contains("image")) {
        cfg.image_target = j["image"].value("target", cfg.image_target);
        cfg.image_start = j["image"].value("start", cfg.image_start);
    }
    if (j.contains("walk")) {
        cfg.walk_paths = j["walk"].value("paths", cfg.walk_paths);
        cfg.walk_horizon = j["walk"].value("horizon", cfg.walk_horizon);
        cfg.walk_start = j["walk"].value("start", cfg.walk_start);
    }

    if (!(cfg.diffusion > 0.0)) throw validation_error("config: diffusion must be positive");
    if (!(cfg.dt > 0.0)) throw validation_error("config: dt must be positive");
    if (cfg.n_steps < 0) throw validation_error("config: n_steps must be nonnegative");
    if (!(cfg.floor > 0.0)) throw validation_error("config: floor must be positive");
    if (cfg.grid.nx < 1 || cfg.grid.ny < 1) throw validation_error("config: grid must be >= 1x1");
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path, const std::string& scenario_hint) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, scenario_hint);
}

DensityField triple_banana_density(const Mesh& mesh) {
    check_sampling_domain(mesh);
    return DensityField::sample(mesh, [](double x, double y) {
        const double r1 = (x - 1.2) * (x - 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
        const double r2 = (x + 1.2) * (x + 1.2) + (y - 1.2) * (y - 1.2) - 0.5;
        const double r3 = x * x + y * y - 2.0;
        return std::exp(-20.0 * r1 * r1 - 10.0 * (y - 2.0) * (y - 2.0)) +
               std::exp(-20.0 * r2 * r2 - 10.0 * (y - 2.0) * (y - 2.0)) +
               std::exp(-20.0 * r3 * r3 - 10.0 * (y + 1.0) * (y + 1.0)) + 0.1;
    });
}

DensityField gaussian_mixture_init(const Mesh& mesh) {
    check_sampling_domain(mesh);
    return DensityField::sample(mesh, [](double x, double y) {
        return std::exp(-16.0 * (x + 3.0) * (x + 3.0) - 4.0 * y * y) +
               std::exp(-16.0 * (x - 3.0) * (x - 3.0) - 4.0 * y * y) +
               std::exp(-4.0 * x * x - 16.0 * (y + 3.0) * (y + 3.0)) +
               std::exp(-4.0 * x * x - 16.0 * (y - 3.0) * (y - 3.0)) + 0.1;
    });
}

double relative_rms_error(const DensityField& m, const DensityField& target) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double d = m.density(i) - target.density(i);
        num += d * d;
        den += target.density(i) * target.density(i);
    }
    return std::sqrt(num / den);
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    fit.points = x.size();
    if (x.size() < 2 || x.size() != y.size()) return fit;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

LinearFit fit_decay_rate(const std::vector<double>& values, double upper_frac,
                         double floor_rel) {
    LinearFit fit;
    if (values.size() < 3 || !(values[0] > 0.0)) return fit;
    const double hi = values[0] * upper_frac;
    const double lo = values[0] * floor_rel;

    std::vector<double> xs, ys;
    bool entered = false;
    for (size_t k = 0; k < values.size(); ++k) {
        if (!entered && values[k] > hi) continue;
        entered = true;
        if (!(values[k] > lo)) break;
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log(values[k]));
    }
    fit = fit_linear(xs, ys);
    fit.slope = -fit.slope; // report a decay *rate*
    return fit;
}

SamplingResult run_sampling(const ScenarioConfig& cfg) {
    if (cfg.scenario != "sample") throw validation_error("run_sampling: scenario must be 'sample'");

    SamplingResult result;
    result.mesh = mesh_from_spec(cfg);
    const Mesh& mesh = result.mesh;
    result.target = triple_banana_density(mesh);
    const DensityField rho0 = gaussian_mixture_init(mesh);

    {
        auto path = out_path(cfg, "sample_target.pgm");
        write_image(render_density(result.target, mesh), path);
        result.files.push_back(path);
        path = out_path(cfg, "sample_initial.pgm");
        write_image(render_density(rho0, mesh), path);
        result.files.push_back(path);
    }

    const std::vector<double> amplitudes =
        cfg.amplitudes.empty() ? std::vector<double>{0.0} : cfg.amplitudes;

    for (double amp : amplitudes) {
        const FaceField u = stream_velocity(
            mesh, cellular_stream(amp, cfg.wave_number, mesh.xmin, mesh.xmax, mesh.ymin, mesh.ymax));
        Generator gen = build_pi_symmetric(mesh, u, result.target, cfg.diffusion);

        const double balance = gen.stationarity_residual(result.target);
        if (balance > 1e-12 * gen.max_exit_rate())
            throw validation_error("run_sampling: generator is not well balanced (residual " +
                                   std::to_string(balance) + ")");

        auto probes = standard_probes(gen, mesh, result.target);
        const DensityField& target = result.target;
        probes.push_back({"rel_rms", [&target](const DensityField& m, long, double) {
                              return relative_rms_error(m, target);
                          }});

        StepperConfig scfg{cfg.dt, 0.0, cfg.n_steps, cfg.record_every};
        Trajectory traj = evolve(rho0, gen, scfg, probes);
        check_run_invariants(traj, "run_sampling");

        const std::string tag = "sample_A" + format_amplitude(amp);
        const std::string series_path = out_path(cfg, tag + "_series.csv");
        write_trajectory_csv(traj, series_path);
        result.files.push_back(series_path);
        for (size_t s = 0; s < traj.snapshots.size(); ++s) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_step%06ld.pgm", tag.c_str(),
                          traj.snapshot_steps[s]);
            const std::string p = out_path(cfg, name);
            write_image(render_density(traj.snapshots[s], mesh), p);
            result.files.push_back(p);
        }

        AmplitudeRun run;
        run.amplitude = amp;
        run.chi2_series = traj.probe_values[0];
        run.l1_to_target = traj.probe_values[1];
        run.rel_rms = traj.probe_values.back();
        const LinearFit fit = fit_decay_rate(run.rel_rms);
        run.fitted_rate = fit.slope;
        run.fit_r_squared = fit.r_squared;
        run.final_rel_rms = run.rel_rms.back();
        result.runs.push_back(std::move(run));
    }
    return result;
}

namespace {

struct ChannelDensity {
    DensityField field;
    double scale = 0.0; // sum over cells of (value + floor)*|C|
    double floor = 0.0;
};

ChannelDensity channel_to_density(const Image& img, int channel, const Mesh& mesh) {
    double mean = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) mean += img.at(x, y, channel);
    mean /= static_cast<double>(img.width) * img.height;

    ChannelDensity out;
    out.floor = 0.1 * (mean > 0.0 ? mean : 1.0);
    std::vector<double> rho(mesh.n_cells);
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix)
            rho[mesh.cell_id(ix, iy)] = img.at(ix, mesh.ny - 1 - iy, channel) + out.floor;
    out.field = DensityField::from_density(mesh, rho);
    out.scale = out.field.total_mass();
    out.field.normalize();
    return out;
}

uint8_t density_to_pixel(double rho, const ChannelDensity& ref) {
    const double raw = rho * ref.scale - ref.floor;
    return static_cast<uint8_t>(std::clamp(std::lround(raw), 0l, 255l));
}

} // namespace

ImageResult run_image(const ScenarioConfig& cfg) {
    if (cfg.scenario != "image") throw validation_error("run_image: scenario must be 'image'");
    if (cfg.image_target.empty()) throw validation_error("run_image: image.target not set");

    const Image target = read_image(cfg.image_target);
    Image start;
    if (!cfg.image_start.empty()) {
        start = read_image(cfg.image_start);
        if (start.width != target.width || start.height != target.height ||
            start.channels != target.channels)
            throw validation_error("run_image: start and target image dimensions differ");
    }

    const double pi = std::numbers::pi;
    const Mesh mesh = build_structured_grid(0.0, pi, 0.0, pi, target.width, target.height,
                                            Topology::StructuredNoFlux);

    const double amp = cfg.amplitudes.empty() ? 1000.0 : cfg.amplitudes.front();
    const FaceField u = stream_velocity(
        mesh, cellular_stream(amp, cfg.wave_number, mesh.xmin, mesh.xmax, mesh.ymin, mesh.ymax));

    ImageResult result;
    result.width = target.width;
    result.height = target.height;
    result.channels = target.channels;

    std::vector<Trajectory> trajs(target.channels);
    std::vector<ChannelDensity> targets(target.channels);

    for (int c = 0; c < target.channels; ++c) {
        targets[c] = channel_to_density(target, c, mesh);
        Generator gen = build_pi_symmetric(mesh, u, targets[c].field, cfg.diffusion);

        DensityField m0 = cfg.image_start.empty()
                              ? DensityField::uniform(mesh)
                              : channel_to_density(start, c, mesh).field;

        const DensityField& tgt = targets[c].field;
        std::vector<Probe> probes{{"rel_rms", [&tgt](const DensityField& m, long, double) {
                                       return relative_rms_error(m, tgt);
                                   }},
                                  {"mass_total", [](const DensityField& m, long, double) {
                                       return m.total_mass();
                                   }}};
        StepperConfig scfg{cfg.dt, 0.0, cfg.n_steps, cfg.record_every};
        trajs[c] = evolve(m0, gen, scfg, probes);
        check_run_invariants(trajs[c], "run_image");
        result.rel_rms.push_back(trajs[c].probe_values[0]);

        const std::string series_path =
            out_path(cfg, "image_channel" + std::to_string(c) + "_series.csv");
        write_trajectory_csv(trajs[c], series_path);
        result.files.push_back(series_path);
    }

    // recombine channel snapshots into images
    for (size_t s = 0; s < trajs[0].snapshots.size(); ++s) {
        Image frame;
        frame.width = target.width;
        frame.height = target.height;
        frame.channels = target.channels;
        frame.pixel.resize(static_cast<size_t>(frame.width) * frame.height * frame.channels);
        for (int c = 0; c < target.channels; ++c) {
            const DensityField& snap = trajs[c].snapshots[s];
            for (int iy = 0; iy < mesh.ny; ++iy)
                for (int ix = 0; ix < mesh.nx; ++ix)
                    frame.at(ix, mesh.ny - 1 - iy, c) =
                        density_to_pixel(snap.density(mesh.cell_id(ix, iy)), targets[c]);
        }
        char name[64];
        std::snprintf(name, sizeof(name), "image_step%06ld.%s", trajs[0].snapshot_steps[s],
                      target.channels == 3 ? "ppm" : "pgm");
        const std::string p = out_path(cfg, name);
        write_image(frame, p);
        result.files.push_back(p);
    }
    return result;
}

VdpResult run_vdp(const ScenarioConfig& cfg) {
    if (cfg.scenario != "vdp") throw validation_error("run_vdp: scenario must be 'vdp'");

    VdpResult result;
    result.mesh = mesh_from_spec(cfg);
    const Mesh& mesh = result.mesh;

    const FaceField drift = sample_drift(mesh, vdp_drift(cfg.vdp_alpha, cfg.vdp_delta));
    Generator gen = build_upwind(mesh, drift, cfg.diffusion);

    // long-run steady state by the same stable iteration
    SteadyResult steady = steady_power(gen, cfg.dt, 1e-10, 400000);
    result.steady = steady.pi_inf;

    const DensityField rho0 = DensityField::uniform(mesh);
    auto probes = standard_probes(gen, mesh, result.steady);
    const DensityField& pi_inf = result.steady;
    probes.push_back({"rel_rms", [&pi_inf](const DensityField& m, long, double) {
                          return relative_rms_error(m, pi_inf);
                      }});
    StepperConfig scfg{cfg.dt, 0.0, cfg.n_steps, cfg.record_every};
    Trajectory traj = evolve(rho0, gen, scfg, probes);
    check_run_invariants(traj, "run_vdp");
    result.rms_to_steady = traj.probe_values.back();

    result.top20_mass_fraction = mass_in_top_cells(result.steady, 0.2);
    result.cells_for_60_percent = cells_covering_mass(result.steady, 0.6);

    const std::string tag = "vdp_delta" + format_amplitude(cfg.vdp_delta);
    const std::string series_path = out_path(cfg, tag + "_series.csv");
    write_trajectory_csv(traj, series_path);
    result.files.push_back(series_path);
    for (size_t s = 0; s < traj.snapshots.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_step%06ld.pgm", tag.c_str(), traj.snapshot_steps[s]);
        const std::string p = out_path(cfg, name);
        write_image(render_density(traj.snapshots[s], mesh), p);
        result.files.push_back(p);
    }
    const std::string steady_pgm = out_path(cfg, tag + "_steady.pgm");
    write_image(render_density(result.steady, mesh), steady_pgm);
    result.files.push_back(steady_pgm);
    const std::string steady_csv = out_path(cfg, tag + "_steady.csv");
    write_steady_csv(result.steady, mesh, steady_csv);
    result.files.push_back(steady_csv);
    return result;
}

SteadyRunResult run_steady(const ScenarioConfig& cfg) {
    Setup setup = build_setup(cfg);
    SteadyRunResult result;
    result.mesh = std::move(setup.mesh);

    result.pi_inf = steady_of(setup.gen, cfg);
    result.residual = setup.gen.stationarity_residual(result.pi_inf);

    const std::string csv = out_path(cfg, "steady.csv");
    write_steady_csv(result.pi_inf, result.mesh, csv);
    result.files.push_back(csv);
    if (result.mesh.structured()) {
        const std::string pgm = out_path(cfg, "steady.pgm");
        write_image(render_density(result.pi_inf, result.mesh), pgm);
        result.files.push_back(pgm);
    }
    const std::string dump = out_path(cfg, "generator.txt");
    dump_generator(setup.gen, dump);
    result.files.push_back(dump);
    return result;
}

WalkRunResult run_walk(const ScenarioConfig& cfg) {
    Setup setup = build_setup(cfg);
    WalkRunResult result;
    result.mesh = std::move(setup.mesh);

    if (cfg.walk_start < 0 || cfg.walk_start >= setup.gen.n)
        throw validation_error("run_walk: start state out of range");

    const JumpChain chain = jump_chain(setup.gen);
    std::vector<WalkPath> paths;
    paths.reserve(cfg.walk_paths);
    for (long p = 0; p < cfg.walk_paths; ++p)
        paths.push_back(gillespie(chain, cfg.walk_start, cfg.walk_horizon, cfg.seed, p));

    result.occupation = occupation_measure(paths, result.mesh);

    const DensityField steady =
        setup.target ? *setup.target : steady_of(setup.gen, cfg);
    result.tv_to_steady = total_variation(result.occupation, steady);

    const std::string paths_csv = out_path(cfg, "walk_paths.csv");
    write_paths_csv(paths, paths_csv);
    result.files.push_back(paths_csv);
    const std::string occ_csv = out_path(cfg, "walk_occupation.csv");
    write_steady_csv(result.occupation, result.mesh, occ_csv);
    result.files.push_back(occ_csv);
    return result;
}

double mass_in_top_cells(const DensityField& m, double cell_fraction) {
    std::vector<int> order(m.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return m.density(a) > m.density(b); });
    const int k = std::max<int>(1, static_cast<int>(std::ceil(cell_fraction * m.size())));
    double acc = 0.0;
    for (int i = 0; i < k && i < m.size(); ++i) acc += m.mass[order[i]];
    return acc / m.total_mass();
}

int cells_covering_mass(const DensityField& m, double mass_fraction) {
    std::vector<int> order(m.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return m.density(a) > m.density(b); });
    const double want = mass_fraction * m.total_mass();
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i < m.size(); ++i) {
        acc += m.mass[order[i]];
        ++count;
        if (acc >= want) break;
    }
    return count;
}

} // namespace fpkfv
