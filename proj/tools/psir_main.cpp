#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psir/forward.hpp"
#include "psir/io.hpp"
#include "psir/kernels.hpp"
#include "psir/mie.hpp"
#include "psir/phantom.hpp"
#include "psir/phase.hpp"
#include "psir/propagate.hpp"
#include "psir/reconstruct.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace psir;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    double noise = -1;  // <0: take from config
    std::uint64_t seed = 0;
    bool seed_set = false;
    double k_scale = 1.0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--noise", o.noise, "multiplicative noise level");
    cmd->add_option("--seed", o.seed, "noise RNG seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--k-scale", o.k_scale, "wavenumber band scale factor");
    cmd->add_option("--threads", o.threads, "worker threads (compute is single-threaded)");
}

ConfigDoc load_config(const CommonOpts& o) {
    ConfigDoc c = o.config_path.empty() ? make_default_config() : read_config(o.config_path);
    if (o.k_scale <= 0) throw ConfigError("--k-scale must be > 0");
    c.k_low *= o.k_scale;
    c.k_high *= o.k_scale;
    if (o.noise >= 0) c.noise_level = o.noise;
    if (o.seed_set) c.seed = o.seed;
    return c;
}

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("input file not found: " + path);
}

fs::path ensure_out(const CommonOpts& o) {
    fs::path dir(o.out_dir);
    fs::create_directories(dir);
    return dir;
}

PlaneGrid measurement_plane(const ConfigDoc& c) {
    return PlaneGrid(c.plane_z, c.half_width, c.plane_m1, c.plane_m2);
}

/// Subgrid of `full` (same spacing) that covers the phantom support plus one
/// cell of margin on each side.
Grid3 support_subgrid(const Grid3& full, const PhantomSpec& phantom) {
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300, lo3 = 1e300, hi3 = -1e300;
    for (const MicrosphereSpec& s : phantom.spheres) {
        lo1 = std::min(lo1, s.center[0] - s.radius);
        hi1 = std::max(hi1, s.center[0] + s.radius);
        lo2 = std::min(lo2, s.center[1] - s.radius);
        hi2 = std::max(hi2, s.center[1] + s.radius);
        lo3 = std::min(lo3, s.center[2] - s.radius);
        hi3 = std::max(hi3, s.center[2] + s.radius);
    }
    auto range = [](double lo, double hi, double origin, double h, int n, int& first,
                    int& count) {
        int a = std::max(0, int(std::floor((lo - origin) / h)) - 1);
        int b = std::min(n - 1, int(std::ceil((hi - origin) / h)) + 1);
        if (b - a + 1 < 2) b = std::min(n - 1, a + 1);
        first = a;
        count = b - a + 1;
    };
    int f1, c1, f2, c2, f3, c3;
    range(lo1, hi1, full.bbox.x1min, full.h1(), full.n1, f1, c1);
    range(lo2, hi2, full.bbox.x2min, full.h2(), full.n2, f2, c2);
    range(lo3, hi3, full.bbox.x3min, full.h3(), full.n3, f3, c3);
    BBox box{full.x1(f1), full.x1(f1 + c1 - 1), full.x2(f2), full.x2(f2 + c2 - 1),
             full.x3(f3), full.x3(f3 + c3 - 1)};
    return Grid3(c1, c2, c3, box);
}

/// Forward model: intensity data on the measurement plane at the partition
/// wavenumbers. Solves the scattering problem on the support subgrid of the
/// budget-checked simulation grid and evaluates the plane by quadrature.
IntensityData simulate_intensity(const ConfigDoc& c, json& summary) {
    WavenumberPartition part =
        WavenumberPartition::make(c.k_low, c.k_high, c.n_intervals);
    PlaneGrid plane = measurement_plane(c);
    // budget check on the nominal full-domain simulation grid
    Grid3 full = make_grid(c.bbox, c.points_per_wavelength, c.k_high, c.memory_budget);

    ComplexPlaneData u(plane, part.k_values);
    json per_k = json::array();
    if (c.phantom.spheres.empty()) {
        for (std::size_t ki = 0; ki < part.k_values.size(); ++ki) {
            cdouble inc = incident(plane.z, part.k_values[ki]);
            cdouble* dst = u.slice(ki);
            for (std::size_t p = 0; p < plane.size(); ++p) dst[p] = inc;
            per_k.push_back({{"k", part.k_values[ki]}, {"iterations", 0}, {"residual", 0.0}});
        }
    } else {
        Grid3 sub = support_subgrid(full, c.phantom);
        RealField3 n2 = build_refractive_field(c.phantom, sub);
        SolverSettings ls;
        ls.tolerance = c.ls_tolerance;
        ls.max_iterations = c.ls_max_iterations;
        ls.points_per_wavelength = c.points_per_wavelength;
        for (std::size_t ki = 0; ki < part.k_values.size(); ++ki) {
            double k = part.k_values[ki];
            ForwardSolution sol = solve_ls(n2, k, ls);
            if (!sol.converged)
                throw std::runtime_error("forward solve did not converge at k = " +
                                         std::to_string(k));
            ComplexPlaneData slice = evaluate_exterior(sol, n2, plane);
            std::copy(slice.values.begin(), slice.values.end(), u.slice(ki));
            per_k.push_back(
                {{"k", k}, {"iterations", sol.iterations}, {"residual", sol.residual}});
        }
        summary["simulation_grid"] = {{"n1", sub.n1}, {"n2", sub.n2}, {"n3", sub.n3}};
    }
    summary["forward_solves"] = per_k;

    IntensityData f = synthesize_intensity(u);
    if (c.noise_level > 0) f = add_noise(f, c.noise_level, c.seed);
    summary["noise_level"] = c.noise_level;
    summary["seed"] = c.seed;
    return f;
}

Grid3 reconstruction_grid(const ConfigDoc& c) {
    return make_grid(c.bbox, c.omega_points_per_wavelength, c.k_high, c.memory_budget);
}

AlgorithmSettings algorithm_settings(const ConfigDoc& c) {
    AlgorithmSettings s;
    s.inner_iterations = c.inner_iterations;
    s.c_max = c.c_max;
    s.epsilon_p1 = c.epsilon_p1;
    s.n0 = c.n0;
    s.ls_tolerance = c.ls_tolerance;
    s.ls_max_iterations = c.ls_max_iterations;
    return s;
}

void summarize_reconstruction(const ReconstructionResult& res, json& summary) {
    const Grid3& g = res.c.grid;
    std::size_t best = 0;
    for (std::size_t p = 1; p < res.c.values.size(); ++p)
        if (res.c.values[p] > res.c.values[best]) best = p;
    int i = int(best % g.n1);
    int j = int((best / g.n1) % g.n2);
    int l = int(best / (std::size_t(g.n1) * g.n2));
    summary["n_star"] = res.n_star;
    summary["n_comp"] = res.n_comp;
    summary["c_max_value"] = res.c.values[best];
    summary["n_rel_max"] = std::sqrt(res.c.values[best]);
    summary["c_argmax"] = {g.x1(i), g.x2(j), g.x3(l)};
    summary["change_history"] = res.change_history;
}

void write_summary(const fs::path& dir, const ConfigDoc& c, json& summary) {
    summary["config"] = json::parse(config_to_json(c));
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
}

int cmd_simulate(const CommonOpts& o) {
    ConfigDoc c = load_config(o);
    fs::path dir = ensure_out(o);
    json summary{{"command", "simulate"}};
    IntensityData f = simulate_intensity(c, summary);
    write_intensity_csv((dir / "intensity.csv").string(), f);
    write_summary(dir, c, summary);
    return 0;
}

int cmd_retrieve(const CommonOpts& o, const std::string& input) {
    ConfigDoc c = load_config(o);
    require_input(input);
    fs::path dir = ensure_out(o);
    IntensityData f = read_intensity_csv(input);
    f.plane.z = c.plane_z;
    RetrievedField r = retrieve_phased(f);
    json summary{{"command", "retrieve"}, {"clamp_fraction", r.clamp_fraction}};
    write_plane_csv((dir / "retrieved.csv").string(), r.u);
    write_summary(dir, c, summary);
    std::cerr << "clamp fraction: " << r.clamp_fraction << "\n";
    return 0;
}

int cmd_propagate(const CommonOpts& o, const std::string& input) {
    ConfigDoc c = load_config(o);
    require_input(input);
    fs::path dir = ensure_out(o);
    ComplexPlaneData u = read_plane_csv(input);
    u.plane.z = c.plane_z;
    ComplexPlaneData moved(PlaneGrid(c.gamma_z, u.plane.half_width, u.plane.m1, u.plane.m2),
                           u.k_values);
    for (std::size_t ki = 0; ki < u.k_values.size(); ++ki) {
        std::vector<cdouble> slice(u.slice(ki), u.slice(ki) + u.plane.size());
        std::vector<cdouble> out =
            angular_spectrum(u.plane, slice, c.gamma_z, u.k_values[ki]);
        std::copy(out.begin(), out.end(), moved.slice(ki));
    }
    json summary{{"command", "propagate"}, {"target_z", c.gamma_z}};
    write_plane_csv((dir / "propagated.csv").string(), moved);
    write_summary(dir, c, summary);
    return 0;
}

int cmd_reconstruct(const CommonOpts& o, const std::string& input) {
    ConfigDoc c = load_config(o);
    require_input(input);
    fs::path dir = ensure_out(o);
    ComplexPlaneData u = read_plane_csv(input);
    u.plane.z = c.plane_z;
    Grid3 grid = reconstruction_grid(c);
    WavenumberPartition part =
        WavenumberPartition::make(c.k_low, c.k_high, c.n_intervals);
    ReconstructionResult res = run_reconstruction(u, grid, part, algorithm_settings(c));
    json summary{{"command", "reconstruct"}};
    summarize_reconstruction(res, summary);
    write_field((dir / "c.psf1").string(), res.c);
    write_field((dir / "n_rel.psf1").string(), res.n_rel);
    write_text_file((dir / "iterates.jsonl").string(), [&] {
        std::string all;
        for (const std::string& line : res.log) all += line + "\n";
        return all;
    }());
    write_summary(dir, c, summary);
    std::cerr << "n_comp = " << res.n_comp << " (interval " << res.n_star << ")\n";
    return 0;
}

int cmd_pipeline(const CommonOpts& o) {
    ConfigDoc c = load_config(o);
    fs::path dir = ensure_out(o);
    json summary{{"command", "pipeline"}};
    auto t0 = std::chrono::steady_clock::now();

    IntensityData f = simulate_intensity(c, summary);
    write_intensity_csv((dir / "intensity.csv").string(), f);

    RetrievedField r = retrieve_phased(f);
    summary["clamp_fraction"] = r.clamp_fraction;
    write_plane_csv((dir / "retrieved.csv").string(), r.u);

    Grid3 grid = reconstruction_grid(c);
    WavenumberPartition part =
        WavenumberPartition::make(c.k_low, c.k_high, c.n_intervals);
    ReconstructionResult res =
        run_reconstruction(r.u, grid, part, algorithm_settings(c));
    summarize_reconstruction(res, summary);
    write_field((dir / "c.psf1").string(), res.c);
    write_field((dir / "n_rel.psf1").string(), res.n_rel);
    std::string all;
    for (const std::string& line : res.log) all += line + "\n";
    write_text_file((dir / "iterates.jsonl").string(), all);

    double c_dev = 0;
    for (double v : res.c.values) c_dev = std::max(c_dev, std::abs(v - 1.0));
    summary["c_minus_one_max"] = c_dev;
    auto t1 = std::chrono::steady_clock::now();
    summary["elapsed_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    write_summary(dir, c, summary);
    std::cerr << "n_comp = " << res.n_comp << ", clamp fraction = " << r.clamp_fraction
              << "\n";
    return 0;
}

int cmd_oracle(const CommonOpts& o, const std::string& which) {
    ConfigDoc c = load_config(o);
    fs::path dir = ensure_out(o);
    json summary{{"command", "oracle"}};
    std::printf("%-8s %-24s %12s\n", "case", "quantity", "value");

    if (which == "born" || which == "both") {
        PhantomSpec spec;
        spec.spheres = {MicrosphereSpec{{0, 0, 0}, 0.45, 1e-3}};
        BBox box{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5};
        const double k = 5.0;
        Grid3 grid = make_grid(box, 10.0, k, c.memory_budget);
        RealField3 n2 = build_refractive_field(spec, grid);
        PlaneGrid plane(2.0, 1.5, 41, 41);
        SolverSettings ls;
        ForwardSolution sol = solve_ls(n2, k, ls);
        ComplexPlaneData u_ls = evaluate_exterior(sol, n2, plane);
        ComplexPlaneData u_born = born_reference(n2, k, plane);
        double num = 0, den = 0;
        cdouble inc = incident(plane.z, k);
        for (std::size_t p = 0; p < plane.size(); ++p) {
            num += std::norm(u_ls.values[p] - u_born.values[p]);
            den += std::norm(u_born.values[p] - inc);
        }
        double err = std::sqrt(num / den);
        std::printf("%-8s %-24s %12.4e\n", "born", "rel scattered-field err", err);
        summary["born_error"] = err;
    }
    if (which == "mie" || which == "both") {
        const double k = 5.0, radius = 1.0, n_in = 1.2;
        PlaneGrid plane(3.0, 2.0, 33, 33);
        BBox box{-1.1, 1.1, -1.1, 1.1, -1.1, 1.1};
        Grid3 grid = make_grid(box, 12.0, n_in * k, c.memory_budget);
        RealField3 n2(grid);
        for (int l = 0; l < grid.n3; ++l)
            for (int j = 0; j < grid.n2; ++j)
                for (int i = 0; i < grid.n1; ++i) {
                    double x1 = grid.x1(i), x2 = grid.x2(j), x3 = grid.x3(l);
                    n2(i, j, l) =
                        x1 * x1 + x2 * x2 + x3 * x3 <= radius * radius ? n_in * n_in : 1.0;
                }
        SolverSettings ls;
        ls.points_per_wavelength = 12.0;
        ForwardSolution sol = solve_ls(n2, k, ls);
        ComplexPlaneData u_ls = evaluate_exterior(sol, n2, plane);
        std::vector<std::array<double, 3>> targets;
        for (int j = 0; j < plane.m2; ++j)
            for (int i = 0; i < plane.m1; ++i)
                targets.push_back({plane.x1(i), plane.x2(j), plane.z});
        MieResult mie = mie_reference(radius, n_in, k, targets);
        double num = 0, den = 0;
        for (std::size_t p = 0; p < plane.size(); ++p) {
            num += std::norm(u_ls.values[p] - mie.values[p]);
            den += std::norm(mie.values[p]);
        }
        double err = std::sqrt(num / den);
        std::printf("%-8s %-24s %12.4e\n", "mie", "rel total-field err", err);
        std::printf("%-8s %-24s %12.4e\n", "mie", "series tail bound", mie.tail_bound);
        summary["mie_error"] = err;
    }
    write_summary(dir, c, summary);
    return 0;
}

int cmd_bound(const CommonOpts& o, double k_bound) {
    ConfigDoc c = load_config(o);
    double one = analytic_bound(k_bound, c.plane_z, 1);
    double two = analytic_bound(k_bound, c.plane_z, 2);
    std::printf("%.4f\n%.4f\n", one, two);
    return 0;
}

int cmd_export(const CommonOpts& o, const std::string& input, int axis, int index,
               const std::string& format) {
    require_input(input);
    fs::path dir = ensure_out(o);
    LoadedField lf = read_field(input);
    RealField3 field;
    if (lf.kind == 0) {
        field = lf.real;
    } else {
        field = RealField3(lf.complex.grid);
        for (std::size_t p = 0; p < field.values.size(); ++p)
            field.values[p] = std::abs(lf.complex.values[p]);
    }
    SliceFormat fmt = format == "pgm" ? SliceFormat::pgm : SliceFormat::csv;
    std::string name = "slice." + format;
    export_slice((dir / name).string(), field, axis, index, fmt);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaseless inverse scattering pipeline"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string input, oracle_case = "both", export_format = "csv";
    int export_axis = 2, export_index = -1;
    double k_bound = 119.6;

    CLI::App* sim = app.add_subcommand("simulate", "forward model to intensity CSV");
    add_common(sim, common);
    CLI::App* ret = app.add_subcommand("retrieve", "phase retrieval from intensity CSV");
    add_common(ret, common);
    ret->add_option("input", input, "intensity CSV")->required();
    CLI::App* prop = app.add_subcommand("propagate", "angular-spectrum transfer");
    add_common(prop, common);
    prop->add_option("input", input, "complex plane CSV")->required();
    CLI::App* rec = app.add_subcommand("reconstruct", "coefficient reconstruction");
    add_common(rec, common);
    rec->add_option("input", input, "phased plane CSV")->required();
    CLI::App* pipe = app.add_subcommand("pipeline", "simulate + retrieve + reconstruct");
    add_common(pipe, common);
    CLI::App* orc = app.add_subcommand("oracle", "solver-vs-oracle error tables");
    add_common(orc, common);
    orc->add_option("--case", oracle_case, "born | mie | both")
        ->check(CLI::IsMember({"born", "mie", "both"}));
    CLI::App* bnd = app.add_subcommand("bound", "smallness bound values");
    add_common(bnd, common);
    bnd->add_option("--k", k_bound, "wavenumber for the bound");
    CLI::App* exp = app.add_subcommand("export", "render a field slice");
    add_common(exp, common);
    exp->add_option("input", input, "PSF1 field file")->required();
    exp->add_option("--axis", export_axis, "slice axis 0..2");
    exp->add_option("--index", export_index, "slice index")->required();
    exp->add_option("--format", export_format, "csv | pgm")
        ->check(CLI::IsMember({"csv", "pgm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common);
        if (ret->parsed()) return cmd_retrieve(common, input);
        if (prop->parsed()) return cmd_propagate(common, input);
        if (rec->parsed()) return cmd_reconstruct(common, input);
        if (pipe->parsed()) return cmd_pipeline(common);
        if (orc->parsed()) return cmd_oracle(common, oracle_case);
        if (bnd->parsed()) return cmd_bound(common, k_bound);
        if (exp->parsed())
            return cmd_export(common, input, export_axis, export_index, export_format);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const GridBudgetError& e) {
        std::cerr << "refused: " << e.what() << " (estimated " << e.estimated_bytes
                  << " bytes, budget " << e.budget_bytes << " bytes)\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
