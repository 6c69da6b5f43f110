// layered-ac: computes layered minimizers of a two-component double-well
// system, from the 1D transition profiles up to the assembled entire-space
// field, as a sequence of dependent pipeline stages.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "lac/pipeline.hpp"

namespace {

void print_scalars(const lac::StageRecord& r, std::initializer_list<const char*> keys) {
    std::printf("%s:", r.name.c_str());
    for (const char* k : keys) {
        auto it = r.scalars.find(k);
        if (it != r.scalars.end()) std::printf(" %s=%s", k, it->second.c_str());
    }
    std::printf("  (%lld ms)\n", r.wall_ms);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered minimizers of a two-component double-well system"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int fold = 0, resolution = 0;
    double width = 0.0;
    long long seed = -1;
    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out-dir", out_dir, "output directory (overrides the config)");
    app.add_option("--j", fold, "fold count override (prism and assembly)");
    app.add_option("--L", width, "strip half-width for the strip subcommand");
    app.add_option("--seed", seed, "seed override for deterministic probes");
    app.add_option("--resolution", resolution, "volumetric export samples per axis");

    const std::pair<const char*, const char*> subs[] = {
        {"check", "verify the potential hypotheses and the transition certificate"},
        {"heteroclinic", "compute the 1D transition profiles and their energy"},
        {"spectrum", "second-variation lower bound and growth probes"},
        {"strip", "minimize the renormalized strip energy at one width"},
        {"m2l-table", "strip minima across the width list with extrapolation"},
        {"hetero2d", "2D transition between the profile pair"},
        {"prism", "renormalized prism minimizer over the staircase sector"},
        {"assemble", "tile the prism field and export the volumetric data"},
        {"run-all", "run every stage in dependency order"},
        {"plot", "render SVG plots from the stage outputs"},
    };
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    try {
        lac::RunConfig cfg =
            config_path.empty() ? lac::RunConfig{} : lac::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (fold > 0) cfg.fold = fold;
        if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
        if (resolution > 0) cfg.resolution = resolution;
        lac::validate_config(cfg);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "run-all") {
            const lac::StageManifest m = lac::run_pipeline(cfg);
            if (!m.halted.empty()) {
                std::fprintf(stderr, "pipeline halted: %s\n", m.halted.c_str());
                return 2;
            }
            std::printf("pipeline complete: %zu stages, manifest at %s\n", m.stages.size(),
                        lac::path_join(cfg.out_dir, "manifest.json").c_str());
            return 0;
        }
        if (sub == "check") {
            const lac::StageRecord r = lac::stage_check(cfg);
            print_scalars(r, {"hypotheses_ok", "star", "star2", "m1", "omega_star"});
            for (const auto& n : r.notes) std::fprintf(stderr, "  %s\n", n.c_str());
            const bool ok = r.scalars.at("hypotheses_ok") == "1" &&
                            r.scalars.at("star") == "1" && r.scalars.at("star2") == "1";
            if (!ok) {
                if (r.scalars.at("hypotheses_ok") != "1")
                    std::fprintf(stderr, "hypotheses fail\n");
                else
                    std::fprintf(stderr, "%s\n",
                                 r.scalars.at("star") != "1" ? "(*) fails" : "(**) fails");
            }
            return ok ? 0 : 2;
        }
        if (sub == "heteroclinic") {
            print_scalars(lac::stage_heteroclinic(cfg),
                          {"m1", "n_minimizers", "q2_at_zero", "omega_star", "decay_rate"});
            return 0;
        }
        if (sub == "spectrum") {
            print_scalars(lac::stage_spectrum(cfg), {"omega_star", "growth_min_ratio", "growth_ok"});
            return 0;
        }
        if (sub == "strip") {
            const double L = width > 0.0 ? width : cfg.widths.front();
            print_scalars(lac::stage_strip(cfg, L), {"L", "value", "scalar_branch", "grad_norm"});
            return 0;
        }
        if (sub == "m2l-table") {
            print_scalars(lac::stage_m2l(cfg), {"m2", "gap_rate", "fit_r2", "n_entries"});
            return 0;
        }
        if (sub == "hetero2d") {
            print_scalars(lac::stage_hetero2d(cfg),
                          {"value", "midline_distance", "decay_rate", "iterations"});
            return 0;
        }
        if (sub == "prism") {
            print_scalars(lac::stage_prism(cfg),
                          {"value", "seed_value", "min_slice_excess", "farfield_rate"});
            return 0;
        }
        if (sub == "assemble") {
            print_scalars(lac::stage_assemble(cfg),
                          {"periodicity_max", "face_jump_max", "ray_worst_far", "rays_decreasing"});
            return 0;
        }
        if (sub == "plot") {
            const lac::StageRecord r = lac::stage_plot(cfg);
            print_scalars(r, {"n_plots"});
            for (const auto& n : r.notes) std::fprintf(stderr, "  %s\n", n.c_str());
            return 0;
        }
        std::fprintf(stderr, "unknown subcommand %s\n", sub.c_str());
        return 4;
    } catch (const lac::hypothesis_error& e) {
        std::fprintf(stderr, "hypothesis failure: %s\n", e.what());
        return 2;
    } catch (const lac::solver_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const lac::io_error& e) {
        std::fprintf(stderr, "io failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
