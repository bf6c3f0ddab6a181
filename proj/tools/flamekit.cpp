// flamekit: command-line front end for the thermal/RGB dataset pipeline.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "flame/cli.hpp"
#include "flame/error.hpp"

using flame::cli::Config;

namespace {

// Flag values stay unset unless given, so they can be layered over the config file.
struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> input, output, profiles, camera, normalization, host, plot, dataset_dir, ui_dir,
        correspondences, write_profile;
    std::optional<double> tolerance, no_fire_max, fire_min, ignition, ambient, nominal_interval, overlay_threshold;
    std::optional<int> port, jobs, pairs, videos;
    bool dry_run = false;
    bool no_nadir = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key = value settings file (flags override it)");
    sub->add_flag("--dry-run", f.dry_run, "print the plan without writing");
    sub->add_option("--jobs,-j", f.jobs, "worker threads (0: all cores)");
}

void add_output(CLI::App* sub, Flags& f, const char* help = "workspace / output root") {
    sub->add_option("--output,-o", f.output, help);
}

Config resolve(const Flags& f) {
    Config c;
    if (f.config) flame::cli::apply_config_file(c, *f.config);
    if (f.input) c.input = *f.input;
    if (f.output) c.output = *f.output;
    if (f.profiles) c.profiles_file = *f.profiles;
    if (f.camera) c.camera_model = *f.camera;
    if (f.normalization) c.normalization = flame::colormap::NormalizationMode::parse(*f.normalization);
    if (f.host) c.host = *f.host;
    if (f.plot) c.plot_id = *f.plot;
    if (f.dataset_dir) c.dataset_dir = *f.dataset_dir;
    if (f.ui_dir) c.ui_dir = *f.ui_dir;
    if (f.correspondences) c.correspondences = *f.correspondences;
    if (f.write_profile) c.write_profile = *f.write_profile;
    if (f.tolerance) c.tolerance = *f.tolerance;
    if (f.no_fire_max) c.thresholds.no_fire_max = *f.no_fire_max;
    if (f.fire_min) c.thresholds.fire_min = *f.fire_min;
    if (f.ignition) c.ignition_threshold = *f.ignition;
    if (f.ambient) c.ambient = *f.ambient;
    if (f.nominal_interval) c.nominal_interval = *f.nominal_interval;
    if (f.overlay_threshold) c.overlay_threshold = *f.overlay_threshold;
    if (f.port) c.port = *f.port;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.pairs) c.fixture_pairs = *f.pairs;
    if (f.videos) c.fixture_videos = *f.videos;
    if (f.dry_run) c.dry_run = true;
    if (f.no_nadir) c.fixture_nadir = false;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flamekit: sort, label, align, review and export paired RGB/thermal UAV imagery"};
    app.require_subcommand(1);
    Flags f;

    auto* sort = app.add_subcommand("sort", "scan raw media, pair by time, write TIFF / thermal JPEG / aligned RGB");
    sort->add_option("--input,-i", f.input, "raw media root");
    add_output(sort, f);
    sort->add_option("--tolerance", f.tolerance, "pairing window in seconds (default 2)");
    sort->add_option("--profiles", f.profiles, "camera profiles file");
    sort->add_option("--camera", f.camera, "force one camera profile");
    sort->add_option("--normalization", f.normalization, "minmax or fixed:LO:HI");

    auto* label = app.add_subcommand("label", "threshold pre-labeling and sorting into label folders");
    add_output(label, f);
    label->add_option("--no-fire-max", f.no_fire_max, "NO_FIRE below this max temperature (default 80)");
    label->add_option("--fire-min", f.fire_min, "FIRE above this max temperature (default 200)");

    auto* align = app.add_subcommand("align", "estimate FOV correction or refresh aligned RGB frames");
    add_output(align, f);
    align->add_option("--correspondences", f.correspondences, "CSV rgb_x,rgb_y,thermal_x,thermal_y");
    align->add_option("--camera", f.camera, "camera profile to estimate for / force");
    align->add_option("--profiles", f.profiles, "camera profiles file");
    align->add_option("--write-profile", f.write_profile, "write profiles with the estimate applied");

    auto* serve = app.add_subcommand("serve", "HTTP review service over a workspace");
    add_output(serve, f);
    serve->add_option("--host", f.host, "bind address (default 127.0.0.1)");
    serve->add_option("--port,-p", f.port, "port (default 8765)");
    serve->add_option("--ui-dir", f.ui_dir, "static UI assets to serve at /");
    serve->add_option("--overlay-threshold", f.overlay_threshold, "default overlay threshold degC");

    auto* stack = app.add_subcommand("stack", "nadir plot arrival time / rate of spread / energy products");
    stack->add_option("--input,-i", f.input, "plot directory, or a directory of plot directories");
    add_output(stack, f);
    stack->add_option("--plot", f.plot, "plot id (default: directory name)");
    stack->add_option("--ignition", f.ignition, "ignition threshold degC (default 200)");
    stack->add_option("--ambient", f.ambient, "ambient degC for the energy proxy (default 25)");
    stack->add_option("--interval", f.nominal_interval, "nominal frame interval s (default 5)");

    auto* exp = app.add_subcommand("export", "ML dataset of FIRE / NO_FIRE pairs");
    add_output(exp, f);
    exp->add_option("--dataset-dir", f.dataset_dir, "destination (default OUTPUT/dataset)");
    exp->add_option("--normalization", f.normalization, "minmax or fixed:LO:HI");

    auto* fix = app.add_subcommand("fixtures", "write the synthetic raw tree and nadir plot");
    add_output(fix, f, "destination root");
    fix->add_option("--pairs", f.pairs, "image pairs (default 6)");
    fix->add_option("--videos", f.videos, "video pairs (default 0)");
    fix->add_option("--camera", f.camera, "camera model (default M30T)");
    fix->add_option("--profiles", f.profiles, "camera profiles file");
    fix->add_flag("--no-nadir", f.no_nadir, "skip the nadir plot");

    for (auto* sub : {sort, label, align, serve, stack, exp, fix}) add_common(sub, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : flame::cli::kBadConfig;
    }

    Config cfg;
    try {
        cfg = resolve(f);
    } catch (const flame::Error& e) {
        std::cerr << "error [" << flame::to_string(e.code()) << "]: " << e.what() << '\n';
        return flame::cli::kBadConfig;
    }

    if (sort->parsed()) return flame::cli::cmd_sort(cfg, std::cout);
    if (label->parsed()) return flame::cli::cmd_label(cfg, std::cout);
    if (align->parsed()) return flame::cli::cmd_align(cfg, std::cout);
    if (serve->parsed()) return flame::cli::cmd_serve(cfg, std::cout);
    if (stack->parsed()) return flame::cli::cmd_stack(cfg, std::cout);
    if (exp->parsed()) return flame::cli::cmd_export(cfg, std::cout);
    if (fix->parsed()) return flame::cli::cmd_fixtures(cfg, std::cout);
    return flame::cli::kBadConfig;
}
