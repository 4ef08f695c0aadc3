// bohmsim: command-line front end for the experiment runner.
//
// Exit codes: 0 success, 1 invalid config or arguments, 2 runtime failure
// (partial artifacts may exist; see manifest.json).

#include "bohm/errors.hpp"
#include "bohm/experiment.hpp"
#include "bohm/pattern.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw bohm::IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw bohm::ConfigError({{bohm::Diagnostic::Level::error, "", std::string("JSON parse error: ") + e.what()}});
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bohmian trajectory experiments for entangled two-oscillator states"};
    app.set_version_flag("--version", bohm::version_string);
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = -1;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run an experiment from a config or a manifest");
    run->add_option("config", config_path, "config or manifest.json")->required();
    run->add_option("-o,--output-dir", out_dir, "override output_dir");
    run->add_option("-w,--workers", workers, "worker threads (BOHM_WORKERS takes precedence)");
    run->add_flag("-q,--quiet", quiet, "no progress lines");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "config or manifest.json")->required();

    std::string dump, image;
    bool linear = false;
    int scale = 1;
    auto* render = app.add_subcommand("render", "render a pattern dump as a PPM image");
    render->add_option("dump", dump, "pattern dump (.pattern.csv)")->required();
    render->add_option("-o,--output", image, "image path (default: dump path with .ppm)");
    render->add_flag("--linear", linear, "linear instead of log color scale");
    render->add_option("--scale", scale, "pixels per cell")->check(CLI::PositiveNumber);

    std::string dump_a, dump_b, norm = "unit_frobenius";
    auto* distance = app.add_subcommand("distance", "Frobenius distance between two pattern dumps");
    distance->add_option("a", dump_a)->required();
    distance->add_option("b", dump_b)->required();
    distance->add_option("-n,--normalization", norm, "unit_frobenius or unit_mass");

    std::string experiment, preset = "desk";
    auto* templ = app.add_subcommand("template", "print the preset defaults of an experiment");
    templ->add_option("experiment", experiment)->required();
    templ->add_option("-p,--preset", preset, "desk or paper");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) {
            const auto diag = bohm::validate_config(read_json(config_path));
            bohm::print_diagnostics(std::cout, diag);
            const bool bad = bohm::has_errors(diag);
            std::cout << (bad ? "invalid" : "valid") << '\n';
            return bad ? 1 : 0;
        }
        if (*run) {
            auto doc = read_json(config_path);
            auto& cfg_doc = bohm::is_manifest(doc) ? doc["config"] : doc;
            if (!out_dir.empty()) cfg_doc["output_dir"] = out_dir;
            if (workers >= 0) cfg_doc["workers"] = workers;
            const auto diag = bohm::validate_config(cfg_doc);
            bohm::print_diagnostics(std::cerr, diag);
            const auto cfg = bohm::parse_config(cfg_doc);
            const auto out = bohm::run_experiment(cfg, quiet ? nullptr : &std::cerr);
            std::cout << cfg.output_dir << "/manifest.json\n";
            if (out.aborted > 0) std::cerr << out.aborted << " trajectories aborted near nodes\n";
            return 0;
        }
        if (*render) {
            const auto g = bohm::load_pattern(dump);
            if (image.empty()) {
                image = dump;
                const std::string suffix = ".pattern.csv";
                if (image.size() > suffix.size() && image.ends_with(suffix)) image.resize(image.size() - suffix.size());
                image += ".ppm";
            }
            bohm::RenderOptions opt;
            opt.log_scale = !linear;
            opt.scale = scale;
            bohm::render_ppm(g, image, opt);
            std::cout << image << '\n';
            return 0;
        }
        if (*distance) {
            const auto n = bohm::parse_normalization(norm);
            const auto d = bohm::frobenius_distance(bohm::load_pattern(dump_a), bohm::load_pattern(dump_b), n);
            std::cout.precision(12);
            std::cout << d.value << '\n';
            return 0;
        }
        if (*templ) {
            const auto kind = bohm::parse_experiment(experiment);
            if (!kind) {
                std::cerr << "unknown experiment '" << experiment << "'; one of:";
                for (auto k : bohm::all_experiments()) std::cerr << ' ' << bohm::to_string(k);
                std::cerr << '\n';
                return 1;
            }
            if (preset != "desk" && preset != "paper") {
                std::cerr << "preset must be desk or paper\n";
                return 1;
            }
            auto j = bohm::preset_defaults(*kind, preset == "paper" ? bohm::Preset::paper : bohm::Preset::desk);
            j["experiment"] = experiment;
            j["preset"] = preset;
            j["output_dir"] = "out/" + experiment;
            std::cout << j.dump(2) << '\n';
            return 0;
        }
    } catch (const bohm::ConfigError& e) {
        bohm::print_diagnostics(std::cerr, e.diagnostics());
        return 1;
    } catch (const bohm::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const bohm::PartialRunError& e) {
        std::cerr << "run failed, partial artifacts kept: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
