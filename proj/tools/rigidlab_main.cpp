#include "rigidlab/cli.hpp"
#include "rigidlab/errors.hpp"
#include "rigidlab/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace {

const std::map<std::string, std::string> kDescriptions = {
    {"periodic-points", "enumerate periodic orbits and their Jacobian data"},
    {"transfer-spectrum", "leading eigenvalue and eigenfunction of the transfer operator"},
    {"normalize-potential", "normalized potential with L 1 = 1"},
    {"livshits-solve", "solve u o f - u = psi, or compare two potentials through periodic sums"},
    {"conjugacy", "conjugacy between two maps with the same linear part"},
    {"fiber-estimate", "common kernel of normalized potential gradients"},
    {"rigidity-check", "Jacobian periodic data match and rigidity hypothesis certificates"},
    {"factor-check", "Jacobian quotient test for a skew or product map over a circle base"},
    {"regularity", "Holder regularity of the dll series and its case classification"},
    {"dll-beta", "sample the dll series and check its functional equation"},
    {"lattice-verify", "exact checks on the Heisenberg lattice, the infratorus and the Klein bottle"},
    {"examples", "built-in example suite"},
};

std::string error_type(const std::string& what) {
    const auto pos = what.find(':');
    return pos == std::string::npos ? "Error" : what.substr(0, pos);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigidlab: numerical laboratory for smooth rigidity of expanding maps"};
    app.require_subcommand(1);

    std::string config_path, out_dir, example_case, lattice_target;
    unsigned threads = 0;
    int resolution = 0, period_cap = 0, word_length = 0;

    for (const auto& name : rigidlab::subcommand_names()) {
        auto* sub = app.add_subcommand(name, kDescriptions.at(name));
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory for report.json, timings.json and CSV files");
        sub->add_option("--threads", threads, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
        sub->add_option("--resolution", resolution, "grid resolution (power of two)");
        sub->add_option("--period-cap", period_cap, "largest period considered");
        if (name == "examples") sub->add_option("--case", example_case, "example to run (default: all)");
        if (name == "lattice-verify") {
            sub->add_option("--target", lattice_target, "heisenberg, infratorus, klein or all");
            sub->add_option("--word-length", word_length, "word length bound for the Heisenberg sweeps");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    rigidlab::ExperimentConfig cfg;
    rigidlab::RunResult result;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            try {
                j = nlohmann::json::parse(is);
            } catch (const nlohmann::json::exception& e) {
                throw rigidlab::ConfigError(std::string("cannot parse config: ") + e.what());
            }
        }
        if (!j.is_object()) throw rigidlab::ConfigError("config must be a JSON object");
        if (resolution) j["resolution"] = resolution;
        if (period_cap) j["period_cap"] = period_cap;
        if (!example_case.empty()) j["options"]["case"] = example_case;
        if (!lattice_target.empty()) j["options"]["target"] = lattice_target;
        if (word_length) j["options"]["word_length"] = word_length;
        cfg = rigidlab::ExperimentConfig::from_json(j);
        if (out_dir.empty()) out_dir = cfg.output_dir;
        rigidlab::set_thread_count(threads ? threads : std::max(1u, std::thread::hardware_concurrency()));
        result = rigidlab::run_subcommand(subcommand, cfg);
    } catch (const rigidlab::Error& e) {
        result.report = rigidlab::error_report(subcommand, cfg, error_type(e.what()), e.what(), e.exit_code());
        result.exit_code = e.exit_code();
        std::cerr << e.what() << '\n';
    } catch (const std::exception& e) {
        result.report = rigidlab::error_report(subcommand, cfg, "InternalError", e.what(), 1);
        result.exit_code = 1;
        std::cerr << e.what() << '\n';
    }

    std::cout << result.report.dump(2) << '\n';
    if (!out_dir.empty()) {
        try {
            rigidlab::write_outputs(result, subcommand, out_dir);
        } catch (const rigidlab::Error& e) {
            std::cerr << e.what() << '\n';
            return e.exit_code();
        }
    }
    return result.exit_code;
}
