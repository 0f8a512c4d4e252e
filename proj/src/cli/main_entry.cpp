#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "holoseq/cli.hpp"
#include "holoseq/errors.hpp"

namespace holoseq::cli {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw ValidationError("output: cannot write '" + p.string() + "'");
    out << text;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"holoseq: expectations of polynomial jump-diffusions through coefficient sequences"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "Run a config and print the comparison table");
    std::string config;
    std::vector<int> sweep;
    long long mc_paths = -1;
    long long seed = -1;
    std::string out_dir;
    run->add_option("config", config, "JSON run config")->required();
    run->add_option("--sweep-order", sweep, "Comma-separated truncation orders N")->delimiter(',');
    run->add_option("--mc-paths", mc_paths, "Monte Carlo paths (0 disables)");
    run->add_option("--seed", seed, "Monte Carlo seed");
    run->add_option("--out", out_dir, "Directory for results.csv, config.json and flow CSVs");

    app.add_subcommand("list-presets", "List the named models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand("list-presets")) {
        list_presets(out);
        return 0;
    }
    try {
        RunSpec spec = load_run_spec(config);
        if (!sweep.empty()) spec.orders = sweep;
        if (mc_paths >= 0) spec.mc_paths = static_cast<std::size_t>(mc_paths);
        if (seed >= 0) spec.mc.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) spec.out_dir = out_dir;
        spec.validate();
        const RunResult r = execute(spec);
        write_table(out, spec, r);
        if (!spec.out_dir.empty()) {
            const std::filesystem::path dir(spec.out_dir);
            std::filesystem::create_directories(dir);
            std::ostringstream csv;
            write_results_csv(csv, r);
            write_file(dir / "results.csv", csv.str());
            write_file(dir / "config.json", echo_run_spec(spec) + "\n");
            for (const auto& [name, text] : r.flow_files) write_file(dir / name, text);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace holoseq::cli
