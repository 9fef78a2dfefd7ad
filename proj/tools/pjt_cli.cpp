// pjt: command line front end. Subcommands: spectrum, apes, converge.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pjt/pjt.hpp"

namespace {

std::vector<int> parse_cutoff_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size())
            throw std::invalid_argument("bad cutoff '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void add_source_options(CLI::App* cmd, pjt::RunConfig& cfg) {
    cmd->add_option("--preset", cfg.preset, "Defect preset (SiV, GeV, SnV, PbV)");
    cmd->add_option("--params", cfg.params_path, "Parameter file (key=value)");
    cmd->add_option("--tolerance", cfg.tolerance, "Eigenpair residual tolerance (meV)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Product Jahn-Teller vibronic solver for group-IV vacancy centers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pjt::kToolVersion));

    pjt::RunConfig cfg;
    std::string output;
    std::string cutoff_list;
    app.add_option("--output", output, "Write CSV here instead of standard output");

    auto* spectrum = app.add_subcommand("spectrum", "Lowest vibronic levels with characters, R and delta");
    add_source_options(spectrum, cfg);
    spectrum->add_option("--cutoff", cfg.cutoff, "Fock cutoff n+m <= N")->capture_default_str();
    spectrum->add_option("--states", cfg.num_states, "Number of levels")->capture_default_str();
    spectrum->add_option("--output", output, "Write CSV here instead of standard output");

    auto* apes = app.add_subcommand("apes", "Classical APES sheets along x at fixed y");
    add_source_options(apes, cfg);
    apes->add_option("--xmin", cfg.x_min)->capture_default_str();
    apes->add_option("--xmax", cfg.x_max)->capture_default_str();
    apes->add_option("--points", cfg.points)->capture_default_str();
    apes->add_option("--y", cfg.y)->capture_default_str();
    apes->add_option("--output", output, "Write CSV here instead of standard output");

    auto* converge = app.add_subcommand("converge", "Lowest levels and delta versus Fock cutoff");
    add_source_options(converge, cfg);
    converge->add_option("--cutoffs", cutoff_list, "Comma separated ascending cutoffs")->required();
    converge->add_option("--states", cfg.num_states, "Number of levels")->capture_default_str();
    converge->add_option("--threshold", cfg.converge_threshold, "Ground-energy convergence threshold (meV)")
        ->capture_default_str();
    converge->add_option("--output", output, "Write CSV here instead of standard output");

    CLI11_PARSE(app, argc, argv);

    if (converge->parsed()) {
        try {
            cfg.cutoffs = parse_cutoff_list(cutoff_list);
        } catch (const std::exception& e) {
            std::cerr << "error: --cutoffs: " << e.what() << "\n";
            return 1;
        }
    }

    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) {
            std::cerr << "error: cannot open '" << output << "' for writing\n";
            return 1;
        }
    }
    std::ostream& out = output.empty() ? std::cout : file;
    out.imbue(std::locale::classic());

    if (spectrum->parsed())
        return pjt::cmd_spectrum(cfg, out, std::cerr);
    if (apes->parsed())
        return pjt::cmd_apes(cfg, out, std::cerr);
    return pjt::cmd_converge(cfg, out, std::cerr);
}
