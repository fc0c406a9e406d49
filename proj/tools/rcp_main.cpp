#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcp/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rcp - renewal contact process experiment runner"};
    app.footer("commands: simulate, survival-curve, lambda-scan, lambda-upper, "
               "gap-prob, count-tail, quiet-interval, coupling, far-gap, levels, "
               "conditions");

    std::string command;
    std::string config_path;
    std::string out_path;
    std::string seed_value;
    std::string replicas_value;
    std::vector<std::string> sets;
    app.add_option("command", command, "experiment command")->required();
    app.add_option("--config", config_path, "config file with key = value lines");
    app.add_option("--seed", seed_value, "master seed (overrides config)");
    app.add_option("--replicas", replicas_value, "replica count (overrides config)");
    app.add_option("--out", out_path, "output CSV path (overrides config)");
    app.add_option("--set", sets, "key=value override, repeatable");

    CLI11_PARSE(app, argc, argv);

    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot read config file '%s'\n",
                         config_path.c_str());
            return 4;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = buf.str();
    }
    if (!seed_value.empty()) sets.push_back("seed=" + seed_value);
    if (!replicas_value.empty()) sets.push_back("replicas=" + replicas_value);
    if (!out_path.empty()) sets.push_back("out=" + out_path);

    try {
        const auto spec = rcp::ExperimentSpec::parse(command, config_text, sets);
        return rcp::run_command(spec);
    } catch (const rcp::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 2;
    }
}
