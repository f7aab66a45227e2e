#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "experiment.hpp"

using namespace scrambling::cli;

namespace {

const std::map<std::string, std::string>& key_help() {
    static const std::map<std::string, std::string> help = {
        {"model", "circuit model: matching | sequential | lattice"},
        {"graph", "interaction graph: complete | line | lattice"},
        {"mode", "ancilla mode: entangled | pure"},
        {"n", "number of qubits"},
        {"t", "number of gates (sequential) or gates per coarse step (lattice); 0 = default"},
        {"depth", "levels (matching) or coarse steps (lattice); 0 = default"},
        {"d", "lattice dimension"},
        {"f", "subset fraction"},
        {"m", "message qubits, logical qubits, or descent target weight"},
        {"c", "coupon count (subset) or cell-size constant (lattice)"},
        {"trials", "number of trials"},
        {"seed", "master seed"},
        {"from", "start weight"},
        {"subset", "subset size; 0 = floor(f n)"},
        {"samples", "random subsets per size and trial"},
        {"a", "upper absorbing boundary of the walk"},
        {"p-minus", "right-step probability at positions <= 0"},
        {"p-plus", "right-step probability at positions 1..a-1"},
        {"threads", "worker threads (output order is fixed)"},
        {"out", "output file; relative paths go under $SCRAMBLING_OUTPUT_DIR"},
        {"format", "csv | json (default: csv for *.csv, json otherwise)"},
    };
    return help;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scrambling experiments with random Clifford circuits"};
    app.require_subcommand(1);

    struct Bound {
        CLI::App* app;
        std::map<std::string, std::string> values;
        std::string config_file;
        bool dump_config = false;
    };
    std::map<std::string, Bound> bound;
    for (const auto& info : experiment_commands()) {
        Bound& b = bound[info.name];
        b.app = app.add_subcommand(info.name, info.description);
        std::vector<std::string> keys = info.keys;
        keys.insert(keys.end(), {"threads", "out", "format"});
        for (const auto& key : keys) {
            b.app->add_option("--" + key, b.values[key], key_help().at(key));
        }
        b.app->add_option("--config", b.config_file, "key=value file; flags override it");
        b.app->add_flag("--dump-config", b.dump_config, "print the resolved config and exit");
    }

    VerifyOptions verify;
    auto* verify_app = app.add_subcommand("verify", "Run the invariant suites of every module");
    verify_app->add_option("--suite", verify.suite, "fast | full")->check(CLI::IsMember({"fast", "full"}));
    verify_app->add_flag("--mutate-transition", verify.mutate_transition,
                         "perturb the weight-chain transition rule (negative control)");

    CLI11_PARSE(app, argc, argv);

    if (verify_app->parsed()) {
        try {
            return run_verify(verify, std::cout) == 0 ? 0 : 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }

    for (auto& [name, b] : bound) {
        if (!b.app->parsed()) {
            continue;
        }
        ExperimentConfig config;
        try {
            if (!b.config_file.empty()) {
                config.merge_text(read_file(b.config_file));
            }
            for (const auto& [key, value] : b.values) {
                if (b.app->count("--" + key) > 0) {
                    config.set(key, value);
                }
            }
            config.command = name;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
        if (b.dump_config) {
            std::cout << config.to_text();
            return 0;
        }
        try {
            run_experiment(config, std::cout);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: invalid config: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << " (output marked incomplete)\n";
            return 1;
        }
        return 0;
    }
    return 2;
}
