// qnet-asym <mode> --config <path> [--out <path>] [--seed N] [--workers K]

#include "qnet_asym/errors.hpp"
#include "qnet_asym/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace qnet_asym;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The destination only ever holds a complete file: write beside it, then rename.
void write_atomically(const fs::path& dest, const std::string& text)
{
    const fs::path dir = dest.has_parent_path() ? dest.parent_path() : fs::path(".");
    const fs::path tmp = dir / ("." + dest.filename().string() + ".tmp" + std::to_string(::getpid()));
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
            out << text;
            out.flush();
            if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, dest);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool emit_config = false;
};

int run(sweep::Mode mode, const Options& o)
{
    auto cfg = sweep::parse_config(read_file(o.config));
    if (cfg.mode != mode) {
        throw InvalidParameter("config mode '" + std::string(sweep::to_string(cfg.mode)) +
                               "' does not match subcommand '" + std::string(sweep::to_string(mode)) + "'");
    }
    if (o.seed) cfg.chain.master_seed = *o.seed;
    if (o.workers) cfg.workers = *o.workers;
    if (!o.out.empty()) cfg.output = o.out;

    if (o.emit_config) {
        std::cout << sweep::emit_config(cfg);
        return 0;
    }
    if (cfg.output.empty()) throw InvalidParameter("no output path: pass --out or set \"output\" in the config");
    write_atomically(cfg.output, sweep::run_sweep(cfg));
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Asymmetric quantum-network link and chain sweeps"};
    app.require_subcommand(1);

    Options opts;
    sweep::Mode chosen{};
    for (auto mode : {sweep::Mode::Midpoint, sweep::Mode::Dispersion, sweep::Mode::Chain}) {
        const std::string name(sweep::to_string(mode));
        auto* sub = app.add_subcommand(name, name + " sweep");
        sub->add_option("--config", opts.config, "JSON sweep configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out, "CSV destination (overrides \"output\")");
        if (mode == sweep::Mode::Chain) sub->add_option("--seed", opts.seed, "master seed (overrides the config)");
        sub->add_option("--workers", opts.workers, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_flag("--emit-config", opts.emit_config, "print the canonical config and exit");
        sub->callback([mode, &chosen] { chosen = mode; });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        return run(chosen, opts);
    } catch (const std::exception& e) {
        std::cerr << "qnet-asym " << sweep::to_string(chosen) << ": error: " << e.what() << "\n";
        return 1;
    }
}
