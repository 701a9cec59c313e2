#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcm/errors.hpp"
#include "rcm/harness/experiments.hpp"
#include "rcm/parallel.hpp"

using namespace rcm;
using namespace rcm::harness;

namespace {

constexpr int kExitThreshold = 2;
constexpr int kExitConfig = 3;
constexpr int kExitUsage = 64;

int default_thread_count() {
    if (const char* env = std::getenv("RCM_LAB_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring RCM_LAB_THREADS='" << env << "'\n";
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcm-lab: random walks among random conductances on Z^2"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "csv";
    std::uint64_t seed = 0;
    int threads = default_thread_count();
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "configuration file (flat key = value)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides master_seed)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads (default: RCM_LAB_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "override a config entry, key=value (repeatable)");

    std::string experiment;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& id, const std::string& help) {
        parent->add_subcommand(name, help)->callback([&experiment, id] { experiment = id; });
    };
    auto* env = app.add_subcommand("env", "sample or inspect environment snapshots");
    env->require_subcommand(1);
    leaf(env, "sample", "env-sample", "sample an environment and write a snapshot");
    leaf(env, "inspect", "env-inspect", "summarise a snapshot file");
    leaf(&app, "theta", "theta", "giant-cluster density");
    leaf(&app, "sigma", "sigma", "diffusion matrix and gbar by Monte Carlo");
    leaf(&app, "green", "green", "killed Green function on a cluster ball");
    leaf(&app, "potential", "potential", "potential kernel by both routes");
    leaf(&app, "llt", "llt", "t p_t(0,0) along a time grid");
    auto* verify = app.add_subcommand("verify", "theorem verification pipelines");
    verify->require_subcommand(1);
    for (const char* id : {"thm12", "thm13-on", "thm13-off", "lemma22", "cor23", "classical-constant"})
        leaf(verify, id, id, std::string("verify ") + id);
    auto* dyn = app.add_subcommand("dynamic", "dynamic environments and interfaces");
    dyn->require_subcommand(1);
    leaf(dyn, "annealed", "dynamic-annealed", "annealed heat kernel gradient decay");
    leaf(dyn, "interface", "dynamic-interface", "Langevin interface variance scaling");
    leaf(dyn, "thm34", "dynamic-thm34", "interface variance against the annealed potential kernel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
        for (const auto& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (*seed_opt) cfg.set("master_seed", std::to_string(seed));
        if (cfg.has("experiment") && cfg.get_string("experiment", "") != experiment)
            std::cerr << "note: config declares experiment '" << cfg.get_string("experiment", "") << "', running '"
                      << experiment << "'\n";
        if (cfg.has("out") && out_dir == "out") out_dir = cfg.get_string("out", out_dir);
        if (cfg.has("format") && format == "csv") format = cfg.get_string("format", format);
        if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");

        Context ctx;
        ctx.master_seed = cfg.get_u64("master_seed", 1);
        ctx.threads = threads;
        ctx.out_dir = out_dir;
        RunMeta meta{experiment, cfg.hash_hex(), ctx.master_seed, threads};

        ExperimentResult res = run_experiment(experiment, cfg, ctx);
        if (format == "csv") {
            for (const auto& t : res.tables) write_csv(out_dir, t, meta);
            write_json((std::filesystem::path(out_dir) / (res.id + "_manifest.json")).string(), manifest(res, cfg, meta, false));
        } else {
            auto j = manifest(res, cfg, meta, true);
            write_json((std::filesystem::path(out_dir) / (res.id + ".json")).string(), j);
            std::cout << j.dump(2) << "\n";
        }
        for (const auto& c : res.checks)
            std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.detail << "\n";
        return res.passed() ? 0 : kExitThreshold;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
