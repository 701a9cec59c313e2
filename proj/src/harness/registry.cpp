#include <chrono>
#include <map>

#include "rcm/errors.hpp"
#include "rcm/harness/experiments.hpp"

namespace rcm::harness {

namespace {

using Runner = ExperimentResult (*)(const Config&, const Context&);

const std::map<std::string, Runner>& registry() {
    static const std::map<std::string, Runner> r = {
        {"thm12", verify_thm12},
        {"thm13-on", verify_thm13_ondiag},
        {"thm13-off", verify_thm13_offdiag},
        {"lemma22", verify_lemma22},
        {"cor23", verify_cor23},
        {"classical-constant", classical_constant},
        {"theta", run_theta},
        {"sigma", run_sigma},
        {"green", run_green},
        {"potential", run_potential},
        {"llt", run_llt},
        {"env-sample", run_env_sample},
        {"env-inspect", run_env_inspect},
        {"dynamic-annealed", dynamic_annealed},
        {"dynamic-interface", dynamic_interface},
        {"dynamic-thm34", dynamic_thm34},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : registry()) v.push_back(k);
        return v;
    }();
    return ids;
}

ExperimentResult run_experiment(const std::string& id, const Config& cfg, const Context& ctx) {
    auto it = registry().find(id);
    if (it == registry().end()) throw ConfigError("unknown experiment '" + id + "'");
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = it->second(cfg, ctx);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace rcm::harness
