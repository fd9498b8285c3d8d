// Command-line front end: train, eval, sweep, transfer, vi-check.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fran/harness.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string checkpoint;
    std::string rho;
    std::optional<int> episodes;
};

std::vector<double> parse_rho_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument("bad --rho entry '" + item + "'");
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("--rho values must lie in [0, 1]");
        out.push_back(v);
    }
    return out;
}

fran::RunConfig load_config(const Options& o)
{
    fran::RunConfig cfg = o.config.empty() ? fran::RunConfig{} : fran::run_config_from_json(fran::read_text_file(o.config));
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.episodes) cfg.episodes = *o.episodes;
    if (!o.rho.empty()) {
        const std::vector<double> rho = parse_rho_list(o.rho);
        if (rho.size() == 1)
            cfg.scenario.rho.assign(static_cast<std::size_t>(cfg.scenario.num_ue), rho.front());
        else if (static_cast<int>(rho.size()) == cfg.scenario.num_ue)
            cfg.scenario.rho = rho;
        else
            throw std::invalid_argument("--rho needs one value or one per UE");
    }
    cfg.validate();
    return cfg;
}

void print_summary(const fran::EvaluationSummary& s)
{
    std::cout << "episodes " << s.episodes << "\n"
              << "mean discounted reward " << s.mean_discounted_reward << " (95% CI " << s.reward_ci_low() << ", "
              << s.reward_ci_high() << ")\n"
              << "mean power " << s.mean_power_w << " W (95% CI " << s.power_ci_low() << ", " << s.power_ci_high()
              << ")\n";
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "flat JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--episodes", o.episodes, "evaluation epochs")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fog-RAN mode selection and processor control with deep Q-learning"};
    app.set_version_flag("--version", std::string(fran::library_version()));
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "train a policy and write metrics and a checkpoint");
    add_common(train, o);
    train->add_option("--rho", o.rho, "caching probability: one value or one per UE");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or a baseline policy");
    add_common(eval, o);
    eval->add_option("--checkpoint", o.checkpoint, "checkpoint.json or qtable.csv");
    eval->add_option("--rho", o.rho, "caching probability: one value or one per UE");

    auto* sweep = app.add_subcommand("sweep", "train and evaluate one model per rho value");
    add_common(sweep, o);
    sweep->add_option("--rho", o.rho, "comma-separated rho values")->required();

    auto* transfer = app.add_subcommand("transfer", "continue training from a checkpoint");
    add_common(transfer, o);
    transfer->add_option("--checkpoint", o.checkpoint, "source checkpoint")->required()->check(CLI::ExistingFile);
    transfer->add_option("--rho", o.rho, "caching probability of the target environment");

    auto* vi = app.add_subcommand("vi-check", "compare trained agents with value iteration on a small instance");
    add_common(vi, o);
    vi->add_option("--rho", o.rho, "caching probability");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            const auto rows = fran::run_training(load_config(o));
            std::cout << "trained " << rows.size() << " epochs\n";
        } else if (eval->parsed()) {
            const fran::RunConfig cfg = load_config(o);
            print_summary(fran::run_evaluation(o.checkpoint, cfg).summary);
        } else if (sweep->parsed()) {
            Options base = o;
            base.rho.clear();
            const fran::RunConfig cfg = load_config(base);
            for (const auto& e : fran::run_sweep(cfg, parse_rho_list(o.rho))) {
                std::cout << "rho " << e.rho << ": ";
                std::cout << "mean power " << e.summary.mean_power_w << " W (95% CI " << e.summary.power_ci_low()
                          << ", " << e.summary.power_ci_high() << ")\n";
            }
        } else if (transfer->parsed()) {
            const auto rows = fran::run_transfer(o.checkpoint, load_config(o));
            std::cout << "trained " << rows.size() << " epochs from " << o.checkpoint << "\n";
        } else if (vi->parsed()) {
            const fran::ViCheckReport r = fran::run_vi_check(load_config(o));
            std::cout << "value iteration V(s0) " << r.optimal_value << " after " << r.iterations << " sweeps\n"
                      << "epoch-optimal return " << r.horizon_value << "\n"
                      << "DQN return " << r.dqn_return << "\n"
                      << "Q-learning return " << r.q_learning_return << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
