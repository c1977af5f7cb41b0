#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "muskat/cli.hpp"
#include "muskat/errors.hpp"
#include "muskat/fvref.hpp"
#include "muskat/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (key=value lines or JSON)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--override", args.overrides, "Config override key=value (repeatable)");
    cmd->add_option("--jobs", args.jobs, "Worker count for sweep mode");
}

muskat::RunConfig load_config(const CommonArgs& args, const std::string& mode) {
    muskat::RunConfig cfg;
    if (const char* env = std::getenv("MUSKAT_JKO_OUT")) cfg.out_dir = env;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw muskat::IoError("cannot read config file " + args.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string prev_out = cfg.out_dir;
        cfg = muskat::parse_config(buf.str());
        if (cfg.out_dir == "out" && prev_out != "out") cfg.out_dir = prev_out;
    }
    for (const std::string& ov : args.overrides) muskat::apply_override(cfg, ov);
    cfg.mode = mode;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.jobs > 0) cfg.jobs = args.jobs;
    return cfg;
}

// FV runs carry no solver certificates; report conservation, the cumulative
// dissipation estimates, and the entropy lower bounds.
muskat::RunReport fv_report(const muskat::Trajectory& traj) {
    muskat::RunReport report;
    report.measured_c_ell = muskat::entropy_bound_constant();
    double drift = 0.0;
    for (const auto& r : traj.records) {
        drift = std::max(drift, std::abs(r.mass_f - 1.0));
        if (r.mass_g > 0.5) drift = std::max(drift, std::abs(r.mass_g - 1.0));
    }
    report.certificates.push_back({"mass_conservation", drift <= 1e-10, drift, 1e-10});
    const auto thm = muskat::check_theorem_estimates(traj);
    report.certificates.push_back(
        {"entropy_dissipation_estimate", std::all_of(thm.entropy_estimate.begin(),
                                                     thm.entropy_estimate.end(),
                                                     [](const auto& e) { return e.ok; }),
         0.0, 0.0});
    report.certificates.push_back(
        {"energy_dissipation_estimate", std::all_of(thm.energy_estimate.begin(),
                                                    thm.energy_estimate.end(),
                                                    [](const auto& e) { return e.ok; }),
         0.0, 0.0});
    return report;
}

int run_compare(const muskat::RunConfig& cfg) {
    const muskat::Trajectory jko = muskat::run_jko_mode(cfg);
    const muskat::Trajectory fv = muskat::run_fv_mode(cfg);
    const muskat::ComparisonReport cmp = muskat::compare_trajectories(jko, fv);
    muskat::RunReport report;
    muskat::emit_outputs(jko, report, cfg, cfg.out_dir);
    muskat::emit_comparison(cmp, cfg.out_dir);
    std::cout << "summary_l2 = " << muskat::format_number(cmp.summary_l2) << "\n";
    return 0;
}

int run_sweep(const muskat::RunConfig& cfg) {
    const std::vector<double> taus = cfg.sweep_taus;
    std::vector<double> summaries(taus.size(), 0.0);
    std::vector<std::string> errors(taus.size());
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= taus.size()) return;
                idx = next++;
            }
            try {
                muskat::RunConfig run = cfg;
                run.tau = taus[idx];
                run.out_dir =
                    (std::filesystem::path(cfg.out_dir) / ("tau_" + std::to_string(idx))).string();
                const muskat::Trajectory jko = muskat::run_jko_mode(run);
                const muskat::Trajectory fv = muskat::run_fv_mode(run);
                const muskat::ComparisonReport cmp = muskat::compare_trajectories(jko, fv);
                muskat::RunReport report;
                muskat::emit_outputs(jko, report, run, run.out_dir);
                muskat::emit_comparison(cmp, run.out_dir);
                summaries[idx] = cmp.summary_l2;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                errors[idx] = e.what();
            }
        }
    };
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < taus.size(); ++i)
        if (!errors[i].empty()) {
            std::cerr << "sweep tau=" << taus[i] << " failed: " << errors[i] << "\n";
            return 1;
        }

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream index(std::filesystem::path(cfg.out_dir) / "sweep.csv");
    index << "tau,summary_l2\n";
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        index << muskat::format_number(taus[i]) << ','
              << muskat::format_number(summaries[i]) << '\n';
        points.emplace_back(taus[i], summaries[i]);
    }
    try {
        const double slope = muskat::estimate_convergence_order(points);
        std::cout << "convergence slope = " << muskat::format_number(slope) << "\n";
    } catch (const muskat::DegenerateFit&) {
        std::cout << "convergence slope: not enough points\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"JKO variational solver and finite-volume reference for the thin-film "
                 "Muskat system"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* jko = app.add_subcommand("run-jko", "Run the variational (JKO) scheme");
    CLI::App* fv = app.add_subcommand("run-fv", "Run the finite-volume reference solver");
    CLI::App* cmp = app.add_subcommand("compare", "Run both solvers and compare trajectories");
    CLI::App* sweep = app.add_subcommand("sweep", "Convergence sweep over tau");
    CLI::App* certify = app.add_subcommand("certify", "Run and check every certificate");
    for (CLI::App* cmd : {jko, fv, cmp, sweep, certify}) add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (jko->parsed() || certify->parsed()) {
            const muskat::RunConfig cfg = load_config(args, jko->parsed() ? "jko" : "certify");
            muskat::Trajectory traj;
            const muskat::RunReport report = muskat::certify_run(cfg, &traj);
            muskat::emit_outputs(traj, report, cfg, cfg.out_dir);
            for (const auto& c : report.certificates)
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                          << " (measured " << muskat::format_number(c.measured) << ")\n";
            return report.all_pass() ? 0 : 1;
        }
        if (fv->parsed()) {
            const muskat::RunConfig cfg = load_config(args, "fv");
            const muskat::Trajectory traj = muskat::run_fv_mode(cfg);
            const muskat::RunReport report = fv_report(traj);
            muskat::emit_outputs(traj, report, cfg, cfg.out_dir);
            return report.all_pass() ? 0 : 1;
        }
        if (cmp->parsed()) return run_compare(load_config(args, "compare"));
        if (sweep->parsed()) return run_sweep(load_config(args, "sweep"));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
