// focklab command line: build states, convolve, gaussify, measure, sweep.
// Exit codes: 0 ok, 1 invariant failure, 2 configuration error, 3 tail abort.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "focklab/charfn.hpp"
#include "focklab/fisher.hpp"
#include "focklab/gaussian.hpp"
#include "focklab/json_io.hpp"
#include "focklab/metrics.hpp"
#include "focklab/poincare.hpp"

namespace fl = focklab;

namespace {

fl::DensityMatrix load_state(const std::string& path) {
    fl::json j = fl::load_json_file(path);
    if (j.contains("kind")) return fl::build_state(fl::state_spec_from_json(j));
    return fl::density_from_json(j);
}

void emit(const fl::json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        fl::save_text_file(out, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"focklab: truncated Fock-space convolution laboratory"};
    app.require_subcommand(1);

    std::string config_path, state_path, other_path, out_path;
    std::vector<int> n_list;
    int cutoff = -1;
    std::uint64_t seed = 1;
    double eta = 0.5;
    int self_n = 0;
    double theta = 0.0;
    std::string z_arg = "0,1";

    auto* state_cmd = app.add_subcommand("state", "state construction");
    auto* build_cmd = state_cmd->add_subcommand("build", "build a state from a JSON spec");
    build_cmd->add_option("--config", config_path, "state spec JSON")->required();
    build_cmd->add_option("--out", out_path, "output path (stdout if omitted)");

    auto* conv_cmd = app.add_subcommand("convolve", "binary or n-fold convolution");
    conv_cmd->add_option("--a", state_path, "first state JSON")->required();
    conv_cmd->add_option("--b", other_path, "second state JSON");
    conv_cmd->add_option("--eta", eta, "transmissivity in [0,1]");
    conv_cmd->add_option("--self", self_n, "n-fold symmetric self convolution");
    conv_cmd->add_option("--cutoff", cutoff, "output photon cap");
    conv_cmd->add_option("--out", out_path, "output path");

    auto* gauss_cmd = app.add_subcommand("gaussify", "Gaussification of a state");
    gauss_cmd->add_option("--state", state_path, "state JSON")->required();
    gauss_cmd->add_option("--out", out_path, "output path");

    auto* metrics_cmd = app.add_subcommand("metrics", "distances between two states");
    metrics_cmd->add_option("--a", state_path, "first state")->required();
    metrics_cmd->add_option("--b", other_path, "second state")->required();
    metrics_cmd->add_option("--out", out_path, "output path");

    auto* fisher_cmd = app.add_subcommand("fisher", "SLD Fisher quantities");
    fisher_cmd->add_option("--state", state_path, "state JSON")->required();
    fisher_cmd->add_option("--out", out_path, "output path");

    auto* poincare_cmd = app.add_subcommand("poincare", "Poincare gap estimate");
    poincare_cmd->add_option("--state", state_path, "state JSON")->required();
    poincare_cmd->add_option("--cutoff", cutoff, "estimation cutoff");
    poincare_cmd->add_option("--theta", theta, "also check a phase rotation");
    poincare_cmd->add_option("--out", out_path, "output path");

    auto* sweep_cmd = app.add_subcommand("sweep", "n-sweep of rho^{boxplus n}");
    sweep_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    sweep_cmd->add_option("--n-list", n_list, "override n list");
    sweep_cmd->add_option("--cutoff", cutoff, "override photon cap");
    sweep_cmd->add_option("--seed", seed, "override seed");
    sweep_cmd->add_option("--out", out_path, "override output directory");

    auto* probe_cmd = app.add_subcommand("probe-chi", "sqrt(n) chi-error series");
    probe_cmd->add_option("--state", state_path, "state JSON")->required();
    probe_cmd->add_option("--z", z_arg, "probe point re,im (default 0,1)");
    probe_cmd->add_option("--n-list", n_list, "n values");
    probe_cmd->add_option("--out", out_path, "output path");

    auto* check_cmd = app.add_subcommand("check", "run the invariant suite");
    check_cmd->add_option("--seed", seed, "suite seed");
    check_cmd->add_option("--cutoff", cutoff, "seeded state cutoff");
    check_cmd->add_option("--out", out_path, "write the report here too");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build_cmd->parsed()) {
            emit(fl::to_json(load_state(config_path)), out_path);
        } else if (conv_cmd->parsed()) {
            fl::DensityMatrix a = load_state(state_path);
            fl::ConvolutionReport report = [&] {
                if (self_n > 0) {
                    fl::CutoffPolicy policy;
                    if (cutoff > 0) policy.n_max = cutoff;
                    return fl::self_convolve(a, self_n, policy);
                }
                if (other_path.empty())
                    throw fl::ConfigError("convolve: need --b or --self");
                fl::DensityMatrix b = load_state(other_path);
                if (cutoff > 0)
                    return fl::convolve(a, b, eta, fl::CutoffPolicy{cutoff, 1e-8});
                return fl::convolve(a, b, eta);
            }();
            emit(fl::to_json(report), out_path);
        } else if (gauss_cmd->parsed()) {
            fl::DensityMatrix rho = load_state(state_path);
            fl::GaussianSpec spec = fl::gaussify(rho);
            fl::json j = fl::to_json(spec);
            try {
                j["fock_synthesis"] = fl::to_json(fl::gaussify_fock(rho));
            } catch (const fl::UnsupportedFrameError& e) {
                j["fock_synthesis"] = nullptr;
                j["fock_synthesis_note"] = e.what();
            }
            emit(j, out_path);
        } else if (metrics_cmd->parsed()) {
            fl::DensityMatrix a = load_state(state_path);
            fl::DensityMatrix b = load_state(other_path);
            fl::RelEntropyResult rel = fl::relative_entropy_detailed(a, b);
            fl::json j{{"trace_distance", fl::trace_distance(a, b)},
                       {"hs_distance", fl::hs_distance(a, b)}};
            if (rel.infinite) {
                j["relative_entropy"] = "inf";
                j["rho_mass_outside_support"] = rel.rho_mass_outside;
            } else {
                j["relative_entropy"] = rel.value;
            }
            emit(j, out_path);
        } else if (fisher_cmd->parsed()) {
            fl::DensityMatrix rho = load_state(state_path);
            fl::FisherResult I = fl::sld_fisher(rho);
            fl::FisherDistanceResult J = fl::fisher_distance(rho);
            fl::CovarianceData cov = fl::covariance(rho);
            double kmb = fl::kmb_fisher(rho);
            fl::json j{{"I_total", I.total},
                       {"J_total", J.total},
                       {"mu", std::vector<double>(cov.mu.data(),
                                                  cov.mu.data() + cov.mu.size())}};
            std::vector<double> ipm(I.per_mode.data(),
                                    I.per_mode.data() + I.per_mode.size());
            std::vector<double> jpm(J.per_mode.data(),
                                    J.per_mode.data() + J.per_mode.size());
            j["I_per_mode"] = ipm;
            j["J_per_mode"] = jpm;
            if (std::isinf(kmb))
                j["kmb"] = "inf";
            else
                j["kmb"] = kmb;
            emit(j, out_path);
        } else if (poincare_cmd->parsed()) {
            fl::DensityMatrix rho = load_state(state_path);
            if (cutoff > 0) {
                fl::FockCutoff target(std::vector<int>(rho.modes(), cutoff));
                bool grows = false;
                for (int j = 0; j < rho.modes(); ++j)
                    if (target.max_photons(j) > rho.cutoff().max_photons(j))
                        grows = true;
                rho = grows ? fl::pad_to(rho, target) : fl::truncate_to(rho, target);
            }
            fl::GapEstimate gap = fl::estimate_gap(rho);
            fl::json j = fl::to_json(gap);
            if (theta != 0.0) {
                auto [before, after] = fl::passive_invariance_check(rho, theta);
                j["phase_rotation"] = {{"theta", theta},
                                       {"lambda_before", before},
                                       {"lambda_after", after}};
            }
            emit(j, out_path);
        } else if (sweep_cmd->parsed()) {
            fl::ExperimentConfig cfg =
                fl::experiment_config_from_json(fl::load_json_file(config_path));
            if (!n_list.empty()) cfg.n_list = n_list;
            if (cutoff > 0) cfg.cutoff = cutoff;
            if (sweep_cmd->count("--seed")) cfg.seed = seed;
            if (!out_path.empty()) cfg.out_dir = out_path;
            std::vector<fl::ConvergenceRecord> records = fl::run_sweep(cfg);

            std::ostringstream csv;
            fl::write_csv(records, csv);
            bool aborted = !records.empty() && records.back().tail_aborted;
            if (cfg.out_dir.empty()) {
                std::cout << csv.str();
            } else {
                std::filesystem::create_directories(cfg.out_dir);
                fl::save_text_file(cfg.out_dir + "/sweep.csv", csv.str());
                fl::save_text_file(cfg.out_dir + "/trace.svg",
                                   fl::render_svg(records, "trace"));
                fl::save_text_file(cfg.out_dir + "/relent.svg",
                                   fl::render_svg(records, "relent"));
                fl::json report;
                report["aborted"] = aborted;
                for (const std::string& metric : {"trace", "relent"}) {
                    try {
                        fl::SlopeFit fit = fl::fit_slope(records, metric);
                        report["fit"][metric] = {{"slope", fit.slope},
                                                 {"intercept", fit.intercept},
                                                 {"r2", fit.r2},
                                                 {"points", fit.points_used}};
                    } catch (const fl::Error& e) {
                        report["fit"][metric] = e.what();
                    }
                }
                fl::save_text_file(cfg.out_dir + "/report.json",
                                   report.dump(2) + "\n");
            }
            if (aborted) {
                std::cerr << "sweep aborted on tail budget\n";
                return 3;
            }
        } else if (probe_cmd->parsed()) {
            fl::DensityMatrix rho = load_state(state_path);
            double re = 0.0, im = 0.0;
            if (std::sscanf(z_arg.c_str(), "%lf,%lf", &re, &im) != 2)
                throw fl::ConfigError("probe-chi: --z wants re,im");
            if (n_list.empty()) n_list = {16, 32, 64, 128, 256};
            std::vector<double> series =
                fl::chi_rate_probe(rho, n_list, fl::cd(re, im));
            fl::json j;
            for (std::size_t i = 0; i < n_list.size(); ++i)
                j.push_back({{"n", n_list[i]}, {"value", series[i]}});
            emit(j, out_path);
        } else if (check_cmd->parsed()) {
            fl::InvariantReport report =
                fl::run_invariant_suite(seed, cutoff > 0 ? cutoff : 6);
            std::cout << report.text;
            if (!out_path.empty()) fl::save_text_file(out_path, report.text);
            return report.all_pass ? 0 : 1;
        }
    } catch (const fl::TailBudgetError& e) {
        std::cerr << "tail budget abort: " << e.what() << "\n";
        return 3;
    } catch (const fl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const fl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
