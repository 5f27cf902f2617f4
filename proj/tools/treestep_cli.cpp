// Command-line front end: `sweep` runs a BER sweep over an SNR grid,
// `param-study` sweeps TreeStep (L,V,K) tuples at a fixed SNR, and
// `verify` runs the library self-check battery.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vpp/harness.hpp"

namespace {

std::vector<double> parse_snr_grid(const std::string& spec) {
    // "start:step:stop" (inclusive stop, within half a step) or a single value
    std::vector<double> grid;
    double start = 0, step = 0, stop = 0;
    if (sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &step, &stop) == 3) {
        if (step <= 0) throw CLI::ValidationError("--snr", "step must be positive");
        for (double v = start; v <= stop + step * 0.5; v += step) grid.push_back(v);
    } else {
        grid.push_back(std::stod(spec));
    }
    return grid;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<vpp::TreeStepParams> parse_param_grid(const std::string& spec) {
    // semicolon-separated "L,V,K" or "L,V,K,B" tuples
    std::vector<vpp::TreeStepParams> grid;
    for (const auto& tuple : split_list(spec, ';')) {
        const auto parts = split_list(tuple, ',');
        if (parts.size() != 3 && parts.size() != 4)
            throw CLI::ValidationError("--grid", "expected L,V,K or L,V,K,B tuples");
        vpp::TreeStepParams p;
        p.L = std::stoi(parts[0]);
        p.V = std::stoi(parts[1]);
        p.K = std::stoi(parts[2]);
        p.B = parts.size() == 4 ? std::stoi(parts[3]) : p.V;
        grid.push_back(p);
    }
    return grid;
}

struct CommonOpts {
    vpp::SweepConfig cfg;
    std::string snr_spec = "0:5:20";
    std::string precoder_list = "treestep,fse,fse_mod,rzf";
    std::string out_path;
    std::string format_name = "csv";
    std::string early_abort = "2000";
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--nt", o.cfg.n_tx, "transmit antennas");
    cmd->add_option("--nu", o.cfg.n_users, "single-antenna users");
    cmd->add_option("--mod", o.cfg.mod_order, "QAM order")
        ->check(CLI::IsMember({4, 16, 64}));
    cmd->add_option("--snr", o.snr_spec, "SNR grid, start:step:stop dB or a single value");
    cmd->add_option("--precoders", o.precoder_list,
                    "comma list from zf,rzf,fse,fse_mod,treestep,oracle");
    cmd->add_option("--L", o.cfg.treestep_params.L, "full-expansion depth (real dims)");
    cmd->add_option("--V", o.cfg.treestep_params.V, "expansion half-width");
    cmd->add_option("--K", o.cfg.treestep_params.K, "random repetitions");
    cmd->add_option("--B", o.cfg.treestep_params.B, "random-init half-width (<= V)");
    cmd->add_option("--channels", o.cfg.n_channels, "channel instances");
    cmd->add_option("--vectors", o.cfg.n_vectors_per_channel, "transmit vectors per channel");
    cmd->add_option("--seed", o.cfg.master_seed, "master seed");
    cmd->add_option("--power", o.cfg.power_P, "per-antenna power budget");
    cmd->add_option("--out", o.out_path, "output file (stdout when omitted)");
    cmd->add_option("--format", o.format_name, "csv, json, or plotdat")
        ->check(CLI::IsMember({"csv", "json", "plotdat"}));
    cmd->add_option("--workers", o.cfg.workers, "worker threads");
    cmd->add_option("--early-abort", o.early_abort,
                    "stop a cell at this many bit errors, or 'off'");
}

void finalize_opts(CommonOpts& o) {
    o.cfg.snr_grid_db = parse_snr_grid(o.snr_spec);
    o.cfg.precoders = split_list(o.precoder_list, ',');
    o.cfg.fse_V = o.cfg.treestep_params.V;
    o.cfg.early_abort_errors =
        (o.early_abort == "off") ? 0 : std::stoull(o.early_abort);
}

void write_output(const std::vector<vpp::BerRecord>& records, const CommonOpts& o) {
    const vpp::OutputFormat fmt = vpp::parse_output_format(o.format_name);
    if (o.out_path.empty())
        std::cout << vpp::format_records(records, fmt);
    else
        vpp::emit_results(records, o.out_path, fmt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TreeStep vector-perturbation precoding simulator"};
    app.require_subcommand(1);

    CommonOpts sweep_opts;
    sweep_opts.cfg.workers = static_cast<int>(std::thread::hardware_concurrency());
    CLI::App* sweep = app.add_subcommand("sweep", "BER sweep over an SNR grid");
    add_common_flags(sweep, sweep_opts);

    CommonOpts study_opts;
    study_opts.cfg.workers = static_cast<int>(std::thread::hardware_concurrency());
    study_opts.cfg.snr_grid_db = {5.0};
    study_opts.snr_spec = "5";
    std::string grid_spec = "1,1,0;2,1,0;3,1,0;1,2,0;1,1,1;1,1,3";
    CLI::App* study = app.add_subcommand(
        "param-study", "BER vs complexity across TreeStep (L,V,K) tuples at one SNR");
    add_common_flags(study, study_opts);
    study->add_option("--grid", grid_spec, "semicolon list of L,V,K[,B] tuples");

    std::uint64_t verify_seed = 1;
    CLI::App* verify = app.add_subcommand("verify", "run the library self-checks");
    verify->add_option("--seed", verify_seed, "seed for the check battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            finalize_opts(sweep_opts);
            write_output(vpp::run_sweep(sweep_opts.cfg), sweep_opts);
        } else if (study->parsed()) {
            finalize_opts(study_opts);
            const auto grid = parse_param_grid(grid_spec);
            write_output(vpp::run_param_study(study_opts.cfg, grid), study_opts);
        } else if (verify->parsed()) {
            const vpp::VerifyReport report = vpp::verify_suite(verify_seed);
            for (const auto& chk : report.checks)
                std::cout << (chk.pass ? "[PASS] " : "[FAIL] ") << chk.name << " — "
                          << chk.detail << "\n";
            if (!report.all_pass()) {
                std::cout << "verify: FAILED\n";
                return 1;
            }
            std::cout << "verify: all checks passed\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
