#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpp/channel.hpp"
#include "vpp/constellation.hpp"
#include "vpp/precoding.hpp"
#include "vpp/solvers.hpp"

namespace vpp {

// Known precoder tags: zf, rzf, fse, fse_mod, treestep, oracle.
bool is_valid_precoder(const std::string& tag);

struct SweepConfig {
    std::size_t n_users = 8;
    std::size_t n_tx = 8;
    int mod_order = 4;
    std::vector<double> snr_grid_db;
    std::vector<std::string> precoders;
    TreeStepParams treestep_params;
    int fse_V = 1;
    std::size_t n_channels = 128;
    std::size_t n_vectors_per_channel = 128;
    std::uint64_t master_seed = 1;
    double power_P = 1.0;
    int workers = 1;
    // Stop a cell once its error count reaches this value, checked between
    // channels so results stay schedule-independent. 0 disables.
    std::uint64_t early_abort_errors = 0;
};

struct BerRecord {
    std::string precoder;
    double snr_db = 0.0;
    std::size_t nt = 0;
    std::size_t nu = 0;
    int mod_order = 0;
    int L = 0;
    int V = 0;
    int K = 0;
    std::uint64_t bits_total = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double mean_objective = 0.0;
    std::uint64_t complexity_factor = 0;
};

struct TrialResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    double objective = 0.0;  // ||W(u + tau*v)||_inf of the transmitted choice
};

// One end-to-end downlink instance: random bits -> Gray-mapped symbols ->
// perturbation search -> per-antenna normalized transmit -> channel + noise
// -> genie-scaled (modulo for perturbing precoders) demap -> error count.
// The stream forks into independent bit/noise/solver substreams so all
// precoders see identical bits and noise for the same trial key.
TrialResult run_trial(const SweepConfig& cfg, const std::string& precoder,
                      const ChannelInstance& ch, const SnrConfig& snr, RngStream& rng);

// One BerRecord per (precoder, snr) cell. Channels are sampled from streams
// keyed by channel index alone, so every cell sees the same channel set and
// results are independent of worker count and scheduling.
std::vector<BerRecord> run_sweep(const SweepConfig& cfg);

// One record per parameter tuple at fixed system size and the first grid
// SNR, precoder fixed to treestep.
std::vector<BerRecord> run_param_study(const SweepConfig& cfg,
                                       const std::vector<TreeStepParams>& param_grid);

enum class OutputFormat { Csv, Json, Plotdat };

OutputFormat parse_output_format(const std::string& name);

std::string format_records(const std::vector<BerRecord>& records, OutputFormat format);

void emit_results(const std::vector<BerRecord>& records, const std::string& path,
                  OutputFormat format);

// Self-check battery: every library invariant at small scale.
struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass() const;
};

VerifyReport verify_suite(std::uint64_t seed);

}  // namespace vpp
