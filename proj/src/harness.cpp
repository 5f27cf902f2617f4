#include "vpp/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace vpp {

namespace {

// Stream-derivation tags. Channel streams are keyed by channel index alone;
// trial streams by (snr_index, channel_index, vector_index); substreams by
// purpose so solver draws cannot desynchronize bits or noise.
constexpr std::uint64_t kChannelStreamTag = 0xc7a22e1ull;
constexpr std::uint64_t kBitsFork = 1;
constexpr std::uint64_t kNoiseFork = 2;
constexpr std::uint64_t kSolverFork = 3;

bool uses_perturbation(const std::string& tag) {
    return tag == "treestep" || tag == "fse" || tag == "fse_mod" || tag == "oracle";
}

void validate_config(const SweepConfig& cfg) {
    if (cfg.n_users < 1 || cfg.n_tx < cfg.n_users)
        throw std::invalid_argument("SweepConfig: need n_tx >= n_users >= 1");
    if (cfg.snr_grid_db.empty()) throw std::invalid_argument("SweepConfig: empty SNR grid");
    if (cfg.precoders.empty()) throw std::invalid_argument("SweepConfig: no precoders");
    for (const auto& pc : cfg.precoders)
        if (!is_valid_precoder(pc))
            throw std::invalid_argument("SweepConfig: unknown precoder '" + pc + "'");
    if (cfg.n_channels < 1 || cfg.n_vectors_per_channel < 1)
        throw std::invalid_argument("SweepConfig: counts must be >= 1");
    if (cfg.power_P <= 0.0) throw std::invalid_argument("SweepConfig: power must be positive");
}

std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (r > UINT64_MAX / base) return UINT64_MAX;
        r *= base;
    }
    return r;
}

// Solver bookkeeping for one record row.
void fill_solver_fields(const SweepConfig& cfg, const std::string& pc, BerRecord& rec) {
    if (pc == "treestep") {
        rec.L = cfg.treestep_params.L;
        rec.V = cfg.treestep_params.V;
        rec.K = cfg.treestep_params.K;
        rec.complexity_factor = cfg.treestep_params.complexity_factor();
    } else if (pc == "fse" || pc == "fse_mod") {
        rec.V = cfg.fse_V;
        rec.complexity_factor =
            pow_u64(2 * static_cast<std::uint64_t>(cfg.fse_V) + 1, 2);
    } else if (pc == "oracle") {
        rec.V = cfg.treestep_params.V;
        rec.complexity_factor = pow_u64(
            2 * static_cast<std::uint64_t>(cfg.treestep_params.V) + 1, 2 * cfg.n_users);
    } else {
        rec.complexity_factor = 1;  // linear precoding evaluates the zero candidate only
    }
}

// Static-partition parallel loop; results must go to preallocated slots.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(workers, count);
    const std::size_t block = (count + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * block;
        const std::size_t hi = std::min(count, lo + block);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TrialContext {
    const Constellation* constellation = nullptr;
    const PrecodingMatrix* precoding = nullptr;  // precomputed W for this (cell, channel)
};

TrialResult run_trial_impl(const SweepConfig& cfg, const std::string& precoder,
                           const ChannelInstance& ch, const SnrConfig& snr, RngStream& rng,
                           const TrialContext& ctx) {
    const Constellation& c = *ctx.constellation;
    RngStream bits_rng = rng.fork(kBitsFork);
    RngStream noise_rng = rng.fork(kNoiseFork);
    RngStream solver_rng = rng.fork(kSolverFork);

    const std::size_t n = cfg.n_users;
    std::vector<Bits> tx_bits(n, Bits(c.bits_per_symbol));
    ComplexVector u(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (auto& b : tx_bits[k]) b = bits_rng.bit();
        u[k] = bits_to_symbol(c, tx_bits[k]);
    }

    const PrecodingMatrix& W = *ctx.precoding;
    const VppProblem problem = make_vpp_problem(W, u, c.tau);

    PerturbationVector v_hat(2 * n, 0);
    if (precoder == "treestep") {
        v_hat = treestep_solve(problem, cfg.treestep_params, solver_rng).v_hat;
    } else if (precoder == "fse") {
        v_hat = fse_solve(problem, W, u, cfg.fse_V, FseSelection::L2).v_hat;
    } else if (precoder == "fse_mod") {
        v_hat = fse_solve(problem, W, u, cfg.fse_V, FseSelection::Linf).v_hat;
    } else if (precoder == "oracle") {
        v_hat = exhaustive_solve(problem, cfg.treestep_params.V).v_hat;
    }

    auto [x, gamma] = transmit_vector(problem, v_hat, cfg.power_P);
    const ComplexVector y = apply_channel(ch, x, snr, noise_rng);

    // Genie-aided scale recovery, then modulo fold for perturbing precoders.
    const double scale = gamma / std::sqrt(cfg.power_P);
    const bool fold = uses_perturbation(precoder);

    TrialResult out;
    out.objective = gamma;
    for (std::size_t k = 0; k < n; ++k) {
        Complex z = scale * y[k];
        if (fold) z = modulo_tau(c, z);
        const auto [idx, rx_bits] = nearest_symbol(c, z);
        (void)idx;
        for (int b = 0; b < c.bits_per_symbol; ++b)
            if (rx_bits[b] != tx_bits[k][b]) ++out.bit_errors;
        out.bits += c.bits_per_symbol;
    }
    return out;
}

}  // namespace

bool is_valid_precoder(const std::string& tag) {
    return tag == "zf" || tag == "rzf" || tag == "fse" || tag == "fse_mod" ||
           tag == "treestep" || tag == "oracle";
}

TrialResult run_trial(const SweepConfig& cfg, const std::string& precoder,
                      const ChannelInstance& ch, const SnrConfig& snr, RngStream& rng) {
    if (!is_valid_precoder(precoder))
        throw std::invalid_argument("run_trial: unknown precoder '" + precoder + "'");
    const Constellation c = make_constellation(cfg.mod_order);
    const PrecodingMatrix W =
        (precoder == "rzf") ? rzf_precoder(ch, snr) : zf_precoder(ch);
    TrialContext ctx{&c, &W};
    return run_trial_impl(cfg, precoder, ch, snr, rng, ctx);
}

std::vector<BerRecord> run_sweep(const SweepConfig& cfg) {
    validate_config(cfg);
    const Constellation c = make_constellation(cfg.mod_order);

    // One channel set for the whole sweep, shared by every cell.
    std::vector<ChannelInstance> channels;
    std::vector<PrecodingMatrix> zf_cache;
    channels.reserve(cfg.n_channels);
    zf_cache.reserve(cfg.n_channels);
    for (std::size_t ci = 0; ci < cfg.n_channels; ++ci) {
        RngStream ch_rng = RngStream::derive(cfg.master_seed, {kChannelStreamTag, ci});
        channels.push_back(sample_rayleigh(cfg.n_users, cfg.n_tx, ch_rng));
        zf_cache.push_back(zf_precoder(channels.back()));
    }

    std::vector<BerRecord> records;
    for (const auto& pc : cfg.precoders) {
        for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
            const double snr_db = cfg.snr_grid_db[si];
            const SnrConfig snr = sigma_for_snr(cfg.power_P, snr_db, cfg.n_users);

            BerRecord rec;
            rec.precoder = pc;
            rec.snr_db = snr_db;
            rec.nt = cfg.n_tx;
            rec.nu = cfg.n_users;
            rec.mod_order = cfg.mod_order;
            fill_solver_fields(cfg, pc, rec);

            double objective_sum = 0.0;
            std::uint64_t trial_count = 0;

            std::vector<TrialResult> slots(cfg.n_vectors_per_channel);
            for (std::size_t ci = 0; ci < cfg.n_channels; ++ci) {
                const PrecodingMatrix W = (pc == "rzf")
                                              ? rzf_precoder(channels[ci], snr)
                                              : zf_cache[ci];
                TrialContext ctx{&c, &W};
                parallel_for(cfg.n_vectors_per_channel, cfg.workers, [&](std::size_t vi) {
                    RngStream trial_rng = RngStream::derive(cfg.master_seed, {si, ci, vi});
                    slots[vi] = run_trial_impl(cfg, pc, channels[ci], snr, trial_rng, ctx);
                });
                for (const auto& tr : slots) {
                    rec.bit_errors += tr.bit_errors;
                    rec.bits_total += tr.bits;
                    objective_sum += tr.objective;
                    ++trial_count;
                }
                if (cfg.early_abort_errors > 0 && rec.bit_errors >= cfg.early_abort_errors &&
                    ci + 1 < cfg.n_channels)
                    break;
            }

            rec.ber = rec.bits_total ? static_cast<double>(rec.bit_errors) /
                                           static_cast<double>(rec.bits_total)
                                     : 0.0;
            rec.mean_objective = trial_count ? objective_sum / static_cast<double>(trial_count)
                                             : 0.0;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<BerRecord> run_param_study(const SweepConfig& cfg,
                                       const std::vector<TreeStepParams>& param_grid) {
    if (param_grid.empty()) throw std::invalid_argument("run_param_study: empty grid");
    validate_config(cfg);
    std::vector<BerRecord> records;
    for (const auto& params : param_grid) {
        SweepConfig point = cfg;
        point.treestep_params = params;
        point.precoders = {"treestep"};
        point.snr_grid_db = {cfg.snr_grid_db.front()};
        auto recs = run_sweep(point);
        records.push_back(std::move(recs.front()));
    }
    return records;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<BerRecord>& records) {
    std::string out =
        "precoder,snr_db,nt,nu,mod_order,L,V,K,bits_total,bit_errors,ber,"
        "mean_objective,complexity_factor\n";
    for (const auto& r : records) {
        out += r.precoder;
        out += ',';
        out += fmt_double(r.snr_db);
        out += ',';
        out += std::to_string(r.nt);
        out += ',';
        out += std::to_string(r.nu);
        out += ',';
        out += std::to_string(r.mod_order);
        out += ',';
        out += std::to_string(r.L);
        out += ',';
        out += std::to_string(r.V);
        out += ',';
        out += std::to_string(r.K);
        out += ',';
        out += std::to_string(r.bits_total);
        out += ',';
        out += std::to_string(r.bit_errors);
        out += ',';
        out += fmt_double(r.ber);
        out += ',';
        out += fmt_double(r.mean_objective);
        out += ',';
        out += std::to_string(r.complexity_factor);
        out += '\n';
    }
    return out;
}

std::string format_json(const std::vector<BerRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json obj;
        obj["precoder"] = r.precoder;
        obj["snr_db"] = r.snr_db;
        obj["nt"] = r.nt;
        obj["nu"] = r.nu;
        obj["mod_order"] = r.mod_order;
        obj["L"] = r.L;
        obj["V"] = r.V;
        obj["K"] = r.K;
        obj["bits_total"] = r.bits_total;
        obj["bit_errors"] = r.bit_errors;
        obj["ber"] = r.ber;
        obj["mean_objective"] = r.mean_objective;
        obj["complexity_factor"] = r.complexity_factor;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::string format_plotdat(const std::vector<BerRecord>& records) {
    // One block per precoder in first-appearance order, rows are "snr_db ber".
    std::vector<std::string> order;
    for (const auto& r : records) {
        bool seen = false;
        for (const auto& s : order) seen = seen || s == r.precoder;
        if (!seen) order.push_back(r.precoder);
    }
    std::string out;
    bool first = true;
    for (const auto& pc : order) {
        if (!first) out += '\n';
        first = false;
        out += "# ";
        out += pc;
        out += '\n';
        for (const auto& r : records) {
            if (r.precoder != pc) continue;
            out += fmt_double(r.snr_db);
            out += ' ';
            out += fmt_double(r.ber);
            out += '\n';
        }
    }
    return out;
}

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    if (name == "plotdat") return OutputFormat::Plotdat;
    throw std::invalid_argument("unknown output format '" + name + "'");
}

std::string format_records(const std::vector<BerRecord>& records, OutputFormat format) {
    switch (format) {
        case OutputFormat::Csv:
            return format_csv(records);
        case OutputFormat::Json:
            return format_json(records);
        case OutputFormat::Plotdat:
            return format_plotdat(records);
    }
    throw std::logic_error("unreachable");
}

void emit_results(const std::vector<BerRecord>& records, const std::string& path,
                  OutputFormat format) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("emit_results: cannot open '" + path + "'");
    out << format_records(records, format);
    if (!out) throw std::runtime_error("emit_results: write failed for '" + path + "'");
}

bool VerifyReport::all_pass() const {
    for (const auto& chk : checks)
        if (!chk.pass) return false;
    return true;
}

}  // namespace vpp
