// dd-crb: batch front-end for the delay-Doppler sensing CRB and RSMA SINR
// toolkit. Subcommands: crb, sinr, mc-validate, sweep. Outputs one CSV per
// subcommand plus a re-parsable run manifest; identical scenario + seed
// yields byte-identical CSV bodies.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddcrb/fim.hpp"
#include "ddcrb/otfs.hpp"
#include "ddcrb/rsma.hpp"
#include "ddcrb/scenario.hpp"
#include "ddcrb/validate.hpp"

namespace {

using namespace ddcrb;

// 17 significant digits: parses back to the exact double.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::string sanitize(std::string msg) {
    for (char& c : msg) {
        if (c == ',' ) c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return msg;
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
        write_row(header);
    }
    void write_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

int env_thread_cap() {
    const char* v = std::getenv("DD_CRB_THREADS");
    if (!v) return 0;
    const int n = std::atoi(v);
    return n > 0 ? n : 1;
}

// Fixed offsets deriving the channel and estimation-error streams from the
// precoder seed, so one seed pins the whole SINR experiment.
constexpr std::uint64_t kChannelSeedOffset = 1000003;
constexpr std::uint64_t kEstimateSeedOffset = 2000003;
constexpr double kCommonPowerShare = 0.5;

struct SinrRow {
    int user;
    double theta;
    double common;
    double priv;
};

std::vector<SinrRow> evaluate_sinr(const Scenario& s) {
    const RsmaConfig& r = *s.rsma;
    // precoders are transmitter-side and shared; every user gets its own
    // channel realization, estimate, and filters
    const Precoders pre = make_precoders(s.grid.dd_size(), r.users, r.total_power,
                                         kCommonPowerShare, r.precoder_seed);

    std::vector<SinrRow> rows;
    rows.reserve(r.users);
    for (int user = 0; user < r.users; ++user) {
        ChannelSet ch;
        ch.sigma_e_sq = r.sigma_e_sq;
        ch.sigma_n_sq = r.sigma_n_sq;
        ch.h_true = make_dd_channel(s.grid, r.paths,
                                    r.precoder_seed + kChannelSeedOffset + user);
        ch.h_est = draw_channel_estimate(ch.h_true, r.sigma_e_sq,
                                         r.precoder_seed + kEstimateSeedOffset + user);
        const LmmseFilters filters = lmmse_filters(ch.h_est, pre, ch.sigma_n_sq, ch.sigma_e_sq);

        SinrInputs inp;
        inp.w_common = filters.common;
        inp.w_private = filters.privates[user];
        inp.theta = r.theta[user];
        SinrRow row;
        row.user = user;
        row.theta = inp.theta;
        row.common = sinr_common(inp, ch.h_est, pre, ch.sigma_n_sq, ch.sigma_e_sq);
        row.priv = sinr_private(inp, ch.h_est, pre, user, ch.sigma_n_sq, ch.sigma_e_sq);
        rows.push_back(row);
    }
    return rows;
}

const std::vector<std::string> kCrbColumns = {"tau_s",      "nu_hz",    "crb_tau_s2",
                                              "crb_nu_hz2", "det_fim",  "I_tautau",
                                              "I_nunu",     "I_taunu"};

std::vector<std::string> crb_cells(const Scenario& s, const CrbResult& r) {
    return {fmt(s.echo.tau_t),  fmt(s.echo.nu_t),      fmt(r.crb_tau),
            fmt(r.crb_nu),      fmt(r.det_fim),        fmt(r.fim.i_tau_tau),
            fmt(r.fim.i_nu_nu), fmt(r.fim.i_tau_nu)};
}

const std::vector<std::string> kSinrColumns = {
    "user",       "theta",       "sinr_common", "sinr_private",  "sigma_n_sq",
    "sigma_e_sq", "users",       "paths",       "total_power",   "precoder_seed"};

std::vector<std::string> sinr_cells(const Scenario& s, const SinrRow& row) {
    const RsmaConfig& r = *s.rsma;
    return {fmt(row.user),       fmt(row.theta), fmt(row.common),     fmt(row.priv),
            fmt(r.sigma_n_sq),   fmt(r.sigma_e_sq), fmt(r.users),     fmt(r.paths),
            fmt(r.total_power),  fmt(r.precoder_seed)};
}

const std::vector<std::string> kMcColumns = {
    "snr_db",     "sigma_echo_sq", "tau_s",      "nu_hz",      "trials",
    "mse_tau_s2", "mse_nu_hz2",    "crb_tau_s2", "crb_nu_hz2", "ratio_tau",
    "ratio_nu",   "bias_tau_s",    "bias_nu_hz", "trials_used", "boundary_hits",
    "seed"};

std::vector<std::string> mc_cells(const Scenario& s, const McReport& rep) {
    return {fmt(rep.snr_db_used), fmt(rep.sigma_echo_sq_used), fmt(s.echo.tau_t),
            fmt(s.echo.nu_t),     fmt(s.mc->trials),           fmt(rep.mse_tau),
            fmt(rep.mse_nu),      fmt(rep.crb_tau),            fmt(rep.crb_nu),
            fmt(rep.ratio_tau),   fmt(rep.ratio_nu),           fmt(rep.bias_tau),
            fmt(rep.bias_nu),     fmt(rep.trials_used),        fmt(rep.boundary_hits),
            fmt(s.mc->seed)};
}

void require_section(bool present, const char* what) {
    if (!present)
        throw std::invalid_argument(std::string("scenario has no ") + what +
                                    " section, which this subcommand needs");
}

// Seed overrides must not create sections the scenario never had.
KeyValues load_scenario_keys(const std::string& path, const std::optional<std::uint64_t>& seed) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    KeyValues kv = read_key_values(in);
    if (seed) {
        bool has_mc = false, has_rsma = false;
        for (const auto& [k, v] : kv) {
            has_mc = has_mc || k.rfind("mc.", 0) == 0;
            has_rsma = has_rsma || k.rfind("rsma.", 0) == 0;
        }
        if (has_mc) kv.emplace_back("mc.seed", std::to_string(*seed));
        if (has_rsma) kv.emplace_back("rsma.precoder_seed", std::to_string(*seed));
    }
    return kv;
}

void emit_manifest(const std::filesystem::path& out_dir, const Scenario& s) {
    std::ofstream out(out_dir / "manifest", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest");
    write_manifest(out, s);
}

// sweep value list from "start:stop:step"
std::vector<double> colon_values(const std::string& expr) {
    double start = 0, stop = 0, step = 0;
    if (std::sscanf(expr.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
        throw std::invalid_argument("sweep range must be start:stop:step with step > 0: " + expr);
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count < 1) throw std::invalid_argument("sweep range is empty: " + expr);
    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) values[i] = start + i * step;
    return values;
}

enum class Target { crb, sinr, mc };

Target target_for_key(const std::string& key) {
    if (key.rfind("rsma.", 0) == 0) return Target::sinr;
    if (key.rfind("mc.", 0) == 0) return Target::mc;
    return Target::crb;
}

const std::vector<std::string>& target_columns(Target t) {
    switch (t) {
        case Target::sinr: return kSinrColumns;
        case Target::mc: return kMcColumns;
        default: return kCrbColumns;
    }
}

void run_sweep(const KeyValues& base_kv, const std::string& key,
               const std::vector<double>& values, const std::filesystem::path& out_dir,
               const std::string& csv_name, int threads) {
    const Target target = target_for_key(key);

    std::vector<std::string> header = {"param", "value", "status"};
    for (const std::string& c : target_columns(target)) header.push_back(c);
    CsvFile csv(out_dir / csv_name, header);

    bool manifest_written = false;
    for (double value : values) {
        KeyValues kv = base_kv;
        char vbuf[40];
        std::snprintf(vbuf, sizeof(vbuf), "%.17g", value);
        kv.emplace_back(key, vbuf);

        std::vector<std::vector<std::string>> rows;
        std::string status = "ok";
        try {
            const Scenario s = scenario_from_key_values(kv);
            if (!manifest_written) {
                // base manifest: first resolvable scenario of the sweep
                emit_manifest(out_dir, s);
                manifest_written = true;
            }
            switch (target) {
                case Target::crb: {
                    const CrbResult r = crb_pipeline(build_pilot(s.pilot, s.grid), s.echo, s.grid);
                    rows.push_back(crb_cells(s, r));
                    break;
                }
                case Target::sinr: {
                    require_section(s.rsma.has_value(), "rsma");
                    for (const SinrRow& row : evaluate_sinr(s)) rows.push_back(sinr_cells(s, row));
                    break;
                }
                case Target::mc: {
                    require_section(s.mc.has_value(), "mc");
                    const McReport rep =
                        run_mc(s.echo, build_pilot(s.pilot, s.grid), *s.mc, s.grid, threads);
                    rows.push_back(mc_cells(s, rep));
                    break;
                }
            }
        } catch (const SingularFim& e) {
            status = "singular_fim: " + sanitize(e.what());
            rows.clear();
        } catch (const std::exception& e) {
            status = "error: " + sanitize(e.what());
            rows.clear();
        }

        if (rows.empty()) {
            std::vector<std::string> row = {key, vbuf, status};
            row.resize(header.size());  // empty metric cells
            csv.write_row(row);
        } else {
            for (auto& cells : rows) {
                std::vector<std::string> row = {key, vbuf, status};
                row.insert(row.end(), cells.begin(), cells.end());
                csv.write_row(row);
            }
        }
    }
}

std::string qualify_key(std::string key, Target default_section) {
    if (key.find('.') != std::string::npos) return key;
    switch (default_section) {
        case Target::sinr: return "rsma." + key;
        case Target::mc: return "mc." + key;
        default: return "echo." + key;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-Doppler sensing CRB and RSMA SINR toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir_str, sweep_expr, sweep_param, sweep_values;
    std::optional<std::uint64_t> seed;
    bool normalized = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "scenario file (flat key = value)")
            ->required();
        sub->add_option("--out", out_dir_str, "output directory")->required();
        sub->add_option("--seed", seed, "override mc.seed and rsma.precoder_seed");
    };

    CLI::App* crb = app.add_subcommand("crb", "Cramer-Rao bounds for the scenario pilot");
    add_common(crb);
    crb->add_flag("--normalized", normalized, "append CRB/tau^2 and CRB*T^2 columns");
    crb->add_option("--sweep", sweep_expr, "sweep an echo key: key=start:stop:step");

    CLI::App* sinr = app.add_subcommand("sinr", "RSMA SINRs under ICSI/ISIC");
    add_common(sinr);
    sinr->add_option("--sweep", sweep_expr, "sweep an rsma key: key=start:stop:step");

    CLI::App* mc = app.add_subcommand("mc-validate", "Monte-Carlo MSE vs CRB");
    add_common(mc);
    mc->add_option("--sweep", sweep_expr, "sweep an mc key: key=start:stop:step");

    CLI::App* sweep = app.add_subcommand("sweep", "single-axis parameter sweep");
    add_common(sweep);
    sweep->add_option("--param", sweep_param, "dotted scenario key to sweep");
    sweep->add_option("--values", sweep_values, "comma-separated values");
    sweep->add_option("--sweep", sweep_expr, "alternative grammar: key=start:stop:step");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path out_dir(out_dir_str);
        std::filesystem::create_directories(out_dir);
        const int threads = env_thread_cap();
        const KeyValues kv = load_scenario_keys(scenario_path, seed);

        if (sweep->parsed()) {
            std::string key;
            std::vector<double> values;
            if (!sweep_expr.empty()) {
                const size_t eq = sweep_expr.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--sweep needs key=start:stop:step");
                key = sweep_expr.substr(0, eq);
                values = colon_values(sweep_expr.substr(eq + 1));
            } else {
                if (sweep_param.empty() || sweep_values.empty())
                    throw std::invalid_argument("sweep needs --param and --values (or --sweep)");
                key = sweep_param;
                std::stringstream ss(sweep_values);
                std::string item;
                while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
                if (values.empty()) throw std::invalid_argument("--values is empty");
            }
            if (key.find('.') == std::string::npos)
                throw std::invalid_argument("sweep --param needs a dotted key like echo.sigma_echo_sq");
            run_sweep(kv, key, values, out_dir, "sweep.csv", threads);
            return 0;
        }

        if (!sweep_expr.empty()) {
            // shorthand sweep attached to crb/sinr/mc-validate
            const size_t eq = sweep_expr.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--sweep needs key=start:stop:step");
            Target section = Target::crb;
            std::string csv_name = "crb.csv";
            if (sinr->parsed()) {
                section = Target::sinr;
                csv_name = "sinr.csv";
            } else if (mc->parsed()) {
                section = Target::mc;
                csv_name = "mc.csv";
            }
            const std::string key = qualify_key(sweep_expr.substr(0, eq), section);
            run_sweep(kv, key, colon_values(sweep_expr.substr(eq + 1)), out_dir, csv_name,
                      threads);
            return 0;
        }

        const Scenario s = scenario_from_key_values(kv);
        emit_manifest(out_dir, s);

        if (crb->parsed()) {
            std::vector<std::string> header = kCrbColumns;
            if (normalized) {
                header.push_back("crb_tau_norm");  // CRB(tau)/tau^2
                header.push_back("crb_nu_norm");   // CRB(nu)*T^2
            }
            CsvFile csv(out_dir / "crb.csv", header);
            const CrbResult r = crb_pipeline(build_pilot(s.pilot, s.grid), s.echo, s.grid);
            std::vector<std::string> cells = crb_cells(s, r);
            if (normalized) {
                cells.push_back(fmt(r.crb_tau / (s.echo.tau_t * s.echo.tau_t)));
                cells.push_back(
                    fmt(r.crb_nu * s.grid.symbol_duration * s.grid.symbol_duration));
            }
            csv.write_row(cells);
        } else if (sinr->parsed()) {
            require_section(s.rsma.has_value(), "rsma");
            CsvFile csv(out_dir / "sinr.csv", kSinrColumns);
            for (const SinrRow& row : evaluate_sinr(s)) csv.write_row(sinr_cells(s, row));
        } else if (mc->parsed()) {
            require_section(s.mc.has_value(), "mc");
            CsvFile csv(out_dir / "mc.csv", kMcColumns);
            const McReport rep =
                run_mc(s.echo, build_pilot(s.pilot, s.grid), *s.mc, s.grid, threads);
            csv.write_row(mc_cells(s, rep));
        }
        return 0;
    } catch (const SingularFim& e) {
        std::cerr << "dd-crb: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dd-crb: " << e.what() << "\n";
        return 1;
    }
}
