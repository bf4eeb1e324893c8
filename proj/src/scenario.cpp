#include "ddcrb/scenario.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace ddcrb {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument("scenario: " + key + ": " + what);
}

double to_double(const std::string& key, const std::string& v) {
    double d = 0.0;
    size_t pos = 0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(key, "not a number: '" + v + "'");
    }
    if (pos != v.size()) fail(key, "trailing characters in number '" + v + "'");
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    long d = 0;
    size_t pos = 0;
    try {
        d = std::stol(v, &pos);
    } catch (const std::exception&) {
        fail(key, "not an integer: '" + v + "'");
    }
    if (pos != v.size()) fail(key, "trailing characters in integer '" + v + "'");
    return static_cast<int>(d);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    unsigned long long d = 0;
    size_t pos = 0;
    try {
        d = std::stoull(v, &pos);
    } catch (const std::exception&) {
        fail(key, "not an unsigned integer: '" + v + "'");
    }
    if (pos != v.size()) fail(key, "trailing characters in integer '" + v + "'");
    return d;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    fail(key, "not a boolean (use true/false/1/0): '" + v + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) fail(key, "empty list");
    return out;
}

std::string format_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

const char* const kKnownKeys[] = {
    "grid.m", "grid.n", "grid.delta_f", "grid.symbol_duration",
    "echo.tau_t", "echo.nu_t", "echo.beta_re", "echo.beta_im",
    "echo.alpha_ref_re", "echo.alpha_ref_im", "echo.tau_ref", "echo.sigma_echo_sq",
    "pilot.type", "pilot.n", "pilot.i", "pilot.path",
    "rsma.users", "rsma.sigma_n_sq", "rsma.sigma_e_sq", "rsma.theta",
    "rsma.precoder_seed", "rsma.paths", "rsma.total_power",
    "mc.trials", "mc.snr_db", "mc.tau_min", "mc.tau_max", "mc.tau_count",
    "mc.nu_min", "mc.nu_max", "mc.nu_count", "mc.seed", "mc.refine",
};

bool known_key(const std::string& key) {
    for (const char* k : kKnownKeys)
        if (key == k) return true;
    return false;
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                        ": expected 'section.key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("scenario: line " + std::to_string(line_no) +
                                        ": empty key or value");
        kv.emplace_back(key, value);
    }
    return kv;
}

Scenario scenario_from_key_values(const KeyValues& kv) {
    std::map<std::string, std::string> m;
    for (const auto& [key, value] : kv) {
        if (!known_key(key)) throw std::invalid_argument("scenario: unknown key: '" + key + "'");
        m[key] = value;  // later occurrences override earlier ones
    }

    auto has = [&](const char* k) { return m.count(k) != 0; };
    auto get = [&](const char* k) -> const std::string& { return m.at(k); };
    auto require = [&](const char* k) -> const std::string& {
        if (!has(k)) fail(k, "required key is missing");
        return m.at(k);
    };
    auto section_present = [&](const std::string& prefix) {
        for (const auto& [key, value] : m)
            if (key.rfind(prefix, 0) == 0) return true;
        return false;
    };

    Scenario s;

    s.grid.m_delay_bins = to_int("grid.m", require("grid.m"));
    s.grid.n_doppler_bins = to_int("grid.n", require("grid.n"));
    s.grid.delta_f = to_double("grid.delta_f", require("grid.delta_f"));
    s.grid.symbol_duration = to_double("grid.symbol_duration", require("grid.symbol_duration"));
    if (s.grid.m_delay_bins < 1) fail("grid.m", "must be >= 1");
    if (s.grid.n_doppler_bins < 1) fail("grid.n", "must be >= 1");
    if (!(s.grid.delta_f > 0.0)) fail("grid.delta_f", "must be > 0");
    if (!(s.grid.symbol_duration > 0.0)) fail("grid.symbol_duration", "must be > 0");

    s.echo.tau_t = to_double("echo.tau_t", require("echo.tau_t"));
    if (!(s.echo.tau_t > 0.0))
        fail("echo.tau_t", "must be > 0 (got " + get("echo.tau_t") + ")");
    s.echo.nu_t = to_double("echo.nu_t", require("echo.nu_t"));
    s.echo.beta_t = Complex(has("echo.beta_re") ? to_double("echo.beta_re", get("echo.beta_re")) : 1.0,
                            has("echo.beta_im") ? to_double("echo.beta_im", get("echo.beta_im")) : 0.0);
    s.echo.gain.alpha_ref =
        Complex(has("echo.alpha_ref_re") ? to_double("echo.alpha_ref_re", get("echo.alpha_ref_re")) : 1.0,
                has("echo.alpha_ref_im") ? to_double("echo.alpha_ref_im", get("echo.alpha_ref_im")) : 0.0);
    // default reference delay: the target delay itself, so alpha(tau_t) = alpha_ref
    s.echo.gain.tau_ref =
        has("echo.tau_ref") ? to_double("echo.tau_ref", get("echo.tau_ref")) : s.echo.tau_t;
    if (!(s.echo.gain.tau_ref > 0.0)) fail("echo.tau_ref", "must be > 0");
    s.echo.sigma_echo_sq =
        has("echo.sigma_echo_sq") ? to_double("echo.sigma_echo_sq", get("echo.sigma_echo_sq")) : 1.0;
    if (!(s.echo.sigma_echo_sq > 0.0))
        fail("echo.sigma_echo_sq", "must be > 0 (got " + get("echo.sigma_echo_sq") + ")");

    const std::string pilot_type = has("pilot.type") ? get("pilot.type") : "uniform";
    if (pilot_type == "uniform") {
        s.pilot = PilotUniformUnit{};
    } else if (pilot_type == "single") {
        PilotSinglePilot sp;
        sp.n = has("pilot.n") ? to_int("pilot.n", get("pilot.n")) : 0;
        sp.i = has("pilot.i") ? to_int("pilot.i", get("pilot.i")) : 0;
        if (sp.n < 0 || sp.n >= s.grid.n_doppler_bins) fail("pilot.n", "outside [0, grid.n)");
        if (sp.i < 0 || sp.i >= s.grid.m_delay_bins) fail("pilot.i", "outside [0, grid.m)");
        s.pilot = sp;
    } else if (pilot_type == "file") {
        PilotCustomFile pf;
        pf.path = require("pilot.path");
        if (!std::filesystem::exists(pf.path)) fail("pilot.path", "file does not exist: " + pf.path);
        s.pilot = pf;
    } else {
        fail("pilot.type", "must be one of uniform|single|file (got '" + pilot_type + "')");
    }

    if (section_present("rsma.")) {
        RsmaConfig r;
        r.users = has("rsma.users") ? to_int("rsma.users", get("rsma.users")) : 1;
        if (r.users < 1) fail("rsma.users", "must be >= 1");
        r.sigma_n_sq = has("rsma.sigma_n_sq") ? to_double("rsma.sigma_n_sq", get("rsma.sigma_n_sq")) : 1.0;
        if (!(r.sigma_n_sq > 0.0)) fail("rsma.sigma_n_sq", "must be > 0");
        r.sigma_e_sq = has("rsma.sigma_e_sq") ? to_double("rsma.sigma_e_sq", get("rsma.sigma_e_sq")) : 0.0;
        if (r.sigma_e_sq < 0.0) fail("rsma.sigma_e_sq", "must be >= 0");
        if (has("rsma.theta")) {
            r.theta = to_double_list("rsma.theta", get("rsma.theta"));
            if (r.theta.size() == 1 && r.users > 1) r.theta.assign(r.users, r.theta[0]);
            if (static_cast<int>(r.theta.size()) != r.users)
                fail("rsma.theta", "need 1 or rsma.users values");
        } else {
            r.theta.assign(r.users, 0.0);
        }
        for (double th : r.theta)
            if (!(th >= 0.0 && th <= 1.0)) fail("rsma.theta", "values must be in [0,1]");
        r.precoder_seed = has("rsma.precoder_seed") ? to_u64("rsma.precoder_seed", get("rsma.precoder_seed")) : 1;
        r.paths = has("rsma.paths") ? to_int("rsma.paths", get("rsma.paths")) : 4;
        if (r.paths < 1) fail("rsma.paths", "must be >= 1");
        r.total_power = has("rsma.total_power") ? to_double("rsma.total_power", get("rsma.total_power"))
                                                : static_cast<double>(r.users + 1);
        if (!(r.total_power > 0.0)) fail("rsma.total_power", "must be > 0");
        s.rsma = r;
    }

    if (section_present("mc.")) {
        McConfig c;
        c.trials = has("mc.trials") ? to_int("mc.trials", get("mc.trials")) : 100;
        if (c.trials < 1) fail("mc.trials", "must be >= 1");
        if (has("mc.snr_db")) c.snr_db = to_double("mc.snr_db", get("mc.snr_db"));
        c.tau_search.min_value = to_double("mc.tau_min", require("mc.tau_min"));
        c.tau_search.max_value = to_double("mc.tau_max", require("mc.tau_max"));
        c.tau_search.count = to_int("mc.tau_count", require("mc.tau_count"));
        c.nu_search.min_value = to_double("mc.nu_min", require("mc.nu_min"));
        c.nu_search.max_value = to_double("mc.nu_max", require("mc.nu_max"));
        c.nu_search.count = to_int("mc.nu_count", require("mc.nu_count"));
        c.seed = has("mc.seed") ? to_u64("mc.seed", get("mc.seed")) : 0;
        c.refine = has("mc.refine") ? to_bool("mc.refine", get("mc.refine")) : true;

        if (c.tau_search.count < 1) fail("mc.tau_count", "must be >= 1");
        if (c.nu_search.count < 1) fail("mc.nu_count", "must be >= 1");
        if (c.tau_search.min_value > c.tau_search.max_value) fail("mc.tau_min", "exceeds mc.tau_max");
        if (c.nu_search.min_value > c.nu_search.max_value) fail("mc.nu_min", "exceeds mc.nu_max");
        if (c.refine && (c.tau_search.count < 3 || c.nu_search.count < 3))
            fail("mc.refine", "requires mc.tau_count >= 3 and mc.nu_count >= 3");
        if (s.echo.tau_t < c.tau_search.min_value || s.echo.tau_t > c.tau_search.max_value)
            fail("mc.tau_min", "search range must contain echo.tau_t");
        if (s.echo.nu_t < c.nu_search.min_value || s.echo.nu_t > c.nu_search.max_value)
            fail("mc.nu_min", "search range must contain echo.nu_t");
        s.mc = c;
    }

    return s;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open file: " + path);
    const KeyValues kv = read_key_values(in);
    return scenario_from_key_values(kv);
}

TfSymbols build_pilot(const PilotSpec& pilot, const OtfsGrid& grid) {
    grid.validate();
    TfSymbols x = TfSymbols::zeros(grid);
    if (std::holds_alternative<PilotUniformUnit>(pilot)) {
        for (Complex& v : x.values) v = Complex(1.0, 0.0);
    } else if (const auto* sp = std::get_if<PilotSinglePilot>(&pilot)) {
        if (sp->n < 0 || sp->n >= grid.n_doppler_bins || sp->i < 0 || sp->i >= grid.m_delay_bins)
            throw std::invalid_argument("build_pilot: pilot cell outside the grid");
        x.at(sp->n, sp->i) = Complex(1.0, 0.0);
    } else {
        const auto& pf = std::get<PilotCustomFile>(pilot);
        std::ifstream in(pf.path);
        if (!in) throw std::invalid_argument("build_pilot: cannot open pilot file: " + pf.path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t == "n,i,re,im") continue;
            int n = 0, i = 0;
            double re = 0.0, im = 0.0;
            if (std::sscanf(t.c_str(), "%d ,%d ,%lf ,%lf", &n, &i, &re, &im) != 4)
                throw std::invalid_argument("build_pilot: " + pf.path + ": line " +
                                            std::to_string(line_no) + ": expected 'n,i,re,im'");
            if (n < 0 || n >= grid.n_doppler_bins || i < 0 || i >= grid.m_delay_bins)
                throw std::invalid_argument("build_pilot: " + pf.path + ": line " +
                                            std::to_string(line_no) + ": cell outside the grid");
            x.at(n, i) = Complex(re, im);
        }
    }
    return x;
}

void write_manifest(std::ostream& out, const Scenario& s, bool with_timestamp) {
    out << "# dd-crb " << kToolVersion << " run manifest (re-parsable scenario)\n";
    if (with_timestamp) {
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated: " << stamp << "\n";
    }
    out << "grid.m = " << s.grid.m_delay_bins << "\n";
    out << "grid.n = " << s.grid.n_doppler_bins << "\n";
    out << "grid.delta_f = " << format_double(s.grid.delta_f) << "\n";
    out << "grid.symbol_duration = " << format_double(s.grid.symbol_duration) << "\n";
    out << "echo.tau_t = " << format_double(s.echo.tau_t) << "\n";
    out << "echo.nu_t = " << format_double(s.echo.nu_t) << "\n";
    out << "echo.beta_re = " << format_double(s.echo.beta_t.real()) << "\n";
    out << "echo.beta_im = " << format_double(s.echo.beta_t.imag()) << "\n";
    out << "echo.alpha_ref_re = " << format_double(s.echo.gain.alpha_ref.real()) << "\n";
    out << "echo.alpha_ref_im = " << format_double(s.echo.gain.alpha_ref.imag()) << "\n";
    out << "echo.tau_ref = " << format_double(s.echo.gain.tau_ref) << "\n";
    out << "echo.sigma_echo_sq = " << format_double(s.echo.sigma_echo_sq) << "\n";
    if (std::holds_alternative<PilotUniformUnit>(s.pilot)) {
        out << "pilot.type = uniform\n";
    } else if (const auto* sp = std::get_if<PilotSinglePilot>(&s.pilot)) {
        out << "pilot.type = single\n";
        out << "pilot.n = " << sp->n << "\n";
        out << "pilot.i = " << sp->i << "\n";
    } else {
        out << "pilot.type = file\n";
        out << "pilot.path = " << std::get<PilotCustomFile>(s.pilot).path << "\n";
    }
    if (s.rsma) {
        out << "rsma.users = " << s.rsma->users << "\n";
        out << "rsma.sigma_n_sq = " << format_double(s.rsma->sigma_n_sq) << "\n";
        out << "rsma.sigma_e_sq = " << format_double(s.rsma->sigma_e_sq) << "\n";
        out << "rsma.theta = ";
        for (size_t i = 0; i < s.rsma->theta.size(); ++i)
            out << (i ? "," : "") << format_double(s.rsma->theta[i]);
        out << "\n";
        out << "rsma.precoder_seed = " << s.rsma->precoder_seed << "\n";
        out << "rsma.paths = " << s.rsma->paths << "\n";
        out << "rsma.total_power = " << format_double(s.rsma->total_power) << "\n";
    }
    if (s.mc) {
        out << "mc.trials = " << s.mc->trials << "\n";
        if (s.mc->snr_db) out << "mc.snr_db = " << format_double(*s.mc->snr_db) << "\n";
        out << "mc.tau_min = " << format_double(s.mc->tau_search.min_value) << "\n";
        out << "mc.tau_max = " << format_double(s.mc->tau_search.max_value) << "\n";
        out << "mc.tau_count = " << s.mc->tau_search.count << "\n";
        out << "mc.nu_min = " << format_double(s.mc->nu_search.min_value) << "\n";
        out << "mc.nu_max = " << format_double(s.mc->nu_search.max_value) << "\n";
        out << "mc.nu_count = " << s.mc->nu_search.count << "\n";
        out << "mc.seed = " << s.mc->seed << "\n";
        out << "mc.refine = " << (s.mc->refine ? "true" : "false") << "\n";
    }
}

}  // namespace ddcrb
