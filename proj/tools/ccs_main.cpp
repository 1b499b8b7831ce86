// Command-line front end: bound evaluation, ROC estimation, Monte Carlo
// simulation and operating-point optimization as reproducible batch jobs.
// JSON configs are strict (unknown keys rejected, no silent defaults for
// physical parameters); CSV outputs are written atomically.
//
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccs/achannel.hpp"
#include "ccs/bounds.hpp"
#include "ccs/csvio.hpp"
#include "ccs/phy.hpp"
#include "ccs/roc.hpp"
#include "ccs/sim.hpp"
#include "ccs/ttree.hpp"

using nlohmann::json;
using namespace ccs;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line/column for the message.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("malformed JSON in " + path + " at line " + std::to_string(line) +
                          ", column " + std::to_string(col));
    }
}

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!required.count(key) && !optional.count(key))
            throw ConfigError("unknown config key: \"" + key + "\"");
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError("missing config key: \"" + key + "\"");
}

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key \"" + key + "\" has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, key);
}

std::vector<double> get_scalar_or_list(const json& j, const std::string& key) {
    if (j.at(key).is_array()) return get<std::vector<double>>(j, key);
    return {get<double>(j, key)};
}

std::uint64_t apply_seed_override(std::uint64_t seed) {
    if (const char* env = std::getenv("CCS_SEED")) return std::stoull(env);
    return seed;
}

unsigned log2_exact(std::uint64_t q, const std::string& what) {
    unsigned c = 0;
    while ((1ull << c) < q) ++c;
    if ((1ull << c) != q) throw ConfigError(what + " must be a power of two");
    return c;
}

// ---- capacity ----

int run_capacity(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"Q", "Ka"}, {"p_m", "p_f", "roc_csv", "n"});
    achannel::OuterChannelParams params;
    params.Q = get<std::uint32_t>(cfg, "Q");
    params.K_a = get<unsigned>(cfg, "Ka");

    csvio::Table out;
    if (cfg.contains("roc_csv")) {
        require_keys(cfg, {"Q", "Ka", "roc_csv", "n"});
        const auto tables = read_roc_csv(get<std::string>(cfg, "roc_csv"));
        const auto n = get<unsigned>(cfg, "n");
        const unsigned c = log2_exact(params.Q, "Q");
        out.header = {"ebno_db", "L", "n1", "K0", "p_m", "p_f", "capacity_bits", "rate_per_user"};
        for (const auto& table : tables) {
            if (table.L == 0 || n % table.L != 0)
                throw ConfigError("roc table L must divide n");
            const unsigned n1 = n / table.L;
            for (const auto& row : table.rows) {
                params.p_m = row.p_m;
                params.p_f = row.p_f;
                const double cap = achannel::capacity_estimate(params);
                const double rate = cap / (static_cast<double>(params.K_a) * n1);
                out.rows.push_back({csvio::fmt(table.ebno_db), std::to_string(table.L),
                                    std::to_string(n1), std::to_string(row.K0),
                                    csvio::fmt(row.p_m), csvio::fmt(row.p_f), csvio::fmt(cap),
                                    csvio::fmt(rate)});
            }
        }
        (void)c;
    } else {
        require_keys(cfg, {"Q", "Ka", "p_m", "p_f"});
        params.p_m = get<double>(cfg, "p_m");
        params.p_f = get<double>(cfg, "p_f");
        const double cap = achannel::capacity_estimate(params);
        out.header = {"Q", "Ka", "p_m", "p_f", "capacity_bits"};
        out.rows.push_back({std::to_string(params.Q), std::to_string(params.K_a),
                            csvio::fmt(params.p_m), csvio::fmt(params.p_f), csvio::fmt(cap)});
    }
    csvio::write_atomic(out_path, out);
    std::cout << "capacity: wrote " << out.rows.size() << " row(s) to " << out_path << "\n";
    return 0;
}

// ---- rcb ----

int run_rcb(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"k", "L", "Q", "Ka", "t", "p_m", "p_f"}, {"mode", "ebno_db", "K0"});
    bounds::RcbConfig rc;
    rc.log2_M = get<unsigned>(cfg, "k");
    rc.L = get<unsigned>(cfg, "L");
    rc.Q = get<std::uint32_t>(cfg, "Q");
    rc.K_a = get<unsigned>(cfg, "Ka");
    rc.t = get<unsigned>(cfg, "t");
    rc.p_m = get<double>(cfg, "p_m");
    rc.p_f = get<double>(cfg, "p_f");
    const auto mode = get_or<std::string>(cfg, "mode", "auto");

    const double pe = bounds::rcb_error_prob(rc.L, rc.t, rc.p_m);
    double pf = 0.0;
    if (mode == "exact" || (mode == "auto" && rc.log2_M <= 40))
        pf = bounds::rcb_false_alarm(rc);
    else if (mode == "corollary" || mode == "auto")
        pf = bounds::rcb_false_alarm_corollary(rc);
    else
        throw ConfigError("mode must be exact, corollary or auto");

    std::vector<bounds::CurveRow> rows{{rc.K_a, rc.t, get_or<double>(cfg, "ebno_db", 0.0), rc.L,
                                        get_or<unsigned>(cfg, "K0", 0), pe, pf}};
    bounds::write_curve_csv(out_path, rows);
    std::cout << "rcb: Pe=" << csvio::fmt(pe) << " Pf=" << csvio::fmt(pf) << " -> " << out_path
              << "\n";
    return 0;
}

// ---- ttree-bound ----

int run_ttree_bound(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"bit_allocation", "c", "Ka", "t", "p_m", "p_f"});
    bounds::TreeBoundConfig tc;
    tc.bit_allocation = get<std::vector<unsigned>>(cfg, "bit_allocation");
    tc.c = get<unsigned>(cfg, "c");
    tc.K_a = get<unsigned>(cfg, "Ka");
    tc.t = get<unsigned>(cfg, "t");
    tc.p_m = get<double>(cfg, "p_m");
    tc.p_f = get<double>(cfg, "p_f");

    csvio::Table out;
    out.header = {"l", "v_bar"};
    for (unsigned l = 1; l <= tc.L(); ++l)
        out.rows.push_back({std::to_string(l), csvio::fmt(bounds::expected_paths(tc, l))});
    csvio::write_atomic(out_path, out);
    const auto tb = bounds::ttree_bound(tc);
    std::cout << "ttree-bound: Pe=" << csvio::fmt(tb.P_e) << " Pf<=" << csvio::fmt(tb.P_f)
              << " -> " << out_path << "\n";
    return 0;
}

// ---- alloc ----

int run_alloc(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"k", "c", "Ka", "t", "p_m", "p_f", "v_star", "L_max"});
    const auto v_star_raw = cfg.at("v_star");
    const double v_star = v_star_raw.is_string()
                              ? std::numeric_limits<double>::infinity()
                              : get<double>(cfg, "v_star");
    const auto alloc = bounds::greedy_bit_allocation(
        get<unsigned>(cfg, "k"), get<unsigned>(cfg, "c"), get<unsigned>(cfg, "Ka"),
        get<double>(cfg, "p_m"), get<double>(cfg, "p_f"), get<unsigned>(cfg, "t"), v_star,
        get<unsigned>(cfg, "L_max"));

    csvio::Table out;
    out.header = {"slot", "bits"};
    if (alloc)
        for (std::size_t l = 0; l < alloc->size(); ++l)
            out.rows.push_back({std::to_string(l + 1), std::to_string((*alloc)[l])});
    csvio::write_atomic(out_path, out);
    if (alloc) {
        std::cout << "alloc:";
        for (const auto b : *alloc) std::cout << " " << b;
        std::cout << " -> " << out_path << "\n";
    } else {
        std::cout << "alloc: infeasible (treated as Pe=1) -> " << out_path << "\n";
    }
    return 0;
}

// ---- roc ----

int run_roc(const std::string& config_path, const std::string& out_path, unsigned workers) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"n", "L", "Q", "Ka", "ebno_db", "k", "channel", "K0_max", "trials", "seed"});
    const auto n = get<unsigned>(cfg, "n");
    const auto k = get<unsigned>(cfg, "k");
    std::vector<unsigned> Ls;
    if (cfg.at("L").is_array())
        Ls = get<std::vector<unsigned>>(cfg, "L");
    else
        Ls = {get<unsigned>(cfg, "L")};
    const auto ebnos = get_scalar_or_list(cfg, "ebno_db");

    std::vector<RocTable> tables;
    for (const double ebno : ebnos) {
        for (const unsigned L : Ls) {
            if (L == 0 || n % L != 0) throw ConfigError("L must divide n");
            phy::RocParams params;
            params.n1 = n / L;
            params.Q = get<std::uint32_t>(cfg, "Q");
            params.P = std::pow(10.0, ebno / 10.0) * k / n;
            params.Ka = get<unsigned>(cfg, "Ka");
            params.kind = channel_kind_from_name(get<std::string>(cfg, "channel"));
            params.K0_max = get<unsigned>(cfg, "K0_max");
            params.trials = get<std::uint64_t>(cfg, "trials");
            params.seed = apply_seed_override(get<std::uint64_t>(cfg, "seed"));
            params.workers = workers;
            params.ebno_db = ebno;
            params.L = L;
            tables.push_back(phy::estimate_roc(params));
            std::cout << "roc: ebno=" << csvio::fmt(ebno) << " L=" << L << " done\n";
        }
    }
    write_roc_csv(out_path, tables);
    std::cout << "roc: wrote " << tables.size() << " table(s) to " << out_path << "\n";
    return 0;
}

// ---- simulate ----

sim::ScenarioConfig parse_scenario(const json& cfg) {
    require_keys(cfg,
                 {"Ka", "k", "L", "Q", "channel", "outer", "trials", "seed"},
                 {"n", "K0", "ebno_db", "truncate_to_ka", "resume", "dump_decoded_csv"});
    sim::ScenarioConfig sc;
    sc.Ka = get<unsigned>(cfg, "Ka");
    sc.k = get<unsigned>(cfg, "k");
    sc.L = get<unsigned>(cfg, "L");
    sc.Q = get<std::uint32_t>(cfg, "Q");
    sc.trials = get<std::uint64_t>(cfg, "trials");
    sc.seed = apply_seed_override(get<std::uint64_t>(cfg, "seed"));
    sc.truncate_to_ka = get_or<bool>(cfg, "truncate_to_ka", false);

    const auto& chan = cfg.at("channel");
    if (chan.is_string()) {
        sc.channel = channel_kind_from_name(chan.get<std::string>());
        sc.n = get<unsigned>(cfg, "n");
        sc.K0 = get<unsigned>(cfg, "K0");
    } else {
        require_keys(chan, {"abstract"});
        require_keys(chan.at("abstract"), {"p_m", "p_f"});
        sc.channel = sim::AbstractChannel{get<double>(chan.at("abstract"), "p_m"),
                                          get<double>(chan.at("abstract"), "p_f")};
        sc.n = get_or<unsigned>(cfg, "n", sc.L);  // unused off the physical channel
        sc.K0 = 0;
    }

    const auto& outer = cfg.at("outer");
    if (outer.contains("ttree")) {
        require_keys(outer, {"ttree"});
        const auto& tt = outer.at("ttree");
        require_keys(tt, {"t", "bit_allocation", "code_seed"}, {"path_cap"});
        sim::TtreeScheme scheme;
        scheme.t = get<unsigned>(tt, "t");
        scheme.bit_allocation = get<std::vector<unsigned>>(tt, "bit_allocation");
        scheme.code_seed = get<std::uint64_t>(tt, "code_seed");
        if (tt.contains("path_cap")) scheme.path_cap = get<std::size_t>(tt, "path_cap");
        sc.outer = scheme;
    } else if (outer.contains("rs-coset")) {
        require_keys(outer, {"rs-coset"});
        const auto& rscfg = outer.at("rs-coset");
        require_keys(rscfg, {"x_p", "k_O", "h", "mult"}, {"carry_crc"});
        rs::CosetSchemeConfig cs;
        cs.c = log2_exact(sc.Q, "Q");
        cs.x_p = get<unsigned>(rscfg, "x_p");
        cs.L = sc.L;
        cs.k_O = get<unsigned>(rscfg, "k_O");
        cs.k = sc.k;
        cs.h = get<unsigned>(rscfg, "h");
        cs.mult = get<unsigned>(rscfg, "mult");
        cs.carry_crc = get_or<bool>(rscfg, "carry_crc", false);
        sc.outer = sim::RsCosetScheme{cs};
    } else {
        throw ConfigError("outer must contain \"ttree\" or \"rs-coset\"");
    }
    return sc;
}

int run_simulate(const std::string& config_path, const std::string& out_path, unsigned workers) {
    const auto cfg = load_config(config_path);
    sim::SweepConfig sweep;
    sweep.base = parse_scenario(cfg);
    if (!cfg.contains("ebno_db") && sweep.base.is_abstract())
        sweep.ebno_grid = {0.0};
    else
        sweep.ebno_grid = get_scalar_or_list(cfg, "ebno_db");
    sweep.out_path = out_path;
    sweep.workers = workers;
    sweep.resume = get_or<bool>(cfg, "resume", true);
    const auto rows = sim::sweep(sweep);
    if (cfg.contains("dump_decoded_csv")) {
        auto sc = sweep.base;
        sc.ebno_db = sweep.ebno_grid.front();
        const auto dump_path = get<std::string>(cfg, "dump_decoded_csv");
        sim::dump_decoded(sc, dump_path);
        std::cout << "simulate: decoded payloads -> " << dump_path << "\n";
    }
    std::cout << "simulate: wrote " << rows.size() << " row(s) to " << out_path << "\n";
    return 0;
}

// ---- optimize ----

int run_optimize(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    require_keys(cfg, {"roc_csv", "k", "c", "Ka", "t", "bound"},
                 {"v_star", "pe_target", "pf_target", "ratio"});
    bounds::SearchConstraints cs;
    cs.k = get<unsigned>(cfg, "k");
    cs.c = get<unsigned>(cfg, "c");
    cs.K_a = get<unsigned>(cfg, "Ka");
    cs.t = get<unsigned>(cfg, "t");
    cs.pe_target = get_or<double>(cfg, "pe_target", 0.1);
    cs.pf_target = get_or<double>(cfg, "pf_target", 1e-3);
    cs.ratio = get_or<double>(cfg, "ratio", 1e-2);
    const auto bound = get<std::string>(cfg, "bound");
    if (bound == "corollary") {
        cs.bound = bounds::BoundKind::corollary;
    } else if (bound == "ttree") {
        cs.bound = bounds::BoundKind::ttree;
        cs.v_star = get_or<double>(cfg, "v_star", std::numeric_limits<double>::infinity());
    } else {
        throw ConfigError("bound must be corollary or ttree");
    }

    const auto family = bounds::build_roc_family(read_roc_csv(get<std::string>(cfg, "roc_csv")));
    const auto result = bounds::min_ebno_search(family, cs);

    csvio::Table out;
    out.header = {"Ka", "t", "ebno_db", "L", "K0", "Pe", "Pf", "status"};
    if (result.saturated) {
        out.rows.push_back({std::to_string(cs.K_a), std::to_string(cs.t), "inf", "0", "0", "nan",
                            "nan", "saturated"});
        csvio::write_atomic(out_path, out);
        std::cout << "optimize: saturated (no feasible grid point) -> " << out_path << "\n";
    } else {
        const auto& p = result.point;
        out.rows.push_back({std::to_string(cs.K_a), std::to_string(cs.t), csvio::fmt(p.ebno_db),
                            std::to_string(p.L), std::to_string(p.K0), csvio::fmt(p.P_e),
                            csvio::fmt(p.P_f), "ok"});
        csvio::write_atomic(out_path, out);
        std::cout << "optimize: ebno=" << csvio::fmt(p.ebno_db) << " dB L=" << p.L
                  << " K0=" << p.K0 << " -> " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coded compressed sensing toolkit for unsourced random access"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    unsigned workers = 1;
    app.add_option("--workers", workers, "Worker threads for trials")->capture_default_str();

    struct Sub {
        CLI::App* cmd;
        int (*direct)(const std::string&, const std::string&);
        int (*threaded)(const std::string&, const std::string&, unsigned);
    };
    std::vector<Sub> subs;
    auto add = [&](const std::string& name, const std::string& desc,
                   int (*direct)(const std::string&, const std::string&),
                   int (*threaded)(const std::string&, const std::string&, unsigned)) {
        auto* cmd = app.add_subcommand(name, desc);
        cmd->add_option("--config", config_path, "JSON config path")->required();
        cmd->add_option("--out", out_path, "Output CSV path")->required();
        subs.push_back({cmd, direct, threaded});
    };

    add("capacity",
        "Outer-channel capacity estimate. Keys: Q, Ka, p_m, p_f | Q, Ka, roc_csv, n",
        run_capacity, nullptr);
    add("rcb",
        "Random coding bound. Keys: k, L, Q, Ka, t, p_m, p_f [, mode, ebno_db, K0]",
        run_rcb, nullptr);
    add("ttree-bound",
        "Tree-ensemble path bound per level. Keys: bit_allocation, c, Ka, t, p_m, p_f",
        run_ttree_bound, nullptr);
    add("alloc",
        "Greedy bit allocation. Keys: k, c, Ka, t, p_m, p_f, v_star, L_max",
        run_alloc, nullptr);
    add("roc",
        "Inner-code ROC estimation. Keys: n, L, Q, Ka, ebno_db, k, channel, K0_max, trials, seed",
        nullptr, run_roc);
    add("simulate",
        "End-to-end Monte Carlo. Keys: Ka, k, n, L, Q, ebno_db, channel, K0, outer, trials, seed"
        " [, truncate_to_ka, resume, dump_decoded_csv]",
        nullptr, run_simulate);
    add("optimize",
        "Minimum-ebno search over a ROC family. Keys: roc_csv, k, c, Ka, t, bound"
        " [, v_star, pe_target, pf_target, ratio]",
        run_optimize, nullptr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const auto& sub : subs)
            if (sub.cmd->parsed())
                return sub.direct ? sub.direct(config_path, out_path)
                                  : sub.threaded(config_path, out_path, workers);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
