#include "ccs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "ccs/achannel.hpp"
#include "ccs/csvio.hpp"

namespace ccs::sim {

void ScenarioConfig::validate() const {
    if (Ka < 1) throw std::invalid_argument("sim: Ka must be >= 1");
    if (k < 1 || k > 128) throw std::invalid_argument("sim: k must be in [1,128]");
    if (L < 1) throw std::invalid_argument("sim: L must be >= 1");
    if (Q < 2) throw std::invalid_argument("sim: Q must be >= 2");
    if (trials < 1) throw std::invalid_argument("sim: trials must be >= 1");
    if (!is_abstract()) {
        if (n % L != 0) throw std::invalid_argument("sim: L must divide n");
        if (K0 < 1 || K0 > Q) throw std::invalid_argument("sim: require 1 <= K0 <= Q");
    }
    if (const auto* tt = std::get_if<TtreeScheme>(&outer)) {
        unsigned total = 0;
        for (const auto b : tt->bit_allocation) total += b;
        if (total != k) throw std::invalid_argument("sim: bit allocation must sum to k");
        if (tt->bit_allocation.size() != L)
            throw std::invalid_argument("sim: bit allocation length must equal L");
        const unsigned c = static_cast<unsigned>(std::round(std::log2(Q)));
        if ((1u << c) != Q) throw std::invalid_argument("sim: ttree needs power-of-two Q");
    } else {
        const auto& cs = std::get<RsCosetScheme>(outer).config;
        cs.validate();
        if (cs.Q() != Q || cs.L != L || cs.k != k)
            throw std::invalid_argument("sim: coset config inconsistent with scenario");
    }
}

Interval wilson_interval(std::uint64_t x, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double p = static_cast<double>(x) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

PreparedScenario PreparedScenario::build(const ScenarioConfig& config) {
    config.validate();
    PreparedScenario prepared;
    if (!config.is_abstract()) {
        prepared.codebook = phy::gen_codebook(config.n1(), config.Q, config.P(),
                                              rng::derive_seed(config.seed, 0xC0DEB00Cull));
        prepared.workspace.emplace(*prepared.codebook);
    }
    if (const auto* tt = std::get_if<TtreeScheme>(&config.outer)) {
        const unsigned c = static_cast<unsigned>(std::round(std::log2(config.Q)));
        prepared.tree = ttree::build_generator(tt->bit_allocation, c, tt->code_seed);
    }
    return prepared;
}

namespace {

ttree::Bits random_bits(rng::Engine& eng, unsigned k) {
    ttree::Bits bits(k);
    for (auto& b : bits) b = static_cast<std::uint8_t>(eng() >> 63);
    return bits;
}

}  // namespace

namespace {

struct FrameData {
    std::vector<ttree::Bits> payloads;
    std::vector<ttree::Bits> decoded;
};

FrameData run_frame_pipeline(const ScenarioConfig& config, const PreparedScenario& prepared,
                             rng::Engine& rng) {
    const auto* tt = std::get_if<TtreeScheme>(&config.outer);

    // Draw messages (with replacement) and outer-encode.
    std::vector<ttree::Bits> payloads(config.Ka);
    std::vector<std::vector<std::uint32_t>> codewords(config.Ka);
    for (unsigned i = 0; i < config.Ka; ++i) {
        payloads[i] = random_bits(rng, config.k);
        if (tt) {
            codewords[i] = ttree::encode(*prepared.tree, payloads[i]);
        } else {
            const auto& cs = std::get<RsCosetScheme>(config.outer).config;
            const auto p_u = static_cast<std::uint32_t>(rng::uniform_below(rng, 1u << cs.x_p));
            codewords[i] = rs::coset_encode(cs, payloads[i], p_u);
        }
    }

    // Slot channel: abstract union + symbol noise, or inner code + OMP lists.
    achannel::ReceivedLists lists;
    lists.slots.reserve(config.L);
    std::vector<std::uint32_t> slot_symbols(config.Ka);
    if (config.is_abstract()) {
        const auto& ab = std::get<AbstractChannel>(config.channel);
        achannel::OuterChannelParams params{config.Q, config.Ka, ab.p_m, ab.p_f};
        for (unsigned j = 0; j < config.L; ++j) {
            for (unsigned i = 0; i < config.Ka; ++i) slot_symbols[i] = codewords[i][j];
            const auto ya = achannel::a_channel_union(slot_symbols, config.Q);
            lists.slots.push_back(achannel::apply_symbol_noise(ya, params, rng));
        }
    } else {
        const auto kind = std::get<ChannelKind>(config.channel);
        std::vector<std::complex<double>> gains(config.Ka, {1.0, 0.0});
        if (kind == ChannelKind::rayleigh) gains = phy::draw_fading_gains(config.Ka, rng);
        for (unsigned j = 0; j < config.L; ++j) {
            for (unsigned i = 0; i < config.Ka; ++i) slot_symbols[i] = codewords[i][j];
            const auto y = phy::transmit_slot(*prepared.codebook, slot_symbols, gains, rng);
            lists.slots.push_back(
                achannel::SlotSymbolSet(phy::omp_decode(*prepared.workspace, y, config.K0)));
        }
    }

    // Outer decode.
    std::vector<ttree::Bits> decoded;
    if (tt) {
        auto result = ttree::decode(*prepared.tree, lists, tt->t, tt->path_cap);
        if (config.truncate_to_ka && result.messages.size() > config.Ka) {
            // Keep the Ka lowest-distance messages, ties by lexicographic order.
            std::vector<std::size_t> idx(result.messages.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return result.distances[a] < result.distances[b];
            });
            idx.resize(config.Ka);
            for (const auto i : idx) decoded.push_back(result.messages[i]);
        } else {
            decoded = std::move(result.messages);
        }
    } else {
        decoded = rs::coset_decode(std::get<RsCosetScheme>(config.outer).config, lists);
        if (config.truncate_to_ka && decoded.size() > config.Ka) decoded.resize(config.Ka);
    }

    return {std::move(payloads), std::move(decoded)};
}

}  // namespace

FrameOutcome run_frame_trial(const ScenarioConfig& config, const PreparedScenario& prepared,
                             rng::Engine& rng) {
    const auto frame = run_frame_pipeline(config, prepared, rng);
    std::set<ttree::Bits> output(frame.decoded.begin(), frame.decoded.end());
    std::set<ttree::Bits> sent(frame.payloads.begin(), frame.payloads.end());
    FrameOutcome outcome;
    for (const auto& p : frame.payloads)
        if (!output.count(p)) ++outcome.missed;
    for (const auto& m : output)
        if (!sent.count(m)) ++outcome.false_count;
    return outcome;
}

void dump_decoded(const ScenarioConfig& config, const std::string& out_path) {
    const auto prepared = PreparedScenario::build(config);
    csvio::Table out;
    out.header = {"frame", "payload"};
    for (std::uint64_t frame = 0; frame < config.trials; ++frame) {
        auto eng = rng::make_engine(config.seed, frame);
        const auto data = run_frame_pipeline(config, prepared, eng);
        for (const auto& m : data.decoded)
            out.rows.push_back({std::to_string(frame), rs::payload_hex(m)});
    }
    csvio::write_atomic(out_path, out);
}

FrameOutcome run_frame_trial(const ScenarioConfig& config, rng::Engine& rng) {
    const auto prepared = PreparedScenario::build(config);
    return run_frame_trial(config, prepared, rng);
}

namespace {

struct RateCounters {
    std::uint64_t missed = 0;
    std::uint64_t frames_with_false = 0;
    std::uint64_t false_total = 0;
    double false_sq = 0.0;

    void merge(const RateCounters& o) {
        missed += o.missed;
        frames_with_false += o.frames_with_false;
        false_total += o.false_total;
        false_sq += o.false_sq;
    }
};

void run_rate_trials(const ScenarioConfig& config, const PreparedScenario& prepared,
                     std::uint64_t first, std::uint64_t count, RateCounters& counters) {
    for (std::uint64_t frame = first; frame < first + count; ++frame) {
        auto eng = rng::make_engine(config.seed, frame);
        const auto outcome = run_frame_trial(config, prepared, eng);
        counters.missed += outcome.missed;
        counters.frames_with_false += outcome.false_count > 0 ? 1 : 0;
        counters.false_total += outcome.false_count;
        counters.false_sq += static_cast<double>(outcome.false_count) * outcome.false_count;
    }
}

}  // namespace

SimResult estimate_rates(const ScenarioConfig& config, unsigned workers) {
    const auto prepared = PreparedScenario::build(config);
    RateCounters total;
    workers = std::max(1u, workers);
    if (workers == 1 || config.trials < 2 * workers) {
        run_rate_trials(config, prepared, 0, config.trials, total);
    } else {
        std::vector<RateCounters> parts(workers);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (config.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t first = w * chunk;
            if (first >= config.trials) break;
            const std::uint64_t count = std::min<std::uint64_t>(chunk, config.trials - first);
            pool.emplace_back(
                [&, w, first, count] { run_rate_trials(config, prepared, first, count, parts[w]); });
        }
        for (auto& th : pool) th.join();
        for (const auto& part : parts) total.merge(part);
    }

    SimResult result;
    result.trials = config.trials;
    const std::uint64_t user_trials = config.trials * config.Ka;
    result.pupe = static_cast<double>(total.missed) / user_trials;
    result.pupe_ci = wilson_interval(total.missed, user_trials);
    result.far_frame = static_cast<double>(total.frames_with_false) / config.trials;
    result.far_ci = wilson_interval(total.frames_with_false, config.trials);
    result.false_mean = static_cast<double>(total.false_total) / config.trials;
    const double var =
        std::max(0.0, (total.false_sq - config.trials * result.false_mean * result.false_mean) /
                          std::max<std::uint64_t>(1, config.trials - 1));
    const double half = 1.959963985 * std::sqrt(var / config.trials);
    result.false_mean_ci = {std::max(0.0, result.false_mean - half), result.false_mean + half};
    return result;
}

std::string scheme_name(const ScenarioConfig& config) {
    return std::holds_alternative<TtreeScheme>(config.outer) ? "ttree" : "rs-coset";
}

unsigned scheme_t(const ScenarioConfig& config) {
    if (const auto* tt = std::get_if<TtreeScheme>(&config.outer)) return tt->t;
    return 0;
}

std::vector<std::vector<std::string>> sweep(const SweepConfig& config) {
    if (config.ebno_grid.empty()) throw std::invalid_argument("sweep: empty grid");

    // Resume: reuse a row only when every identifying column matches, so a
    // stale file from another seed or scheme never leaks results.
    auto row_key = [](const std::vector<std::string>& row) {
        return row[0] + "|" + row[1] + "|" + row[2] + "|" + row[3] + "|" + row[4] + "|" + row[5] +
               "|" + row[10] + "|" + row[11];
    };
    std::map<std::string, std::vector<std::string>> existing;
    if (config.resume && csvio::exists(config.out_path)) {
        const auto old = csvio::read(config.out_path);
        old.require_header(kSweepHeader);
        for (const auto& row : old.rows) existing[row_key(row)] = row;
    }

    std::vector<std::vector<std::string>> rows;
    for (const double ebno : config.ebno_grid) {
        ScenarioConfig sc = config.base;
        sc.ebno_db = ebno;
        const std::vector<std::string> head{
            scheme_name(sc), std::to_string(sc.Ka),     std::to_string(scheme_t(sc)),
            csvio::fmt(ebno), std::to_string(sc.L),      std::to_string(sc.K0)};
        const std::string key = head[0] + "|" + head[1] + "|" + head[2] + "|" + head[3] + "|" +
                                head[4] + "|" + head[5] + "|" + std::to_string(sc.trials) + "|" +
                                std::to_string(sc.seed);
        if (const auto it = existing.find(key); it != existing.end()) {
            rows.push_back(it->second);
            continue;
        }
        const auto r = estimate_rates(sc, config.workers);
        rows.push_back({head[0], head[1], head[2], head[3], head[4], head[5], csvio::fmt(r.pupe),
                        csvio::fmt(r.pupe_ci.half()), csvio::fmt(r.far_frame),
                        csvio::fmt(r.false_mean), std::to_string(r.trials),
                        std::to_string(sc.seed)});
        // Incremental write so an interrupted sweep can resume.
        csvio::Table t{kSweepHeader, rows};
        csvio::write_atomic(config.out_path, t);
    }
    csvio::Table t{kSweepHeader, rows};
    csvio::write_atomic(config.out_path, t);
    return rows;
}

}  // namespace ccs::sim
