#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccs/phy.hpp"
#include "ccs/rng.hpp"
#include "ccs/roc.hpp"
#include "ccs/rs.hpp"
#include "ccs/ttree.hpp"

// Monte Carlo frame harness: draw messages, outer-encode, push every slot
// through the inner channel + list decoder (or the abstract symbol channel),
// outer-decode, and score PUPE / FAR.
namespace ccs::sim {

struct AbstractChannel {
    double p_m = 0.0;
    double p_f = 0.0;
};

struct TtreeScheme {
    unsigned t = 0;
    std::optional<std::size_t> path_cap;
    std::vector<unsigned> bit_allocation;  // sums to k
    std::uint64_t code_seed = 0;
};

struct RsCosetScheme {
    rs::CosetSchemeConfig config;
};

struct ScenarioConfig {
    unsigned Ka = 1;
    unsigned k = 1;       // payload bits
    unsigned n = 1;       // frame length in channel uses (phy channels)
    unsigned L = 1;       // slot count
    std::uint32_t Q = 2;  // slot alphabet
    double ebno_db = 0.0;
    std::variant<ChannelKind, AbstractChannel> channel = ChannelKind::rayleigh;
    unsigned K0 = 1;  // inner list size (phy channels)
    std::variant<TtreeScheme, RsCosetScheme> outer = TtreeScheme{};
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    bool truncate_to_ka = false;  // strict fixed-list-size reporting mode

    bool is_abstract() const { return std::holds_alternative<AbstractChannel>(channel); }
    unsigned n1() const { return n / L; }
    // Eb/N0 = P n / k, so P = Eb/N0 * k / n.
    double P() const { return std::pow(10.0, ebno_db / 10.0) * k / n; }
    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half() const { return (hi - lo) / 2.0; }
};

// Wilson score interval for x successes out of n at ~95%.
Interval wilson_interval(std::uint64_t x, std::uint64_t n, double z = 1.959963985);

struct SimResult {
    double pupe = 0.0;
    Interval pupe_ci;
    double far_frame = 0.0;  // fraction of frames with at least one false message
    Interval far_ci;
    double false_mean = 0.0;  // mean false messages per frame
    Interval false_mean_ci;   // normal interval on the mean
    std::uint64_t trials = 0;
};

struct FrameOutcome {
    unsigned missed = 0;       // transmitted messages absent from the output
    unsigned false_count = 0;  // output messages nobody transmitted
};

// Heavy per-scenario assets built once and shared across trials.
struct PreparedScenario {
    std::optional<phy::InnerCodebook> codebook;
    std::optional<phy::OmpWorkspace> workspace;
    std::optional<ttree::TreeCodeSpec> tree;

    static PreparedScenario build(const ScenarioConfig& config);
};

FrameOutcome run_frame_trial(const ScenarioConfig& config, const PreparedScenario& prepared,
                             rng::Engine& rng);
// Convenience form; builds the scenario assets on every call.
FrameOutcome run_frame_trial(const ScenarioConfig& config, rng::Engine& rng);

// Per-frame engines derive from (seed, frame index), so the result is byte
// identical for any worker count.
SimResult estimate_rates(const ScenarioConfig& config, unsigned workers = 1);

// Sweep CSV schema.
inline const std::vector<std::string> kSweepHeader = {
    "scheme", "Ka",        "t",         "ebno_db", "L",      "K0",
    "pupe",   "pupe_ci",   "far_frame", "false_mean", "trials", "seed"};

struct SweepConfig {
    ScenarioConfig base;
    std::vector<double> ebno_grid;
    std::string out_path;
    unsigned workers = 1;
    bool resume = true;  // keep rows of grid points already present in out_path
};

// One row per grid point; returns the rows written (including reused ones).
std::vector<std::vector<std::string>> sweep(const SweepConfig& config);

// Per-frame decoded messages as hex payloads (CSV columns frame,payload);
// a debugging surface for the outer decoders.
void dump_decoded(const ScenarioConfig& config, const std::string& out_path);

std::string scheme_name(const ScenarioConfig& config);
unsigned scheme_t(const ScenarioConfig& config);

}  // namespace ccs::sim
