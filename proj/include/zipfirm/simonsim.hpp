#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zipfirm/rng.hpp"
#include "zipfirm/scalefit.hpp"
#include "zipfirm/weight_tree.hpp"

namespace zipfirm::sim {

enum class HazardMode {
    /// One Bernoulli(q R_j^h) trial per alive firm per step.
    per_firm_sweep,
    /// Fire at most one bankruptcy per step with probability min(q sum_j R_j^h, 1),
    /// victim drawn proportionally to R_j^h.
    aggregated,
};

std::string_view to_string(HazardMode mode) noexcept;
std::optional<HazardMode> parse_hazard_mode(std::string_view text) noexcept;

struct SimConfig {
    double p = 0.01;                 // probability an entering unit founds a new firm
    double m = 0.5;                  // debt carried by each asset unit on entry
    double q = 0.0;                  // bankruptcy rate parameter
    double hazard_exponent = 0.95;   // hazard = q * R^hazard_exponent
    double p_merge = 0.0;            // per-step probability of one merger
    double theta = 0.0;              // entering units per step grow as t^theta
    std::uint64_t steps = 500'000;
    std::uint64_t seed = 0;
    HazardMode hazard_mode = HazardMode::aggregated;
    bool merger_drops_debt = false;  // drop the target's debt instead of transferring it

    /// Throws Error(config) on any out-of-range field.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Debt is kept exactly as m * debt_m_units + debt_units: entering assets
/// carry m each, injections and bankruptcy resets move whole counters.
struct FirmState {
    std::uint64_t birth_time = 0;
    std::uint64_t assets = 0;  // integer asset units
    std::uint64_t debt_m_units = 0;
    std::uint64_t debt_units = 0;
    double debt = 0.0;         // m * debt_m_units + debt_units
    bool alive = true;
    std::uint32_t bankruptcies = 0;

    [[nodiscard]] double ratio() const noexcept { return debt / static_cast<double>(assets); }

    friend bool operator==(const FirmState&, const FirmState&) = default;
};

struct BankruptcyEvent {
    std::uint64_t step = 0;
    std::uint64_t firm = 0;
    double ratio = 0.0;  // D/A immediately before the restructuring

    friend bool operator==(const BankruptcyEvent&, const BankruptcyEvent&) = default;
};

struct MergerEvent {
    std::uint64_t step = 0;
    std::uint64_t acquirer = 0;
    std::uint64_t target = 0;
    double debt_transferred = 0.0;

    friend bool operator==(const MergerEvent&, const MergerEvent&) = default;
};

/// Deterministic emitter of entering asset units. Step t releases
/// floor(sum_{k<=t} k^theta) minus what earlier steps released.
class EntrySchedule {
public:
    explicit EntrySchedule(double theta = 0.0) : theta_(theta) {}
    static EntrySchedule restore(double theta, double accumulated, std::uint64_t emitted, std::uint64_t t);

    /// Units for the next step (steps are numbered 1, 2, ...).
    std::uint64_t next();

    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] double accumulated() const noexcept { return accumulated_; }
    [[nodiscard]] std::uint64_t emitted() const noexcept { return emitted_; }
    [[nodiscard]] std::uint64_t step() const noexcept { return t_; }

    friend bool operator==(const EntrySchedule&, const EntrySchedule&) = default;

private:
    double theta_;
    double accumulated_ = 0.0;
    std::uint64_t emitted_ = 0;
    std::uint64_t t_ = 0;
};

/// Units released at step t (t >= 1). Pure; replays the schedule from step 1.
std::uint64_t entry_count(std::uint64_t t, double theta);

/// Complete simulator state. Firms are never removed: a merged-away firm
/// keeps its slot with assets 0, alive false and zero weight in every tree.
struct EconomyState {
    SimConfig config;
    std::vector<FirmState> firms;
    WeightTree asset_tree;   // weight A_j
    WeightTree hazard_tree;  // weight R_j^hazard_exponent for alive firms
    WeightTree alive_tree;   // weight 1 for alive firms
    std::uint64_t clock = 1;
    std::uint64_t units_injected = 0;
    CounterRng rng;
    EntrySchedule entry;
    std::vector<BankruptcyEvent> bankruptcy_log;
    std::vector<MergerEvent> merger_log;

    [[nodiscard]] std::size_t alive_count() const noexcept;
    /// Throws Error(invariant) if the trees, firm table and unit counter disagree.
    void check_invariants() const;

    friend bool operator==(const EconomyState&, const EconomyState&) = default;
};

/// One alive firm with A = 1, D = m at t = 1.
EconomyState init(const SimConfig& config);

/// Advance one step. Draw order is fixed:
///   1. entry: per unit, u (found vs. absorb) then, if absorbed, u (acquirer)
///   2. debt injection: u (recipient)
///   3. bankruptcy (skipped when q == 0):
///        aggregated: u (fire?) then, if fired, u (victim)
///        per_firm_sweep: one u per alive firm in slot order
///   4. merger (skipped when p_merge == 0): u (merge?) then, if it happens
///      and two firms are alive, u (first) and u (second)
void step(EconomyState& state);

/// Advance `count` steps.
void advance(EconomyState& state, std::uint64_t count);

/// init followed by config.steps steps.
EconomyState run(const SimConfig& config);

enum class SeriesField { assets, debt, ratio_alive, ratio_bankrupt_events };

std::string_view to_string(SeriesField field) noexcept;
std::optional<SeriesField> parse_series_field(std::string_view text) noexcept;

/// Raw values for `field` in firm-slot (or event) order.
std::vector<double> series_values(const EconomyState& state, SeriesField field);

/// Descending rank series. Throws Error(empty_series) when nothing is selected.
fit::RankSeries extract_series(const EconomyState& state, SeriesField field);

/// `step<TAB>event<TAB>firm<TAB>value` lines for both logs, ordered by step
/// with bankruptcies before the merger of the same step. Merger lines carry
/// the acquirer as firm and the target as value.
std::string events_tsv(const EconomyState& state);

std::string to_text(const EconomyState& state);
EconomyState economy_from_text(std::string_view text);
void write_snapshot(const EconomyState& state, const std::filesystem::path& path);
EconomyState read_economy_snapshot(const std::filesystem::path& path);

}  // namespace zipfirm::sim
