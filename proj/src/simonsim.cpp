#include "zipfirm/simonsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"

namespace zipfirm::sim {
namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, "config: " + what); }

double hazard_weight(const SimConfig& c, const FirmState& f) {
    return f.alive ? std::pow(f.ratio(), c.hazard_exponent) : 0.0;
}

void refresh_debt(const SimConfig& c, FirmState& f) {
    f.debt = c.m * static_cast<double>(f.debt_m_units) + static_cast<double>(f.debt_units);
}

/// Push firm j's current A and R into the trees.
void reweight(EconomyState& s, std::size_t j) {
    const auto& f = s.firms[j];
    s.asset_tree.set(j, static_cast<double>(f.assets));
    s.hazard_tree.set(j, hazard_weight(s.config, f));
    s.alive_tree.set(j, f.alive ? 1.0 : 0.0);
}

void add_firm(EconomyState& s, std::uint64_t birth) {
    FirmState f;
    f.birth_time = birth;
    f.assets = 1;
    f.debt_m_units = 1;
    refresh_debt(s.config, f);
    s.firms.push_back(f);
    s.asset_tree.append(1.0);
    s.hazard_tree.append(hazard_weight(s.config, f));
    s.alive_tree.append(1.0);
}

void go_bankrupt(EconomyState& s, std::size_t j) {
    auto& f = s.firms[j];
    s.bankruptcy_log.push_back({s.clock, j, f.ratio()});
    f.debt_m_units = f.assets;
    f.debt_units = 0;
    refresh_debt(s.config, f);
    ++f.bankruptcies;
    s.hazard_tree.set(j, hazard_weight(s.config, f));
}

void bankruptcy_phase(EconomyState& s) {
    const auto& c = s.config;
    if (c.q == 0.0) return;
    if (c.hazard_mode == HazardMode::aggregated) {
        const double rate = std::min(c.q * s.hazard_tree.total(), 1.0);
        if (s.rng.uniform() < rate) go_bankrupt(s, s.hazard_tree.sample(s.rng.uniform()));
        return;
    }
    for (std::size_t j = 0; j < s.firms.size(); ++j) {
        if (!s.firms[j].alive) continue;
        const double prob = std::min(c.q * s.hazard_tree.weight(j), 1.0);
        if (s.rng.uniform() < prob) go_bankrupt(s, j);
    }
}

void merger_phase(EconomyState& s) {
    const auto& c = s.config;
    if (c.p_merge == 0.0) return;
    if (!(s.rng.uniform() < c.p_merge)) return;
    const std::size_t alive = s.alive_count();
    if (alive < 2) return;

    const std::uint64_t k1 = s.rng.below(alive);
    std::uint64_t k2 = s.rng.below(alive - 1);
    if (k2 >= k1) ++k2;
    const std::size_t a = s.alive_tree.find(static_cast<double>(k1));
    const std::size_t b = s.alive_tree.find(static_cast<double>(k2));

    std::size_t acquirer = std::min(a, b);
    std::size_t target = std::max(a, b);
    if (s.firms[target].assets > s.firms[acquirer].assets) std::swap(acquirer, target);

    auto& acq = s.firms[acquirer];
    auto& tgt = s.firms[target];
    const double moved = c.merger_drops_debt ? 0.0 : tgt.debt;
    acq.assets += tgt.assets;
    if (!c.merger_drops_debt) {
        acq.debt_m_units += tgt.debt_m_units;
        acq.debt_units += tgt.debt_units;
    }
    refresh_debt(c, acq);
    tgt.assets = 0;
    tgt.debt_m_units = 0;
    tgt.debt_units = 0;
    tgt.debt = 0.0;
    tgt.alive = false;
    reweight(s, acquirer);
    reweight(s, target);
    s.merger_log.push_back({s.clock, acquirer, target, moved});
}

}  // namespace

std::string_view to_string(HazardMode mode) noexcept {
    return mode == HazardMode::aggregated ? "aggregated" : "per_firm_sweep";
}

std::optional<HazardMode> parse_hazard_mode(std::string_view text) noexcept {
    if (text == "aggregated") return HazardMode::aggregated;
    if (text == "per_firm_sweep" || text == "sweep") return HazardMode::per_firm_sweep;
    return std::nullopt;
}

void SimConfig::validate() const {
    if (!(p > 0.0 && p <= 1.0)) config_error("p must lie in (0, 1], got " + format_real(p));
    if (!(m > 0.0 && m < 1.0)) config_error("m must lie in (0, 1), got " + format_real(m));
    if (!(q >= 0.0) || !std::isfinite(q)) config_error("q must be >= 0, got " + format_real(q));
    if (!std::isfinite(hazard_exponent)) config_error("hazard_exponent must be finite");
    if (!(p_merge >= 0.0 && p_merge <= 1.0)) config_error("p_merge must lie in [0, 1], got " + format_real(p_merge));
    if (!(theta >= 0.0) || !std::isfinite(theta)) config_error("theta must be >= 0, got " + format_real(theta));
    if (steps == 0) config_error("steps must be positive");
}

EntrySchedule EntrySchedule::restore(double theta, double accumulated, std::uint64_t emitted, std::uint64_t t) {
    EntrySchedule e(theta);
    e.accumulated_ = accumulated;
    e.emitted_ = emitted;
    e.t_ = t;
    return e;
}

std::uint64_t EntrySchedule::next() {
    ++t_;
    accumulated_ += theta_ == 0.0 ? 1.0 : std::pow(static_cast<double>(t_), theta_);
    const auto target = static_cast<std::uint64_t>(std::floor(accumulated_));
    const std::uint64_t units = target - emitted_;
    emitted_ = target;
    return units;
}

std::uint64_t entry_count(std::uint64_t t, double theta) {
    if (t == 0) throw Error(ErrorKind::domain, "entry_count: steps are numbered from 1");
    EntrySchedule schedule(theta);
    std::uint64_t units = 0;
    for (std::uint64_t k = 1; k <= t; ++k) units = schedule.next();
    return units;
}

std::size_t EconomyState::alive_count() const noexcept {
    return static_cast<std::size_t>(alive_tree.total());
}

void EconomyState::check_invariants() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::invariant, "economy: " + what); };
    const std::size_t n = firms.size();
    if (asset_tree.size() != n || hazard_tree.size() != n || alive_tree.size() != n) {
        fail("tree sizes disagree with firm table");
    }
    std::uint64_t assets = 0;
    std::size_t alive = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& f = firms[j];
        assets += f.assets;
        const double expected_debt = config.m * static_cast<double>(f.debt_m_units) + static_cast<double>(f.debt_units);
        if (f.debt != expected_debt) fail("debt counters out of sync for firm " + std::to_string(j));
        if (f.alive) {
            ++alive;
            if (f.assets < 1) fail("alive firm " + std::to_string(j) + " has no assets");
            if (asset_tree.weight(j) != static_cast<double>(f.assets) || alive_tree.weight(j) != 1.0 ||
                hazard_tree.weight(j) != hazard_weight(config, f)) {
                fail("stale tree weight for firm " + std::to_string(j));
            }
        } else if (f.assets != 0 || asset_tree.weight(j) != 0.0 || hazard_tree.weight(j) != 0.0 ||
                   alive_tree.weight(j) != 0.0) {
            fail("merged-away firm " + std::to_string(j) + " still carries weight");
        }
    }
    if (assets != units_injected) {
        fail("asset units " + std::to_string(assets) + " != injected " + std::to_string(units_injected));
    }
    if (alive != alive_count()) fail("alive tree total disagrees with firm table");
    if (std::abs(asset_tree.total() - static_cast<double>(assets)) > 1e-9 * static_cast<double>(assets)) {
        fail("asset tree total drifted");
    }
}

EconomyState init(const SimConfig& config) {
    config.validate();
    EconomyState s;
    s.config = config;
    s.rng = CounterRng(config.seed);
    s.entry = EntrySchedule(config.theta);
    s.clock = 1;
    add_firm(s, 1);
    s.units_injected = 1;
    return s;
}

void step(EconomyState& s) {
    const auto& c = s.config;
    if (s.alive_count() < 1) throw Error(ErrorKind::invariant, "economy: no alive firm");

    const std::uint64_t units = s.entry.next();
    for (std::uint64_t u = 0; u < units; ++u) {
        ++s.units_injected;
        if (s.rng.uniform() < c.p) {
            add_firm(s, s.clock + 1);
        } else {
            const std::size_t j = s.asset_tree.sample(s.rng.uniform());
            auto& f = s.firms[j];
            ++f.assets;
            ++f.debt_m_units;
            refresh_debt(c, f);
            reweight(s, j);
        }
    }

    {
        const std::size_t j = s.asset_tree.sample(s.rng.uniform());
        auto& f = s.firms[j];
        ++f.debt_units;
        refresh_debt(c, f);
        s.hazard_tree.set(j, hazard_weight(c, f));
    }

    bankruptcy_phase(s);
    merger_phase(s);
    ++s.clock;
}

void advance(EconomyState& state, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) step(state);
}

EconomyState run(const SimConfig& config) {
    EconomyState s = init(config);
    advance(s, config.steps);
    return s;
}

std::string_view to_string(SeriesField field) noexcept {
    switch (field) {
        case SeriesField::assets: return "assets";
        case SeriesField::debt: return "debt";
        case SeriesField::ratio_alive: return "ratio_alive";
        case SeriesField::ratio_bankrupt_events: return "ratio_bankrupt_events";
    }
    return "assets";
}

std::optional<SeriesField> parse_series_field(std::string_view text) noexcept {
    if (text == "assets") return SeriesField::assets;
    if (text == "debt") return SeriesField::debt;
    if (text == "ratio_alive" || text == "ratio") return SeriesField::ratio_alive;
    if (text == "ratio_bankrupt_events" || text == "ratio_bankrupt") return SeriesField::ratio_bankrupt_events;
    return std::nullopt;
}

std::vector<double> series_values(const EconomyState& state, SeriesField field) {
    std::vector<double> out;
    if (field == SeriesField::ratio_bankrupt_events) {
        out.reserve(state.bankruptcy_log.size());
        for (const auto& e : state.bankruptcy_log) out.push_back(e.ratio);
        return out;
    }
    out.reserve(state.firms.size());
    for (const auto& f : state.firms) {
        if (!f.alive) continue;
        switch (field) {
            case SeriesField::assets: out.push_back(static_cast<double>(f.assets)); break;
            case SeriesField::debt: out.push_back(f.debt); break;
            default: out.push_back(f.ratio()); break;
        }
    }
    return out;
}

fit::RankSeries extract_series(const EconomyState& state, SeriesField field) {
    auto values = series_values(state, field);
    if (values.empty()) {
        throw Error(ErrorKind::empty_series,
                    "extract_series: no values for field '" + std::string(to_string(field)) + "'");
    }
    return fit::build_rank_series(values).series;
}

std::string events_tsv(const EconomyState& state) {
    std::string out = "# step\tevent\tfirm\tvalue\n";
    auto b = state.bankruptcy_log.begin();
    auto m = state.merger_log.begin();
    while (b != state.bankruptcy_log.end() || m != state.merger_log.end()) {
        if (m == state.merger_log.end() || (b != state.bankruptcy_log.end() && b->step <= m->step)) {
            out += std::to_string(b->step) + "\tbankruptcy\t" + std::to_string(b->firm) + '\t' +
                   format_real(b->ratio) + '\n';
            ++b;
        } else {
            out += std::to_string(m->step) + "\tmerger\t" + std::to_string(m->acquirer) + '\t' +
                   std::to_string(m->target) + '\n';
            ++m;
        }
    }
    return out;
}

}  // namespace zipfirm::sim
