#include <string>
#include <vector>

#include "zipfirm/error.hpp"
#include "zipfirm/simonsim.hpp"
#include "zipfirm/snapshot.hpp"

namespace zipfirm::sim {
namespace {

using snapshot::format_double;
using snapshot::parse_double;
using snapshot::parse_u64;

[[noreturn]] void bad(const std::string& what) {
    throw Error(ErrorKind::snapshot_format, std::string(snapshot::kVersionTag) + " economy snapshot: " + what);
}

void expect_fields(const std::vector<std::string>& f, std::size_t n) {
    if (f.size() != n) bad("line '" + f[0] + "' has " + std::to_string(f.size()) + " fields, expected " + std::to_string(n));
}

bool parse_bool(const std::string& s) {
    if (s == "1") return true;
    if (s == "0") return false;
    bad("bad boolean '" + s + "'");
}

}  // namespace

std::string to_text(const EconomyState& s) {
    snapshot::Writer w("economy");
    const auto& c = s.config;
    w.line({"config", "p", format_double(c.p)});
    w.line({"config", "m", format_double(c.m)});
    w.line({"config", "q", format_double(c.q)});
    w.line({"config", "hazard_exponent", format_double(c.hazard_exponent)});
    w.line({"config", "p_merge", format_double(c.p_merge)});
    w.line({"config", "theta", format_double(c.theta)});
    w.line({"config", "steps", std::to_string(c.steps)});
    w.line({"config", "seed", std::to_string(c.seed)});
    w.line({"config", "hazard_mode", std::string(to_string(c.hazard_mode))});
    w.line({"config", "merger_drops_debt", c.merger_drops_debt ? "1" : "0"});
    w.line({"clock", std::to_string(s.clock), std::to_string(s.units_injected)});
    w.line({"rng", std::to_string(s.rng.seed()), std::to_string(s.rng.draws())});
    w.line({"entry", format_double(s.entry.accumulated()), std::to_string(s.entry.emitted()),
            std::to_string(s.entry.step())});
    w.line({"tree", "asset", std::to_string(s.asset_tree.updates_since_rebuild())});
    w.line({"tree", "hazard", std::to_string(s.hazard_tree.updates_since_rebuild())});
    w.line({"tree", "alive", std::to_string(s.alive_tree.updates_since_rebuild())});
    const auto hazard_leaves = s.hazard_tree.leaves();
    const auto hazard_nodes = s.hazard_tree.nodes();
    for (std::size_t j = 0; j < s.firms.size(); ++j) {
        const auto& f = s.firms[j];
        w.line({"firm", std::to_string(f.birth_time), std::to_string(f.assets), std::to_string(f.debt_m_units),
                std::to_string(f.debt_units), f.alive ? "1" : "0", std::to_string(f.bankruptcies),
                format_double(hazard_leaves[j]), format_double(hazard_nodes[j])});
    }
    for (const auto& e : s.bankruptcy_log) {
        w.line({"bankruptcy", std::to_string(e.step), std::to_string(e.firm), format_double(e.ratio)});
    }
    for (const auto& e : s.merger_log) {
        w.line({"merger", std::to_string(e.step), std::to_string(e.acquirer), std::to_string(e.target),
                format_double(e.debt_transferred)});
    }
    return w.finish();
}

EconomyState economy_from_text(std::string_view text) {
    EconomyState s;
    std::vector<double> hazard_leaves, hazard_nodes, asset_leaves, alive_leaves;
    std::uint64_t updates_asset = 0, updates_hazard = 0, updates_alive = 0;
    std::uint64_t rng_seed = 0, rng_draws = 0;
    double entry_acc = 0.0;
    std::uint64_t entry_emitted = 0, entry_step = 0;
    auto& c = s.config;

    for (const auto& f : snapshot::parse(text, "economy")) {
        const auto& tag = f[0];
        if (tag == "config") {
            expect_fields(f, 3);
            const auto& key = f[1];
            const auto& v = f[2];
            if (key == "p") c.p = parse_double(v);
            else if (key == "m") c.m = parse_double(v);
            else if (key == "q") c.q = parse_double(v);
            else if (key == "hazard_exponent") c.hazard_exponent = parse_double(v);
            else if (key == "p_merge") c.p_merge = parse_double(v);
            else if (key == "theta") c.theta = parse_double(v);
            else if (key == "steps") c.steps = parse_u64(v);
            else if (key == "seed") c.seed = parse_u64(v);
            else if (key == "hazard_mode") {
                auto mode = parse_hazard_mode(v);
                if (!mode) bad("unknown hazard_mode '" + v + "'");
                c.hazard_mode = *mode;
            } else if (key == "merger_drops_debt") c.merger_drops_debt = parse_bool(v);
            else bad("unknown config key '" + key + "'");
        } else if (tag == "clock") {
            expect_fields(f, 3);
            s.clock = parse_u64(f[1]);
            s.units_injected = parse_u64(f[2]);
        } else if (tag == "rng") {
            expect_fields(f, 3);
            rng_seed = parse_u64(f[1]);
            rng_draws = parse_u64(f[2]);
        } else if (tag == "entry") {
            expect_fields(f, 4);
            entry_acc = parse_double(f[1]);
            entry_emitted = parse_u64(f[2]);
            entry_step = parse_u64(f[3]);
        } else if (tag == "tree") {
            expect_fields(f, 3);
            const auto updates = parse_u64(f[2]);
            if (f[1] == "asset") updates_asset = updates;
            else if (f[1] == "hazard") updates_hazard = updates;
            else if (f[1] == "alive") updates_alive = updates;
            else bad("unknown tree '" + f[1] + "'");
        } else if (tag == "firm") {
            expect_fields(f, 9);
            FirmState firm;
            firm.birth_time = parse_u64(f[1]);
            firm.assets = parse_u64(f[2]);
            firm.debt_m_units = parse_u64(f[3]);
            firm.debt_units = parse_u64(f[4]);
            firm.alive = parse_bool(f[5]);
            firm.bankruptcies = static_cast<std::uint32_t>(parse_u64(f[6]));
            firm.debt = c.m * static_cast<double>(firm.debt_m_units) + static_cast<double>(firm.debt_units);
            hazard_leaves.push_back(parse_double(f[7]));
            hazard_nodes.push_back(parse_double(f[8]));
            asset_leaves.push_back(static_cast<double>(firm.assets));
            alive_leaves.push_back(firm.alive ? 1.0 : 0.0);
            s.firms.push_back(firm);
        } else if (tag == "bankruptcy") {
            expect_fields(f, 4);
            s.bankruptcy_log.push_back({parse_u64(f[1]), parse_u64(f[2]), parse_double(f[3])});
        } else if (tag == "merger") {
            expect_fields(f, 5);
            s.merger_log.push_back({parse_u64(f[1]), parse_u64(f[2]), parse_u64(f[3]), parse_double(f[4])});
        } else {
            bad("unexpected line tag '" + tag + "'");
        }
    }
    try {
        c.validate();
    } catch (const Error& e) {
        bad(e.what());
    }
    if (s.firms.empty()) bad("no firms");

    // Integer-weighted trees rebuild to the exact same nodes.
    s.asset_tree = WeightTree(asset_leaves);
    s.asset_tree = WeightTree::restore(asset_leaves, {s.asset_tree.nodes().begin(), s.asset_tree.nodes().end()},
                                       updates_asset);
    s.alive_tree = WeightTree(alive_leaves);
    s.alive_tree = WeightTree::restore(alive_leaves, {s.alive_tree.nodes().begin(), s.alive_tree.nodes().end()},
                                       updates_alive);
    s.hazard_tree = WeightTree::restore(std::move(hazard_leaves), std::move(hazard_nodes), updates_hazard);
    s.rng = CounterRng(rng_seed, rng_draws);
    s.entry = EntrySchedule::restore(c.theta, entry_acc, entry_emitted, entry_step);
    try {
        s.check_invariants();
    } catch (const Error& e) {
        bad(e.what());
    }
    return s;
}

void write_snapshot(const EconomyState& state, const std::filesystem::path& path) {
    snapshot::write_file(path, to_text(state));
}

EconomyState read_economy_snapshot(const std::filesystem::path& path) {
    return economy_from_text(snapshot::read_file(path));
}

}  // namespace zipfirm::sim
