#include <cstdlib>
#include <mutex>
#include <ostream>
#include <thread>

#include "common.hpp"
#include "zipfirm/format.hpp"
#include "zipfirm/simonsim.hpp"

namespace zipfirm::cli {
namespace {

template <class T>
T parse_key(const std::string& key, const std::string& text) {
    T value{};
    try {
        if constexpr (std::is_same_v<T, double>) {
            const auto v = firmdata::parse_number(text);
            if (!v) throw std::invalid_argument(text);
            value = *v;
        } else {
            std::size_t used = 0;
            if (!text.empty() && text.front() == '-') throw std::invalid_argument(text);
            value = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        }
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': invalid value '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw UsageError("config key '" + key + "': expected true or false, got '" + text + "'");
}

sim::HazardMode hazard_mode(const std::string& text) {
    const auto mode = sim::parse_hazard_mode(text);
    if (!mode) throw UsageError("unknown hazard mode '" + text + "' (aggregated, per_firm_sweep)");
    return *mode;
}

void apply_config_file(sim::SimConfig& c, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "p") c.p = parse_key<double>(key, value);
        else if (key == "m") c.m = parse_key<double>(key, value);
        else if (key == "q") c.q = parse_key<double>(key, value);
        else if (key == "hazard_exponent") c.hazard_exponent = parse_key<double>(key, value);
        else if (key == "p_merge") c.p_merge = parse_key<double>(key, value);
        else if (key == "theta") c.theta = parse_key<double>(key, value);
        else if (key == "steps") c.steps = parse_key<std::uint64_t>(key, value);
        else if (key == "seed") c.seed = parse_key<std::uint64_t>(key, value);
        else if (key == "hazard_mode") c.hazard_mode = hazard_mode(value);
        else if (key == "merger_drops_debt") c.merger_drops_debt = parse_bool(key, value);
        else throw UsageError("config file: unknown key '" + key + "'");
    }
}

Json config_json(const sim::SimConfig& c) {
    Json j;
    j["p"] = c.p;
    j["m"] = c.m;
    j["q"] = c.q;
    j["hazard_exponent"] = c.hazard_exponent;
    j["p_merge"] = c.p_merge;
    j["theta"] = c.theta;
    j["steps"] = c.steps;
    j["seed"] = c.seed;
    j["hazard_mode"] = std::string(sim::to_string(c.hazard_mode));
    j["merger_drops_debt"] = c.merger_drops_debt;
    return j;
}

std::string series_tsv(const sim::EconomyState& s, sim::SeriesField field) {
    auto values = sim::series_values(s, field);
    const auto built = fit::build_rank_series(values);
    return rank_tsv(built.series.values());
}

void write_outputs(const sim::EconomyState& s, const fs::path& dir, const std::optional<fs::path>& resumed_from) {
    Manifest m;
    m.command = "simulate";
    m.config = config_json(s.config);
    if (resumed_from) m.config["resume"] = resumed_from->string();
    m.seed = s.config.seed;
    if (resumed_from) m.inputs.push_back(*resumed_from);

    write_text(dir / "economy.snap", sim::to_text(s));
    write_text(dir / "assets.tsv", series_tsv(s, sim::SeriesField::assets));
    write_text(dir / "debt.tsv", series_tsv(s, sim::SeriesField::debt));
    write_text(dir / "ratio.tsv", series_tsv(s, sim::SeriesField::ratio_alive));
    write_text(dir / "events.tsv", sim::events_tsv(s));
    m.outputs = {"economy.snap", "assets.tsv", "debt.tsv", "ratio.tsv", "events.tsv"};
    write_manifest(dir, "simulate", m);
}

std::string summary(const sim::EconomyState& s, const fs::path& dir) {
    return "simulate: seed " + std::to_string(s.config.seed) + ", " + std::to_string(s.clock - 1) + " steps, " +
           std::to_string(s.firms.size()) + " firms (" + std::to_string(s.alive_count()) + " alive), " +
           std::to_string(s.bankruptcy_log.size()) + " bankruptcies, " + std::to_string(s.merger_log.size()) +
           " mergers -> " + dir.string();
}

class Simulate final : public Command {
public:
    void setup(CLI::App& sub) override {
        sub.add_option("--config", config_file_, "Flat key = value file with SimConfig keys");
        sub.add_option("--p", p_, "Probability an entering unit founds a new firm (default 0.01)");
        sub.add_option("--m", m_, "Debt per entering asset unit (default 0.5)");
        sub.add_option("--q", q_, "Bankruptcy rate parameter (default 0)");
        sub.add_option("--hazard-exponent", hazard_exponent_, "Hazard q R^h exponent h (default 0.95)");
        sub.add_option("--p-merge", p_merge_, "Per-step merger probability (default 0)");
        sub.add_option("--theta", theta_, "Entry growth exponent (default 0)");
        sub.add_option("--steps", steps_, "Steps to run; with --resume, the total to reach (default 500000)");
        sub.add_option("--seed", seed_, "RNG seed (default $ZIPFIRM_SEED, else 0)");
        sub.add_option("--hazard-mode", hazard_mode_, "aggregated or per_firm_sweep (default aggregated)");
        sub.add_flag("--merger-drops-debt", drops_debt_, "Discard the merged firm's debt instead of transferring it");
        sub.add_option("--resume", resume_, "Continue from an economy snapshot");
        sub.add_option("--batch", batch_, "Run this many consecutive seeds, one subdirectory seed-<n> each")
            ->check(CLI::PositiveNumber);
        sub.add_option("--jobs", jobs_, "Worker threads for --batch (default: hardware threads)")
            ->check(CLI::PositiveNumber);
        sub.add_option("--out", out_, "Output directory (default .)");
    }

    void execute(std::ostream& out, std::ostream& err) override {
        if (resume_) {
            resume(out);
            return;
        }
        auto config = resolve();
        if (batch_ <= 1) {
            const auto state = sim::run(config);
            write_outputs(state, out_, std::nullopt);
            out << summary(state, out_) << '\n';
            return;
        }
        run_batch(config, out, err);
    }

private:
    sim::SimConfig resolve() const {
        sim::SimConfig c;
        if (const char* env = std::getenv("ZIPFIRM_SEED"); env && *env) c.seed = parse_key<std::uint64_t>("ZIPFIRM_SEED", env);
        if (config_file_) apply_config_file(c, parse_config_text(read_text(*config_file_), config_file_->string()));
        if (p_) c.p = *p_;
        if (m_) c.m = *m_;
        if (q_) c.q = *q_;
        if (hazard_exponent_) c.hazard_exponent = *hazard_exponent_;
        if (p_merge_) c.p_merge = *p_merge_;
        if (theta_) c.theta = *theta_;
        if (steps_) c.steps = *steps_;
        if (seed_) c.seed = *seed_;
        if (hazard_mode_) c.hazard_mode = hazard_mode(*hazard_mode_);
        if (drops_debt_) c.merger_drops_debt = true;
        c.validate();
        return c;
    }

    void resume(std::ostream& out) {
        if (config_file_ || p_ || m_ || q_ || hazard_exponent_ || p_merge_ || theta_ || seed_ || hazard_mode_ ||
            drops_debt_ || batch_ > 1) {
            throw UsageError("--resume takes the configuration from the snapshot; only --steps and --out apply");
        }
        auto state = sim::read_economy_snapshot(*resume_);
        const std::uint64_t done = state.clock - 1;
        const std::uint64_t target = steps_ ? *steps_ : state.config.steps;
        if (target < done) {
            throw UsageError("--steps " + std::to_string(target) + " is behind the snapshot, which has run " +
                             std::to_string(done) + " steps");
        }
        state.config.steps = target;
        sim::advance(state, target - done);
        write_outputs(state, out_, *resume_);
        out << summary(state, out_) << '\n';
    }

    void run_batch(const sim::SimConfig& base, std::ostream& out, std::ostream& err) {
        const std::size_t n = batch_;
        std::vector<std::string> lines(n);
        std::vector<std::exception_ptr> failures(n);
        std::size_t next = 0;
        std::mutex mu;
        auto worker = [&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard lock(mu);
                    if (next == n) return;
                    i = next++;
                }
                try {
                    auto c = base;
                    c.seed = base.seed + i;
                    const auto dir = out_ / ("seed-" + std::to_string(c.seed));
                    const auto state = sim::run(c);
                    write_outputs(state, dir, std::nullopt);
                    lines[i] = summary(state, dir);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        const std::size_t threads =
            std::min<std::size_t>(n, jobs_ ? jobs_ : std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        pool.clear();
        // Report in seed order; the first failure decides the exit code.
        std::exception_ptr first;
        for (std::size_t i = 0; i < n; ++i) {
            if (failures[i]) {
                if (!first) first = failures[i];
                try {
                    std::rethrow_exception(failures[i]);
                } catch (const std::exception& e) {
                    err << "simulate: seed " << base.seed + i << ": " << e.what() << '\n';
                }
            } else {
                out << lines[i] << '\n';
            }
        }
        if (first) std::rethrow_exception(first);
    }

    std::optional<fs::path> config_file_;
    std::optional<double> p_, m_, q_, hazard_exponent_, p_merge_, theta_;
    std::optional<std::uint64_t> steps_, seed_;
    std::optional<std::string> hazard_mode_;
    bool drops_debt_ = false;
    std::optional<fs::path> resume_;
    std::size_t batch_ = 1;
    std::size_t jobs_ = 0;
    fs::path out_ = ".";
};

}  // namespace

std::unique_ptr<Command> make_simulate() { return std::make_unique<Simulate>(); }

}  // namespace zipfirm::cli
