#include <climits>
#include <ostream>

#include "common.hpp"
#include "zipfirm/format.hpp"
#include "zipfirm/riskstats.hpp"
#include "zipfirm/simonsim.hpp"
#include "zipfirm/snapshot.hpp"

namespace zipfirm::cli {
namespace {

enum class Source { dataset, economy, values };

Source detect(std::string_view text) {
    const auto header = text.substr(0, text.find('\n'));
    if (!header.starts_with(snapshot::kVersionTag)) return Source::dataset;
    if (header.ends_with("\teconomy")) return Source::economy;
    return Source::dataset;
}

class Analyze final : public Command {
public:
    void setup(CLI::App& sub) override {
        sub.add_option("--input", input_, "CSV dataset, dataset snapshot or economy snapshot");
        sub.add_option("--values", values_, "Plain value list, one per line (the last TSV column is used)");
        sub.add_option("--field", field_,
                       "Series: assets, pre_assets, debt, ratio (datasets); assets, debt, ratio, "
                       "ratio_bankrupt (economy snapshots)");
        method_opt_ = sub.add_option("--method", method_, "ols, gi, pdf, ccdf or stretched (default gi)");
        sub.add_option("--top", top_, "Fit ranks 1..N")->check(CLI::PositiveNumber);
        sub.add_option("--rank-lo", rank_lo_, "Lowest rank fitted")->check(CLI::PositiveNumber);
        sub.add_option("--rank-hi", rank_hi_, "Highest rank fitted")->check(CLI::PositiveNumber);
        sub.add_option("--value-lo", value_lo_, "Lowest value fitted (pdf, ccdf)");
        sub.add_option("--value-hi", value_hi_, "Highest value fitted (pdf, ccdf)");
        sub.add_option("--bins-per-decade", binning_.bins_per_decade, "pdf binning (default 10)")
            ->check(CLI::PositiveNumber);
        sub.add_option("--min-count", binning_.min_count, "pdf: smallest bin count used (default 3)");
        sub.add_flag("--crossover", crossover_, "Two-regime Zipf fit with a scanned break rank");
        sub.add_option("--min-segment", min_segment_, "Crossover: fewest points per regime (default 20)")
            ->check(CLI::PositiveNumber);
        sub.add_option("--break-lo", break_lo_, "Crossover: smallest candidate break rank");
        sub.add_option("--break-hi", break_hi_, "Crossover: largest candidate break rank");
        sub.add_option("--beta-lo", grid_.beta_lo, "Stretched: grid start (default 0.10)");
        sub.add_option("--beta-hi", grid_.beta_hi, "Stretched: grid end (default 1.50)");
        sub.add_option("--beta-step", grid_.beta_step, "Stretched: grid step (default 0.01)");
        sub.add_option("--truncate", truncate_, "Dataset ratio: drop R >= this (default 4)");
        sub.add_option("--venue", venue_, "Dataset: keep one venue (bankrupt, nasdaq, nyse, other)");
        sub.add_option("--year-lo", year_lo_, "Dataset: first year kept");
        sub.add_option("--year-hi", year_hi_, "Dataset: last year kept");
        sub.add_option("--deflator", deflator_, "Dataset: year,factor CSV applied before fitting");
        sub.add_option("--base-year", base_year_, "Base year of --deflator");
        add_column_option(sub, columns_);
        sub.add_option("--out", out_, "Output directory (default .)");
        sub.add_option("--name", name_, "Output file stem (default <field>_<method>)");
    }

    void execute(std::ostream& out, std::ostream& err) override {
        check_flags();
        auto values = load(err);
        const auto built = fit::build_rank_series(values);
        if (built.rejected) err << "analyze: " << built.rejected << " non-positive values dropped\n";
        const auto& series = built.series;

        const std::string stem = name_ ? *name_ : field_name() + "_" + method_name();
        Json result;
        std::string tsv;
        std::string line;
        if (crossover_) {
            fit::CrossoverOptions opt;
            opt.min_segment = min_segment_;
            opt.rank_lo = rank_range().first;
            opt.rank_hi = rank_range().second;
            opt.break_lo = break_lo_;
            opt.break_hi = break_hi_;
            const auto f = fit::detect_crossover(series, opt);
            result = json_io::to_json(f);
            tsv = fit::plot_tsv(series, f);
            line = "break rank " + std::to_string(f.break_rank) + ", zeta_I = " + format_real(f.fit_I.zeta) +
                   ", zeta_II = " + format_real(f.fit_II.zeta);
        } else if (method_ == "stretched") {
            const auto f = fit::fit_stretched_exponential(series, grid_, rank_range().second);
            result = json_io::to_json(f);
            tsv = fit::plot_tsv(series, f);
            line = "beta = " + format_real(f.beta) + ", tau = " + format_real(f.tau);
        } else {
            const auto method = *fit::parse_method(method_);
            fit::FitRange range;
            if (method == fit::Method::ols_zipf || method == fit::Method::gi_rank_half) {
                const auto [lo, hi] = rank_range();
                if (lo) range.lo = static_cast<double>(*lo);
                if (hi) range.hi = static_cast<double>(*hi);
            } else {
                range.lo = value_lo_;
                range.hi = value_hi_;
            }
            const auto f = fit::fit_power_law(series, method, range, binning_);
            result = json_io::to_json(f);
            tsv = method == fit::Method::pdf_tail ? fit::pdf_plot_tsv(series, f) : fit::plot_tsv(series, f);
            line = "zeta = " + format_real(f.zeta) + ", zeta' = " + format_real(f.zeta_prime) +
                   ", stderr = " + format_real(f.std_error) + ", n = " + std::to_string(f.n_used);
        }
        result["field"] = field_name();
        result["n_series"] = series.size();

        write_text(out_ / (stem + ".json"), result.dump(2) + "\n");
        write_text(out_ / (stem + ".tsv"), tsv);
        Manifest m;
        m.command = "analyze";
        m.config = config_json();
        m.inputs.push_back(input_ ? *input_ : *values_);
        if (deflator_) m.inputs.push_back(*deflator_);
        m.outputs = {stem + ".json", stem + ".tsv"};
        write_manifest(out_, stem, m);
        out << "analyze: " << (crossover_ ? "crossover" : method_) << " on " << field_name() << ": " << line
            << " -> " << (out_ / (stem + ".json")).string() << '\n';
    }

private:
    void check_flags() {
        if (input_.has_value() == values_.has_value()) throw UsageError("give exactly one of --input or --values");
        if (method_ != "stretched" && !fit::parse_method(method_)) {
            throw UsageError("unknown method '" + method_ + "' (ols, gi, pdf, ccdf, stretched)");
        }
        if (method_opt_->count() > 0 && crossover_ && method_ != "ols" && method_ != "ols_zipf") {
            throw UsageError("--crossover always fits two ols regimes; drop --method " + method_);
        }
        const bool value_method = !crossover_ && (method_ == "pdf" || method_ == "pdf_tail" || method_ == "ccdf");
        const bool has_rank = top_ || rank_lo_ || rank_hi_;
        const bool has_value = value_lo_ || value_hi_;
        if (value_method && has_rank) throw UsageError("--method " + method_ + " takes --value-lo/--value-hi, not ranks");
        if (!value_method && has_value) throw UsageError("--value-lo/--value-hi apply to --method pdf or ccdf only");
        if (top_ && (rank_lo_ || rank_hi_)) throw UsageError("--top excludes --rank-lo/--rank-hi");
        if (method_ == "stretched" && rank_lo_) throw UsageError("--method stretched fits from rank 1; use --rank-hi");
        if (!crossover_ && (break_lo_ || break_hi_)) throw UsageError("--break-lo/--break-hi need --crossover");
        if (deflator_.has_value() != base_year_.has_value()) throw UsageError("--deflator and --base-year go together");
        if (values_ && (field_ || venue_ || year_lo_ || year_hi_ || deflator_ || !columns_.empty())) {
            throw UsageError("--values input takes no --field or dataset filters");
        }
    }

    std::pair<std::optional<std::size_t>, std::optional<std::size_t>> rank_range() const {
        if (top_) return {std::size_t{1}, *top_};
        return {rank_lo_, rank_hi_};
    }

    std::string field_name() const { return values_ ? "values" : field_.value_or("assets"); }

    std::string method_name() const {
        if (crossover_) return "crossover";
        if (method_ == "stretched") return method_;
        return std::string(fit::to_string(*fit::parse_method(method_)));
    }

    std::vector<double> load(std::ostream& err) {
        if (values_) return parse_values_text(read_text(*values_), values_->string());
        const auto text = read_text(*input_);
        const auto field = field_name();
        if (detect(text) == Source::economy) {
            if (venue_ || year_lo_ || year_hi_ || deflator_ || !columns_.empty()) {
                throw UsageError("dataset filters do not apply to an economy snapshot");
            }
            const auto f = sim::parse_series_field(field);
            if (!f) throw UsageError("unknown field '" + field + "' for an economy snapshot (assets, debt, ratio, ratio_bankrupt)");
            return sim::series_values(sim::economy_from_text(text), *f);
        }
        std::vector<std::string> required = {"firm_id"};
        if (field == "assets") required.push_back("petition_assets");
        else if (field == "pre_assets") required.push_back("pre_petition_assets");
        else if (field == "debt") required.push_back("petition_debt");
        else if (field == "ratio") required.insert(required.end(), {"petition_assets", "petition_debt"});
        else throw UsageError("unknown field '" + field + "' for a dataset (assets, pre_assets, debt, ratio)");

        auto ds = load_dataset(*input_, columns_, required, err);
        if (deflator_) {
            const auto table = firmdata::parse_deflator_csv(read_text(*deflator_), *base_year_);
            ds = firmdata::deflate(ds, table);
        }
        if (venue_) {
            const auto v = firmdata::parse_venue(*venue_);
            if (!v) throw UsageError("unknown venue '" + *venue_ + "'");
            std::erase_if(ds.records, [&](const auto& r) { return r.venue != *v; });
        }
        if (year_lo_ || year_hi_) ds = risk::period_slice(ds, year_lo_.value_or(INT_MIN), year_hi_.value_or(INT_MAX));

        if (field == "ratio") {
            const auto ex = risk::compute_ratios(ds, truncate_);
            if (ex.truncated) err << "analyze: " << ex.truncated << " ratios >= " << format_real(truncate_) << " dropped\n";
            return ex.sample.ratios;
        }
        std::vector<double> values;
        for (const auto& r : ds.records) {
            const auto& v = field == "assets" ? r.petition_assets
                            : field == "pre_assets" ? r.pre_petition_assets
                                                    : r.petition_debt;
            if (v) values.push_back(*v);
        }
        if (values.empty()) throw Error(ErrorKind::empty_series, "analyze: no record carries field '" + field + "'");
        return values;
    }

    Json config_json() const {
        Json j;
        j["input"] = input_ ? input_->string() : values_->string();
        j["field"] = field_name();
        j["method"] = method_name();
        auto opt = [&](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        opt("top", top_);
        opt("rank_lo", rank_lo_);
        opt("rank_hi", rank_hi_);
        opt("value_lo", value_lo_);
        opt("value_hi", value_hi_);
        if (method_name() == "pdf_tail") {
            j["bins_per_decade"] = binning_.bins_per_decade;
            j["min_count"] = binning_.min_count;
        }
        if (crossover_) {
            j["min_segment"] = min_segment_;
            opt("break_lo", break_lo_);
            opt("break_hi", break_hi_);
        }
        if (method_ == "stretched") {
            j["beta_lo"] = grid_.beta_lo;
            j["beta_hi"] = grid_.beta_hi;
            j["beta_step"] = grid_.beta_step;
        }
        if (field_name() == "ratio") j["truncate"] = truncate_;
        opt("venue", venue_);
        opt("year_lo", year_lo_);
        opt("year_hi", year_hi_);
        if (deflator_) j["deflator"] = deflator_->string();
        opt("base_year", base_year_);
        if (!columns_.empty()) j["columns"] = columns_;
        return j;
    }

    std::optional<fs::path> input_, values_;
    std::optional<std::string> field_;
    std::string method_ = "gi";
    CLI::Option* method_opt_ = nullptr;
    std::optional<std::size_t> top_, rank_lo_, rank_hi_;
    std::optional<double> value_lo_, value_hi_;
    fit::LogBinning binning_;
    bool crossover_ = false;
    std::size_t min_segment_ = 20;
    std::optional<std::size_t> break_lo_, break_hi_;
    fit::StretchedExpGrid grid_;
    double truncate_ = risk::kDefaultTruncation;
    std::optional<std::string> venue_;
    std::optional<int> year_lo_, year_hi_;
    std::optional<fs::path> deflator_;
    std::optional<int> base_year_;
    std::vector<std::string> columns_;
    fs::path out_ = ".";
    std::optional<std::string> name_;
};

}  // namespace

std::unique_ptr<Command> make_analyze() { return std::make_unique<Analyze>(); }

}  // namespace zipfirm::cli
