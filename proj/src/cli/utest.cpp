#include <ostream>

#include "common.hpp"
#include "zipfirm/format.hpp"
#include "zipfirm/riskstats.hpp"

namespace zipfirm::cli {
namespace {

risk::SizeRule parse_rule(const std::string& text) {
    if (text == "median") return risk::SizeRule::median();
    if (text.starts_with("threshold:")) {
        const auto v = firmdata::parse_number(std::string_view(text).substr(10));
        if (v && *v > 0.0) return risk::SizeRule::at(*v);
    }
    throw UsageError("--split expects median or threshold:<positive value>, got '" + text + "'");
}

std::string tsv_line(const std::string& key, const std::string& value) { return key + '\t' + value + '\n'; }

class UTest final : public Command {
public:
    void setup(CLI::App& sub) override {
        sub.add_option("--input", input_, "CSV dataset or dataset snapshot")->required();
        sub.add_option("--split", split_, "median or threshold:<A_b> (default median)");
        sub.add_option("--truncate", truncate_, "Drop R >= this (default 4)");
        add_column_option(sub, columns_);
        sub.add_option("--out", out_, "Output directory (default .)");
        sub.add_option("--name", name_, "Output file stem (default utest)");
    }

    // U and z refer to the large part against the small part, so z < 0 means
    // larger firms carry lower leverage.
    void execute(std::ostream& out, std::ostream& err) override {
        const auto rule = parse_rule(split_);
        const auto ds = load_dataset(input_, columns_, {"firm_id", "petition_assets", "petition_debt"}, err);
        const auto ex = risk::compute_ratios(ds, truncate_);
        const auto split = risk::split_by_size(ex.sample, rule);
        if (split.small.ratios.empty() || split.large.ratios.empty()) {
            throw Error(ErrorKind::insufficient_data, "utest: split " + rule.describe() + " leaves the " +
                                                          (split.small.ratios.empty() ? "small" : "large") +
                                                          " part empty (n = " + std::to_string(ex.sample.size()) + ")");
        }
        const auto res = risk::mann_whitney_u(split.large.ratios, split.small.ratios);

        auto j = json_io::to_json(res);
        j["sample_a"] = "large";
        j["sample_b"] = "small";
        j["split"] = rule.describe();
        j["cut"] = split.cut;
        j["truncated"] = ex.truncated;
        j["incomplete"] = ex.incomplete;

        std::string tsv = "# statistic\tvalue\n";
        tsv += tsv_line("split", rule.describe());
        tsv += tsv_line("cut", format_real(split.cut));
        tsv += tsv_line("n_large", std::to_string(res.n1));
        tsv += tsv_line("n_small", std::to_string(res.n2));
        tsv += tsv_line("u_statistic", format_real(res.u_statistic));
        tsv += tsv_line("z_value", format_real(res.z_value));
        tsv += tsv_line("p_value_two_sided", format_real(res.p_value_two_sided));

        write_text(out_ / (name_ + ".json"), j.dump(2) + "\n");
        write_text(out_ / (name_ + ".tsv"), tsv);
        Manifest m;
        m.command = "utest";
        m.inputs = {input_};
        m.config["input"] = input_.string();
        m.config["split"] = rule.describe();
        m.config["truncate"] = truncate_;
        if (!columns_.empty()) m.config["columns"] = columns_;
        m.outputs = {name_ + ".json", name_ + ".tsv"};
        write_manifest(out_, name_, m);
        out << "utest: split " << rule.describe() << ", n_large = " << res.n1 << ", n_small = " << res.n2
            << ", z = " << format_real(res.z_value) << ", p = " << format_real(res.p_value_two_sided) << " -> "
            << (out_ / (name_ + ".json")).string() << '\n';
    }

private:
    fs::path input_;
    std::string split_ = "median";
    double truncate_ = risk::kDefaultTruncation;
    std::vector<std::string> columns_;
    fs::path out_ = ".";
    std::string name_ = "utest";
};

}  // namespace

std::unique_ptr<Command> make_utest() { return std::make_unique<UTest>(); }

}  // namespace zipfirm::cli
