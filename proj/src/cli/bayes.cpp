#include <ostream>

#include "common.hpp"
#include "zipfirm/format.hpp"
#include "zipfirm/riskstats.hpp"

namespace zipfirm::cli {
namespace {

class Bayes final : public Command {
public:
    void setup(CLI::App& sub) override {
        sub.add_option("--bankrupt", bankrupt_, "Fit JSON for R of bankrupt firms")->required();
        sub.add_option("--existing", existing_, "Fit JSON for R of existing firms")->required();
        sub.add_option("--prefactor-bankrupt", prefactor_bankrupt_,
                       "pdf prefactor of the bankrupt fit (default: read off a pdf fit)");
        sub.add_option("--prefactor-existing", prefactor_existing_,
                       "pdf prefactor of the existing fit (default: read off a pdf fit)");
        sub.add_option("--p-b", p_b_, "Unconditional bankruptcy probability P(B)")->required();
        sub.add_option("--r", grid_, "R values to tabulate P(B|R) at (comma separated or repeated)")
            ->delimiter(',');
        sub.add_option("--out", out_, "Output directory (default .)");
        sub.add_option("--name", name_, "Output file stem (default bayes)");
    }

    void execute(std::ostream& out, std::ostream&) override {
        if (prefactor_bankrupt_.has_value() != prefactor_existing_.has_value()) {
            throw UsageError("--prefactor-bankrupt and --prefactor-existing go together");
        }
        const auto fb = load_fit(bankrupt_);
        const auto fe = load_fit(existing_);
        const auto est = prefactor_bankrupt_
                             ? risk::bayes_compose(fb, fe, *prefactor_bankrupt_, *prefactor_existing_, p_b_)
                             : risk::bayes_compose(fb, fe, p_b_);

        auto j = json_io::to_json(est);
        Manifest m;
        m.command = "bayes";
        m.inputs = {bankrupt_, existing_};
        m.config["bankrupt"] = bankrupt_.string();
        m.config["existing"] = existing_.string();
        if (prefactor_bankrupt_) {
            m.config["prefactor_bankrupt"] = *prefactor_bankrupt_;
            m.config["prefactor_existing"] = *prefactor_existing_;
        }
        m.config["p_b"] = p_b_;
        m.config["r"] = grid_;

        if (!grid_.empty()) {
            Json table = Json::array();
            std::string tsv = "# R\tp_bankrupt_given_R\tclamped\tout_of_range\n";
            for (double r : grid_) {
                if (!(r > 0.0)) throw UsageError("--r values must be positive, got " + format_real(r));
                const auto v = est.evaluate(r);
                table.push_back(Json{{"R", r}, {"probability", v.probability}, {"clamped", v.clamped},
                                 {"out_of_range", v.out_of_range}});
                tsv += format_real(r) + '\t' + format_real(v.probability) + '\t' + (v.clamped ? "1" : "0") + '\t' +
                       (v.out_of_range ? "1" : "0") + '\n';
            }
            j["table"] = table;
            write_text(out_ / (name_ + ".tsv"), tsv);
            m.outputs.push_back(name_ + ".tsv");
        }
        write_text(out_ / (name_ + ".json"), j.dump(2) + "\n");
        m.outputs.insert(m.outputs.begin(), name_ + ".json");
        write_manifest(out_, name_, m);
        out << "bayes: P(B|R) = " << format_real(est.prefactor) << " * " << format_real(p_b_) << " * R^"
            << format_real(est.exponent) << " on [" << format_real(est.r_lo) << ", " << format_real(est.r_hi)
            << "] -> " << (out_ / (name_ + ".json")).string() << '\n';
    }

private:
    static fit::PowerLawFit load_fit(const fs::path& path) {
        try {
            return json_io::power_law_fit_from_json(read_json(path));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::io) throw;
            throw Error(e.kind(), path.string() + ": " + e.what());
        }
    }

    fs::path bankrupt_, existing_;
    std::optional<double> prefactor_bankrupt_, prefactor_existing_;
    double p_b_ = 0.0;
    std::vector<double> grid_;
    fs::path out_ = ".";
    std::string name_ = "bayes";
};

}  // namespace

std::unique_ptr<Command> make_bayes() { return std::make_unique<Bayes>(); }

}  // namespace zipfirm::cli
