#include <ostream>

#include "common.hpp"
#include "zipfirm/cli.hpp"

#ifndef ZIPFIRM_VERSION
#define ZIPFIRM_VERSION "0.0.0"
#endif

namespace zipfirm::cli {

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::io:
            return kIoError;
        case ErrorKind::config:
        case ErrorKind::schema:
            return kUsageError;
        default:
            return kDataError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simon-model firm simulator and Zipf/Pareto estimation toolkit", "zipfirm"};
    app.set_version_flag("--version", ZIPFIRM_VERSION);
    app.require_subcommand(1);

    struct Slot {
        const char* name;
        const char* help;
        std::unique_ptr<Command> command;
        CLI::App* sub = nullptr;
    };
    Slot slots[] = {
        {"simulate", "Run the coupled asset/debt Simon model", make_simulate()},
        {"analyze", "Fit a power law, crossover or stretched exponential to a series", make_analyze()},
        {"bayes", "Compose P(B|R) from two R fits", make_bayes()},
        {"utest", "Mann-Whitney test of R between small and large firms", make_utest()},
        {"report", "Aggregate manifests and fit results of a run directory", make_report()},
    };
    for (auto& s : slots) {
        s.sub = app.add_subcommand(s.name, s.help);
        s.command->setup(*s.sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    const char* name = "zipfirm";
    try {
        for (auto& s : slots) {
            if (s.sub->parsed()) {
                name = s.name;
                s.command->execute(out, err);
            }
        }
        return kOk;
    } catch (const UsageError& e) {
        err << name << ": usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << name << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << name << ": io error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << name << ": internal error: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace zipfirm::cli
