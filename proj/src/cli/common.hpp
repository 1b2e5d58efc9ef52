#pragma once

#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "zipfirm/error.hpp"
#include "zipfirm/firmdata.hpp"
#include "zipfirm/json_io.hpp"

namespace zipfirm::cli {

namespace fs = std::filesystem;
using json_io::Json;

/// Bad flag values or combinations; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string sha256_hex(std::string_view data);

/// ISO-8601 UTC; SOURCE_DATE_EPOCH (seconds) pins it for reproducible manifests.
std::string utc_timestamp();

/// Read a whole file; Error(io) on failure.
std::string read_text(const fs::path& path);
/// Write a whole file, creating parent directories; Error(io) on failure.
void write_text(const fs::path& path, std::string_view contents);

/// Parse a JSON file. Error(io) when unreadable, Error(dataset) when malformed.
Json read_json(const fs::path& path);

/// Flat `key = value` lines; `#` starts a comment. Repeated keys are a usage error.
std::map<std::string, std::string> parse_config_text(std::string_view text, const std::string& origin);

/// One value per line (blank lines and `#` comments skipped).
std::vector<double> parse_values_text(std::string_view text, const std::string& origin);

/// `field=header` overrides on top of the header-derived defaults.
firmdata::ColumnMapping column_mapping(const std::vector<std::string>& header,
                                       const std::vector<std::string>& overrides);

/// Header row of a CSV file (first non-blank record).
std::vector<std::string> csv_header(std::string_view text);

/// Load a CSV file or a dataset snapshot, reporting rejected rows to `log`.
firmdata::Dataset load_dataset(const fs::path& path, const std::vector<std::string>& column_overrides,
                               const std::vector<std::string>& required_fields, std::ostream& log);

/// Rank-series TSV: `# rank<TAB>value` then one line per rank.
std::string rank_tsv(std::span<const double> descending);

struct Manifest {
    std::string command;
    Json config = Json::object();
    std::optional<std::uint64_t> seed;
    std::vector<fs::path> inputs;
    std::vector<std::string> outputs;  // file names relative to the manifest directory
};

/// Writes `<dir>/<name>.manifest.json` with SHA-256 digests of the inputs and
/// outputs and returns its path.
fs::path write_manifest(const fs::path& dir, const std::string& name, const Manifest& manifest);

void add_column_option(CLI::App& app, std::vector<std::string>& overrides);

}  // namespace zipfirm::cli

namespace zipfirm::cli {

/// A subcommand: registers its flags, then runs once parsing succeeded.
class Command {
public:
    virtual ~Command() = default;
    virtual void setup(CLI::App& sub) = 0;
    virtual void execute(std::ostream& out, std::ostream& err) = 0;
};

std::unique_ptr<Command> make_simulate();
std::unique_ptr<Command> make_analyze();
std::unique_ptr<Command> make_bayes();
std::unique_ptr<Command> make_utest();
std::unique_ptr<Command> make_report();

}  // namespace zipfirm::cli
