#include "common.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "zipfirm/csv.hpp"
#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"
#include "zipfirm/snapshot.hpp"

#ifndef ZIPFIRM_VERSION
#define ZIPFIRM_VERSION "0.0.0"
#endif

namespace zipfirm::cli {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(std::string_view line) {
    return trim(line.substr(0, line.find('#')));
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::invariant, "sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (*end != '\0' || v < 0) throw UsageError("SOURCE_DATE_EPOCH must be a non-negative integer");
        t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string read_text(const fs::path& path) { return snapshot::read_file(path); }

void write_text(const fs::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    snapshot::write_file(path, contents);
}

Json read_json(const fs::path& path) {
    const auto text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::dataset, path.string() + ": malformed JSON: " + e.what());
    }
}

std::map<std::string, std::string> parse_config_text(std::string_view text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto body = strip_comment(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
        }
        auto key = trim(std::string_view(body).substr(0, eq));
        auto value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw UsageError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw UsageError(origin + ":" + std::to_string(lineno) + ": key '" + key + "' repeated");
        }
    }
    return out;
}

std::vector<double> parse_values_text(std::string_view text, const std::string& origin) {
    std::vector<double> out;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto body = strip_comment(line);
        if (body.empty()) continue;
        // Accept TSV rank files too: the value is the last column.
        const auto tab = body.find_last_of('\t');
        const auto field = tab == std::string::npos ? body : body.substr(tab + 1);
        const auto v = firmdata::parse_number(field);
        if (!v) {
            throw Error(ErrorKind::dataset, origin + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
        }
        out.push_back(*v);
    }
    if (out.empty()) throw Error(ErrorKind::empty_series, origin + ": no values");
    return out;
}

std::vector<std::string> csv_header(std::string_view text) {
    const auto rows = csv::read(text);
    if (rows.empty()) throw Error(ErrorKind::dataset, "CSV input is empty");
    return rows.front().fields;
}

firmdata::ColumnMapping column_mapping(const std::vector<std::string>& header,
                                       const std::vector<std::string>& overrides) {
    auto mapping = firmdata::ColumnMapping::defaults_for(header);
    const std::map<std::string, std::string firmdata::ColumnMapping::*> fields = {
        {"firm_id", &firmdata::ColumnMapping::firm_id},
        {"name", &firmdata::ColumnMapping::name},
        {"event_date", &firmdata::ColumnMapping::event_date},
        {"pre_petition_assets", &firmdata::ColumnMapping::pre_petition_assets},
        {"petition_assets", &firmdata::ColumnMapping::petition_assets},
        {"petition_debt", &firmdata::ColumnMapping::petition_debt},
        {"venue", &firmdata::ColumnMapping::venue},
        {"year", &firmdata::ColumnMapping::year},
    };
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw UsageError("--column expects field=header, got '" + o + "'");
        const auto it = fields.find(o.substr(0, eq));
        if (it == fields.end()) throw UsageError("--column: unknown record field '" + o.substr(0, eq) + "'");
        mapping.*(it->second) = o.substr(eq + 1);
    }
    return mapping;
}

firmdata::Dataset load_dataset(const fs::path& path, const std::vector<std::string>& column_overrides,
                               const std::vector<std::string>& required_fields, std::ostream& log) {
    const auto text = read_text(path);
    if (text.starts_with(snapshot::kVersionTag)) {
        if (!column_overrides.empty()) throw UsageError("--column applies to CSV input only");
        return snapshot::dataset_from_text(text);
    }
    const auto header = csv_header(text);
    const auto mapping = column_mapping(header, column_overrides);
    const std::map<std::string, std::string> mapped = {
        {"firm_id", mapping.firm_id},
        {"petition_assets", mapping.petition_assets},
        {"petition_debt", mapping.petition_debt},
        {"pre_petition_assets", mapping.pre_petition_assets},
    };
    for (const auto& field : required_fields) {
        const auto& column = mapped.at(field);
        if (column.empty() || std::find(header.begin(), header.end(), column) == header.end()) {
            throw UsageError(path.string() + ": no column for required field '" + field + "'" +
                             (column.empty() ? std::string() : " (looked for '" + column + "')") +
                             "; map one with --column " + field + "=<header>");
        }
    }
    auto parsed = firmdata::parse_csv(text, mapping, path.string());
    for (const auto& r : parsed.rejects) log << path.string() << ": row " << r.row << " skipped: " << r.reason << '\n';
    return std::move(parsed.dataset);
}

std::string rank_tsv(std::span<const double> descending) {
    std::string out = "# rank\tvalue\n";
    for (std::size_t i = 0; i < descending.size(); ++i) {
        out += std::to_string(i + 1);
        out += '\t';
        out += format_real(descending[i]);
        out += '\n';
    }
    return out;
}

fs::path write_manifest(const fs::path& dir, const std::string& name, const Manifest& m) {
    Json j;
    j["schema"] = json_io::kSchema;
    j["kind"] = "run_manifest";
    j["command"] = m.command;
    j["config"] = m.config;
    j["config_hash"] = sha256_hex(m.config.dump());
    j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
    Json inputs = Json::array();
    Json outputs = Json::array();
    Json input_digests = Json::object();
    Json output_digests = Json::object();
    for (const auto& p : m.inputs) {
        inputs.push_back(p.string());
        input_digests[p.string()] = sha256_hex(read_text(p));
    }
    for (const auto& p : m.outputs) {
        outputs.push_back(p);
        output_digests[p] = sha256_hex(read_text(dir / p));
    }
    j["input_paths"] = inputs;
    j["input_sha256"] = input_digests;
    j["output_paths"] = outputs;
    j["output_sha256"] = output_digests;
    j["tool_version"] = ZIPFIRM_VERSION;
    j["timestamp"] = utc_timestamp();
    const auto path = dir / (name + ".manifest.json");
    write_text(path, j.dump(2) + "\n");
    return path;
}

void add_column_option(CLI::App& app, std::vector<std::string>& overrides) {
    app.add_option("--column", overrides,
                   "Map a record field to a CSV header, field=header (repeatable). Fields: firm_id, name, "
                   "event_date, pre_petition_assets, petition_assets, petition_debt, venue, year");
}

}  // namespace zipfirm::cli
