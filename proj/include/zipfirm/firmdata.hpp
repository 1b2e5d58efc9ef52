#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zipfirm::firmdata {

enum class Venue { bankrupt, nasdaq, nyse, other };

std::string_view to_string(Venue venue) noexcept;
/// Case-insensitive; an empty string maps to `other`. Returns nullopt for
/// anything unrecognised.
std::optional<Venue> parse_venue(std::string_view text) noexcept;

/// One empirical firm observation. Monetary amounts are USD; absent values
/// stay absent (never zero) so they cannot leak into ratio computations.
struct FirmRecord {
    std::string firm_id;
    std::string name;
    std::optional<std::chrono::year_month_day> event_date;
    std::optional<double> pre_petition_assets;  // A_a
    std::optional<double> petition_assets;      // A_b
    std::optional<double> petition_debt;        // D_b
    Venue venue = Venue::other;
    int year = 0;

    [[nodiscard]] bool has_leverage() const noexcept {
        return petition_assets.has_value() && petition_debt.has_value();
    }
    /// D_b / A_b; only meaningful when has_leverage().
    [[nodiscard]] std::optional<double> leverage() const noexcept;

    friend bool operator==(const FirmRecord&, const FirmRecord&) = default;
};

struct Dataset {
    std::vector<FirmRecord> records;
    std::string provenance;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Throws Error(dataset) if a firm_id is empty, a (firm_id, year) pair
/// repeats, or a present monetary field is not strictly positive.
void validate(const Dataset& ds);

/// Header names for each record field. An empty name leaves the field
/// unmapped (always absent). firm_id must be mapped; year falls back to the
/// event date's year, and is 0 when the header carries neither column.
struct ColumnMapping {
    std::string firm_id = "firm_id";
    std::string name = "name";
    std::string event_date = "event_date";
    std::string pre_petition_assets = "pre_petition_assets";
    std::string petition_assets = "petition_assets";
    std::string petition_debt = "petition_debt";
    std::string venue = "venue";
    std::string year = "year";

    /// Mapping that only uses columns present in `header` (optional columns
    /// the header lacks are left unmapped).
    static ColumnMapping defaults_for(const std::vector<std::string>& header);
};

struct RowReject {
    std::size_t row = 0;  // 1-based, the header is row 1
    std::string reason;
};

struct ParseResult {
    Dataset dataset;
    std::vector<RowReject> rejects;
    std::size_t rows_read = 0;  // data rows, header excluded
};

/// Parse UTF-8 CSV text. Invalid rows land in `rejects`; accepted plus
/// rejected always equals rows_read.
/// Throws Error(dataset) on empty input, Error(schema) on a mapped column
/// missing from the header.
ParseResult parse_csv(std::string_view text, const ColumnMapping& mapping = {},
                      std::string provenance = {});

/// Serialize with the default column names (a header row is always written).
std::string write_csv(const Dataset& ds);

struct DeflatorTable {
    int base_year = 0;
    std::map<int, double> factors;

    /// Throws Error(dataset) unless factors[base_year] == 1 and every factor
    /// is positive and finite.
    void validate() const;
    /// Throws Error(deflation) naming the year when absent.
    [[nodiscard]] double factor(int year) const;
};

/// Two-column `year,factor` CSV (header optional).
DeflatorTable parse_deflator_csv(std::string_view text, int base_year);

/// Scale every present monetary field by the record year's factor.
Dataset deflate(const Dataset& ds, const DeflatorTable& table);

std::string format_date(const std::chrono::year_month_day& date);
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);

/// Strict decimal parse (surrounding blanks allowed, no trailing garbage,
/// finite only).
std::optional<double> parse_number(std::string_view text);

}  // namespace zipfirm::firmdata
