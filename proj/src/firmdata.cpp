#include "zipfirm/firmdata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

#include "zipfirm/csv.hpp"
#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"

namespace zipfirm::firmdata {
namespace {

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<int> parse_int(std::string_view text) {
    text = trim(text);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

struct ColumnIndex {
    std::optional<std::size_t> firm_id, name, event_date, pre_petition_assets, petition_assets,
        petition_debt, venue, year;
};

std::optional<std::size_t> locate(const std::vector<std::string>& header, const std::string& column) {
    if (column.empty()) return std::nullopt;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) return i;
    }
    throw Error(ErrorKind::schema, "csv: mapped column '" + column + "' not found in header");
}

}  // namespace

std::string_view to_string(Venue venue) noexcept {
    switch (venue) {
        case Venue::bankrupt: return "bankrupt";
        case Venue::nasdaq: return "nasdaq";
        case Venue::nyse: return "nyse";
        case Venue::other: return "other";
    }
    return "other";
}

std::optional<Venue> parse_venue(std::string_view text) noexcept {
    const std::string v = lower(trim(text));
    if (v.empty() || v == "other") return Venue::other;
    if (v == "bankrupt") return Venue::bankrupt;
    if (v == "nasdaq") return Venue::nasdaq;
    if (v == "nyse") return Venue::nyse;
    return std::nullopt;
}

std::optional<double> FirmRecord::leverage() const noexcept {
    if (!has_leverage()) return std::nullopt;
    return *petition_debt / *petition_assets;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string format_date(const std::chrono::year_month_day& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = parse_int(text.substr(0, 4));
    auto m = parse_int(text.substr(5, 2));
    auto d = parse_int(text.substr(8, 2));
    if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

void validate(const Dataset& ds) {
    std::set<std::pair<std::string, int>> seen;
    for (const auto& r : ds.records) {
        if (r.firm_id.empty()) throw Error(ErrorKind::dataset, "dataset: empty firm_id");
        if (!seen.emplace(r.firm_id, r.year).second) {
            throw Error(ErrorKind::dataset, "dataset: duplicate firm_id '" + r.firm_id + "' in year " +
                                                std::to_string(r.year));
        }
        for (const auto& v : {r.pre_petition_assets, r.petition_assets, r.petition_debt}) {
            if (v && !(*v > 0.0)) {
                throw Error(ErrorKind::dataset, "dataset: non-positive amount for firm '" + r.firm_id + "'");
            }
        }
    }
}

ColumnMapping ColumnMapping::defaults_for(const std::vector<std::string>& header) {
    ColumnMapping m;
    auto keep = [&](std::string& column) {
        if (std::find(header.begin(), header.end(), column) == header.end()) column.clear();
    };
    keep(m.name);
    keep(m.event_date);
    keep(m.pre_petition_assets);
    keep(m.petition_assets);
    keep(m.petition_debt);
    keep(m.venue);
    keep(m.year);
    return m;
}

ParseResult parse_csv(std::string_view text, const ColumnMapping& mapping, std::string provenance) {
    if (trim(text).empty()) throw Error(ErrorKind::dataset, "csv: empty file");
    auto rows = csv::read(text);
    if (rows.empty()) throw Error(ErrorKind::dataset, "csv: empty file");

    std::vector<std::string> header;
    for (const auto& f : rows.front().fields) header.emplace_back(trim(f));
    if (mapping.firm_id.empty()) throw Error(ErrorKind::schema, "csv: firm_id column must be mapped");

    ColumnIndex col;
    col.firm_id = locate(header, mapping.firm_id);
    col.name = locate(header, mapping.name);
    col.event_date = locate(header, mapping.event_date);
    col.pre_petition_assets = locate(header, mapping.pre_petition_assets);
    col.petition_assets = locate(header, mapping.petition_assets);
    col.petition_debt = locate(header, mapping.petition_debt);
    col.venue = locate(header, mapping.venue);
    col.year = locate(header, mapping.year);

    ParseResult result;
    result.dataset.provenance = std::move(provenance);
    std::set<std::pair<std::string, int>> seen;

    for (std::size_t k = 1; k < rows.size(); ++k) {
        const std::size_t row_no = k + 1;
        const auto& fields = rows[k].fields;
        ++result.rows_read;
        auto reject = [&](std::string reason) {
            result.rejects.push_back({row_no, std::move(reason)});
        };
        if (fields.size() != header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, found " +
                   std::to_string(fields.size()));
            continue;
        }
        auto cell = [&](const std::optional<std::size_t>& idx) -> std::string_view {
            return idx ? trim(fields[*idx]) : std::string_view{};
        };

        FirmRecord rec;
        rec.firm_id = std::string(cell(col.firm_id));
        if (rec.firm_id.empty()) {
            reject("empty firm_id");
            continue;
        }
        rec.name = std::string(cell(col.name));

        bool ok = true;
        auto money = [&](const std::optional<std::size_t>& idx, std::string_view label,
                         std::optional<double>& out) {
            const auto text = cell(idx);
            if (!ok || text.empty()) return;
            auto v = parse_number(text);
            if (!v) {
                reject("non-numeric " + std::string(label) + " '" + std::string(text) + "'");
                ok = false;
            } else if (!(*v > 0.0)) {
                reject(std::string(label) + " must be positive, got " + std::string(text));
                ok = false;
            } else {
                out = *v;
            }
        };
        money(col.pre_petition_assets, "pre_petition_assets", rec.pre_petition_assets);
        money(col.petition_assets, "petition_assets", rec.petition_assets);
        money(col.petition_debt, "petition_debt", rec.petition_debt);
        if (!ok) continue;

        if (auto text = cell(col.event_date); !text.empty()) {
            rec.event_date = parse_date(text);
            if (!rec.event_date) {
                reject("bad event_date '" + std::string(text) + "' (expected YYYY-MM-DD)");
                continue;
            }
        }
        const auto venue = parse_venue(cell(col.venue));
        if (!venue) {
            reject("unknown venue '" + std::string(cell(col.venue)) + "'");
            continue;
        }
        rec.venue = *venue;
        if (auto text = cell(col.year); !text.empty()) {
            auto y = parse_int(text);
            if (!y) {
                reject("bad year '" + std::string(text) + "'");
                continue;
            }
            rec.year = *y;
        } else if (rec.event_date) {
            rec.year = static_cast<int>(rec.event_date->year());
        } else if (col.year || col.event_date) {
            reject("no year: neither year nor event_date present");
            continue;
        }
        if (!seen.emplace(rec.firm_id, rec.year).second) {
            reject("duplicate firm_id '" + rec.firm_id + "' for year " + std::to_string(rec.year));
            continue;
        }
        result.dataset.records.push_back(std::move(rec));
    }
    return result;
}

std::string write_csv(const Dataset& ds) {
    const ColumnMapping names;
    std::string out = csv::join({names.firm_id, names.name, names.event_date, names.pre_petition_assets,
                                 names.petition_assets, names.petition_debt, names.venue, names.year});
    out.push_back('\n');
    auto money = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; };
    for (const auto& r : ds.records) {
        out += csv::join({r.firm_id, r.name, r.event_date ? format_date(*r.event_date) : std::string{},
                          money(r.pre_petition_assets), money(r.petition_assets), money(r.petition_debt),
                          std::string(to_string(r.venue)), std::to_string(r.year)});
        out.push_back('\n');
    }
    return out;
}

void DeflatorTable::validate() const {
    auto base = factors.find(base_year);
    if (base == factors.end() || base->second != 1.0) {
        throw Error(ErrorKind::dataset,
                    "deflator: factor for base year " + std::to_string(base_year) + " must be 1.0");
    }
    for (const auto& [year, f] : factors) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw Error(ErrorKind::dataset, "deflator: factor for " + std::to_string(year) + " must be positive");
        }
    }
}

double DeflatorTable::factor(int year) const {
    auto it = factors.find(year);
    if (it == factors.end()) {
        throw Error(ErrorKind::deflation, "deflator: no factor for year " + std::to_string(year));
    }
    return it->second;
}

DeflatorTable parse_deflator_csv(std::string_view text, int base_year) {
    DeflatorTable table{base_year, {}};
    const auto rows = csv::read(text);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& f = rows[k].fields;
        if (k == 0 && !f.empty() && !parse_int(f[0])) continue;  // header
        if (f.size() != 2) {
            throw Error(ErrorKind::dataset, "deflator: line " + std::to_string(rows[k].line) +
                                                " must have two columns year,factor");
        }
        auto year = parse_int(f[0]);
        auto factor = parse_number(f[1]);
        if (!year || !factor) {
            throw Error(ErrorKind::dataset, "deflator: malformed line " + std::to_string(rows[k].line));
        }
        table.factors[*year] = *factor;
    }
    table.validate();
    return table;
}

Dataset deflate(const Dataset& ds, const DeflatorTable& table) {
    Dataset out = ds;
    for (auto& r : out.records) {
        const double f = table.factor(r.year);
        for (auto* v : {&r.pre_petition_assets, &r.petition_assets, &r.petition_debt}) {
            if (*v) **v *= f;
        }
    }
    return out;
}

}  // namespace zipfirm::firmdata
