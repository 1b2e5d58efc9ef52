#include "zipfirm/snapshot.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"

namespace zipfirm::snapshot {
namespace {

[[noreturn]] void format_error(const std::string& what) {
    throw Error(ErrorKind::snapshot_format, std::string(kVersionTag) + " snapshot: " + what);
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.emplace_back(line.substr(start, tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : "-"; }

std::optional<double> parse_opt_number(std::string_view text) {
    if (text == "-") return std::nullopt;
    return parse_double(text);
}

}  // namespace

std::string format_double(double v) { return format_real(v); }

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        format_error("malformed real '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        format_error("malformed integer '" + std::string(text) + "'");
    }
    return v;
}

std::int64_t parse_i64(std::string_view text) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        format_error("malformed integer '" + std::string(text) + "'");
    }
    return v;
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) format_error("dangling escape");
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: format_error("unknown escape \\" + std::string(1, s[i]));
        }
    }
    return out;
}

Writer::Writer(std::string_view type) {
    out_ += kVersionTag;
    out_ += '\t';
    out_ += type;
    out_ += '\n';
}

void Writer::line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_.push_back('\t');
        out_ += fields[i];
    }
    out_.push_back('\n');
    ++lines_;
}

std::string Writer::finish() {
    out_ += "end\t" + std::to_string(lines_) + "\n";
    return std::move(out_);
}

std::vector<std::vector<std::string>> parse(std::string_view text, std::string_view expected_type) {
    const auto eol = text.find('\n');
    if (eol == std::string_view::npos) format_error("missing header line");
    const auto header = split_tabs(text.substr(0, eol));
    if (header.size() != 2 || header[0] != kVersionTag) {
        if (!header.empty() && header[0].starts_with("ZIPFIRM-SNAP-") && header[0] != kVersionTag) {
            format_error("unsupported version '" + header[0] + "'");
        }
        format_error("bad header (expected '" + std::string(kVersionTag) + "<TAB>" +
                     std::string(expected_type) + "')");
    }
    if (header[1] != expected_type) {
        format_error("expected type '" + std::string(expected_type) + "', found '" + header[1] + "'");
    }

    std::vector<std::vector<std::string>> lines;
    std::size_t pos = eol + 1;
    bool ended = false;
    while (pos < text.size()) {
        auto next = text.find('\n', pos);
        if (next == std::string_view::npos) format_error("last line not LF-terminated");
        auto fields = split_tabs(text.substr(pos, next - pos));
        pos = next + 1;
        if (fields[0] == "end") {
            if (fields.size() != 2 || parse_u64(fields[1]) != lines.size()) {
                format_error("trailer count does not match body");
            }
            ended = true;
            break;
        }
        lines.push_back(std::move(fields));
    }
    if (!ended) format_error("missing trailer (truncated file?)");
    if (pos != text.size()) format_error("data after trailer");
    return lines;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::io, "read failure on '" + path.string() + "'");
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::io, "write failure on '" + path.string() + "'");
}

std::string to_text(const firmdata::Dataset& ds) {
    Writer w("dataset");
    w.line({"provenance", escape(ds.provenance)});
    for (const auto& r : ds.records) {
        w.line({"record", escape(r.firm_id), escape(r.name),
                r.event_date ? firmdata::format_date(*r.event_date) : "-", opt_number(r.pre_petition_assets),
                opt_number(r.petition_assets), opt_number(r.petition_debt),
                std::string(firmdata::to_string(r.venue)), std::to_string(r.year)});
    }
    return w.finish();
}

firmdata::Dataset dataset_from_text(std::string_view text) {
    firmdata::Dataset ds;
    for (const auto& f : parse(text, "dataset")) {
        if (f[0] == "provenance" && f.size() == 2) {
            ds.provenance = unescape(f[1]);
        } else if (f[0] == "record" && f.size() == 9) {
            firmdata::FirmRecord r;
            r.firm_id = unescape(f[1]);
            r.name = unescape(f[2]);
            if (f[3] != "-") {
                r.event_date = firmdata::parse_date(f[3]);
                if (!r.event_date) format_error("bad date '" + f[3] + "'");
            }
            r.pre_petition_assets = parse_opt_number(f[4]);
            r.petition_assets = parse_opt_number(f[5]);
            r.petition_debt = parse_opt_number(f[6]);
            auto venue = firmdata::parse_venue(f[7]);
            if (!venue) format_error("bad venue '" + f[7] + "'");
            r.venue = *venue;
            r.year = static_cast<int>(parse_i64(f[8]));
            ds.records.push_back(std::move(r));
        } else {
            format_error("unexpected line tag '" + f[0] + "'");
        }
    }
    firmdata::validate(ds);
    return ds;
}

void write_snapshot(const firmdata::Dataset& ds, const std::filesystem::path& path) {
    write_file(path, to_text(ds));
}

firmdata::Dataset read_dataset_snapshot(const std::filesystem::path& path) {
    return dataset_from_text(read_file(path));
}

}  // namespace zipfirm::snapshot
