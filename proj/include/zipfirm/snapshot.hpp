#pragma once

// Line-oriented snapshot format, version tag ZIPFIRM-SNAP-1.
//
//   ZIPFIRM-SNAP-1<TAB><type>          header; type is `dataset` or `economy`
//   <tag><TAB><field><TAB>...          one entity per line, fixed field order
//   end<TAB><entity line count>        trailer, guards against truncation
//
// Reals are written in shortest round-trip form, absent values as `-`, and
// strings escape backslash, tab, CR and LF as \\ \t \r \n. Lines end in LF.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zipfirm/firmdata.hpp"

namespace zipfirm::snapshot {

inline constexpr std::string_view kVersionTag = "ZIPFIRM-SNAP-1";

std::string format_double(double v);
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);
std::int64_t parse_i64(std::string_view text);

std::string escape(std::string_view s);
std::string unescape(std::string_view s);

/// Incremental writer: header on construction, trailer from finish().
class Writer {
public:
    explicit Writer(std::string_view type);
    void line(const std::vector<std::string>& fields);
    std::string finish();

private:
    std::string out_;
    std::size_t lines_ = 0;
};

/// Parsed body: entity lines split on tabs, header and trailer verified.
/// Throws Error(snapshot_format) with the version tag in the message on any
/// header, trailer or version problem.
std::vector<std::vector<std::string>> parse(std::string_view text, std::string_view expected_type);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string to_text(const firmdata::Dataset& ds);
firmdata::Dataset dataset_from_text(std::string_view text);

void write_snapshot(const firmdata::Dataset& ds, const std::filesystem::path& path);
firmdata::Dataset read_dataset_snapshot(const std::filesystem::path& path);

}  // namespace zipfirm::snapshot
