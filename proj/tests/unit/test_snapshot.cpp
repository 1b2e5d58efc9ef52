#include <doctest.h>

#include <filesystem>

#include "zipfirm/error.hpp"
#include "zipfirm/simonsim.hpp"
#include "zipfirm/snapshot.hpp"

using namespace zipfirm;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no zipfirm::Error thrown");
    return ErrorKind::invariant;
}

firmdata::Dataset sample_dataset() {
    firmdata::Dataset ds;
    ds.provenance = "unit\ttest\nsecond line \\ end";
    ds.records.push_back({.firm_id = "A 1",
                          .name = "Tab\tName",
                          .event_date = firmdata::parse_date("2001-02-03"),
                          .pre_petition_assets = 1e9 / 3.0,
                          .petition_assets = 0.1,
                          .petition_debt = 7.0,
                          .venue = firmdata::Venue::nasdaq,
                          .year = 2001});
    ds.records.push_back({.firm_id = "-", .name = "", .venue = firmdata::Venue::other, .year = 1999});
    return ds;
}

}  // namespace

TEST_SUITE("snapshot") {

TEST_CASE("empty dataset round-trips") {
    const firmdata::Dataset empty;
    CHECK(snapshot::dataset_from_text(snapshot::to_text(empty)) == empty);
}

TEST_CASE("dataset round-trips field for field") {
    const auto ds = sample_dataset();
    const auto text = snapshot::to_text(ds);
    CHECK(text.starts_with("ZIPFIRM-SNAP-1\tdataset\n"));
    CHECK(snapshot::dataset_from_text(text) == ds);
}

TEST_CASE("economy resumed from a snapshot matches an uninterrupted run") {
    sim::SimConfig c;
    c.seed = 7;
    c.q = 1e-4;
    c.p_merge = 0.01;
    c.steps = 1000;
    auto first = sim::run(c);
    auto restored = sim::economy_from_text(sim::to_text(first));
    CHECK(restored == first);
    sim::advance(restored, 1000);

    c.steps = 2000;
    auto straight = sim::run(c);
    restored.config.steps = 2000;
    CHECK(restored == straight);
    CHECK(sim::to_text(restored) == sim::to_text(straight));
}

TEST_CASE("file round trip and missing files") {
    const auto dir = std::filesystem::temp_directory_path() / "zipfirm_snapshot_test";
    std::filesystem::create_directories(dir);
    const auto ds = sample_dataset();
    snapshot::write_snapshot(ds, dir / "ds.snap");
    CHECK(snapshot::read_dataset_snapshot(dir / "ds.snap") == ds);
    CHECK(kind_of([&] { snapshot::read_file(dir / "nope.snap"); }) == ErrorKind::io);
    std::filesystem::remove_all(dir);
}

TEST_CASE("format errors name the version tag") {
    auto text = snapshot::to_text(sample_dataset());
    auto bad_header = text;
    bad_header[3] = 'X';
    try {
        snapshot::dataset_from_text(bad_header);
        FAIL("expected a format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::snapshot_format);
        CHECK(std::string(e.what()).find("ZIPFIRM-SNAP-1") != std::string::npos);
    }
    auto newer = text;
    newer.replace(0, 14, "ZIPFIRM-SNAP-2");
    CHECK(kind_of([&] { snapshot::dataset_from_text(newer); }) == ErrorKind::snapshot_format);

    const auto truncated = text.substr(0, text.rfind("end\t"));
    CHECK(kind_of([&] { snapshot::dataset_from_text(truncated); }) == ErrorKind::snapshot_format);

    CHECK(kind_of([&] { sim::economy_from_text(text); }) == ErrorKind::snapshot_format);
    CHECK(kind_of([] { snapshot::dataset_from_text(""); }) == ErrorKind::snapshot_format);
}

TEST_CASE("tampered economy snapshots are refused") {
    sim::SimConfig c;
    c.steps = 200;
    const auto text = sim::to_text(sim::run(c));
    const auto begin = text.find("\nfirm\t") + 1;
    const auto end = text.find('\n', begin);
    std::vector<std::string> fields;
    for (std::size_t i = begin; i <= end;) {
        const auto tab = std::min(text.find('\t', i), end);
        fields.push_back(text.substr(i, tab - i));
        i = tab + 1;
    }
    REQUIRE(fields.size() >= 3);
    fields[2] = "999999";  // asset units of firm 0
    std::string line;
    for (const auto& f : fields) line += (line.empty() ? "" : "\t") + f;
    const auto tampered = text.substr(0, begin) + line + text.substr(end);
    CHECK_THROWS_AS(sim::economy_from_text(tampered), Error);
}

TEST_CASE("escape handling") {
    CHECK(snapshot::unescape(snapshot::escape("a\\b\tc\nd\re")) == "a\\b\tc\nd\re");
    CHECK(snapshot::parse_double(snapshot::format_double(0.1)) == 0.1);
    CHECK(kind_of([] { snapshot::parse_u64("12x"); }) == ErrorKind::snapshot_format);
}

}
