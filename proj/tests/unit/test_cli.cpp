#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "zipfirm/cli.hpp"
#include "zipfirm/json_io.hpp"
#include "zipfirm/snapshot.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "zipfirm");
    std::ostringstream out, err;
    const int code = zipfirm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("zipfirm_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
        setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::string slurp(const std::string& path) { return zipfirm::snapshot::read_file(path); }

Json json_file(const std::string& path) { return Json::parse(slurp(path)); }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string values_text(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += zipfirm::snapshot::format_double(x) + "\n";
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes a snapshot, series and a manifest, deterministically") {
    TempDir dir("simulate");
    const std::vector<std::string> args = {"simulate", "--p", "0.01", "--m", "0.5", "--q", "0", "--steps", "500000",
                                           "--seed", "7"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", dir / "a"});
    b.insert(b.end(), {"--out", dir / "b"});
    const auto r1 = cli(a);
    REQUIRE(r1.code == 0);
    REQUIRE(cli(b).code == 0);
    for (const char* f : {"economy.snap", "assets.tsv", "debt.tsv", "ratio.tsv", "events.tsv", "simulate.manifest.json"}) {
        CHECK(fs::exists(dir / (std::string("a/") + f)));
    }
    const auto ma = json_file(dir / "a/simulate.manifest.json");
    const auto mb = json_file(dir / "b/simulate.manifest.json");
    CHECK(ma["output_sha256"] == mb["output_sha256"]);
    CHECK(ma["config_hash"] == mb["config_hash"]);
    CHECK(ma["seed"] == 7);
    CHECK(ma["command"] == "simulate");
    CHECK(ma["timestamp"] == "2023-11-14T22:13:20Z");
    CHECK(ma["output_paths"].size() == 5);
    CHECK(slurp(dir / "a/economy.snap") == slurp(dir / "b/economy.snap"));
    CHECK(slurp(dir / "a/assets.tsv").starts_with("# rank\tvalue\n1\t"));
}

TEST_CASE("simulate validation and exit codes") {
    TempDir dir("simulate_bad");
    CHECK(cli({"simulate", "--p", "1.5", "--out", dir / "x"}).code == 2);
    CHECK(cli({"simulate", "--hazard-mode", "weekly", "--out", dir / "x"}).code == 2);
    CHECK(cli({"simulate", "--no-such-flag"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"simulate", "--config", dir / "missing.cfg", "--out", dir / "x"}).code == 1);
    write(dir / "bad.cfg", "p = 0.01\nunknown_key = 3\n");
    CHECK(cli({"simulate", "--config", dir / "bad.cfg", "--out", dir / "x"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("seed and config precedence: flag over file over environment") {
    TempDir dir("precedence");
    write(dir / "run.cfg", "# test config\nsteps = 2000\nseed = 5\nm = 0.3\n");
    setenv("ZIPFIRM_SEED", "11", 1);
    REQUIRE(cli({"simulate", "--steps", "1000", "--out", dir / "env"}).code == 0);
    CHECK(json_file(dir / "env/simulate.manifest.json")["seed"] == 11);
    REQUIRE(cli({"simulate", "--config", dir / "run.cfg", "--out", dir / "file"}).code == 0);
    const auto file = json_file(dir / "file/simulate.manifest.json");
    CHECK(file["seed"] == 5);
    CHECK(file["config"]["steps"] == 2000);
    CHECK(file["config"]["m"] == 0.3);
    REQUIRE(cli({"simulate", "--config", dir / "run.cfg", "--seed", "9", "--out", dir / "flag"}).code == 0);
    CHECK(json_file(dir / "flag/simulate.manifest.json")["seed"] == 9);
    unsetenv("ZIPFIRM_SEED");
    REQUIRE(cli({"simulate", "--steps", "1000", "--out", dir / "none"}).code == 0);
    CHECK(json_file(dir / "none/simulate.manifest.json")["seed"] == 0);
    setenv("ZIPFIRM_SEED", "abc", 1);
    CHECK(cli({"simulate", "--steps", "10", "--out", dir / "x"}).code == 2);
    unsetenv("ZIPFIRM_SEED");
}

TEST_CASE("resume continues a snapshot exactly") {
    TempDir dir("resume");
    const std::vector<std::string> common = {"--q", "1e-5", "--p-merge", "0.01", "--seed", "7"};
    auto full = common, half = common;
    full.insert(full.begin(), "simulate");
    full.insert(full.end(), {"--steps", "2000", "--out", dir / "full"});
    half.insert(half.begin(), "simulate");
    half.insert(half.end(), {"--steps", "1000", "--out", dir / "half"});
    REQUIRE(cli(full).code == 0);
    REQUIRE(cli(half).code == 0);
    REQUIRE(cli({"simulate", "--resume", dir / "half/economy.snap", "--steps", "2000", "--out", dir / "rest"}).code == 0);
    CHECK(slurp(dir / "full/economy.snap") == slurp(dir / "rest/economy.snap"));
    CHECK(slurp(dir / "full/events.tsv") == slurp(dir / "rest/events.tsv"));
    CHECK(cli({"simulate", "--resume", dir / "half/economy.snap", "--seed", "3", "--out", dir / "x"}).code == 2);
    CHECK(cli({"simulate", "--resume", dir / "half/economy.snap", "--steps", "10", "--out", dir / "x"}).code == 2);
    write(dir / "junk.snap", "not a snapshot\n");
    CHECK(cli({"simulate", "--resume", dir / "junk.snap", "--out", dir / "x"}).code == 3);
}

TEST_CASE("batch runs one directory per seed") {
    TempDir dir("batch");
    const auto r = cli({"simulate", "--steps", "3000", "--seed", "20", "--batch", "3", "--jobs", "2", "--out", dir / "b"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("seed 20") < r.out.find("seed 21"));
    CHECK(r.out.find("seed 21") < r.out.find("seed 22"));
    REQUIRE(cli({"simulate", "--steps", "3000", "--seed", "21", "--out", dir / "single"}).code == 0);
    CHECK(slurp(dir / "b/seed-21/economy.snap") == slurp(dir / "single/economy.snap"));
}

TEST_CASE("analyze: gi on synthetic tail data") {
    TempDir dir("analyze_gi");
    // Exact quantiles of a tail with exponent 0.9: x_r = ((r - 1/2) / n)^(-1/0.9)
    std::vector<double> v;
    for (int r = 1; r <= 2000; ++r) v.push_back(std::pow((r - 0.5) / 2000.0, -1.0 / 0.9));
    write(dir / "assets.txt", values_text(v));
    const auto r = cli({"analyze", "--values", dir / "assets.txt", "--method", "gi", "--top", "400", "--out",
                        dir / "out", "--name", "assets_gi"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = json_file(dir / "out/assets_gi.json");
    CHECK(j["schema"] == 1);
    CHECK(j["kind"] == "power_law_fit");
    CHECK(j["zeta"].get<double>() == doctest::Approx(1.11).epsilon(0.01));
    CHECK(j["n_used"] == 400);
    CHECK(slurp(dir / "out/assets_gi.tsv").starts_with("# rank\tvalue\tfitted_value\n"));
    const auto m = json_file(dir / "out/assets_gi.manifest.json");
    CHECK(m["output_paths"] == Json::array({"assets_gi.json", "assets_gi.tsv"}));
    CHECK(m["input_paths"][0] == dir / "assets.txt");
}

TEST_CASE("analyze: crossover and stretched exponential") {
    TempDir dir("analyze_more");
    write(dir / "two.txt", values_text(oracle::two_regime(600, 300, 0.57, 1.58)));
    auto r = cli({"analyze", "--values", dir / "two.txt", "--crossover", "--out", dir / "o"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto j = json_file(dir / "o/values_crossover.json");
    CHECK(j["kind"] == "crossover_fit");
    CHECK(j["break_rank"] == 300);

    std::vector<double> se;
    for (int k = 1; k <= 500; ++k) se.push_back(10.0 * std::exp(-std::sqrt(k) / 45.0));
    write(dir / "se.txt", values_text(se));
    r = cli({"analyze", "--values", dir / "se.txt", "--method", "stretched", "--out", dir / "o"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    j = json_file(dir / "o/values_stretched.json");
    CHECK(std::abs(j["beta"].get<double>() - 0.5) <= 0.01);
    CHECK(std::abs(j["tau"].get<double>() - 45.0) <= 1.0);
}

TEST_CASE("analyze: inputs, fields and errors") {
    TempDir dir("analyze_err");
    REQUIRE(cli({"simulate", "--steps", "20000", "--q", "1e-4", "--out", dir / "run"}).code == 0);
    auto r = cli({"analyze", "--input", dir / "run/economy.snap", "--field", "debt", "--method", "ols", "--top",
                  "50", "--out", dir / "o"});
    CHECK_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir / "o/debt_ols_zipf.json"));
    CHECK(cli({"analyze", "--input", dir / "run/economy.snap", "--field", "profit"}).code == 2);
    CHECK(cli({"analyze", "--input", dir / "run/economy.snap", "--method", "mle"}).code == 2);
    CHECK(cli({"analyze", "--input", dir / "run/economy.snap", "--method", "pdf", "--top", "10"}).code == 2);
    CHECK(cli({"analyze", "--input", dir / "nope.csv"}).code == 1);
    CHECK(cli({"analyze"}).code == 2);

    write(dir / "tiny.txt", "5\n4\n");
    r = cli({"analyze", "--values", dir / "tiny.txt", "--method", "ols", "--out", dir / "o"});
    CHECK(r.code == 3);
    CHECK(r.err.find("insufficient_data") != std::string::npos);

    write(dir / "firms.csv",
          "firm_id,petition_assets,petition_debt,year,venue\n"
          "A,100,140,2001,bankrupt\nB,50,20,2002,bankrupt\nC,80,100,2003,nyse\nD,10,9,2004,bankrupt\n"
          "E,70,30,2005,bankrupt\nF,30,31,2006,bankrupt\n");
    r = cli({"analyze", "--input", dir / "firms.csv", "--field", "ratio", "--method", "ols", "--venue", "bankrupt",
             "--out", dir / "o"});
    CHECK_MESSAGE(r.code == 0, r.err);
    CHECK(json_file(dir / "o/ratio_ols_zipf.json")["n_series"] == 5);
    CHECK(cli({"analyze", "--input", dir / "firms.csv", "--field", "pre_assets"}).code == 2);
    CHECK(cli({"analyze", "--input", dir / "firms.csv", "--column", "petition_assets=Assets"}).code == 2);
}

TEST_CASE("bayes composes two fit files") {
    TempDir dir("bayes");
    auto fit = [](double zeta, double lo, double hi) {
        zipfirm::fit::PowerLawFit f;
        f.method = zipfirm::fit::Method::gi_rank_half;
        f.zeta = zeta;
        f.zeta_prime = 1.0 / zeta;
        f.value_lo = lo;
        f.value_hi = hi;
        return zipfirm::json_io::to_json(f).dump();
    };
    write(dir / "bankrupt.json", fit(0.57, 0.8, 3.0));
    write(dir / "existing.json", fit(0.37, 0.5, 4.0));
    write(dir / "far.json", fit(0.37, 5.0, 10.0));
    auto r = cli({"bayes", "--bankrupt", dir / "bankrupt.json", "--existing", dir / "existing.json",
                  "--prefactor-bankrupt", "0.79", "--prefactor-existing", "1.54", "--p-b", "0.04", "--r", "1,2",
                  "--out", dir / "o"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto j = json_file(dir / "o/bayes.json");
    CHECK(std::abs(j["exponent"].get<double>() - 0.95) < 0.002);
    CHECK(std::abs(j["prefactor"].get<double>() - 0.513) < 0.001);
    CHECK(j["table"].size() == 2);
    CHECK(slurp(dir / "o/bayes.tsv").starts_with("# R\t"));

    r = cli({"bayes", "--bankrupt", dir / "existing.json", "--existing", dir / "existing.json",
             "--prefactor-bankrupt", "1", "--prefactor-existing", "1", "--p-b", "0.04", "--r", "0.6,1,3.5", "--out",
             dir / "flat"});
    REQUIRE(r.code == 0);
    for (const auto& row : json_file(dir / "flat/bayes.json")["table"]) CHECK(row["probability"] == 0.04);

    r = cli({"bayes", "--bankrupt", dir / "bankrupt.json", "--existing", dir / "far.json", "--prefactor-bankrupt",
             "1", "--prefactor-existing", "1", "--p-b", "0.04", "--out", dir / "x"});
    CHECK(r.code == 3);
    CHECK(r.err.find("overlap") != std::string::npos);

    write(dir / "broken.json", "{\"kind\": \"power_law_fit\"");
    CHECK(cli({"bayes", "--bankrupt", dir / "broken.json", "--existing", dir / "existing.json", "--p-b", "0.1"}).code ==
          3);
    CHECK(cli({"bayes", "--bankrupt", dir / "bankrupt.json", "--existing", dir / "existing.json",
               "--prefactor-bankrupt", "1", "--p-b", "0.1"})
              .code == 2);
}

TEST_CASE("utest splits by size") {
    TempDir dir("utest");
    // Small firms (assets 1..50) carry ratios 2..3, large firms (51..100) ratios 0.5..1.5.
    std::string csv = "firm_id,petition_assets,petition_debt\n";
    for (int i = 1; i <= 100; ++i) {
        const double assets = i;
        const double ratio = i <= 50 ? 2.0 + i / 50.0 : 0.5 + (i - 50) / 50.0;
        csv += "F" + std::to_string(i) + "," + std::to_string(assets) + "," + std::to_string(assets * ratio) + "\n";
    }
    write(dir / "skewed.csv", csv);
    auto r = cli({"utest", "--input", dir / "skewed.csv", "--out", dir / "o"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto j = json_file(dir / "o/utest.json");
    CHECK(j["z_value"].get<double>() < 0.0);
    CHECK(j["split"] == "median");
    CHECK(j["n1"] == 50);
    CHECK(j["n2"] == 50);
    CHECK(slurp(dir / "o/utest.tsv").find("z_value\t") != std::string::npos);

    std::string same = "firm_id,petition_assets,petition_debt\n";
    for (int i = 1; i <= 40; ++i) {
        const double ratio = 0.5 + (i % 20) / 20.0;
        same += "S" + std::to_string(i) + "," + std::to_string(i) + "," + std::to_string(i * ratio) + "\n";
    }
    write(dir / "same.csv", same);
    r = cli({"utest", "--input", dir / "same.csv", "--out", dir / "s"});
    REQUIRE(r.code == 0);
    CHECK(json_file(dir / "s/utest.json")["p_value_two_sided"].get<double>() > 0.9);

    r = cli({"utest", "--input", dir / "skewed.csv", "--split", "threshold:0.5", "--out", dir / "t"});
    CHECK(r.code == 3);
    CHECK(r.err.find("threshold(0.5)") != std::string::npos);

    write(dir / "nosize.csv", "firm_id,petition_debt\nA,5\n");
    r = cli({"utest", "--input", dir / "nosize.csv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("petition_assets") != std::string::npos);
    CHECK(cli({"utest", "--input", dir / "skewed.csv", "--split", "quartile"}).code == 2);
}

TEST_CASE("report aggregates manifests") {
    TempDir dir("report");
    auto report = [&](const std::string& sub) {
        const auto r = cli({"report", "--dir", dir / sub});
        REQUIRE(r.code == 0);
        return Json::parse(r.out);
    };
    fs::create_directories(dir / "empty");
    auto j = report("empty");
    CHECK(j["entries"].empty());
    CHECK(j["errors"].empty());

    std::vector<double> v = oracle::zipf_series(100, 1.0, 100);
    write(dir / "v.txt", values_text(v));
    for (const char* name : {"c", "a", "b"}) {
        REQUIRE(cli({"analyze", "--values", dir / "v.txt", "--method", "ols", "--out", dir / "runs", "--name", name})
                    .code == 0);
    }
    j = report("runs");
    REQUIRE(j["entries"].size() == 3);
    CHECK(j["entries"][0]["manifest"] == "a.manifest.json");
    CHECK(j["entries"][2]["manifest"] == "c.manifest.json");
    CHECK(j["entries"][0]["results"]["a.json"]["kind"] == "power_law_fit");
    CHECK(j["entries"][0]["outputs_verified"] == true);
    CHECK(report("runs") == j);

    write(dir / "runs/b.json", "{ not json");
    j = report("runs");
    CHECK(j["entries"].size() == 2);
    REQUIRE(j["errors"].size() == 1);
    CHECK(j["errors"][0]["path"] == "b.json");

    CHECK(cli({"report", "--dir", dir / "missing"}).code == 1);
    REQUIRE(cli({"report", "--dir", dir / "runs", "--out", dir / "report.json"}).code == 0);
    CHECK(json_file(dir / "report.json")["entries"].size() == 2);
}

}
