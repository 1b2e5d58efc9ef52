#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "zipfirm/error.hpp"
#include "zipfirm/riskstats.hpp"

using namespace zipfirm;
using namespace zipfirm::risk;

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

firmdata::FirmRecord record(std::string id, double assets, double debt, int year = 2000) {
    return {.firm_id = std::move(id), .petition_assets = assets, .petition_debt = debt, .year = year};
}

fit::PowerLawFit rank_fit(double zeta, double lo, double hi) {
    fit::PowerLawFit f;
    f.method = fit::Method::ols_zipf;
    f.zeta = zeta;
    f.zeta_prime = 1.0 / zeta;
    f.value_lo = lo;
    f.value_hi = hi;
    return f;
}

}  // namespace

TEST_SUITE("riskstats") {

TEST_CASE("leverage ratios") {
    firmdata::Dataset ds;
    ds.records = {record("A", 100, 140), record("B", 7, 7)};
    auto ex = compute_ratios(ds);
    CHECK(ex.sample.ratios == std::vector<double>{1.4, 1.0});
    CHECK(*ex.sample.size_values == std::vector<double>{100, 7});

    ds.records = {record("A", 2, 1), record("B", 10, 39), record("C", 10, 42)};
    ex = compute_ratios(ds, 4.0);
    CHECK(ex.sample.ratios == std::vector<double>{0.5, 3.9});
    CHECK(ex.truncated == 1);

    ds.records = {record("A", 1, 5)};
    CHECK(kind_of([&] { compute_ratios(ds); }) == ErrorKind::empty_series);
    CHECK(kind_of([&] { compute_ratios(ds, 0.0); }) == ErrorKind::domain);
}

TEST_CASE("histogram densities") {
    std::vector<double> uniform;
    for (int i = 0; i < 8000; ++i) uniform.push_back((i + 0.5) * 4.0 / 8000.0);
    const auto bins = histogram_pdf(uniform, 0.5, std::pair{0.0, 4.0});
    REQUIRE(bins.size() == 8);
    for (const auto& b : bins) CHECK(b.density == doctest::Approx(0.25));

    const auto single = histogram_pdf(std::vector<double>{1.0}, 0.5);
    REQUIRE(single.size() == 1);
    CHECK(single[0].density == 2.0);
    CHECK(single[0].lo == 1.0);

    CHECK(kind_of([] { histogram_pdf(std::vector<double>{}, 0.5); }) == ErrorKind::empty_series);
    CHECK(kind_of([] { histogram_pdf(std::vector<double>{1.0}, 0.0); }) == ErrorKind::domain);
}

TEST_CASE("histogram slope on Pareto samples") {
    const auto sample = oracle::pareto(200000, 1.73, 0.5, 17);
    const auto bins = histogram_pdf(sample, 0.1, std::pair{0.8, 3.0});
    std::vector<double> x, y;
    for (const auto& b : bins) {
        x.push_back(std::log(0.5 * (b.lo + b.hi)));
        y.push_back(std::log(b.density));
    }
    CHECK(oracle::least_squares(x, y).slope == doctest::Approx(-2.73).epsilon(0.15 / 2.73));
}

TEST_CASE("size splits") {
    RatioSample s;
    s.ratios = {0.1, 0.2, 0.3, 0.4};
    s.size_values = std::vector<double>{1, 2, 3, 4};
    auto split = split_by_size(s, SizeRule::median());
    CHECK(*split.small.size_values == std::vector<double>{1, 2});
    CHECK(*split.large.size_values == std::vector<double>{3, 4});
    CHECK(split.cut == 2.5);

    s.size_values = std::vector<double>{5, 5, 5, 5};
    split = split_by_size(s, SizeRule::median());
    CHECK(split.small.size() == 4);
    CHECK(split.large.size() == 0);
    REQUIRE(split.warnings.size() == 1);
    CHECK(split.warnings[0].find("median") != std::string::npos);

    RatioSample five;
    five.ratios = {1, 2, 3, 4, 5};
    five.size_values = std::vector<double>{1e6, 49.9e6, 50e6, 2e8, 3e7};
    split = split_by_size(five, SizeRule::at(50e6));
    CHECK(split.small.ratios == std::vector<double>{1, 2, 5});
    CHECK(split.large.ratios == std::vector<double>{3, 4});
    CHECK(SizeRule::at(50e6).describe() == "threshold(50000000)");

    RatioSample bare;
    bare.ratios = {1};
    CHECK(kind_of([&] { split_by_size(bare, SizeRule::median()); }) == ErrorKind::dataset);
}

TEST_CASE("Mann-Whitney basics") {
    const std::vector<double> a{1, 2, 3};
    const auto same = mann_whitney_u(a, a);
    CHECK(same.z_value == 0.0);
    CHECK(same.p_value_two_sided == 1.0);

    const std::vector<double> lo{1, 2}, hi{3, 4};
    const auto r = mann_whitney_u(lo, hi);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.z_value < 0.0);
    const auto null = oracle::enumerate_u(lo, hi);
    REQUIRE(null.size() == 6);
    const double p_exact = static_cast<double>(std::count_if(null.begin(), null.end(), [](double u) { return u <= 0.0; })) /
                           static_cast<double>(null.size());
    CHECK(p_exact == doctest::Approx(1.0 / 6.0));

    CHECK(mann_whitney_u(std::vector<double>{2, 2}, std::vector<double>{2}).p_value_two_sided == 1.0);
    CHECK(kind_of([] { mann_whitney_u(std::vector<double>{}, std::vector<double>{1}); }) ==
          ErrorKind::insufficient_data);
}

TEST_CASE("U and its null moments match enumeration for every small sample pair") {
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<int> value(0, 4);  // small range forces ties
    int cases = 0;
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::size_t n1 = 1; n1 < n; ++n1) {
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<double> a(n1), b(n - n1);
                for (auto& x : a) x = value(gen);
                for (auto& x : b) x = value(gen);
                const auto res = mann_whitney_u(a, b);
                CHECK(res.u_statistic == oracle::brute_force_u(a, b));
                const auto [mean, var] = oracle::mean_variance(oracle::enumerate_u(a, b));
                const auto [m2, v2] = u_null_moments(a, b);
                CHECK(m2 == doctest::Approx(mean).epsilon(1e-12));
                CHECK(v2 == doctest::Approx(var).epsilon(1e-12));
                ++cases;
            }
        }
    }
    CHECK(cases == 20 * 28);
}

TEST_CASE("Bayes composition") {
    const auto est = bayes_compose(rank_fit(0.57, 0.8, 3.0), rank_fit(0.37, 0.5, 4.0), 0.79, 1.54, 0.04);
    CHECK(est.exponent == doctest::Approx(1.0 / 0.37 - 1.0 / 0.57));
    CHECK(std::abs(est.exponent - 0.949) < 0.001);
    CHECK(std::abs(est.prefactor - 0.513) < 0.001);
    CHECK(est.r_lo == 0.8);
    CHECK(est.r_hi == 3.0);
    CHECK(est.evaluate(2.0).probability == doctest::Approx(0.04 * 0.79 / 1.54 * std::pow(2.0, est.exponent)));
    CHECK(est.evaluate(10.0).out_of_range);

    const auto crisis = bayes_compose(rank_fit(0.6, 0.8, 3.0), rank_fit(0.37, 0.5, 4.0), 1, 1, 0.04);
    CHECK(crisis.exponent == doctest::Approx(1.036).epsilon(1e-3));

    const auto flat = bayes_compose(rank_fit(0.5, 1, 3), rank_fit(0.5, 1, 3), 1.2, 1.2, 0.04);
    for (double r : {1.0, 1.7, 3.0}) CHECK(flat.evaluate(r).probability == doctest::Approx(0.04));

    const auto huge = bayes_compose(rank_fit(0.57, 0.8, 3.0), rank_fit(0.37, 0.5, 4.0), 100, 1, 0.5);
    CHECK(huge.evaluate(3.0).clamped);
    CHECK(huge.evaluate(3.0).probability == 1.0);

    CHECK(kind_of([] { bayes_compose(rank_fit(0.57, 0.8, 3), rank_fit(0.37, 5, 10), 1, 1, 0.04); }) ==
          ErrorKind::range);
    CHECK(kind_of([] { bayes_compose(rank_fit(0.57, 0.8, 3), rank_fit(0.37, 1, 2), 1, 1, 1.5); }) ==
          ErrorKind::domain);
    CHECK(kind_of([] { bayes_compose(rank_fit(0.57, 0.8, 3), rank_fit(0.37, 1, 2), 0.04); }) == ErrorKind::domain);
}

TEST_CASE("period slices") {
    firmdata::Dataset ds;
    for (int y = 2001; y <= 2009; ++y) ds.records.push_back(record("F" + std::to_string(y), 1, 1, y));
    const auto mid = period_slice(ds, 2004, 2006);
    REQUIRE(mid.records.size() == 3);
    CHECK(mid.records.front().year == 2004);
    CHECK(mid.records.back().year == 2006);
    CHECK(period_slice(ds, 2010, 2011).records.empty());
    CHECK(kind_of([&] { period_slice(ds, 2007, 2004); }) == ErrorKind::domain);
}

}
