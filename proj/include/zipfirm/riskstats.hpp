#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zipfirm/firmdata.hpp"
#include "zipfirm/scalefit.hpp"

namespace zipfirm::risk {

enum class RatioSource { bankrupt, existing };

/// Leverage ratios R = D_b / A_b with the matching A_b values, in record order.
struct RatioSample {
    std::vector<double> ratios;
    RatioSource source = RatioSource::bankrupt;
    std::optional<std::vector<double>> size_values;
    std::optional<std::pair<int, int>> period;

    [[nodiscard]] std::size_t size() const noexcept { return ratios.size(); }
};

struct RatioExtraction {
    RatioSample sample;
    std::size_t truncated = 0;   // R >= truncate_at
    std::size_t incomplete = 0;  // A_b or D_b absent
};

inline constexpr double kDefaultTruncation = 4.0;

/// One R per record carrying both A_b and D_b; R >= truncate_at is dropped
/// and counted. Throws Error(domain) for truncate_at <= 0 and
/// Error(empty_series) when no ratio survives.
RatioExtraction compute_ratios(const firmdata::Dataset& ds, double truncate_at = kDefaultTruncation,
                               RatioSource source = RatioSource::bankrupt);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double density = 0.0;  // count / (n_total * width)
};

/// Equal-width histogram over [lo, hi). The default range snaps to multiples
/// of bin_width around the data: [floor(min/w) w, (floor(max/w) + 1) w).
/// Densities integrate to the fraction of the sample inside the range.
std::vector<HistogramBin> histogram_pdf(std::span<const double> values, double bin_width,
                                        std::optional<std::pair<double, double>> range = {});

struct SizeRule {
    enum class Kind { median, threshold } kind = Kind::median;
    double threshold = 0.0;

    static SizeRule median() { return {}; }
    static SizeRule at(double value) { return {Kind::threshold, value}; }
    [[nodiscard]] std::string describe() const;
};

struct SizeSplit {
    RatioSample small;
    RatioSample large;
    double cut = 0.0;  // the median or the threshold
    std::vector<std::string> warnings;
};

/// median: small = size <= median (ties at the median go small);
/// threshold(v): small = size < v. Throws Error(dataset) without size values.
SizeSplit split_by_size(const RatioSample& sample, const SizeRule& rule);

struct UTestResult {
    double u_statistic = 0.0;  // U of sample a: pairs (a_i, b_j) with a_i > b_j, ties count 1/2
    double z_value = 0.0;      // negative when a tends to rank below b
    double p_value_two_sided = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Midranks with tie-corrected variance, normal approximation with a 0.5
/// continuity correction. Zero variance (every value equal) gives z = 0,
/// p = 1. Throws Error(insufficient_data) when either sample is empty.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Mean and tie-corrected variance of U under the null, given the pooled sample.
std::pair<double, double> u_null_moments(std::span<const double> a, std::span<const double> b);

struct BayesEstimate {
    double prefactor = 0.0;
    double exponent = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double p_b = 0.0;

    struct Value {
        double probability = 0.0;
        bool clamped = false;       // raw value fell outside [0, 1]
        bool out_of_range = false;  // R outside [r_lo, r_hi]
    };
    /// prefactor * p_b * R^exponent, clamped to [0, 1].
    [[nodiscard]] Value evaluate(double ratio) const;
};

/// P(B|R) = P(R|B) P(B) / P(R) with both conditionals approximated by power
/// laws: exponent = 1/zeta_existing - 1/zeta_bankrupt and prefactor =
/// prefactor_bankrupt / prefactor_existing, valid on the overlap of the two
/// fits' value ranges. Throws Error(range) if they do not overlap and
/// Error(domain) on non-positive zeta or prefactor or p_b outside [0, 1].
BayesEstimate bayes_compose(const fit::PowerLawFit& fit_bankrupt, const fit::PowerLawFit& fit_existing,
                            double prefactor_bankrupt, double prefactor_existing, double p_b);

/// Prefactors taken from two pdf_tail fits. Throws Error(domain) unless both
/// fits are pdf_tail with identical binning.
BayesEstimate bayes_compose(const fit::PowerLawFit& pdf_bankrupt, const fit::PowerLawFit& pdf_existing, double p_b);

/// Records with year in [year_lo, year_hi]. Throws Error(domain) if lo > hi.
firmdata::Dataset period_slice(const firmdata::Dataset& ds, int year_lo, int year_hi);

}  // namespace zipfirm::risk
