#include "zipfirm/riskstats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"

namespace zipfirm::risk {
namespace {

struct RankSums {
    double rank_sum_a = 0.0;
    double tie_term = 0.0;  // sum over tie groups of t^3 - t
};

RankSums rank_sums(std::span<const double> a, std::span<const double> b) {
    struct Obs {
        double value;
        bool from_a;
    };
    std::vector<Obs> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.push_back({v, true});
    for (double v : b) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(), [](const Obs& x, const Obs& y) { return x.value < y.value; });

    RankSums out;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].from_a) out.rank_sum_a += midrank;
        }
        out.tie_term += t * t * t - t;
        i = j;
    }
    return out;
}

}  // namespace

RatioExtraction compute_ratios(const firmdata::Dataset& ds, double truncate_at, RatioSource source) {
    if (!(truncate_at > 0.0)) {
        throw Error(ErrorKind::domain, "compute_ratios: truncate_at must be positive, got " + format_real(truncate_at));
    }
    RatioExtraction out;
    out.sample.source = source;
    std::vector<double> sizes;
    int year_lo = 0, year_hi = 0;
    for (const auto& r : ds.records) {
        const auto ratio = r.leverage();
        if (!ratio) {
            ++out.incomplete;
            continue;
        }
        if (*ratio >= truncate_at) {
            ++out.truncated;
            continue;
        }
        if (out.sample.ratios.empty()) {
            year_lo = year_hi = r.year;
        } else {
            year_lo = std::min(year_lo, r.year);
            year_hi = std::max(year_hi, r.year);
        }
        out.sample.ratios.push_back(*ratio);
        sizes.push_back(*r.petition_assets);
    }
    if (out.sample.ratios.empty()) {
        throw Error(ErrorKind::empty_series, "compute_ratios: no computable ratios (" +
                                                 std::to_string(out.incomplete) + " incomplete, " +
                                                 std::to_string(out.truncated) + " truncated)");
    }
    out.sample.size_values = std::move(sizes);
    out.sample.period = std::pair{year_lo, year_hi};
    return out;
}

std::vector<HistogramBin> histogram_pdf(std::span<const double> values, double bin_width,
                                        std::optional<std::pair<double, double>> range) {
    if (!(bin_width > 0.0)) throw Error(ErrorKind::domain, "histogram: bin width must be positive");
    if (values.empty()) throw Error(ErrorKind::empty_series, "histogram: empty sample");
    double lo = 0.0, hi = 0.0;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(hi > lo)) throw Error(ErrorKind::domain, "histogram: range must satisfy lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = std::floor(*mn / bin_width) * bin_width;
        hi = (std::floor(*mx / bin_width) + 1.0) * bin_width;
    }
    const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-9));
    std::vector<HistogramBin> bins(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        bins[k].lo = lo + static_cast<double>(k) * bin_width;
        bins[k].hi = std::min(lo + static_cast<double>(k + 1) * bin_width, hi);
    }
    for (double v : values) {
        if (v < lo || v >= hi) continue;
        auto k = static_cast<std::size_t>((v - lo) / bin_width);
        if (k >= nbins) k = nbins - 1;
        // Guard against rounding at the edges.
        while (k > 0 && v < bins[k].lo) --k;
        while (k + 1 < nbins && v >= bins[k].hi) ++k;
        ++bins[k].count;
    }
    const auto n = static_cast<double>(values.size());
    for (auto& bin : bins) bin.density = static_cast<double>(bin.count) / (n * (bin.hi - bin.lo));
    return bins;
}

std::string SizeRule::describe() const {
    if (kind == Kind::median) return "median";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, threshold, std::chars_format::fixed);
    return "threshold(" + std::string(buf, res.ptr) + ")";
}

SizeSplit split_by_size(const RatioSample& sample, const SizeRule& rule) {
    if (!sample.size_values || sample.size_values->size() != sample.ratios.size()) {
        throw Error(ErrorKind::dataset, "split_by_size: sample carries no size values");
    }
    const auto& sizes = *sample.size_values;
    SizeSplit out;
    out.small.source = out.large.source = sample.source;
    out.small.period = out.large.period = sample.period;
    out.small.size_values.emplace();
    out.large.size_values.emplace();

    if (rule.kind == SizeRule::Kind::median) {
        if (sizes.empty()) throw Error(ErrorKind::empty_series, "split_by_size: empty sample");
        std::vector<double> sorted(sizes);
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        out.cut = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    } else {
        out.cut = rule.threshold;
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const bool small = rule.kind == SizeRule::Kind::median ? sizes[i] <= out.cut : sizes[i] < out.cut;
        auto& part = small ? out.small : out.large;
        part.ratios.push_back(sample.ratios[i]);
        part.size_values->push_back(sizes[i]);
    }
    if (out.small.ratios.empty()) out.warnings.push_back("split " + rule.describe() + ": small part is empty");
    if (out.large.ratios.empty()) out.warnings.push_back("split " + rule.describe() + ": large part is empty");
    return out;
}

std::pair<double, double> u_null_moments(std::span<const double> a, std::span<const double> b) {
    const auto n1 = static_cast<double>(a.size());
    const auto n2 = static_cast<double>(b.size());
    const double n = n1 + n2;
    const double mean = n1 * n2 / 2.0;
    if (n < 2.0) return {mean, 0.0};
    const double ties = rank_sums(a, b).tie_term;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    return {mean, std::max(var, 0.0)};
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorKind::insufficient_data, "mann_whitney_u: both samples must be non-empty (n1=" +
                                                      std::to_string(a.size()) + ", n2=" + std::to_string(b.size()) + ")");
    }
    UTestResult out;
    out.n1 = a.size();
    out.n2 = b.size();
    const auto n1 = static_cast<double>(out.n1);
    const auto sums = rank_sums(a, b);
    out.u_statistic = sums.rank_sum_a - n1 * (n1 + 1.0) / 2.0;

    const auto [mean, var] = u_null_moments(a, b);
    if (!(var > 0.0)) {
        out.z_value = 0.0;
        out.p_value_two_sided = 1.0;
        return out;
    }
    const double d = out.u_statistic - mean;
    const double corrected = std::max(std::abs(d) - 0.5, 0.0);
    out.z_value = std::copysign(corrected, d) / std::sqrt(var);
    if (corrected == 0.0) out.z_value = 0.0;
    out.p_value_two_sided = std::min(1.0, std::erfc(std::abs(out.z_value) / std::sqrt(2.0)));
    return out;
}

BayesEstimate::Value BayesEstimate::evaluate(double ratio) const {
    Value v;
    const double raw = prefactor * p_b * std::pow(ratio, exponent);
    v.probability = std::clamp(raw, 0.0, 1.0);
    v.clamped = raw != v.probability;
    v.out_of_range = ratio < r_lo || ratio > r_hi;
    return v;
}

BayesEstimate bayes_compose(const fit::PowerLawFit& fit_bankrupt, const fit::PowerLawFit& fit_existing,
                            double prefactor_bankrupt, double prefactor_existing, double p_b) {
    if (!(fit_bankrupt.zeta > 0.0) || !(fit_existing.zeta > 0.0)) {
        throw Error(ErrorKind::domain, "bayes_compose: both fits need zeta > 0");
    }
    if (!(prefactor_bankrupt > 0.0) || !(prefactor_existing > 0.0)) {
        throw Error(ErrorKind::domain, "bayes_compose: prefactors must be positive");
    }
    if (!(p_b >= 0.0 && p_b <= 1.0)) {
        throw Error(ErrorKind::domain, "bayes_compose: P(B) must lie in [0, 1], got " + format_real(p_b));
    }
    BayesEstimate out;
    out.r_lo = std::max(fit_bankrupt.value_lo, fit_existing.value_lo);
    out.r_hi = std::min(fit_bankrupt.value_hi, fit_existing.value_hi);
    if (!(out.r_lo < out.r_hi)) {
        throw Error(ErrorKind::range, "bayes_compose: fit ranges [" + format_real(fit_bankrupt.value_lo) + ", " +
                                          format_real(fit_bankrupt.value_hi) + "] and [" +
                                          format_real(fit_existing.value_lo) + ", " +
                                          format_real(fit_existing.value_hi) + "] do not overlap");
    }
    out.exponent = 1.0 / fit_existing.zeta - 1.0 / fit_bankrupt.zeta;
    out.prefactor = prefactor_bankrupt / prefactor_existing;
    out.p_b = p_b;
    return out;
}

BayesEstimate bayes_compose(const fit::PowerLawFit& pdf_bankrupt, const fit::PowerLawFit& pdf_existing, double p_b) {
    if (pdf_bankrupt.method != fit::Method::pdf_tail || pdf_existing.method != fit::Method::pdf_tail) {
        throw Error(ErrorKind::domain, "bayes_compose: prefactors can only be read off pdf_tail fits");
    }
    if (!pdf_bankrupt.binning || pdf_bankrupt.binning != pdf_existing.binning) {
        throw Error(ErrorKind::domain, "bayes_compose: pdf_tail fits use different binning");
    }
    return bayes_compose(pdf_bankrupt, pdf_existing, pdf_bankrupt.prefactor(), pdf_existing.prefactor(), p_b);
}

firmdata::Dataset period_slice(const firmdata::Dataset& ds, int year_lo, int year_hi) {
    if (year_lo > year_hi) {
        throw Error(ErrorKind::domain, "period_slice: year_lo " + std::to_string(year_lo) + " > year_hi " +
                                           std::to_string(year_hi));
    }
    firmdata::Dataset out;
    out.provenance = ds.provenance;
    std::copy_if(ds.records.begin(), ds.records.end(), std::back_inserter(out.records),
                 [&](const auto& r) { return r.year >= year_lo && r.year <= year_hi; });
    return out;
}

}  // namespace zipfirm::risk
