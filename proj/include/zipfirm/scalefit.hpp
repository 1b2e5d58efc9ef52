#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zipfirm::fit {

/// Values sorted descending; the rank of values[i] is i + 1.
class RankSeries {
public:
    RankSeries() = default;

    /// Takes values that are already positive; sorts them (stable, descending).
    static RankSeries from_positive(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double at_rank(std::size_t rank) const { return values_.at(rank - 1); }

    friend bool operator==(const RankSeries&, const RankSeries&) = default;

private:
    std::vector<double> values_;
};

struct RankSeriesBuild {
    RankSeries series;
    std::size_t rejected = 0;  // non-positive or non-finite inputs dropped
};

/// Throws Error(empty_series) when no input value is positive.
RankSeriesBuild build_rank_series(std::span<const double> values);

enum class Method { ols_zipf, gi_rank_half, pdf_tail, ccdf };

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;

/// Inclusive bounds. For ols_zipf and gi_rank_half they are ranks (1-based);
/// for pdf_tail and ccdf they are values. Unset bounds default to the full
/// series.
struct FitRange {
    std::optional<double> lo;
    std::optional<double> hi;

    static FitRange ranks(std::size_t lo, std::size_t hi) {
        return {static_cast<double>(lo), static_cast<double>(hi)};
    }
    static FitRange top(std::size_t n) { return ranks(1, n); }
    static FitRange values(double lo, double hi) { return {lo, hi}; }
};

/// Logarithmic binning used by pdf_tail. Bin edges are anchored at 1 and lie
/// at 10^(k / bins_per_decade); a bin participates when its geometric centre
/// lies inside the fit range and it holds at least min_count samples.
/// Densities are count / (n_total * width).
struct LogBinning {
    int bins_per_decade = 10;
    std::size_t min_count = 3;

    friend bool operator==(const LogBinning&, const LogBinning&) = default;
};

struct PowerLawFit {
    Method method = Method::ols_zipf;
    double zeta = 0.0;        // Zipf-plot slope magnitude
    double zeta_prime = 0.0;  // tail exponent, 1 / zeta
    double intercept = 0.0;   // natural-log intercept of the regression line
    double std_error = 0.0;   // standard error of the exponent the method estimates
                              // directly: zeta for ols_zipf, zeta_prime otherwise
    std::size_t n_used = 0;   // regression points (bins for pdf_tail)
    std::size_t n_total = 0;  // size of the series the fit was taken from
    double range_lo = 0.0;    // requested range, in rank or value space
    double range_hi = 0.0;
    double value_lo = 0.0;    // smallest / largest sample value covered
    double value_hi = 0.0;
    double r_squared = 0.0;
    double ssr = 0.0;         // residual sum of squares in log space
    std::optional<LogBinning> binning;  // pdf_tail only

    /// Fitted value at rank r on the Zipf plot, c r^-zeta (rank methods).
    [[nodiscard]] double zipf_value(double rank) const;
    /// exp(intercept): pdf prefactor for pdf_tail fits.
    [[nodiscard]] double prefactor() const;
};

/// Tail exponent from a Zipf slope, 1 / zeta. Throws Error(domain) for zeta <= 0.
double convert_exponent(double zeta);

/// Fit a power law.
///   ols_zipf      log value on log rank; zeta = -slope; stderr = OLS slope SE
///   gi_rank_half  log(rank - 1/2) on log value; zeta' = -slope;
///                 stderr = zeta' sqrt(2 / n)
///   pdf_tail      log-binned density on log value; zeta' = -slope - 1
///   ccdf          log(rank / n) on log value; zeta' = -slope
/// Throws Error(insufficient_data) for fewer than three regression points or
/// a rank range beyond the series, Error(domain) for an inverted or
/// non-integer rank range, and Error(degenerate_fit) for zero regressor
/// variance or a non-decaying slope.
PowerLawFit fit_power_law(const RankSeries& series, Method method, FitRange range = {},
                          LogBinning binning = {});

struct LogBin {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;  // geometric
    std::size_t count = 0;
    double density = 0.0;
};

/// Bins used (after the min_count filter) by pdf_tail over [lo, hi].
std::vector<LogBin> log_binned_density(const RankSeries& series, double lo, double hi,
                                       LogBinning binning = {});

struct CrossoverFit {
    std::size_t break_rank = 0;  // first rank of regime II
    PowerLawFit fit_I;           // ranks [lo, break_rank - 1]
    PowerLawFit fit_II;          // ranks [break_rank, hi]
    double ssr_total = 0.0;
    double ssr_single = 0.0;

    /// ssr_total / ssr_single; 1 when the single fit has no residual at all.
    [[nodiscard]] double improvement_ratio() const noexcept;
};

struct CrossoverOptions {
    std::size_t min_segment = 20;
    /// Analysed rank range; defaults to the full series.
    std::optional<std::size_t> rank_lo;
    std::optional<std::size_t> rank_hi;
    /// Candidate break ranks; default every break leaving min_segment points
    /// on both sides.
    std::optional<std::size_t> break_lo;
    std::optional<std::size_t> break_hi;
};

/// Exhaustive two-regime ols_zipf scan; the lowest total SSR wins, ties (to
/// within 1e-12 of the single-fit total sum of squares) go to the smaller
/// break rank.
CrossoverFit detect_crossover(const RankSeries& series, const CrossoverOptions& options = {});

struct StretchedExpFit {
    double beta = 0.0;
    double tau = 0.0;
    double scale = 0.0;
    double ssr = 0.0;  // in log space
    std::size_t n_used = 0;

    /// scale * exp(-r^beta / tau)
    [[nodiscard]] double value(double rank) const;
};

struct StretchedExpGrid {
    double beta_lo = 0.10;
    double beta_hi = 1.50;
    double beta_step = 0.01;
};

/// For each beta on the grid, regress log value on r^beta; tau = -1/slope,
/// scale = exp(intercept). Returns the SSR minimiser over betas that give a
/// decaying fit. Throws Error(insufficient_data) for fewer than 10 points.
StretchedExpFit fit_stretched_exponential(const RankSeries& series, StretchedExpGrid grid = {},
                                          std::optional<std::size_t> rank_hi = {});

/// `# rank<TAB>value<TAB>fitted_value` followed by one line per rank in the
/// fit's rank range (ols_zipf / gi_rank_half) or in its value range (ccdf,
/// fitted value read off the tail law).
std::string plot_tsv(const RankSeries& series, const PowerLawFit& fit);
std::string plot_tsv(const RankSeries& series, const StretchedExpFit& fit);
std::string plot_tsv(const RankSeries& series, const CrossoverFit& fit);
/// `# bin_center<TAB>density<TAB>fitted_density` for pdf_tail fits.
std::string pdf_plot_tsv(const RankSeries& series, const PowerLawFit& fit);

}  // namespace zipfirm::fit
