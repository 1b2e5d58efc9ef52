#include "zipfirm/scalefit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "zipfirm/error.hpp"
#include "zipfirm/format.hpp"

namespace zipfirm::fit {
namespace {

struct Ols {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double ssr = 0.0;
    double sst = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Centred two-pass least squares of y on x.
Ols ols(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 3) {
        throw Error(ErrorKind::insufficient_data,
                    "fit: need at least 3 points, got " + std::to_string(n));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::degenerate_fit, "fit: regressor has zero variance");

    Ols r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ssr += e * e;
    }
    r.ssr = ssr;
    r.sst = syy;
    r.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    r.slope_se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    return r;
}

struct RankWindow {
    std::size_t lo;
    std::size_t hi;
};

RankWindow rank_window(const RankSeries& series, const FitRange& range) {
    const auto n = static_cast<double>(series.size());
    const double lo = range.lo.value_or(1.0);
    const double hi = range.hi.value_or(n);
    if (lo > hi || lo != std::floor(lo) || hi != std::floor(hi)) {
        throw Error(ErrorKind::domain,
                    "fit: rank range [" + format_real(lo) + ", " + format_real(hi) + "] is not an integer interval");
    }
    if (lo < 1.0 || hi > n) {
        throw Error(ErrorKind::insufficient_data,
                    "fit: rank range [" + format_real(lo) + ", " + format_real(hi) +
                        "] outside series of length " + std::to_string(series.size()));
    }
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

void require_decay(double exponent, Method method) {
    if (!(exponent > 0.0)) {
        throw Error(ErrorKind::degenerate_fit, "fit: " + std::string(to_string(method)) +
                                                   " slope is not decaying (exponent " +
                                                   format_real(exponent) + ")");
    }
}

void set_from_ols(PowerLawFit& fit, const Ols& r) {
    fit.intercept = r.intercept;
    fit.n_used = r.n;
    fit.r_squared = r.r_squared;
    fit.ssr = r.ssr;
}

}  // namespace

RankSeries RankSeries::from_positive(std::vector<double> values) {
    RankSeries s;
    std::stable_sort(values.begin(), values.end(), std::greater<>{});
    s.values_ = std::move(values);
    return s;
}

RankSeriesBuild build_rank_series(std::span<const double> values) {
    std::vector<double> kept;
    kept.reserve(values.size());
    std::size_t rejected = 0;
    for (double v : values) {
        if (v > 0.0 && std::isfinite(v)) {
            kept.push_back(v);
        } else {
            ++rejected;
        }
    }
    if (kept.empty()) {
        throw Error(ErrorKind::empty_series, "rank series: no positive values (" +
                                                 std::to_string(rejected) + " rejected)");
    }
    return {RankSeries::from_positive(std::move(kept)), rejected};
}

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::ols_zipf: return "ols_zipf";
        case Method::gi_rank_half: return "gi_rank_half";
        case Method::pdf_tail: return "pdf_tail";
        case Method::ccdf: return "ccdf";
    }
    return "ols_zipf";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
    if (text == "ols_zipf" || text == "ols") return Method::ols_zipf;
    if (text == "gi_rank_half" || text == "gi") return Method::gi_rank_half;
    if (text == "pdf_tail" || text == "pdf") return Method::pdf_tail;
    if (text == "ccdf") return Method::ccdf;
    return std::nullopt;
}

double convert_exponent(double zeta) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) {
        throw Error(ErrorKind::domain, "convert_exponent: zeta must be positive, got " + format_real(zeta));
    }
    return 1.0 / zeta;
}

double PowerLawFit::zipf_value(double rank) const {
    switch (method) {
        case Method::ols_zipf:
            return std::exp(intercept - zeta * std::log(rank));
        case Method::gi_rank_half:
            return std::exp((intercept - std::log(rank - 0.5)) / zeta_prime);
        case Method::ccdf:
            return std::exp((intercept - std::log(rank / static_cast<double>(n_total))) / zeta_prime);
        case Method::pdf_tail:
            break;
    }
    // pdf c x^-(zeta'+1) implies P(>x) = (c / zeta') x^-zeta'; invert at rank/n.
    const double c = prefactor() / zeta_prime;
    return std::pow(c * static_cast<double>(n_total) / rank, 1.0 / zeta_prime);
}

double PowerLawFit::prefactor() const { return std::exp(intercept); }

std::vector<LogBin> log_binned_density(const RankSeries& series, double lo, double hi, LogBinning binning) {
    if (!(lo > 0.0) || !(hi > lo)) {
        throw Error(ErrorKind::domain, "pdf_tail: value range must satisfy 0 < lo < hi");
    }
    if (binning.bins_per_decade <= 0) throw Error(ErrorKind::domain, "pdf_tail: bins_per_decade must be positive");
    const double b = binning.bins_per_decade;
    const auto k_lo = static_cast<long>(std::ceil(b * std::log10(lo) - 0.5));
    const auto k_hi = static_cast<long>(std::floor(b * std::log10(hi) - 0.5));
    if (k_hi < k_lo) return {};

    std::vector<std::size_t> counts(static_cast<std::size_t>(k_hi - k_lo + 1), 0);
    for (double v : series.values()) {
        const auto k = static_cast<long>(std::floor(b * std::log10(v)));
        if (k >= k_lo && k <= k_hi) ++counts[static_cast<std::size_t>(k - k_lo)];
    }
    const auto n_total = static_cast<double>(series.size());
    std::vector<LogBin> bins;
    for (long k = k_lo; k <= k_hi; ++k) {
        const std::size_t count = counts[static_cast<std::size_t>(k - k_lo)];
        if (count < binning.min_count) continue;
        LogBin bin;
        bin.lo = std::pow(10.0, static_cast<double>(k) / b);
        bin.hi = std::pow(10.0, static_cast<double>(k + 1) / b);
        bin.center = std::pow(10.0, (static_cast<double>(k) + 0.5) / b);
        bin.count = count;
        bin.density = static_cast<double>(count) / (n_total * (bin.hi - bin.lo));
        bins.push_back(bin);
    }
    return bins;
}

PowerLawFit fit_power_law(const RankSeries& series, Method method, FitRange range, LogBinning binning) {
    if (series.size() == 0) throw Error(ErrorKind::empty_series, "fit: empty series");
    const auto values = series.values();
    PowerLawFit fit;
    fit.method = method;
    fit.n_total = series.size();
    std::vector<double> x, y;

    switch (method) {
        case Method::ols_zipf:
        case Method::gi_rank_half: {
            const auto w = rank_window(series, range);
            for (std::size_t r = w.lo; r <= w.hi; ++r) {
                const double lr = method == Method::ols_zipf ? std::log(static_cast<double>(r))
                                                             : std::log(static_cast<double>(r) - 0.5);
                const double lv = std::log(values[r - 1]);
                x.push_back(method == Method::ols_zipf ? lr : lv);
                y.push_back(method == Method::ols_zipf ? lv : lr);
            }
            const Ols r = ols(x, y);
            set_from_ols(fit, r);
            fit.range_lo = static_cast<double>(w.lo);
            fit.range_hi = static_cast<double>(w.hi);
            fit.value_lo = values[w.hi - 1];
            fit.value_hi = values[w.lo - 1];
            if (method == Method::ols_zipf) {
                fit.zeta = -r.slope;
                require_decay(fit.zeta, method);
                fit.zeta_prime = 1.0 / fit.zeta;
                fit.std_error = r.slope_se;
            } else {
                fit.zeta_prime = -r.slope;
                require_decay(fit.zeta_prime, method);
                fit.zeta = 1.0 / fit.zeta_prime;
                fit.std_error = fit.zeta_prime * std::sqrt(2.0 / static_cast<double>(r.n));
            }
            return fit;
        }
        case Method::ccdf: {
            const double lo = range.lo.value_or(values.back());
            const double hi = range.hi.value_or(values.front());
            const auto n = static_cast<double>(series.size());
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i] < lo || values[i] > hi) continue;
                x.push_back(std::log(values[i]));
                y.push_back(std::log(static_cast<double>(i + 1) / n));
            }
            const Ols r = ols(x, y);
            set_from_ols(fit, r);
            fit.zeta_prime = -r.slope;
            require_decay(fit.zeta_prime, method);
            fit.zeta = 1.0 / fit.zeta_prime;
            fit.std_error = r.slope_se;
            fit.range_lo = fit.value_lo = lo;
            fit.range_hi = fit.value_hi = hi;
            return fit;
        }
        case Method::pdf_tail: {
            const double lo = range.lo.value_or(values.back());
            const double hi = range.hi.value_or(values.front());
            for (const auto& bin : log_binned_density(series, lo, hi, binning)) {
                x.push_back(std::log(bin.center));
                y.push_back(std::log(bin.density));
            }
            const Ols r = ols(x, y);
            set_from_ols(fit, r);
            fit.zeta_prime = -r.slope - 1.0;
            require_decay(fit.zeta_prime, method);
            fit.zeta = 1.0 / fit.zeta_prime;
            fit.std_error = r.slope_se;
            fit.range_lo = fit.value_lo = lo;
            fit.range_hi = fit.value_hi = hi;
            fit.binning = binning;
            return fit;
        }
    }
    throw Error(ErrorKind::domain, "fit: unknown method");
}

double CrossoverFit::improvement_ratio() const noexcept {
    // Residual floor: an rms log-residual of 1e-6 counts as a perfect fit.
    const double floor = 1e-12 * static_cast<double>(fit_I.n_used + fit_II.n_used);
    return (ssr_total + floor) / (ssr_single + floor);
}

CrossoverFit detect_crossover(const RankSeries& series, const CrossoverOptions& options) {
    const std::size_t min_seg = std::max<std::size_t>(options.min_segment, 3);
    const std::size_t lo = options.rank_lo.value_or(1);
    const std::size_t hi = options.rank_hi.value_or(series.size());
    if (lo < 1 || hi > series.size() || lo > hi) {
        throw Error(ErrorKind::insufficient_data, "crossover: rank range outside series");
    }
    const std::size_t n = hi - lo + 1;
    if (n < 2 * min_seg) {
        throw Error(ErrorKind::insufficient_data, "crossover: need at least " + std::to_string(2 * min_seg) +
                                                      " points, got " + std::to_string(n));
    }
    // break b: regime I = [lo, b-1], regime II = [b, hi]
    const std::size_t b_min = lo + min_seg;
    const std::size_t b_max = hi + 1 - min_seg;
    const std::size_t b_lo = std::max(options.break_lo.value_or(b_min), b_min);
    const std::size_t b_hi = std::min(options.break_hi.value_or(b_max), b_max);
    if (b_lo > b_hi) {
        throw Error(ErrorKind::insufficient_data, "crossover: no candidate break leaves " +
                                                      std::to_string(min_seg) + " points per side");
    }

    const auto single = fit_power_law(series, Method::ols_zipf, FitRange::ranks(lo, hi));

    // Prefix sums over shifted coordinates for O(1) segment SSR.
    const auto values = series.values();
    double mx = 0.0, my = 0.0;
    for (std::size_t r = lo; r <= hi; ++r) {
        mx += std::log(static_cast<double>(r));
        my += std::log(values[r - 1]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    std::vector<double> sx(n + 1, 0.0), sy(n + 1, 0.0), sxx(n + 1, 0.0), sxy(n + 1, 0.0), syy(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xv = std::log(static_cast<double>(lo + i)) - mx;
        const double yv = std::log(values[lo + i - 1]) - my;
        sx[i + 1] = sx[i] + xv;
        sy[i + 1] = sy[i] + yv;
        sxx[i + 1] = sxx[i] + xv * xv;
        sxy[i + 1] = sxy[i] + xv * yv;
        syy[i + 1] = syy[i] + yv * yv;
    }
    auto segment_ssr = [&](std::size_t a, std::size_t b) {  // offsets [a, b)
        const auto m = static_cast<double>(b - a);
        const double cx = sx[b] - sx[a], cy = sy[b] - sy[a];
        const double vxx = (sxx[b] - sxx[a]) - cx * cx / m;
        const double vxy = (sxy[b] - sxy[a]) - cx * cy / m;
        const double vyy = (syy[b] - syy[a]) - cy * cy / m;
        return std::max(vyy - vxy * vxy / vxx, 0.0);
    };

    const double sst = syy[n] - sy[n] * sy[n] / static_cast<double>(n);
    const double tie_tol = 1e-10 * std::max(sst, std::numeric_limits<double>::min());
    std::size_t best_b = b_lo;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = b_lo; b <= b_hi; ++b) {
        const std::size_t cut = b - lo;
        const double total = segment_ssr(0, cut) + segment_ssr(cut, n);
        if (total < best - tie_tol) {
            best = total;
            best_b = b;
        }
    }

    CrossoverFit out;
    out.break_rank = best_b;
    out.fit_I = fit_power_law(series, Method::ols_zipf, FitRange::ranks(lo, best_b - 1));
    out.fit_II = fit_power_law(series, Method::ols_zipf, FitRange::ranks(best_b, hi));
    out.ssr_total = out.fit_I.ssr + out.fit_II.ssr;
    out.ssr_single = single.ssr;
    return out;
}

double StretchedExpFit::value(double rank) const { return scale * std::exp(-std::pow(rank, beta) / tau); }

StretchedExpFit fit_stretched_exponential(const RankSeries& series, StretchedExpGrid grid,
                                          std::optional<std::size_t> rank_hi) {
    const std::size_t n = std::min(rank_hi.value_or(series.size()), series.size());
    if (n < 10) {
        throw Error(ErrorKind::insufficient_data,
                    "stretched exponential: need at least 10 points, got " + std::to_string(n));
    }
    if (!(grid.beta_step > 0.0) || !(grid.beta_lo > 0.0) || grid.beta_hi < grid.beta_lo) {
        throw Error(ErrorKind::domain, "stretched exponential: invalid beta grid");
    }
    const auto values = series.values();
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::log(values[i]);

    const auto steps = static_cast<std::size_t>(std::llround((grid.beta_hi - grid.beta_lo) / grid.beta_step));
    StretchedExpFit best;
    best.ssr = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
        const double beta = grid.beta_lo + static_cast<double>(k) * grid.beta_step;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(static_cast<double>(i + 1), beta);
        const Ols r = ols(x, y);
        if (!(r.slope < 0.0)) continue;
        if (r.ssr < best.ssr) {
            best.beta = beta;
            best.tau = -1.0 / r.slope;
            best.scale = std::exp(r.intercept);
            best.ssr = r.ssr;
            best.n_used = n;
        }
    }
    if (!std::isfinite(best.ssr)) {
        throw Error(ErrorKind::degenerate_fit, "stretched exponential: no decaying fit on the beta grid");
    }
    return best;
}

std::string plot_tsv(const RankSeries& series, const PowerLawFit& fit) {
    if (fit.method == Method::pdf_tail) return pdf_plot_tsv(series, fit);
    std::string out = "# rank\tvalue\tfitted_value\n";
    const auto values = series.values();
    for (std::size_t r = 1; r <= values.size(); ++r) {
        const double v = values[r - 1];
        const bool inside = fit.method == Method::ccdf
                                ? (v >= fit.range_lo && v <= fit.range_hi)
                                : (static_cast<double>(r) >= fit.range_lo && static_cast<double>(r) <= fit.range_hi);
        if (!inside) continue;
        out += std::to_string(r) + '\t' + format_real(v) + '\t' +
               format_real(fit.zipf_value(static_cast<double>(r))) + '\n';
    }
    return out;
}

std::string plot_tsv(const RankSeries& series, const StretchedExpFit& fit) {
    std::string out = "# rank\tvalue\tfitted_value\n";
    const auto values = series.values();
    for (std::size_t r = 1; r <= fit.n_used; ++r) {
        out += std::to_string(r) + '\t' + format_real(values[r - 1]) + '\t' +
               format_real(fit.value(static_cast<double>(r))) + '\n';
    }
    return out;
}

std::string plot_tsv(const RankSeries& series, const CrossoverFit& fit) {
    std::string out = "# rank\tvalue\tfitted_value\n";
    const auto values = series.values();
    const auto lo = static_cast<std::size_t>(fit.fit_I.range_lo);
    const auto hi = static_cast<std::size_t>(fit.fit_II.range_hi);
    for (std::size_t r = lo; r <= hi; ++r) {
        const auto& seg = r < fit.break_rank ? fit.fit_I : fit.fit_II;
        out += std::to_string(r) + '\t' + format_real(values[r - 1]) + '\t' +
               format_real(seg.zipf_value(static_cast<double>(r))) + '\n';
    }
    return out;
}

std::string pdf_plot_tsv(const RankSeries& series, const PowerLawFit& fit) {
    std::string out = "# bin_center\tdensity\tfitted_density\n";
    for (const auto& bin : log_binned_density(series, fit.range_lo, fit.range_hi, fit.binning.value_or(LogBinning{}))) {
        const double fitted = fit.prefactor() * std::pow(bin.center, -(fit.zeta_prime + 1.0));
        out += format_real(bin.center) + '\t' + format_real(bin.density) + '\t' + format_real(fitted) + '\n';
    }
    return out;
}

}  // namespace zipfirm::fit
