#pragma once

// JSON forms of fit and test results. Every object carries `schema: 1` and a
// `kind` tag; power-law fits are flat objects:
//   {schema, kind: "power_law_fit", method, zeta, zeta_prime, stderr,
//    intercept, n_used, range_lo, range_hi, value_lo, value_hi, n_total,
//    r_squared, ssr [, bins_per_decade, min_count]}

#include <json.hpp>

#include "zipfirm/riskstats.hpp"
#include "zipfirm/scalefit.hpp"

namespace zipfirm::json_io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

Json to_json(const fit::PowerLawFit& fit);
Json to_json(const fit::CrossoverFit& fit);
Json to_json(const fit::StretchedExpFit& fit);
Json to_json(const risk::BayesEstimate& est);
Json to_json(const risk::UTestResult& result);

/// Throws Error(dataset) naming the missing or mistyped key. value_lo and
/// value_hi default to range_lo and range_hi when absent.
fit::PowerLawFit power_law_fit_from_json(const Json& j);

}  // namespace zipfirm::json_io
