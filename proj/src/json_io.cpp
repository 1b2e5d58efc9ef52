#include "zipfirm/json_io.hpp"

#include "zipfirm/error.hpp"

namespace zipfirm::json_io {
namespace {

double number(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw Error(ErrorKind::dataset, std::string("fit json: missing numeric key '") + key + "'");
    }
    return it->get<double>();
}

}  // namespace

Json to_json(const fit::PowerLawFit& fit) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = "power_law_fit";
    j["method"] = std::string(fit::to_string(fit.method));
    j["zeta"] = fit.zeta;
    j["zeta_prime"] = fit.zeta_prime;
    j["stderr"] = fit.std_error;
    j["intercept"] = fit.intercept;
    j["n_used"] = fit.n_used;
    j["range_lo"] = fit.range_lo;
    j["range_hi"] = fit.range_hi;
    j["value_lo"] = fit.value_lo;
    j["value_hi"] = fit.value_hi;
    j["n_total"] = fit.n_total;
    j["r_squared"] = fit.r_squared;
    j["ssr"] = fit.ssr;
    if (fit.binning) {
        j["bins_per_decade"] = fit.binning->bins_per_decade;
        j["min_count"] = fit.binning->min_count;
    }
    return j;
}

Json to_json(const fit::CrossoverFit& fit) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = "crossover_fit";
    j["break_rank"] = fit.break_rank;
    j["ssr_total"] = fit.ssr_total;
    j["ssr_single"] = fit.ssr_single;
    j["improvement_ratio"] = fit.improvement_ratio();
    j["fit_I"] = to_json(fit.fit_I);
    j["fit_II"] = to_json(fit.fit_II);
    return j;
}

Json to_json(const fit::StretchedExpFit& fit) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = "stretched_exp_fit";
    j["beta"] = fit.beta;
    j["tau"] = fit.tau;
    j["scale"] = fit.scale;
    j["ssr"] = fit.ssr;
    j["n_used"] = fit.n_used;
    return j;
}

Json to_json(const risk::BayesEstimate& est) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = "bayes_estimate";
    j["prefactor"] = est.prefactor;
    j["exponent"] = est.exponent;
    j["p_b"] = est.p_b;
    j["r_lo"] = est.r_lo;
    j["r_hi"] = est.r_hi;
    return j;
}

Json to_json(const risk::UTestResult& result) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = "u_test";
    j["u_statistic"] = result.u_statistic;
    j["z_value"] = result.z_value;
    j["p_value_two_sided"] = result.p_value_two_sided;
    j["n1"] = result.n1;
    j["n2"] = result.n2;
    return j;
}

fit::PowerLawFit power_law_fit_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorKind::dataset, "fit json: expected an object");
    fit::PowerLawFit fit;
    auto method_it = j.find("method");
    if (method_it == j.end() || !method_it->is_string()) {
        throw Error(ErrorKind::dataset, "fit json: missing string key 'method'");
    }
    auto method = fit::parse_method(method_it->get<std::string>());
    if (!method) throw Error(ErrorKind::dataset, "fit json: unknown method '" + method_it->get<std::string>() + "'");
    fit.method = *method;
    fit.zeta = number(j, "zeta");
    fit.zeta_prime = number(j, "zeta_prime");
    fit.std_error = number(j, "stderr");
    fit.intercept = number(j, "intercept");
    fit.n_used = static_cast<std::size_t>(number(j, "n_used"));
    fit.range_lo = number(j, "range_lo");
    fit.range_hi = number(j, "range_hi");
    fit.value_lo = j.contains("value_lo") ? number(j, "value_lo") : fit.range_lo;
    fit.value_hi = j.contains("value_hi") ? number(j, "value_hi") : fit.range_hi;
    if (j.contains("n_total")) fit.n_total = static_cast<std::size_t>(number(j, "n_total"));
    if (j.contains("r_squared")) fit.r_squared = number(j, "r_squared");
    if (j.contains("ssr")) fit.ssr = number(j, "ssr");
    if (j.contains("bins_per_decade")) {
        fit::LogBinning b;
        b.bins_per_decade = static_cast<int>(number(j, "bins_per_decade"));
        if (j.contains("min_count")) b.min_count = static_cast<std::size_t>(number(j, "min_count"));
        fit.binning = b;
    }
    return fit;
}

}  // namespace zipfirm::json_io
