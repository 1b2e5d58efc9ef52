#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "zipfirm/csv.hpp"
#include "zipfirm/error.hpp"
#include "zipfirm/firmdata.hpp"
#include "zipfirm/json_io.hpp"
#include "zipfirm/riskstats.hpp"
#include "zipfirm/scalefit.hpp"
#include "zipfirm/simonsim.hpp"

namespace py = pybind11;
using namespace zipfirm;

namespace {

fit::RankSeries series_of(const std::vector<double>& values) { return fit::build_rank_series(values).series; }

fit::Method method_of(const std::string& name) {
    const auto m = fit::parse_method(name);
    if (!m) throw py::value_error("unknown method '" + name + "' (ols, gi, pdf, ccdf)");
    return *m;
}

sim::SeriesField field_of(const std::string& name) {
    const auto f = sim::parse_series_field(name);
    if (!f) throw py::value_error("unknown series field '" + name + "'");
    return *f;
}

py::dict as_dict(const json_io::Json& j) {
    return py::module_::import("json").attr("loads")(j.dump()).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simon-model firm simulator and Zipf/Pareto estimators";
#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#endif

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&] { return py::exception<Error>(m, "Error", PyExc_RuntimeError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const auto& type = error_type.get_stored();
            py::object exc = type(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::class_<sim::SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("p", &sim::SimConfig::p)
        .def_readwrite("m", &sim::SimConfig::m)
        .def_readwrite("q", &sim::SimConfig::q)
        .def_readwrite("hazard_exponent", &sim::SimConfig::hazard_exponent)
        .def_readwrite("p_merge", &sim::SimConfig::p_merge)
        .def_readwrite("theta", &sim::SimConfig::theta)
        .def_readwrite("steps", &sim::SimConfig::steps)
        .def_readwrite("seed", &sim::SimConfig::seed)
        .def_property(
            "hazard_mode", [](const sim::SimConfig& c) { return std::string(sim::to_string(c.hazard_mode)); },
            [](sim::SimConfig& c, const std::string& s) {
                const auto mode = sim::parse_hazard_mode(s);
                if (!mode) throw py::value_error("unknown hazard mode '" + s + "'");
                c.hazard_mode = *mode;
            })
        .def_readwrite("merger_drops_debt", &sim::SimConfig::merger_drops_debt)
        .def("validate", &sim::SimConfig::validate);

    py::class_<sim::EconomyState>(m, "Economy")
        .def(py::init(&sim::init), py::arg("config"))
        .def_readonly("config", &sim::EconomyState::config)
        .def_property_readonly("steps_done", [](const sim::EconomyState& s) { return s.clock - 1; })
        .def_property_readonly("firm_count", [](const sim::EconomyState& s) { return s.firms.size(); })
        .def_property_readonly("alive_count", &sim::EconomyState::alive_count)
        .def_property_readonly("bankruptcy_count", [](const sim::EconomyState& s) { return s.bankruptcy_log.size(); })
        .def_property_readonly("merger_count", [](const sim::EconomyState& s) { return s.merger_log.size(); })
        .def("step", [](sim::EconomyState& s) { sim::step(s); })
        .def("advance", &sim::advance, py::arg("count"), py::call_guard<py::gil_scoped_release>())
        .def(
            "series", [](const sim::EconomyState& s, const std::string& f) { return sim::series_values(s, field_of(f)); },
            py::arg("field"), "Raw values of assets, debt, ratio or ratio_bankrupt in firm (or event) order")
        .def("events_tsv", &sim::events_tsv)
        .def("check_invariants", &sim::EconomyState::check_invariants)
        .def("to_snapshot", [](const sim::EconomyState& s) { return sim::to_text(s); })
        .def_static("from_snapshot", [](const std::string& text) { return sim::economy_from_text(text); })
        .def("__eq__", [](const sim::EconomyState& a, const sim::EconomyState& b) { return a == b; });

    m.def("simulate", &sim::run, py::arg("config"), py::call_guard<py::gil_scoped_release>(),
          "Run config.steps steps from the initial single-firm economy");
    m.def("entry_count", &sim::entry_count, py::arg("t"), py::arg("theta"));

    m.def(
        "fit_power_law",
        [](const std::vector<double>& values, const std::string& method, std::optional<double> lo,
           std::optional<double> hi, int bins_per_decade, std::size_t min_count) {
            fit::LogBinning b{bins_per_decade, min_count};
            return as_dict(json_io::to_json(fit::fit_power_law(series_of(values), method_of(method), {lo, hi}, b)));
        },
        py::arg("values"), py::arg("method") = "gi", py::arg("lo") = py::none(), py::arg("hi") = py::none(),
        py::arg("bins_per_decade") = 10, py::arg("min_count") = 3,
        "Fit a power law; lo/hi are ranks for ols and gi, values for pdf and ccdf");
    m.def(
        "detect_crossover",
        [](const std::vector<double>& values, std::size_t min_segment, std::optional<std::size_t> rank_lo,
           std::optional<std::size_t> rank_hi) {
            fit::CrossoverOptions o;
            o.min_segment = min_segment;
            o.rank_lo = rank_lo;
            o.rank_hi = rank_hi;
            return as_dict(json_io::to_json(fit::detect_crossover(series_of(values), o)));
        },
        py::arg("values"), py::arg("min_segment") = 20, py::arg("rank_lo") = py::none(),
        py::arg("rank_hi") = py::none());
    m.def(
        "fit_stretched_exponential",
        [](const std::vector<double>& values, std::optional<std::size_t> rank_hi) {
            return as_dict(json_io::to_json(fit::fit_stretched_exponential(series_of(values), {}, rank_hi)));
        },
        py::arg("values"), py::arg("rank_hi") = py::none());
    m.def(
        "mann_whitney_u",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return as_dict(json_io::to_json(risk::mann_whitney_u(a, b)));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "bayes_compose",
        [](const py::dict& fit_bankrupt, const py::dict& fit_existing, double prefactor_bankrupt,
           double prefactor_existing, double p_b) {
            auto load = [](const py::dict& d) {
                const auto text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
                return json_io::power_law_fit_from_json(json_io::Json::parse(text));
            };
            return as_dict(json_io::to_json(risk::bayes_compose(load(fit_bankrupt), load(fit_existing),
                                                                prefactor_bankrupt, prefactor_existing, p_b)));
        },
        py::arg("fit_bankrupt"), py::arg("fit_existing"), py::arg("prefactor_bankrupt"),
        py::arg("prefactor_existing"), py::arg("p_b"));
    m.def(
        "leverage_ratios",
        [](const std::string& csv_text, double truncate_at) {
            const auto rows = csv::read(csv_text);
            if (rows.empty()) throw Error(ErrorKind::dataset, "CSV input is empty");
            const auto parsed = firmdata::parse_csv(csv_text, firmdata::ColumnMapping::defaults_for(rows.front().fields));
            const auto ex = risk::compute_ratios(parsed.dataset, truncate_at);
            return py::make_tuple(ex.sample.ratios, *ex.sample.size_values);
        },
        py::arg("csv_text"), py::arg("truncate_at") = risk::kDefaultTruncation,
        "(ratios, petition_assets) from CSV text with the default column names");
}
