#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdpa/errors.hpp"
#include "hdpa/experiment.hpp"

namespace py = pybind11;
using namespace hdpa;

namespace {

py::dict point_dict(const AffinePoint& p) {
    py::dict d;
    if (p.infinity) {
        d["infinity"] = true;
        return d;
    }
    d["infinity"] = false;
    d["x"] = p.x.to_hex();
    d["y"] = p.y.to_hex();
    return d;
}

py::dict layout_dict(const std::optional<ScheduleLayout>& l) {
    py::dict d;
    if (!l) return d;
    d["l"] = l->scalar_length;
    d["slots"] = l->slot_count;
    d["init_cycles"] = ScheduleLayout::kInitSlotCycles;
    d["slot_cycles"] = ScheduleLayout::kMainSlotCycles;
    d["postamble_cycles"] = l->postamble_cycles;
    return d;
}

py::dict report_dict(const AttackReport& r) {
    py::list rows;
    for (const auto& c : r.candidates) rows.append(py::make_tuple(c.j, c.score.delta_raw, c.score.delta_folded));
    py::dict d;
    d["candidates"] = rows;
    d["best_j"] = r.best_j;
    d["sorted_folded"] = r.sorted_folded;
    return d;
}

ExperimentConfig config_from(const std::string& scalar, const std::string& plan, const std::string& profile,
                             std::uint64_t seed, std::optional<double> noise) {
    ExperimentConfig cfg;
    cfg.scalar = scalar;
    cfg.plan = plan;
    cfg.profile = profile;
    cfg.seed = seed;
    cfg.noise = noise;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GF(2^233) arithmetic, B-233 Montgomery-ladder power simulation and horizontal DPA";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<PlanError>(m, "PlanError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ZeroDivisionError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.attr("DEFAULT_SCALAR") = kDefaultScalarHex;

    m.def("field_mul", [](const std::string& a, const std::string& b, const std::string& plan) {
        return mul(FieldElement::from_hex(a), FieldElement::from_hex(b), resolve_plan(plan)).to_hex();
    }, py::arg("a"), py::arg("b"), py::arg("plan") = "pm1");
    m.def("field_sqr", [](const std::string& a) { return sqr(FieldElement::from_hex(a)).to_hex(); });
    m.def("field_inv", [](const std::string& a) { return inv(FieldElement::from_hex(a)).to_hex(); });

    m.def("plan_text", [](const std::string& sel) { return resolve_plan(sel).to_string(); });
    m.def("gate_complexity", [](const std::string& sel, bool field) {
        const auto plan = resolve_plan(sel);
        const auto gc = field ? field_gate_complexity(plan) : gate_complexity(plan, kPmWidth);
        return py::make_tuple(gc.and_count, gc.xor_count);
    }, py::arg("plan"), py::arg("field") = false, "(and, xor) at width 59, or for the full field product");

    m.def("kp", [](const std::string& scalar, const std::string& point, const std::string& plan) {
        return point_dict(kp(Scalar::from_hex(scalar), resolve_point(point), resolve_plan(plan)).point);
    }, py::arg("scalar"), py::arg("point") = "base", py::arg("plan") = "pm1");

    m.def("profiles", [] {
        std::vector<std::string> names;
        for (const auto& [name, p] : profile_library()) names.push_back(name);
        return names;
    });

    m.def("simulate_trace", [](const std::string& scalar, const std::string& plan, const std::string& profile,
                               std::uint64_t seed, std::optional<double> noise) {
        const PowerTrace t = make_trace(config_from(scalar, plan, profile, seed, noise));
        return py::make_tuple(t.values, layout_dict(t.layout));
    }, py::arg("scalar") = kDefaultScalarHex, py::arg("plan") = "pm1", py::arg("profile") = "low-bus",
       py::arg("seed") = 0, py::arg("noise") = py::none(), "(values, layout) of a simulated trace");

    m.def("attack", [](const std::vector<double>& values, const std::string& scalar) {
        const Scalar k = Scalar::from_hex(scalar);
        PowerTrace t;
        t.values = values;
        t.layout = layout_of(k);
        return report_dict(run_attack(t, k));
    }, py::arg("values"), py::arg("scalar"), "difference-of-means attack on a trace recorded for `scalar`");

    m.def("sweep", [](const std::string& out, const std::string& scalar, std::uint64_t plan_seed) {
        ExperimentConfig cfg;
        cfg.out = out;
        cfg.scalar = scalar;
        cfg.plan_seed = plan_seed;
        py::gil_scoped_release release;
        const auto r = cmd_sweep(cfg);
        py::gil_scoped_acquire acquire;
        py::list cells;
        for (const auto& c : r.cells) {
            py::dict d;
            d["design"] = c.design;
            d["profile"] = c.profile;
            d["error"] = c.error;
            if (c.report) d["report"] = report_dict(*c.report);
            cells.append(d);
        }
        return cells;
    }, py::arg("out"), py::arg("scalar") = kDefaultScalarHex, py::arg("plan_seed") = 1);
}
