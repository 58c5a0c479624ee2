#include "hbubble/harness/json_report.hpp"

#include <algorithm>
#include <cmath>

#include "hbubble/util.hpp"

namespace hbubble::harness {

namespace {

void emit(const Json& j, std::string& out, int indent, int depth) {
    const bool pretty = indent > 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(d * indent), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += pretty ? ": " : ":";
                emit(value, out, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of plain numbers stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += pretty && flat ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                emit(e, out, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format17(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

Json point(const Vec2& p) { return Json::array({number(p.x), number(p.y)}); }

}  // namespace

std::string dump(const Json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    out += '\n';
    return out;
}

std::string dump_line(const Json& j) {
    std::string out;
    emit(j, out, 0, 0);
    out += '\n';
    return out;
}

Json number(double v) { return Json(v); }

Json number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json to_json(const EnergyBreakdown& e) {
    return Json{{"D", e.D},
                {"V_H", e.V_H},
                {"E_H", e.E_H},
                {"D_alpha", number(e.D_alpha)},
                {"E_alpha", number(e.E_alpha)},
                {"grad_sup", e.grad_sup},
                {"defect_energy_identity", e.defect_energy_identity},
                {"defect_conformal", e.defect_conformal},
                {"residual_hsystem", e.residual_hsystem}};
}

Json to_json(const RadialPathProfile& p, bool with_samples) {
    Json j{{"s_bar", number(p.s_bar)},
           {"f_max", number(p.f_max)},
           {"V_at_max", number(p.V_at_max)},
           {"sign_changes", p.sign_changes},
           {"negative_found", p.negative_found},
           {"s0", number(p.s0)},
           {"s_max", p.s_max},
           {"doublings", p.doublings},
           {"unbounded_above", p.unbounded_above},
           {"cubic_leading", number(p.cubic_leading)}};
    if (with_samples) {
        j["s"] = p.s;
        j["f"] = p.f;
        j["df"] = p.df;
    }
    return j;
}

Json to_json(const MountainPassEstimate& e) {
    Json candidates = Json::array();
    for (const auto& c : e.candidates) {
        Json r{{"candidate_id", c.candidate_id},
               {"s_bar", number(c.s_bar)},
               {"f_max", number(c.f_max)},
               {"V_at_max", number(c.V_at_max)},
               {"sign_changes", c.sign_changes}};
        if (c.excluded) r["excluded"] = true;
        if (!c.note.empty()) r["note"] = c.note;
        candidates.push_back(std::move(r));
    }
    Json j{{"field", e.field}};
    if (e.alpha) j["alpha"] = *e.alpha;
    j["candidates"] = std::move(candidates);
    j["summary"] = Json{{"c_estimate", number(e.c_estimate)},
                        {"best_candidate", e.best_candidate},
                        {"upper_bound_4pi", number(e.upper_bound_4pi)},
                        {"star_condition", to_string(e.star_condition)}};
    if (e.upper_bound_4pi && std::isinf(*e.upper_bound_4pi)) j["summary"]["upper_bound_4pi"] = "inf";
    return j;
}

Json to_json(const BoundsReport& b) {
    Json j{{"c_estimate", number(b.c_estimate)},
           {"upper_bound_4pi", number(b.upper_bound_4pi)},
           {"exact_lower", number(b.exact_lower)},
           {"relative_gap", number(b.relative_gap)},
           {"star_condition", to_string(b.star_condition)},
           {"reason", b.reason}};
    if (b.upper_bound_4pi && std::isinf(*b.upper_bound_4pi)) j["upper_bound_4pi"] = "inf";
    return j;
}

Json to_json(const LambdaCheck& c) {
    Json est = Json::array();
    for (const auto& e : c.estimates) est.push_back(number(e));
    return Json{{"lambdas", c.lambdas},
                {"estimates", std::move(est)},
                {"monotone", c.monotone},
                {"worst_violation", c.worst_violation},
                {"gate", c.gate}};
}

Json to_json(const TruncationCheck& c) {
    Json est = Json::array();
    for (const auto& e : c.estimates) est.push_back(number(e));
    Json exceeds = Json::array();
    for (bool b : c.exceeds) exceeds.push_back(b);
    return Json{{"base", number(c.base)},
                {"radii", c.radii},
                {"estimates", std::move(est)},
                {"differences", c.differences},
                {"exceeds", std::move(exceeds)},
                {"limsup_ok", c.limsup_ok}};
}

Json to_json(const LocalMinimumCheck& c) {
    return Json{{"rho", c.rho}, {"scales", c.scales}, {"margins", c.margins}, {"passed", c.passed}};
}

Json to_json(const AlphaSolveState& s) {
    return Json{{"alpha", s.alpha},
                {"status", to_string(s.status)},
                {"converged", s.converged},
                {"energy", s.energy},
                {"grad_norm", s.grad_norm},
                {"residual", s.residual},
                {"grad_l2", s.grad_l2},
                {"grad_sup", s.grad_sup},
                {"sup_norm", s.sup_norm},
                {"iterations", s.iterations},
                {"newton_steps", s.newton_steps},
                {"message", s.message},
                {"grid", s.u.grid ? s.u.grid->dims() : std::string()}};
}

Json to_json(const H1BoundsReport& r) {
    return Json{{"value", r.value},
                {"lower", r.lower},
                {"upper", number(r.upper)},
                {"M_bar", r.M_bar},
                {"S_H", r.S_H},
                {"lower_ok", r.lower_ok},
                {"upper_ok", r.upper_ok},
                {"upper_indeterminate", r.upper_indeterminate},
                {"lower_margin", r.lower_margin},
                {"upper_margin", number(r.upper_margin)},
                {"passed", r.passed()}};
}

Json to_json(const LinftyReport& r) {
    return Json{{"sup_norm", r.sup_norm}, {"H0", r.H0},       {"R0", r.R0},     {"C", r.C},
                {"bound", r.bound},       {"ratio", r.ratio}, {"holds", r.holds}};
}

Json to_json(const LambdaEstimate& e) {
    return Json{{"raw", e.raw},
                {"estimate", e.estimate},
                {"interval", Json::array({e.lo, e.hi})},
                {"degenerate", e.degenerate},
                {"near_one", e.near_one}};
}

Json to_json(const BlowUpRecord& r) {
    Json j{{"alpha", r.alpha},
           {"epsilon", r.epsilon},
           {"z_star", point(r.z_star)},
           {"lambda", r.lambda},
           {"level", r.level},
           {"window_radius", r.window.radius},
           {"clipped", r.window.clipped},
           {"window_dirichlet", r.window_dirichlet},
           {"window_energy", r.window_energy},
           {"residual", r.residual},
           {"conformality", r.conformality}};
    j["checkpoint"] = r.checkpoint.empty() ? Json(nullptr) : Json(r.checkpoint);
    return j;
}

Json to_json(const LimitDiagnostics& d) {
    return Json{{"residual", d.residual},
                {"conformality", d.conformality},
                {"energy_identity", d.energy_identity},
                {"center_gradient", d.center_gradient},
                {"nonconstant", d.nonconstant},
                {"passed", d.passed}};
}

Json to_json(const SemicontinuityReport& r) {
    return Json{{"lambda", r.lambda},
                {"window_energy", r.window_energy},
                {"min_level", r.min_level},
                {"margin", r.margin},
                {"tail_flagged", r.tail_flagged}};
}

Json summary(const BlowUpTrace& t) {
    Json records = Json::array();
    for (const auto& r : t.records) records.push_back(to_json(r));
    Json j{{"records", std::move(records)},
           {"h1_distances", t.h1_distances},
           {"epsilon_nonincreasing", t.epsilon_nonincreasing},
           {"any_clipped", t.any_clipped}};
    j["lambda"] = t.lambda ? to_json(*t.lambda) : Json(nullptr);
    return j;
}

}  // namespace hbubble::harness
