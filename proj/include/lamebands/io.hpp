#ifndef LAMEBANDS_IO_HPP
#define LAMEBANDS_IO_HPP

#include <charconv>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamebands/catalog.hpp"
#include "lamebands/floquet.hpp"
#include "lamebands/potential.hpp"
#include "lamebands/relations.hpp"

namespace lamebands {

using Json = nlohmann::ordered_json;

/// Shortest locale-independent decimal representation, capped at 15
/// significant digits; the CSV and JSON writers share it so identical runs
/// emit identical bytes.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw std::invalid_argument("potential spec: unknown field \"" + item.key() + "\"");
    for (const auto& k : required)
        if (!j.contains(k))
            throw std::invalid_argument("potential spec: missing required field \"" + k + "\"");
}

inline double number_field(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw std::invalid_argument("potential spec: field \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline int int_field(const Json& j, const std::string& key) {
    if (!j.at(key).is_number_integer())
        throw std::invalid_argument("potential spec: field \"" + key + "\" must be an integer");
    return j.at(key).get<int>();
}

}  // namespace detail

namespace detail {
inline PotentialSpec parse_spec(const Json& j);
}

/// Parse a potential spec from its JSON document. Unknown fields are
/// rejected; composite families carry their base potential in "inner".
inline PotentialSpec spec_from_json(const Json& j) {
    try {
        return detail::parse_spec(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("potential spec: ") + e.what());
    }
}

namespace detail {

inline PotentialSpec parse_spec(const Json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw std::invalid_argument("potential spec: expected an object with a \"family\" string");
    const std::string family = j.at("family").get<std::string>();
    const double shift = detail::number_field(j, "shift", 0.0);
    const double translate = detail::number_field(j, "translate", 0.0);

    if (family == "lame") {
        detail::require_keys(j, {"family", "a", "m", "shift", "translate"}, {"a", "m"});
        return spec::lame(j.at("a").get<double>(), j.at("m").get<double>(), shift, translate);
    }
    if (family == "assoc_lame") {
        detail::require_keys(j, {"family", "a", "b", "m", "shift", "translate"}, {"a", "b", "m"});
        return spec::assoc_lame(j.at("a").get<double>(), j.at("b").get<double>(),
                                j.at("m").get<double>(), shift, translate);
    }
    if (family == "superposed_lame") {
        detail::require_keys(j, {"family", "a", "p", "m", "shift", "translate"}, {"a", "p", "m"});
        return spec::superposed_lame(j.at("a").get<double>(), detail::int_field(j, "p"),
                                     j.at("m").get<double>(), shift, translate);
    }
    if (family == "superposed_assoc_lame") {
        detail::require_keys(j, {"family", "a", "b", "p", "m", "shift", "translate"},
                             {"a", "b", "p", "m"});
        return spec::superposed_assoc_lame(j.at("a").get<double>(), j.at("b").get<double>(),
                                           detail::int_field(j, "p"), j.at("m").get<double>(), shift,
                                           translate);
    }
    if (family == "dsg") {
        detail::require_keys(j, {"family", "a", "b", "shift", "translate"}, {"a", "b"});
        return spec::dsg(j.at("a").get<double>(), j.at("b").get<double>(), shift, translate);
    }
    if (family == "pt") {
        detail::require_keys(j, {"family", "beta", "inner", "shift", "translate"},
                             {"beta", "inner"});
        return spec::pt(spec_from_json(j.at("inner")), j.at("beta").get<double>(), shift, translate);
    }
    if (family == "susy_partner") {
        detail::require_keys(j, {"family", "inner", "shift", "translate"}, {"inner"});
        return spec::susy_partner(spec_from_json(j.at("inner")), shift, translate);
    }
    throw std::invalid_argument("potential spec: unknown family \"" + family + "\"");
}

}  // namespace detail

inline PotentialSpec spec_from_json_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("potential spec: JSON parse error: ") + e.what());
    }
    return spec_from_json(j);
}

/// Canonical JSON form of a spec; re-parsing reproduces the spec exactly.
inline Json spec_to_json(const PotentialSpec& s) {
    Json j;
    std::visit(
        [&](const auto& fam) {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Lame>) {
                j["family"] = "lame";
                j["a"] = fam.a;
                j["m"] = s.m.m();
            } else if constexpr (std::is_same_v<F, AssocLame>) {
                j["family"] = "assoc_lame";
                j["a"] = fam.a;
                j["b"] = fam.b;
                j["m"] = s.m.m();
            } else if constexpr (std::is_same_v<F, SuperposedLame>) {
                j["family"] = "superposed_lame";
                j["a"] = fam.a;
                j["p"] = fam.p;
                j["m"] = s.m.m();
            } else if constexpr (std::is_same_v<F, SuperposedAssocLame>) {
                j["family"] = "superposed_assoc_lame";
                j["a"] = fam.a;
                j["b"] = fam.b;
                j["p"] = fam.p;
                j["m"] = s.m.m();
            } else if constexpr (std::is_same_v<F, DoubleSineGordon>) {
                j["family"] = "dsg";
                j["a"] = fam.a;
                j["b"] = fam.b_strength;
            } else if constexpr (std::is_same_v<F, PtTransform>) {
                j["family"] = "pt";
                j["beta"] = fam.beta;
                j["inner"] = spec_to_json(*fam.inner);
            } else if constexpr (std::is_same_v<F, SusyPartner>) {
                j["family"] = "susy_partner";
                j["inner"] = spec_to_json(*fam.inner);
            }
        },
        s.family);
    j["shift"] = s.energy_shift;
    j["translate"] = s.translation;
    return j;
}

/// Discriminant scan rows as CSV with columns e, re_delta, im_delta.
inline std::string scan_to_csv(const std::vector<std::pair<double, Complex>>& scan) {
    std::string out = "e,re_delta,im_delta\n";
    for (const auto& [e, d] : scan)
        out += format_double(e) + "," + format_double(d.real()) + "," + format_double(d.imag()) +
               "\n";
    return out;
}

inline Json relation_report_to_json(const RelationReport& r) {
    Json j;
    j["relation"] = relation_name(r.id);
    Json inputs;
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    j["inputs"] = inputs;
    j["max_abs_error"] = r.max_abs_error;
    j["tol"] = r.tol;
    j["passed"] = r.passed;
    return j;
}

inline Json numeric_edge_to_json(const NumericBandEdge& e) {
    Json j;
    j["energy"] = e.energy;
    j["edge_type"] = e.edge_type == EdgeType::periodic ? "periodic" : "antiperiodic";
    j["degenerate"] = e.degenerate;
    if (e.nodes) j["nodes"] = *e.nodes;
    if (e.warning) j["warning"] = *e.warning;
    return j;
}

inline Json band_edge_to_json(const BandEdge& e) {
    Json j;
    j["energy"] = e.energy;
    j["raw_energy"] = e.raw_energy;
    j["periodicity"] = e.periodicity == Periodicity::same_as_l ? "L" : "2L";
    if (e.nodes) j["nodes"] = *e.nodes;
    j["provenance"] = e.provenance == Provenance::analytic ? "analytic" : "numeric";
    if (e.unusual) j["unusual"] = true;
    return j;
}

}  // namespace lamebands

#endif
