#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "alueroth/constraints.hpp"
#include "alueroth/dimension.hpp"
#include "alueroth/partition.hpp"
#include "alueroth/sequence.hpp"

namespace alueroth {

using json = nlohmann::ordered_json;

// ---- partition specs -------------------------------------------------------

inline json to_json(const psi_spec& psi)
{
    switch (psi.kind) {
    case psi_kind::constant:
        return {{"type", "constant"}, {"c", psi.c}};
    case psi_kind::log_power:
        return {{"type", "log-power"}, {"beta", psi.beta}};
    case psi_kind::reciprocal_log:
        return {{"type", "reciprocal-log"}};
    }
    throw std::logic_error("psi_spec: unknown kind");
}

inline psi_spec psi_from_json(const json& j)
{
    psi_spec psi;
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        psi.kind = psi_kind::constant;
        psi.c = j.value("c", 1.0);
    } else if (type == "log-power") {
        psi.kind = psi_kind::log_power;
        psi.beta = j.at("beta").get<double>();
    } else if (type == "reciprocal-log") {
        psi.kind = psi_kind::reciprocal_log;
    } else {
        throw std::invalid_argument("psi: unknown type '" + type + "'");
    }
    return psi;
}

inline json to_json(const partition_spec& spec)
{
    switch (spec.kind) {
    case partition_kind::classical:
        return {{"kind", "classical"}, {"precision_bits", spec.precision_bits}};
    case partition_kind::power:
        return {{"kind", "power"},
                {"theta", spec.theta},
                {"psi", to_json(spec.psi)},
                {"precision_bits", spec.precision_bits}};
    case partition_kind::custom_table:
        return {{"kind", "custom-table"},
                {"table", spec.table},
                {"precision_bits", spec.precision_bits}};
    }
    throw std::logic_error("partition_spec: unknown kind");
}

inline partition_spec partition_spec_from_json(const json& j)
{
    partition_spec spec;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "classical") {
        spec = partition_spec::classical();
    } else if (kind == "power") {
        spec.kind = partition_kind::power;
        spec.theta = j.at("theta").get<double>();
        spec.psi = j.contains("psi") ? psi_from_json(j.at("psi")) : psi_spec{};
    } else if (kind == "custom-table") {
        spec.kind = partition_kind::custom_table;
        spec.table = j.at("table").get<std::vector<double>>();
    } else {
        throw std::invalid_argument("partition: unknown kind '" + kind + "'");
    }
    spec.precision_bits = j.value("precision_bits", 128);
    return spec;
}

// ---- sequences and models --------------------------------------------------

inline json to_json(const sequence_spec& s)
{
    switch (s.kind) {
    case sequence_kind::geometric:
        return {{"kind", "geometric"}, {"base", s.base}};
    case sequence_kind::doubly_exponential:
        return {{"kind", "doubly-exponential"}, {"base", s.base}};
    case sequence_kind::linear:
        return {{"kind", "linear"}, {"c", s.offset}};
    case sequence_kind::custom:
        return {{"kind", "custom"}, {"values", s.values}};
    }
    throw std::logic_error("sequence_spec: unknown kind");
}

inline sequence_spec sequence_from_json(const json& j)
{
    sequence_spec s;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "geometric") {
        s.kind = sequence_kind::geometric;
        s.base = j.at("base").get<std::uint64_t>();
    } else if (kind == "doubly-exponential") {
        s.kind = sequence_kind::doubly_exponential;
        s.base = j.at("base").get<std::uint64_t>();
    } else if (kind == "linear") {
        s.kind = sequence_kind::linear;
        s.offset = j.value("c", std::uint64_t(0));
    } else if (kind == "custom") {
        s.kind = sequence_kind::custom;
        s.values = j.at("values").get<std::vector<std::uint64_t>>();
    } else {
        throw std::invalid_argument("sequence: unknown kind '" + kind + "'");
    }
    s.validate();
    return s;
}

inline json to_json(const constraint_model& m)
{
    switch (m.kind()) {
    case model_kind::good_set: {
        json j = {{"kind", "goodset"}, {"N", m.threshold()}};
        if (m.free_prefix_end() > 1)
            j["n0"] = m.free_prefix_end();
        if (m.sample_cap())
            j["cap"] = *m.sample_cap();
        return j;
    }
    case model_kind::good_band:
        return {{"kind", "goodband"}, {"N", m.threshold()}, {"M", m.band_top()}};
    case model_kind::envelope: {
        json j = {{"kind", "envelope"}, {"eps", m.envelope_eps()}};
        if (m.envelope_f_table().empty())
            j["c"] = m.envelope_f_offset();
        else
            j["f"] = m.envelope_f_table();
        return j;
    }
    case model_kind::jarnik:
        return {{"kind", "jarnik"}, {"s", to_json(m.sequence())}, {"N", m.threshold()}};
    }
    throw std::logic_error("constraint_model: unknown kind");
}

/// Builds a model from its JSON spec.  Envelope models derive their digit
/// floor from the partition, which is why one is required here.
template <class Real>
constraint_model model_from_json(const json& j, const partition<Real>& p)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "goodset") {
        std::optional<index_t> cap;
        if (j.contains("cap"))
            cap = j.at("cap").get<index_t>();
        return constraint_model::good_set(j.at("N").get<index_t>(),
                                          j.value("n0", index_t(1)), cap);
    }
    if (kind == "goodband") {
        index_t n = j.at("N").get<index_t>();
        const auto& m = j.at("M");
        if (m.is_string() && m.get<std::string>() == "minimal")
            return constraint_model::good_band_minimal(n);
        return constraint_model::good_band(n, m.get<index_t>());
    }
    if (kind == "envelope") {
        if (j.contains("f"))
            return constraint_model::envelope_custom_f(
                j.at("f").get<std::vector<index_t>>(), j.value("eps", 0.0));
        std::optional<index_t> c;
        if (j.contains("c"))
            c = j.at("c").get<index_t>();
        return constraint_model::envelope(p, j.at("eps").get<double>(), c);
    }
    if (kind == "jarnik")
        return constraint_model::jarnik(sequence_from_json(j.at("s")),
                                        j.at("N").get<index_t>());
    throw std::invalid_argument("model: unknown kind '" + kind + "'");
}

// ---- results ----------------------------------------------------------------

inline json to_json(const dimension_estimate& e)
{
    json j = {{"s_star", e.s_star},
              {"bracket", {e.s_lo, e.s_hi}},
              {"level", e.level},
              {"level_log_factors", e.level_log_factors},
              {"ambiguous", e.ambiguous}};
    if (e.theory) {
        j["theory"] = *e.theory;
        j["theory_approximate"] = e.theory_approximate;
        j["gap"] = e.s_star - *e.theory;
    }
    return j;
}

inline json to_json(const sigma_report& r, bool with_rows = true)
{
    json j = {{"theta", r.theta},
              {"eps", r.eps},
              {"horizon", r.horizon},
              {"sigma", r.sigma},
              {"tau", r.tau},
              {"analytic", r.analytic},
              {"sigma_tail", r.sigma_tail},
              {"tau_tail", r.tau_tail}};
    if (r.eps > 0) {
        j["sigma_minus"] = r.sigma_minus;
        j["sigma_plus"] = r.sigma_plus;
    }
    if (with_rows) {
        json rows = json::array();
        for (const auto& row : r.rows)
            rows.push_back({{"n", row.n},
                            {"log_prod", row.log_prod},
                            {"quotient", row.quotient},
                            {"tau_n", row.tau_n},
                            {"defined", row.defined}});
        j["rows"] = rows;
    }
    return j;
}

}  // namespace alueroth
