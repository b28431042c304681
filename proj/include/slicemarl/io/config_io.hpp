#ifndef SLICEMARL_IO_CONFIG_IO_HPP
#define SLICEMARL_IO_CONFIG_IO_HPP

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slicemarl/harness/experiment.hpp"
#include "slicemarl/io/error.hpp"

namespace slicemarl::io {

namespace detail {

using Json = nlohmann::json;

template <typename S>
struct Field {
    const char* key;
    std::variant<double S::*, int S::*, bool S::*> member;
};

inline const std::vector<Field<NetworkConfig>>& network_fields() {
    using N = NetworkConfig;
    static const std::vector<Field<N>> f{
        {"cell_radius_m", &N::cell_radius_m},
        {"min_distance_m", &N::min_distance_m},
        {"bandwidth_hz", &N::bandwidth_hz},
        {"num_rbgs", &N::num_rbgs},
        {"tti_s", &N::tti_s},
        {"num_urllc_ue", &N::num_urllc_ue},
        {"num_embb_ue", &N::num_embb_ue},
        {"total_tx_power_dbm", &N::total_tx_power_dbm},
        {"noise_density_dbm_hz", &N::noise_density_dbm_hz},
        {"bler", &N::bler},
        {"harq_rtt_ttis", &N::harq_rtt_ttis},
        {"urllc_packet_bits", &N::urllc_packet_bits},
        {"embb_packet_bits", &N::embb_packet_bits},
        {"urllc_load_mbps", &N::urllc_load_mbps},
        {"embb_load_mbps", &N::embb_load_mbps},
        {"d_tar_s", &N::d_tar_s},
        {"fading_enabled", &N::fading_enabled},
        {"max_queue_packets", &N::max_queue_packets},
        {"edge_delay_enabled", &N::edge_delay_enabled},
        {"mec_capacity_cycles_s", &N::mec_capacity_cycles_s},
        {"compute_fraction", &N::compute_fraction},
        {"compute_cycles_per_packet", &N::compute_cycles_per_packet},
    };
    return f;
}

inline const std::vector<Field<LearnerConfig>>& learner_fields() {
    using L = LearnerConfig;
    static const std::vector<Field<L>> f{
        {"alpha", &L::alpha},     {"gamma", &L::gamma},
        {"epsilon", &L::epsilon}, {"n_step", &L::n_step},
        {"epsilon_decay", &L::epsilon_decay}, {"epsilon_min", &L::epsilon_min},
    };
    return f;
}

inline const std::vector<Field<ExperimentConfig>>& run_fields() {
    using E = ExperimentConfig;
    static const std::vector<Field<E>> f{
        {"episodes", &E::episodes},
        {"ttis_per_episode", &E::ttis_per_episode},
        {"decision_interval_ttis", &E::decision_interval_ttis},
    };
    return f;
}

inline Error type_error(const std::string& key, const char* want) {
    return Error(ErrorKind::Constraint, key, key + ": must be " + want);
}

template <typename S>
void read_field(const Json& v, const Field<S>& f, S& out, const std::string& key) {
    std::visit(
        [&](auto member) {
            using T = std::remove_reference_t<decltype(out.*member)>;
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw type_error(key, "a boolean");
                out.*member = v.get<bool>();
            } else if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw type_error(key, "an integer");
                const auto x = v.get<std::int64_t>();
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    throw type_error(key, "a 32-bit integer");
                out.*member = static_cast<int>(x);
            } else {
                if (!v.is_number()) throw type_error(key, "a number");
                out.*member = v.get<double>();
            }
        },
        f.member);
}

template <typename S>
void write_field(Json& j, const Field<S>& f, const S& in) {
    std::visit([&](auto member) { j[f.key] = in.*member; }, f.member);
}

template <typename S>
void read_section(const Json& doc, const char* section, const std::vector<Field<S>>& fields, S& out,
                  const std::vector<std::string>& extra = {}) {
    if (!doc.contains(section)) return;
    const Json& sec = doc.at(section);
    if (!sec.is_object()) throw type_error(section, "an object");
    for (const auto& [k, v] : sec.items()) {
        const std::string key = std::string(section) + "." + k;
        bool known = false;
        for (const auto& f : fields) {
            if (k == f.key) {
                read_field(v, f, out, key);
                known = true;
                break;
            }
        }
        for (const auto& e : extra) known = known || k == e;
        if (!known) throw Error(ErrorKind::UnknownKey, key, "unknown key " + key);
    }
}

template <typename Fn>
void prefixed(const char* section, Fn&& fn) {
    try {
        fn();
    } catch (const ConstraintError& e) {
        const std::string key = std::string(section) + "." + e.key();
        throw Error(ErrorKind::Constraint, key, std::string(section) + "." + e.what());
    }
}

inline bool blank(const std::string& s) {
    for (unsigned char c : s)
        if (!std::isspace(c)) return false;
    return true;
}

} // namespace detail

/// Builds a validated config from a JSON document with optional sections
/// `network`, `learner` and `run`. Absent keys keep their defaults; a blank
/// document yields the default scenario.
inline ExperimentConfig config_from_string(const std::string& text) {
    using detail::Json;
    ExperimentConfig cfg;
    if (detail::blank(text)) return cfg;

    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Malformed, "", std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Malformed, "", "config must be a JSON object");
    for (const auto& [k, v] : doc.items())
        if (k != "network" && k != "learner" && k != "run")
            throw Error(ErrorKind::UnknownKey, k, "unknown key " + k);

    detail::read_section(doc, "network", detail::network_fields(), cfg.network);
    detail::read_section(doc, "learner", detail::learner_fields(), cfg.learner);
    detail::read_section(doc, "run", detail::run_fields(), cfg, {"algorithm", "seed"});

    if (doc.contains("run")) {
        const Json& run = doc.at("run");
        if (run.contains("algorithm")) {
            const Json& a = run.at("algorithm");
            const auto algo = a.is_string() ? parse_algorithm(a.get<std::string>()) : std::nullopt;
            if (!algo) throw detail::type_error("run.algorithm", "one of independent, vdn, pvdn");
            cfg.algorithm = *algo;
        }
        if (run.contains("seed")) {
            const Json& s = run.at("seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
                throw detail::type_error("run.seed", "a non-negative integer");
            cfg.seed = s.get<std::uint64_t>();
        }
    }

    detail::prefixed("network", [&] { cfg.network.validate(); });
    detail::prefixed("learner", [&] { validate(cfg.learner); });
    detail::prefixed("run", [&] { cfg.validate(); });
    return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, path.string(), "cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_string(ss.str());
}

/// Every field, so the output is a complete description of the run.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    detail::Json doc;
    detail::Json& net = doc["network"];
    for (const auto& f : detail::network_fields()) detail::write_field(net, f, cfg.network);
    detail::Json& learner = doc["learner"];
    for (const auto& f : detail::learner_fields()) detail::write_field(learner, f, cfg.learner);
    detail::Json& run = doc["run"];
    run["algorithm"] = to_string(cfg.algorithm);
    for (const auto& f : detail::run_fields()) detail::write_field(run, f, cfg);
    run["seed"] = cfg.seed;
    return doc.dump(2) + "\n";
}

} // namespace slicemarl::io

#endif // SLICEMARL_IO_CONFIG_IO_HPP
