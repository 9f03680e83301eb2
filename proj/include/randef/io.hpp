#pragma once

// JSON model files, scenario configs, and JSON renderings of results.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "randef/conjunction.hpp"
#include "randef/error.hpp"
#include "randef/lotto.hpp"
#include "randef/models.hpp"
#include "randef/observer.hpp"
#include "randef/stepcode.hpp"

namespace randef::io {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, path + ": " + e.what());
    }
}

/// Finite numbers as-is, infinities and NaN as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// --- models -----------------------------------------------------------------

inline json model_to_json(const models::QuantizedPMF& p) {
    json w = json::array();
    for (auto v : p.weights()) {
        w.push_back(v);
    }
    return json{{"k", p.block_bits()}, {"q", p.precision_bits()}, {"weights", std::move(w)}};
}

inline models::QuantizedPMF model_from_json(const json& j) {
    try {
        const auto k = j.at("k").get<unsigned>();
        const auto q = j.at("q").get<unsigned>();
        auto w = j.at("weights").get<std::vector<std::uint64_t>>();
        return models::QuantizedPMF::make(k, q, std::move(w));
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("model needs integer k, q and a weights array: ") + e.what());
    }
}

inline models::QuantizedPMF load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

inline json description_to_json(const models::ModelDescription& d) {
    json j = model_to_json(d.model);
    j["description_bits"] = d.description_bits;
    return j;
}

inline json cost_to_json(const models::ConditionalCostReport& r) {
    return json{{"string_id", r.string_id},
                {"shannon_fano_bits", number(r.shannon_fano_bits)},
                {"best_pattern_bits", number(r.best_pattern_bits)},
                {"winning_code", models::to_string(r.winning_code)},
                {"literal_bits", number(r.literal_bits)},
                {"run_length_bits", number(r.run_length_bits)},
                {"block_repeat_bits", number(r.block_repeat_bits)},
                {"repeat_period_blocks", r.repeat_period_blocks},
                {"repeat_count", r.repeat_count}};
}

// --- observer scenarios -----------------------------------------------------

struct ScenarioConfig {
    models::QuantizedPMF source;
    observer::ObserverConfig observer;
    std::optional<models::QuantizedPMF> initial_model;  // uniform at (k_min, q) when absent
    std::size_t n_steps = 0;
    std::size_t obs_len = 0;  // blocks per observation
    std::optional<std::uint64_t> seed;

    observer::ObserverState initial_state() const {
        const auto model = initial_model.value_or(
            models::QuantizedPMF::uniform(observer.family.k_min, observer.family.q));
        return observer::ObserverState::initial(models::ModelDescription::describe(model), observer);
    }
};

/// {"source": model or path, "family": {"k_min", "k_max", "q", "budget"?},
///  "initial_model"?: model or path, "alpha", "n_steps", "obs_len", "seed"?,
///  "patience"?, "slack_bits"?}. Relative model paths resolve against `base`.
inline ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base = {}) {
    auto model_at = [&](const json& v) {
        if (v.is_string()) {
            std::filesystem::path p = v.get<std::string>();
            return load_model((p.is_relative() ? base / p : p).string());
        }
        return model_from_json(v);
    };
    try {
        ScenarioConfig c{model_at(j.at("source")), {}, std::nullopt, 0, 0, std::nullopt};
        const auto& fam = j.at("family");
        c.observer.family.k_min = fam.at("k_min").get<unsigned>();
        c.observer.family.k_max = fam.at("k_max").get<unsigned>();
        c.observer.family.q = fam.at("q").get<unsigned>();
        if (fam.contains("budget")) {
            c.observer.family.budget = fam.at("budget").get<std::uint64_t>();
        }
        c.observer.alpha = models::SurpriseThreshold(j.at("alpha").get<double>());
        if (j.contains("initial_model")) {
            c.initial_model = model_at(j.at("initial_model"));
        }
        c.n_steps = j.at("n_steps").get<std::size_t>();
        c.obs_len = j.at("obs_len").get<std::size_t>();
        if (j.contains("seed")) {
            c.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("patience")) {
            c.observer.patience = j.at("patience").get<unsigned>();
        }
        if (j.contains("slack_bits")) {
            c.observer.slack_bits = j.at("slack_bits").get<double>();
        }
        c.observer.family.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("scenario config: ") + e.what());
    }
}

inline ScenarioConfig load_scenario(const std::string& path) {
    return scenario_from_json(read_json_file(path), std::filesystem::path(path).parent_path());
}

inline json record_to_json(const observer::UpdateRecord& r) {
    return json{{"step", r.step_index},
                {"surprising", r.was_surprising},
                {"updated", r.updated},
                {"subj_info_bits", r.subjective_information},
                {"subj_prob", r.subjective_probability},
                {"old_model", description_to_json(r.old_model)},
                {"new_model", description_to_json(r.new_model)}};
}

// --- other results ----------------------------------------------------------

inline json sequence_to_json(const stepcode::LotterySequence& s) {
    return json(std::vector<int>(s.numbers().begin(), s.numbers().end()));
}

inline json witness_to_json(const conjunction::ConjunctionWitness& w) {
    return json{{"n", w.n},
                {"y", w.y.to_string()},
                {"s", w.s.to_string()},
                {"l", w.l},
                {"x", w.x.to_string()},
                {"c", w.c},
                {"p_x", w.p_x},
                {"p_y", w.p_y},
                {"sf_x", w.sf_x},
                {"sf_y", w.sf_y},
                {"cost_x", cost_to_json(w.cost_x)},
                {"cost_y", cost_to_json(w.cost_y)},
                {"y_typical", w.y_typical},
                {"x_surprising", w.x_surprising},
                {"prob_order_ok", w.prob_order_ok},
                {"attempts", w.attempts}};
}

inline json histogram_to_json(const std::map<int, std::uint64_t>& h) {
    json out = json::array();
    for (const auto& [bits, n] : h) {
        out.push_back(json{{"bits", bits}, {"count", n}});
    }
    return out;
}

inline json length_stats_to_json(const lotto::LengthStats& s) {
    return json{{"count", s.count},
                {"mean_bits", s.mean_bits},
                {"mode_bits", s.mode_bits},
                {"min_bits", s.min_bits},
                {"max_bits", s.max_bits},
                {"argmin_seq", sequence_to_json(s.argmin_seq)},
                {"argmax_seq", sequence_to_json(s.argmax_seq)},
                {"histogram", histogram_to_json(s.histogram)}};
}

} // namespace randef::io
