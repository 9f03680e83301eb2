#pragma once

// An observer that keeps the shortest admissible model for everything it has
// seen, flags observations that the model compresses too well, and prices
// each model revision in bits.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "randef/bitstring.hpp"
#include "randef/error.hpp"
#include "randef/models.hpp"
#include "randef/rng.hpp"
#include "randef/stepcode.hpp"

namespace randef::observer {

using models::ModelDescription;
using models::QuantizedPMF;
using models::SurpriseThreshold;

/// Finite model class searched by select_model: every quantized PMF with
/// block size in [k_min, k_max] at precision q.
struct CandidateFamily {
    unsigned k_min = 1;
    unsigned k_max = 1;
    unsigned q = 3;
    std::uint64_t budget = 2'000'000;  // max models scored per block size

    void validate() const {
        if (k_min < 1 || k_min > k_max || k_max > models::kMaxBlockBits || q < 1 ||
            q > models::kMaxPrecisionBits) {
            throw Error(Errc::InvalidArgument, "invalid candidate family");
        }
    }

    /// Number of weight vectors at block size k: C(2^q + 2^k - 1, 2^k - 1).
    std::uint64_t size(unsigned k) const {
        const auto symbols = std::uint64_t{1} << k;
        if (q >= 31) {
            return UINT64_MAX;
        }
        const auto total = std::uint64_t{1} << q;
        if (total + symbols > static_cast<std::uint64_t>(INT32_MAX)) {
            return UINT64_MAX;
        }
        const auto n = stepcode::binomial(static_cast<int>(total + symbols - 1), static_cast<int>(symbols - 1));
        return n.value_or(UINT64_MAX);
    }
};

namespace detail {

/// Visits every completion of w[pos..] summing to `remaining`, in
/// lexicographic order.
template <class Visit>
void for_each_composition(std::vector<std::uint64_t>& w, std::size_t pos, std::uint64_t remaining, Visit& visit) {
    if (pos + 1 == w.size()) {
        w[pos] = remaining;
        visit(std::as_const(w));
        return;
    }
    for (std::uint64_t v = 0; v <= remaining; ++v) {
        w[pos] = v;
        for_each_composition(w, pos + 1, remaining - v, visit);
    }
}

inline BitString concatenate(std::span<const BitString> parts) {
    BitString all;
    for (const auto& part : parts) {
        all.append(part);
    }
    return all;
}

} // namespace detail

/// Argmin of |p*| over family members that are optimal for, and under which
/// the history is typical. Equal description lengths are resolved by the
/// shorter two-part code |p*| - log2 p(history), then by the lexicographically
/// smallest weight vector.
inline ModelDescription select_model(std::span<const BitString> history, const CandidateFamily& family,
                                     SurpriseThreshold alpha, double slack_bits = models::kDefaultSlack) {
    family.validate();
    if (history.empty()) {
        throw Error(Errc::InvalidArgument, "history is empty");
    }
    const BitString all = detail::concatenate(history);
    if (all.empty()) {
        throw Error(Errc::EmptyString, "history holds no bits");
    }

    bool found = false;
    ModelDescription best;
    double best_two_part = 0.0;

    for (unsigned k = family.k_min; k <= family.k_max; ++k) {
        if (all.size() % k != 0) {
            continue;
        }
        if (family.size(k) > family.budget) {
            throw Error(Errc::BudgetExceeded, "family at k=" + std::to_string(k) + " has " +
                                                  std::to_string(family.size(k)) + " members");
        }
        const models::BlockProfile prof = models::profile(all, k);
        const double standalone = models::standalone_cost(prof).best_bits;
        const double pattern = std::min(prof.run_length_bits, prof.block_repeat_bits);
        const double description = ModelDescription::length_for(k, family.q);
        if (found && description > best.description_bits) {
            continue;
        }

        std::vector<std::uint64_t> w(std::size_t{1} << k, 0);
        auto visit = [&](const std::vector<std::uint64_t>& weights) {
            for (std::size_t s = 0; s < weights.size(); ++s) {
                if (prof.counts[s] == 0) {
                    continue;
                }
                if (weights[s] == 0) {
                    return;
                }
            }
            const auto p = QuantizedPMF::make(k, family.q, weights);
            const double sf = models::shannon_fano_bits(p, prof.counts);
            const double best_program = std::min(sf + models::kSelectorBits, pattern);
            if (best_program < sf - alpha.bits) {
                return;  // not typical
            }
            auto desc = ModelDescription::describe(p);
            const double two_part = desc.description_bits + sf;
            if (std::abs(standalone - two_part) > slack_bits) {
                return;  // not optimal
            }
            const bool better = !found || desc.description_bits < best.description_bits ||
                                (desc.description_bits == best.description_bits && two_part < best_two_part);
            if (better) {
                found = true;
                best = std::move(desc);
                best_two_part = two_part;
            }
        };
        detail::for_each_composition(w, 0, std::uint64_t{1} << family.q, visit);
    }
    if (!found) {
        throw Error(Errc::NoAdmissibleModel, "no family member is both optimal and typical for the history");
    }
    return best;
}

struct ObserverConfig {
    CandidateFamily family;
    SurpriseThreshold alpha{8.0};
    double slack_bits = models::kDefaultSlack;
    unsigned patience = 1;  // consecutive surprises required before re-selecting
};

/// Value type: observe() returns a new state.
struct ObserverState {
    ModelDescription current_model;
    std::vector<BitString> history;
    ObserverConfig config;
    unsigned pending_surprises = 0;

    static ObserverState initial(ModelDescription model, ObserverConfig config) {
        config.family.validate();
        if (config.patience < 1) {
            throw Error(Errc::InvalidArgument, "patience must be >= 1");
        }
        return ObserverState{std::move(model), {}, std::move(config), 0};
    }
};

struct UpdateRecord {
    std::size_t step_index = 0;
    bool was_surprising = false;
    bool updated = false;
    ModelDescription old_model;
    ModelDescription new_model;
    double subjective_information = 0.0;
    double subjective_probability = 1.0;
};

/// Bits to revise `from` into `to`. Within one (k, q) this is the weight-delta
/// program; across block sizes the new model is sent whole after a selector.
inline double revision_cost(const ModelDescription& from, const ModelDescription& to) {
    if (from.model.block_bits() == to.model.block_bits() &&
        from.model.precision_bits() == to.model.precision_bits()) {
        return models::model_update_cost(from, to);
    }
    return models::kSelectorBits + to.description_bits;
}

inline std::pair<ObserverState, UpdateRecord> observe(ObserverState state, const BitString& d) {
    const unsigned k = state.current_model.model.block_bits();
    if (d.empty() || d.size() % k != 0) {
        throw Error(Errc::InvalidArgument, "observation length must be a positive multiple of " + std::to_string(k));
    }

    bool surprising = false;
    try {
        surprising = models::is_surprising(state.current_model.model, d, state.config.alpha);
    } catch (const Error& e) {
        // A block the model rules out has unbounded Shannon-Fano length.
        if (e.code() != Errc::ZeroProbabilityBlock) {
            throw;
        }
        surprising = true;
    }

    UpdateRecord rec;
    rec.step_index = state.history.size();
    rec.was_surprising = surprising;
    rec.old_model = state.current_model;
    state.history.push_back(d);

    if (surprising && ++state.pending_surprises >= state.config.patience) {
        state.pending_surprises = 0;
        state.current_model =
            select_model(state.history, state.config.family, state.config.alpha, state.config.slack_bits);
        rec.updated = true;
        rec.subjective_information = revision_cost(rec.old_model, state.current_model);
    } else if (!surprising) {
        state.pending_surprises = 0;
    }
    rec.new_model = state.current_model;
    rec.subjective_probability = models::subjective_probability(rec.subjective_information);
    return {std::move(state), std::move(rec)};
}

/// Feeds `n_steps` observations of `obs_len` blocks drawn from `source`
/// through the observer. Pure in its arguments.
inline std::vector<UpdateRecord> run_scenario(const QuantizedPMF& source, ObserverState state, std::size_t n_steps,
                                              std::size_t obs_len, std::uint64_t seed) {
    if (n_steps < 1) {
        throw Error(Errc::InvalidArgument, "n_steps must be >= 1");
    }
    if (obs_len < 1) {
        throw Error(Errc::InvalidArgument, "obs_len must be >= 1");
    }
    Rng rng(seed);
    std::vector<UpdateRecord> ledger;
    ledger.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        auto [next, rec] = observe(std::move(state), models::sample(source, obs_len, rng));
        state = std::move(next);
        ledger.push_back(std::move(rec));
    }
    return ledger;
}

inline std::string weights_field(const QuantizedPMF& p) {
    std::string s;
    for (std::size_t i = 0; i < p.weights().size(); ++i) {
        if (i > 0) {
            s += ';';
        }
        s += std::to_string(p.weights()[i]);
    }
    return s;
}

/// CSV: step,surprising,subj_info_bits,subj_prob,model_weights (weights of
/// the model after the step, ';'-separated).
inline void write_ledger_csv(std::ostream& out, std::span<const UpdateRecord> ledger) {
    out << "step,surprising,subj_info_bits,subj_prob,model_weights\n";
    char buf[64];
    for (const auto& rec : ledger) {
        out << rec.step_index << ',' << (rec.was_surprising ? "true" : "false") << ',';
        std::snprintf(buf, sizeof buf, "%.17g", rec.subjective_information);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", rec.subjective_probability);
        out << buf << ',' << weights_field(rec.new_model.model) << '\n';
    }
}

} // namespace randef::observer
