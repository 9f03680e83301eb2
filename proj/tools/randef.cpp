// randef: command-line front end.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randef/conjunction.hpp"
#include "randef/io.hpp"
#include "randef/lotto.hpp"
#include "randef/models.hpp"
#include "randef/observer.hpp"
#include "randef/stepcode.hpp"

namespace {

using namespace randef;
using io::json;

constexpr const char* kSchemaVersion = "1";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    bool as_json = false;
    std::string command;
    json params = json::object();
};

std::string fixed(double v, int digits = 4) {
    if (!std::isfinite(v)) {
        return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void emit(const Context& ctx, json result) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = ctx.command;
    out["params"] = ctx.params;
    out["result"] = std::move(result);
    std::cout << out.dump(2) << '\n';
}

std::uint64_t enumeration_budget() {
    const char* env = std::getenv("RANDEF_BUDGET");
    if (env == nullptr || *env == '\0') {
        return lotto::kDefaultBudget;
    }
    const std::string text = env;
    if (text.find_first_not_of("0123456789") != std::string::npos) {
        throw UsageError("RANDEF_BUDGET must be a non-negative integer, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw UsageError("RANDEF_BUDGET out of range: '" + text + "'");
    }
}

std::string csv_sequence(const stepcode::LotterySequence& s) { return s.to_string(); }

// --- commands ---------------------------------------------------------------

struct CodecArgs {
    bool dump = false;
};

int run_codec(Context& ctx, const CodecArgs& a) {
    using stepcode::kCodebook;
    ctx.params = {{"dump", a.dump}};
    if (ctx.as_json) {
        json rows = json::array();
        for (auto s : kCodebook.symbols()) {
            rows.push_back({{"symbol", s.name()},
                            {"length", kCodebook.length(s)},
                            {"bits", kCodebook.codeword(s).to_string()}});
        }
        emit(ctx, {{"kraft_sum", kCodebook.kraft_sum()}, {"codewords", std::move(rows)}});
        return 0;
    }
    if (a.dump) {
        std::cout << "symbol,length,bits\n";
        for (auto s : kCodebook.symbols()) {
            std::cout << s.name() << ',' << kCodebook.length(s) << ',' << kCodebook.codeword(s).to_string() << '\n';
        }
        return 0;
    }
    for (auto s : kCodebook.symbols()) {
        std::printf("%-7s %u  %s\n", s.name().c_str(), kCodebook.length(s), kCodebook.codeword(s).to_string().c_str());
    }
    std::printf("kraft sum %s\n", fixed(kCodebook.kraft_sum(), 6).c_str());
    return 0;
}

struct EncodeArgs {
    std::string sequence;
};

int run_encode(Context& ctx, const EncodeArgs& a) {
    ctx.params = {{"sequence", a.sequence}};
    const auto seq = stepcode::LotterySequence::parse(a.sequence);
    const auto bits = stepcode::encode(seq);
    if (ctx.as_json) {
        json symbols = json::array();
        for (auto s : stepcode::to_symbols(stepcode::to_steps(seq))) {
            symbols.push_back(s.name());
        }
        emit(ctx, {{"sequence", io::sequence_to_json(seq)},
                   {"steps", stepcode::to_steps(seq).steps},
                   {"symbols", std::move(symbols)},
                   {"bits", bits.to_string()},
                   {"bits_hex", bits.to_hex()},
                   {"bit_len", bits.size()}});
        return 0;
    }
    std::cout << bits.size() << '\n' << bits.to_hex() << '\n';
    return 0;
}

struct DecodeArgs {
    std::string hex;
    std::optional<std::size_t> len;
    std::string bits;
};

int run_decode(Context& ctx, const DecodeArgs& a) {
    BitString bits;
    if (!a.bits.empty()) {
        if (!a.hex.empty() || a.len) {
            throw UsageError("decode takes either --bits or --hex with --len");
        }
        ctx.params = {{"bits", a.bits}};
        bits = BitString::from_string(a.bits);
    } else {
        if (a.hex.empty() || !a.len) {
            throw UsageError("decode needs --bits, or --hex together with --len");
        }
        ctx.params = {{"hex", a.hex}, {"len", *a.len}};
        bits = BitString::from_hex(a.hex, *a.len);
    }
    const auto seq = stepcode::decode(bits);
    if (ctx.as_json) {
        emit(ctx, {{"sequence", io::sequence_to_json(seq)}, {"bit_len", bits.size()}});
        return 0;
    }
    std::cout << seq.to_string() << '\n';
    return 0;
}

struct ScoreArgs {
    std::string sequence;
    std::string model;
    std::string string;
    double alpha = 8.0;
    double slack = models::kDefaultSlack;
};

int run_score(Context& ctx, const ScoreArgs& a) {
    const bool lottery = !a.sequence.empty();
    const bool event = !a.model.empty() || !a.string.empty();
    if (lottery == event) {
        throw UsageError("score takes either a sequence, or --model with --string");
    }
    if (lottery) {
        ctx.params = {{"sequence", a.sequence}};
        const auto seq = stepcode::LotterySequence::parse(a.sequence);
        const int bits = stepcode::compressed_length(seq);
        const double baseline = stepcode::baseline_bits();
        const double deficiency = stepcode::deficiency(seq);
        if (ctx.as_json) {
            emit(ctx, {{"sequence", io::sequence_to_json(seq)},
                       {"bits", bits},
                       {"baseline_bits", baseline},
                       {"deficiency", deficiency}});
            return 0;
        }
        std::cout << "sequence   " << seq.to_string() << '\n'
                  << "bits       " << bits << '\n'
                  << "baseline   " << fixed(baseline) << '\n'
                  << "deficiency " << (deficiency >= 0 ? "+" : "") << fixed(deficiency) << '\n';
        return 0;
    }

    if (a.model.empty() || a.string.empty()) {
        throw UsageError("scoring an event string needs both --model and --string");
    }
    ctx.params = {{"model", a.model}, {"string", a.string}, {"alpha", a.alpha}, {"slack_bits", a.slack}};
    const auto desc = models::ModelDescription::describe(io::load_model(a.model));
    const auto x = BitString::from_string(a.string);
    const models::SurpriseThreshold alpha(a.alpha);
    const auto cost = models::conditional_cost(desc.model, x);
    const bool typical = models::is_typical(desc.model, x, alpha);
    const auto standalone = models::standalone_cost(x, desc.model.block_bits());
    const double two_part = desc.description_bits + cost.shannon_fano_bits;
    const bool optimal = models::is_optimal(desc, x, a.slack);
    if (ctx.as_json) {
        emit(ctx, {{"model", io::description_to_json(desc)},
                   {"cost", io::cost_to_json(cost)},
                   {"typical", typical},
                   {"surprising", !typical},
                   {"standalone_bits", io::number(standalone.best_bits)},
                   {"two_part_bits", io::number(two_part)},
                   {"optimal", optimal}});
        return 0;
    }
    std::cout << "string            " << cost.string_id << '\n'
              << "shannon_fano_bits " << fixed(cost.shannon_fano_bits) << '\n'
              << "best_pattern_bits " << fixed(cost.best_pattern_bits) << " (" << models::to_string(cost.winning_code)
              << ")\n"
              << "verdict           " << (typical ? "typical" : "surprising") << " at alpha " << fixed(a.alpha, 2)
              << '\n'
              << "standalone_bits   " << fixed(standalone.best_bits) << '\n'
              << "two_part_bits     " << fixed(two_part) << '\n'
              << "optimal           " << (optimal ? "yes" : "no") << '\n';
    return 0;
}

struct StatsArgs {
    std::string path;
};

int run_stats(Context& ctx, const StatsArgs& a) {
    ctx.params = {{"corpus", a.path}};
    const auto s = lotto::corpus_stats(lotto::load_corpus(a.path));
    if (ctx.as_json) {
        emit(ctx, io::length_stats_to_json(s));
        return 0;
    }
    std::cout << "draws     " << s.count << '\n'
              << "mean_bits " << fixed(s.mean_bits) << '\n'
              << "mode_bits " << s.mode_bits << '\n'
              << "min_bits  " << s.min_bits << "  " << csv_sequence(s.argmin_seq) << '\n'
              << "max_bits  " << s.max_bits << "  " << csv_sequence(s.argmax_seq) << '\n';
    return 0;
}

struct EnumerateArgs {
    int pool = 45;
    int draw = 6;
    std::string histogram;
    unsigned threads = 0;
};

int run_enumerate(Context& ctx, const EnumerateArgs& a) {
    const auto budget = enumeration_budget();
    ctx.params = {{"pool_size", a.pool}, {"draw_count", a.draw}, {"budget", budget}};
    if (!a.histogram.empty()) {
        ctx.params["histogram"] = a.histogram;
    }
    const auto s = lotto::enumerate_stats({a.pool, a.draw}, budget, a.threads);
    if (!a.histogram.empty()) {
        std::ofstream out(a.histogram);
        if (!out) {
            throw Error(Errc::InvalidArgument, "cannot write " + a.histogram);
        }
        out << "bits,count\n";
        for (const auto& [bits, n] : s.histogram) {
            out << bits << ',' << n << '\n';
        }
    }
    if (ctx.as_json) {
        emit(ctx, io::length_stats_to_json(s));
        return 0;
    }
    std::cout << "count     " << s.count << '\n'
              << "mean_bits " << fixed(s.mean_bits) << '\n'
              << "mode_bits " << s.mode_bits << '\n'
              << "min_bits  " << s.min_bits << "  " << csv_sequence(s.argmin_seq) << " (" << s.histogram.at(s.min_bits)
              << " at this length)\n"
              << "max_bits  " << s.max_bits << "  " << csv_sequence(s.argmax_seq) << " (" << s.histogram.at(s.max_bits)
              << " at this length)\n";
    return 0;
}

struct DistractorArgs {
    std::string bands = "15-18,19-22,23-26,27-29";
    std::uint64_t seed = 0;
    std::uint64_t max_tries = 1'000'000;
    std::size_t panel = 0;
    double noise = 1.5;
};

int run_distractors(Context& ctx, const DistractorArgs& a) {
    ctx.params = {{"bands", a.bands}, {"seed", a.seed}, {"max_tries", a.max_tries}};
    if (a.panel > 0) {
        ctx.params["panel"] = a.panel;
        ctx.params["noise_sd_bits"] = a.noise;
    }
    const auto bands = lotto::parse_bands(a.bands);
    Rng rng(a.seed);
    std::vector<stepcode::LotterySequence> picks;
    for (const auto& band : bands) {
        picks.push_back(lotto::generate_distractor(band, rng, a.max_tries));
    }

    std::optional<stepcode::LotterySequence> quick;
    std::optional<lotto::PanelResult> panel;
    std::vector<stepcode::LotterySequence> stimuli;
    if (a.panel > 0) {
        quick = lotto::quickpick(rng);
        stimuli.push_back(*quick);
        stimuli.insert(stimuli.end(), picks.begin(), picks.end());
        panel = lotto::simulate_panel(stimuli, rng, lotto::PanelConfig{a.panel, a.noise});
    }

    if (ctx.as_json) {
        json rows = json::array();
        for (std::size_t i = 0; i < bands.size(); ++i) {
            rows.push_back({{"band", bands[i].to_string()},
                            {"sequence", io::sequence_to_json(picks[i])},
                            {"bits", stepcode::compressed_length(picks[i])}});
        }
        json result = {{"distractors", std::move(rows)}};
        if (panel) {
            json items = json::array();
            for (std::size_t i = 0; i < stimuli.size(); ++i) {
                items.push_back({{"role", i == 0 ? "quickpick" : "distractor"},
                                 {"sequence", io::sequence_to_json(stimuli[i])},
                                 {"bits", panel->bits[i]},
                                 {"mean_rank", panel->mean_rank[i]}});
            }
            result["panel"] = {{"simulated", true},
                               {"items", std::move(items)},
                               {"pearson_r", panel->pearson_r},
                               {"spearman_rho", panel->spearman_rho}};
        }
        emit(ctx, std::move(result));
        return 0;
    }
    std::cout << "band,sequence,bits\n";
    for (std::size_t i = 0; i < bands.size(); ++i) {
        std::cout << bands[i].to_string() << ",\"" << csv_sequence(picks[i]) << "\","
                  << stepcode::compressed_length(picks[i]) << '\n';
    }
    if (panel) {
        std::cout << "\nsimulated panel (" << a.panel << " responders, noise sd " << fixed(a.noise, 2) << " bits)\n";
        for (std::size_t i = 0; i < stimuli.size(); ++i) {
            std::printf("%-10s %-20s %2d bits  mean rank %.3f\n", i == 0 ? "quickpick" : "distractor",
                        stimuli[i].to_string().c_str(), static_cast<int>(panel->bits[i]), panel->mean_rank[i]);
        }
        std::cout << "pearson_r    " << fixed(panel->pearson_r) << '\n'
                  << "spearman_rho " << fixed(panel->spearman_rho) << '\n';
    }
    return 0;
}

struct RankArgs {
    std::string path;
};

int run_rank(Context& ctx, const RankArgs& a) {
    ctx.params = {{"file", a.path}};
    std::ifstream in(a.path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open " + a.path);
    }
    std::vector<stepcode::LotterySequence> candidates;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
            continue;
        }
        try {
            candidates.push_back(stepcode::LotterySequence::parse(line));
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
        }
    }
    const auto r = lotto::rank_candidates(candidates);
    if (ctx.as_json) {
        json items = json::array();
        for (const auto& it : r.items) {
            items.push_back({{"rank", it.rank}, {"sequence", io::sequence_to_json(it.sequence)}, {"bits", it.compressed_bits}});
        }
        emit(ctx, {{"items", std::move(items)}, {"pearson_r", r.pearson_r}, {"spearman_rho", r.spearman_rho}});
        return 0;
    }
    for (const auto& it : r.items) {
        std::printf("%3d  %2d bits  %s\n", it.rank, it.compressed_bits, it.sequence.to_string().c_str());
    }
    std::cout << "pearson_r    " << fixed(r.pearson_r) << '\n' << "spearman_rho " << fixed(r.spearman_rho) << '\n';
    return 0;
}

struct ObserveArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
};

int run_observe(Context& ctx, const ObserveArgs& a) {
    const auto cfg = io::load_scenario(a.config);
    const auto seed = a.seed ? a.seed : cfg.seed;
    if (!seed) {
        throw UsageError("observe needs --seed (or a \"seed\" field in the config)");
    }
    ctx.params = {{"config", a.config}, {"seed", *seed}};
    const auto ledger = observer::run_scenario(cfg.source, cfg.initial_state(), cfg.n_steps, cfg.obs_len, *seed);
    if (ctx.as_json) {
        json records = json::array();
        for (const auto& r : ledger) {
            records.push_back(io::record_to_json(r));
        }
        emit(ctx, {{"source", io::model_to_json(cfg.source)},
                   {"records", std::move(records)},
                   {"final_model", io::description_to_json(ledger.back().new_model)}});
        return 0;
    }
    observer::write_ledger_csv(std::cout, ledger);
    return 0;
}

struct ConjunctionArgs {
    std::string model;
    double alpha = 5.0;
    std::size_t n = 64;
    std::uint64_t seed = 0;
    std::optional<std::size_t> scan;
    std::size_t seeds = 20;
    std::size_t max_retries = 1000;
};

int run_conjunction(Context& ctx, const ConjunctionArgs& a) {
    if (a.scan) {
        ctx.params = {{"model", a.model}, {"alpha", a.alpha}, {"scan", *a.scan}, {"seed", a.seed}, {"seeds", a.seeds}};
    } else {
        ctx.params = {{"model", a.model}, {"alpha", a.alpha}, {"n", a.n}, {"seed", a.seed}};
    }
    const auto p = io::load_model(a.model);
    const models::SurpriseThreshold alpha(a.alpha);
    if (a.scan) {
        json rows = json::array();
        if (!ctx.as_json) {
            std::cout << "n,fraction_all_true\n";
        }
        for (std::size_t n = 1; n <= *a.scan; ++n) {
            const double f = conjunction::firing_fraction(p, alpha, n, a.seed, a.seeds, a.max_retries);
            if (ctx.as_json) {
                rows.push_back({{"n", n}, {"fraction_all_true", f}});
            } else {
                std::cout << n << ',' << f << '\n';
            }
        }
        if (ctx.as_json) {
            emit(ctx, {{"rows", std::move(rows)}});
        }
        return 0;
    }
    const auto w = conjunction::build_witness(p, alpha, a.n, a.seed, a.max_retries);
    if (ctx.as_json) {
        emit(ctx, io::witness_to_json(w));
        return 0;
    }
    std::cout << "y             " << w.y.to_string() << '\n'
              << "s             " << w.s.to_string() << "  (c = " << fixed(w.c) << " bits)\n"
              << "l             " << w.l << '\n'
              << "cost_x        " << fixed(w.cost_x.best_pattern_bits) << " bits via "
              << models::to_string(w.cost_x.winning_code) << ", -log2 p_x = " << fixed(w.sf_x) << '\n'
              << "cost_y        " << fixed(w.cost_y.best_pattern_bits) << " bits via "
              << models::to_string(w.cost_y.winning_code) << ", -log2 p_y = " << fixed(w.sf_y) << '\n'
              << "y_typical     " << std::boolalpha << w.y_typical << '\n'
              << "x_surprising  " << w.x_surprising << '\n'
              << "prob_order_ok " << w.prob_order_ok << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compression-based randomness: lottery step codes, typicality, observers, conjunction witnesses",
                 "randef"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    app.add_flag("--json", ctx.as_json, "Emit a JSON envelope instead of text");

    std::function<int()> run;

    CodecArgs codec;
    auto* c_codec = app.add_subcommand("codec", "Show the step codebook");
    c_codec->add_flag("--dump", codec.dump, "CSV: symbol,length,bits");
    c_codec->callback([&] { run = [&] { return run_codec(ctx, codec); }; });

    EncodeArgs encode;
    auto* c_encode = app.add_subcommand("encode", "Encode a draw, e.g. 10,32,33,35,39,45");
    c_encode->add_option("sequence", encode.sequence, "Six numbers, comma-separated, any order")->required();
    c_encode->callback([&] { run = [&] { return run_encode(ctx, encode); }; });

    DecodeArgs decode;
    auto* c_decode = app.add_subcommand("decode", "Decode a bit string back into a draw");
    c_decode->add_option("--hex", decode.hex, "Hex digits, most significant bit first");
    c_decode->add_option("--len", decode.len, "Bit length for --hex");
    c_decode->add_option("--bits", decode.bits, "Literal 0/1 string");
    c_decode->callback([&] { run = [&] { return run_decode(ctx, decode); }; });

    ScoreArgs score;
    auto* c_score = app.add_subcommand("score", "Bits and deficiency of a draw, or cost report of an event string");
    c_score->add_option("sequence", score.sequence, "Draw to score");
    c_score->add_option("--model", score.model, "Model JSON {k, q, weights}");
    c_score->add_option("--string", score.string, "Event string of 0/1");
    c_score->add_option("--alpha", score.alpha, "Surprise threshold in bits")->capture_default_str();
    c_score->add_option("--slack", score.slack, "Optimality slack in bits")->capture_default_str();
    c_score->callback([&] { run = [&] { return run_score(ctx, score); }; });

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "Code-length statistics of a draw corpus CSV");
    c_stats->add_option("corpus", stats.path, "CSV with header date,n1,...,n6")->required();
    c_stats->callback([&] { run = [&] { return run_stats(ctx, stats); }; });

    EnumerateArgs enumerate;
    auto* c_enum = app.add_subcommand("enumerate", "Code-length statistics over every possible draw");
    c_enum->add_option("--pool", enumerate.pool, "Pool size")->capture_default_str();
    c_enum->add_option("--draw", enumerate.draw, "Numbers per draw")->capture_default_str();
    c_enum->add_option("--histogram", enumerate.histogram, "Write bits,count CSV here");
    c_enum->add_option("--threads", enumerate.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c_enum->callback([&] { run = [&] { return run_enumerate(ctx, enumerate); }; });

    DistractorArgs distractors;
    auto* c_dist = app.add_subcommand("distractors", "Random draws whose code length falls in given bands");
    c_dist->add_option("--bands", distractors.bands, "Comma-separated lo-hi bands")->capture_default_str();
    c_dist->add_option("--seed", distractors.seed, "Random seed")->required();
    c_dist->add_option("--max-tries", distractors.max_tries, "Attempts per band")->capture_default_str();
    c_dist->add_option("--panel", distractors.panel, "Also add a quickpick and rank with N simulated responders");
    c_dist->add_option("--noise", distractors.noise, "Responder noise sd in bits")->capture_default_str();
    c_dist->callback([&] { run = [&] { return run_distractors(ctx, distractors); }; });

    RankArgs rank;
    auto* c_rank = app.add_subcommand("rank", "Rank draws (one per line) by code length");
    c_rank->add_option("file", rank.path, "Text file, one comma-separated draw per line")->required();
    c_rank->callback([&] { run = [&] { return run_rank(ctx, rank); }; });

    ObserveArgs observe;
    auto* c_obs = app.add_subcommand("observe", "Run an observer scenario and print its ledger CSV");
    c_obs->add_option("--config", observe.config, "Scenario JSON")->required();
    c_obs->add_option("--seed", observe.seed, "Random seed (overrides the config)");
    c_obs->callback([&] { run = [&] { return run_observe(ctx, observe); }; });

    ConjunctionArgs conj;
    auto* c_conj = app.add_subcommand("conjunction", "Build a conjunction witness, or scan n");
    c_conj->add_option("--model", conj.model, "Model JSON {k, q, weights}")->required();
    c_conj->add_option("--alpha", conj.alpha, "Surprise threshold in bits")->capture_default_str();
    c_conj->add_option("--n", conj.n, "Blocks in y")->capture_default_str();
    c_conj->add_option("--seed", conj.seed, "Random seed")->required();
    c_conj->add_option("--scan", conj.scan, "Print n,fraction_all_true for n = 1..N");
    c_conj->add_option("--seeds", conj.seeds, "Seeds per n when scanning")->capture_default_str();
    c_conj->add_option("--max-retries", conj.max_retries, "Samples drawn looking for a typical y")
        ->capture_default_str();
    c_conj->callback([&] { run = [&] { return run_conjunction(ctx, conj); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    ctx.command = app.get_subcommands().front()->get_name();

    try {
        return run();
    } catch (const UsageError& e) {
        std::cerr << "randef " << ctx.command << ": " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "randef " << ctx.command << ": " << e.what() << '\n';
        if (ctx.as_json) {
            json out;
            out["schema_version"] = kSchemaVersion;
            out["command"] = ctx.command;
            out["params"] = ctx.params;
            out["error"] = {{"code", to_string(e.code())}, {"message", e.detail()}};
            std::cout << out.dump(2) << '\n';
        }
        return 1;
    }
}
