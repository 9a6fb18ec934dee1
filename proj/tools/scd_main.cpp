// Command-line front end: synth | featurize | train | eval | segment |
// diar-eval. Every run resolves its options (flags > config file > defaults)
// and writes the resolved values as JSON next to its primary output, so any
// artifact on disk can be traced back to the exact invocation.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scd/scd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool g_quiet = false;

void info(const std::string& line) {
    if (!g_quiet) std::cout << line << "\n";
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    json cfg;
    try {
        cfg = json::parse(scd::read_file(path));
    } catch (const json::exception& e) {
        throw scd::ConfigError(path + ": " + e.what());
    }
    if (!cfg.is_object()) throw scd::ConfigError(path + ": config must be a JSON object");
    return cfg;
}

// Flags win over the config file, which wins over defaults.
template <typename T>
void overlay(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (opt->count() > 0 || !cfg.contains(key)) return;
    try {
        value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw scd::ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void write_run_config(const fs::path& target, const json& resolved) {
    scd::write_file(target, resolved.dump(2) + "\n");
}

std::string file_hash(const fs::path& path) {
    return scd::to_hex(scd::fnv1a64(scd::read_file(path)));
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    scd::SynthConfig cfg;
    std::string out_dir;
};

int run_synth(const SynthArgs& a, std::uint64_t seed) {
    scd::SynthConfig cfg = a.cfg;
    cfg.seed = seed;
    auto [corpus, table] = scd::generate_synthetic(cfg);
    scd::write_corpus_dir(corpus, a.out_dir);
    scd::save_embeddings(table, fs::path(a.out_dir) / "embeddings.vec");

    std::size_t tokens = 0, turns = 0;
    for (const auto& conv : corpus.conversations) {
        tokens += conv.tokens.size();
        turns += 1;
        for (std::size_t i = 1; i < conv.tokens.size(); ++i)
            if (conv.tokens[i].speaker != conv.tokens[i - 1].speaker) ++turns;
    }
    json resolved{{"subcommand", "synth"},
                  {"seed", seed},
                  {"conversations", cfg.n_conversations},
                  {"speakers", cfg.n_speakers},
                  {"dim", cfg.embedding_dim},
                  {"words-per-turn", cfg.words_per_turn_mean},
                  {"turns", cfg.turn_count_mean},
                  {"spread", cfg.speaker_topic_spread},
                  {"pause", cfg.pause_at_turn},
                  {"rate-min", cfg.speech_rate_min},
                  {"rate-max", cfg.speech_rate_max},
                  {"speaker-groups", cfg.speaker_groups},
                  {"out", a.out_dir}};
    write_run_config(fs::path(a.out_dir) / "run_config.json", resolved);

    info("conversations: " + std::to_string(corpus.conversations.size()));
    info("tokens: " + std::to_string(tokens));
    info("turns: " + std::to_string(turns));
    info("mean turns per conversation: " +
         scd::format_double(static_cast<double>(turns) /
                            static_cast<double>(corpus.conversations.size())));
    info("corpus hash: " + scd::corpus_hash(corpus));
    return 0;
}

// ------------------------------------------------------------ featurize ----

struct FeaturizeArgs {
    std::string corpus_dir;
    std::string embeddings_path;
    std::string out_path;
    std::size_t window = 6;
    bool lenient = false;
};

int run_featurize(const FeaturizeArgs& a) {
    scd::ParseOptions opts;
    opts.lenient = a.lenient;
    const scd::Corpus corpus = scd::load_corpus_dir(a.corpus_dir, opts);
    scd::check_unique_ids(corpus);
    const scd::EmbeddingTable table = scd::load_embeddings(a.embeddings_path);
    table.reset_counters();
    const scd::Dataset ds = scd::encode_corpus(corpus, table, a.window);
    scd::save_dataset(ds, a.out_path);

    const auto [n_same, n_split] = ds.class_counts();
    const std::size_t lookups = table.hit_count() + table.miss_count();
    const double oov = lookups == 0 ? 0.0
                                    : static_cast<double>(table.miss_count()) /
                                          static_cast<double>(lookups);
    json resolved{{"subcommand", "featurize"},
                  {"corpus", a.corpus_dir},
                  {"embeddings", a.embeddings_path},
                  {"out", a.out_path},
                  {"window", a.window},
                  {"lenient", a.lenient},
                  {"corpus_hash", ds.corpus_hash},
                  {"oov_rate", oov}};
    write_run_config(a.out_path + ".run.json", resolved);

    info("windows: " + std::to_string(ds.rows()));
    info("features per window: " + std::to_string(ds.features.cols));
    info("same: " + std::to_string(n_same));
    info("split: " + std::to_string(n_split));
    info("split fraction: " +
         scd::format_double(ds.rows() == 0 ? 0.0
                                           : static_cast<double>(n_split) /
                                                 static_cast<double>(ds.rows())));
    info("oov rate: " + scd::format_double(oov));
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    std::string data_path;
    std::string out_path;
    std::string corpus_dir;  // needed for by-conversation validation splits
    std::string split_mode = "by-window";
    double split_ratio = 0.8;
    bool no_scale = false;
    std::string layers;  // comma-separated override
    scd::Hyperparams hp;
    double w_same = 1.0;
    double w_split = 1.0;
    std::string weight_mode = "inverse";
    std::string activation = "relu";
    double dropout = 0.5;
};

std::vector<std::size_t> parse_layer_list(const std::string& text) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string part = text.substr(pos, comma - pos);
        try {
            dims.push_back(std::stoull(part));
        } catch (const std::exception&) {
            throw scd::ConfigError("bad layer list entry '" + part + "'");
        }
        pos = comma + 1;
    }
    return dims;
}

// Train/validation row indices for a loaded dataset cache.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(
    const scd::Dataset& ds, const TrainArgs& a, std::uint64_t seed) {
    const scd::SplitMode mode = scd::parse_split_mode(a.split_mode);
    if (mode == scd::SplitMode::ByWindow) {
        scd::Corpus pseudo;  // split_corpus only needs the window counts
        pseudo.conversations.emplace_back();
        pseudo.conversations.back().id = "rows";
        pseudo.conversations.back().tokens.resize(ds.rows() + 5);
        const scd::CorpusSplit split = scd::split_corpus(pseudo, a.split_ratio, mode, seed);
        return {split.train_rows, split.test_rows};
    }
    if (a.corpus_dir.empty())
        throw scd::ConfigError("--split-mode by-conversation needs --corpus to recover speakers");
    const scd::Corpus corpus = scd::load_corpus_dir(a.corpus_dir);
    if (scd::corpus_hash(corpus) != ds.corpus_hash)
        throw scd::ValidationError("corpus at " + a.corpus_dir +
                                   " does not match the dataset cache (hash mismatch)");
    const scd::CorpusSplit split = scd::split_corpus(corpus, a.split_ratio, mode, seed);
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const std::string& id = ds.provenance[r].first;
        if (std::find(split.train_ids.begin(), split.train_ids.end(), id) !=
            split.train_ids.end())
            train_rows.push_back(r);
        else
            val_rows.push_back(r);
    }
    return {train_rows, val_rows};
}

int run_train(TrainArgs& a, std::uint64_t seed) {
    scd::Dataset full = scd::load_dataset(a.data_path);
    if (full.rows() == 0) throw scd::ValidationError("dataset cache holds no windows");
    if (full.scaled)
        throw scd::ValidationError("dataset cache is already scaled; train on a raw cache");

    a.hp.seed = seed;
    a.hp.weight_mode = scd::parse_weight_mode(a.weight_mode);
    if (a.hp.weight_mode == scd::WeightMode::Explicit) a.hp.explicit_weights = {a.w_same, a.w_split};

    const auto [train_rows, val_rows] = split_rows(full, a, seed);
    if (train_rows.empty()) throw scd::ValidationError("training split is empty");
    scd::Dataset train_ds = scd::select_rows(full, train_rows);
    scd::Dataset val_ds = scd::select_rows(full, val_rows);

    scd::Scaler scaler;
    if (!a.no_scale) {
        scaler = scd::fit_scaler(train_ds);
        train_ds = scd::apply_scaler(scaler, train_ds);
        if (val_ds.rows() > 0) val_ds = scd::apply_scaler(scaler, val_ds);
    }

    scd::Architecture arch;
    arch.layer_dims = a.layers.empty() ? scd::default_layer_dims(full.features.cols)
                                       : parse_layer_list(a.layers);
    if (arch.layer_dims.front() != full.features.cols)
        throw scd::ConfigError("first layer dim " + std::to_string(arch.layer_dims.front()) +
                               " must equal feature length " +
                               std::to_string(full.features.cols));
    if (arch.layer_dims.back() != 2) throw scd::ConfigError("last layer dim must be 2");
    arch.dropout_p = a.dropout;
    arch.activation = scd::parse_activation(a.activation);

    scd::Model model = scd::init_model(arch, seed);
    scd::TrainResult result = scd::train(std::move(model), train_ds, val_ds, a.hp);
    result.model.scaler = scaler;
    scd::save_model(result.model, a.out_path);

    std::string history = "epoch,train_loss,val_loss,val_split_f1\n";
    for (const auto& e : result.history)
        history += std::to_string(e.epoch) + "," + scd::format_double(e.train_loss) + "," +
                   scd::format_double(e.val_loss) + "," + scd::format_double(e.val_split_f1) +
                   "\n";
    scd::write_file(a.out_path + ".history.csv", history);

    json resolved{{"subcommand", "train"},
                  {"seed", seed},
                  {"data", a.data_path},
                  {"out", a.out_path},
                  {"split-mode", a.split_mode},
                  {"split-ratio", a.split_ratio},
                  {"corpus", a.corpus_dir},
                  {"scale", !a.no_scale},
                  {"layers", arch.layer_dims},
                  {"activation", a.activation},
                  {"dropout", a.dropout},
                  {"lr", a.hp.learning_rate},
                  {"batch", a.hp.batch_size},
                  {"epochs", a.hp.epochs},
                  {"patience", a.hp.early_stop_patience},
                  {"class-weights", a.weight_mode},
                  {"weight_same_resolved", result.model.meta.weight_same},
                  {"weight_split_resolved", result.model.meta.weight_split},
                  {"train_rows", train_rows.size()},
                  {"val_rows", val_rows.size()}};
    write_run_config(a.out_path + ".run.json", resolved);

    info("train rows: " + std::to_string(train_rows.size()));
    info("val rows: " + std::to_string(val_rows.size()));
    info("epochs run: " + std::to_string(result.model.meta.epochs_run));
    info("best epoch: " + std::to_string(result.model.meta.best_epoch));
    info("final train loss: " + scd::format_double(result.model.meta.final_train_loss));
    info("best val split F1: " + scd::format_double(result.model.meta.best_val_split_f1));
    return 0;
}

// ----------------------------------------------------------------- eval ----

struct EvalArgs {
    std::string model_path;
    std::string data_path;
    std::string corpus_dir;
    std::string embeddings_path;
    std::string train_data_path;
    std::string out_path;
    double threshold = 0.5;
    std::vector<std::string> baselines;
    std::size_t repeat = 1;
    double resample_frac = 1.0;
    bool roc_points = false;
};

json summarize_reports(const std::vector<scd::EvalReport>& reports) {
    auto stat = [&](auto getter) {
        std::vector<double> values;
        values.reserve(reports.size());
        for (const auto& r : reports) values.push_back(getter(r));
        const scd::Stats s = scd::mean_stddev(values);
        return json{{"mean", s.mean}, {"stddev", s.stddev}};
    };
    json j;
    j["precision"] = stat([](const scd::EvalReport& r) { return r.prf_split.precision; });
    j["recall"] = stat([](const scd::EvalReport& r) { return r.prf_split.recall; });
    j["f1"] = stat([](const scd::EvalReport& r) { return r.prf_split.f1; });
    j["accuracy"] = stat([](const scd::EvalReport& r) { return r.accuracy; });
    auto auc_stat = [&](auto pick) -> json {
        for (const auto& r : reports)
            if (!pick(r).defined) return {{"defined", false}};
        return stat([&](const scd::EvalReport& r) { return pick(r).auc; });
    };
    j["auc_split"] = auc_stat([](const scd::EvalReport& r) -> const scd::RocCurve& { return r.roc.split; });
    j["auc_micro"] = auc_stat([](const scd::EvalReport& r) -> const scd::RocCurve& { return r.roc.micro; });
    j["auc_macro"] = auc_stat([](const scd::EvalReport& r) -> const scd::RocCurve& { return r.roc.macro; });
    return j;
}

// Evaluates a scoring function over --repeat resamplings of the test rows.
template <typename ScoreFn>
json repeated_eval(const scd::Dataset& test, const EvalArgs& a, std::uint64_t seed,
                   ScoreFn&& score_rows) {
    std::vector<scd::EvalReport> reports;
    for (std::size_t rep = 0; rep < a.repeat; ++rep) {
        scd::Dataset subset;
        const scd::Dataset* active = &test;
        if (a.resample_frac < 1.0) {
            scd::Rng rng(seed + rep);
            std::vector<std::size_t> rows(test.rows());
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            rng.shuffle(rows);
            const auto keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(a.resample_frac *
                                                         static_cast<double>(test.rows()))));
            rows.resize(std::min(keep, test.rows()));
            std::sort(rows.begin(), rows.end());
            subset = scd::select_rows(test, rows);
            active = &subset;
        }
        reports.push_back(scd::evaluate_scores(score_rows(*active), active->labels, a.threshold));
    }
    json j;
    if (reports.size() == 1) {
        j = scd::report_to_json(reports[0], a.roc_points);
    } else {
        j["repeats"] = reports.size();
        j["summary"] = summarize_reports(reports);
        j["first_run"] = scd::report_to_json(reports[0], a.roc_points);
    }
    return j;
}

int run_eval(const EvalArgs& a, std::uint64_t seed) {
    const scd::Model model = scd::load_model(a.model_path);

    scd::Dataset test;
    std::optional<double> oov_rate;
    if (!a.data_path.empty()) {
        test = scd::load_dataset(a.data_path);
        if (test.scaled)
            throw scd::ValidationError("evaluate on a raw cache; the model applies its own scaler");
    } else if (!a.corpus_dir.empty() && !a.embeddings_path.empty()) {
        const scd::Corpus corpus = scd::load_corpus_dir(a.corpus_dir);
        const scd::EmbeddingTable table = scd::load_embeddings(a.embeddings_path);
        table.reset_counters();
        test = scd::encode_corpus(corpus, table);
        const std::size_t lookups = table.hit_count() + table.miss_count();
        if (lookups > 0)
            oov_rate = static_cast<double>(table.miss_count()) / static_cast<double>(lookups);
    } else {
        throw scd::ConfigError("eval needs --data, or --corpus together with --embeddings");
    }
    if (test.rows() == 0) throw scd::ValidationError("test set holds no windows");
    if (test.features.cols != model.input_dim())
        throw scd::ValidationError("test features have " + std::to_string(test.features.cols) +
                                   " columns, model expects " +
                                   std::to_string(model.input_dim()));

    json out;
    out["model"] = {{"path", a.model_path}, {"hash", file_hash(a.model_path)}};
    out["threshold"] = a.threshold;
    out["seed"] = seed;
    out["test_rows"] = test.rows();
    if (oov_rate) out["oov_rate"] = *oov_rate;

    out["neural"] = repeated_eval(test, a, seed, [&](const scd::Dataset& ds) {
        return scd::model_split_scores(model, ds);
    });

    if (!a.baselines.empty()) {
        scd::Dataset train;
        bool have_train = false;
        for (const std::string& name : a.baselines) {
            if (name != "knn" && name != "majority")
                throw scd::ConfigError("unknown baseline '" + name +
                                       "', expected knn or majority");
        }
        if (!a.train_data_path.empty()) {
            train = scd::load_dataset(a.train_data_path);
            if (train.scaled)
                throw scd::ValidationError("baseline training cache must be raw (unscaled)");
            have_train = true;
        }
        json baselines;
        for (const std::string& name : a.baselines) {
            if (!have_train)
                throw scd::ConfigError("baseline '" + name + "' needs --train-data");
            if (name == "majority") {
                const auto [n_same, n_split] = train.class_counts();
                json entry = repeated_eval(test, a, seed, [&](const scd::Dataset& ds) {
                    const double score =
                        scd::majority_label(n_same, n_split) == scd::Label::Split ? 1.0 : 0.0;
                    return std::vector<double>(ds.rows(), score);
                });
                entry["label"] =
                    scd::label_name(scd::majority_label(n_same, n_split));
                baselines["majority"] = entry;
            } else {
                // The neural model sees scaled features, so the baselines
                // query the same scaled space.
                scd::Dataset knn_train = train;
                scd::Dataset knn_test = test;
                if (!model.scaler.empty()) {
                    knn_train = scd::apply_scaler(model.scaler, knn_train);
                    knn_test = scd::apply_scaler(model.scaler, knn_test);
                }
                json by_k;
                for (std::size_t k : {1, 3, 5, 7, 9}) {
                    if (k > knn_train.rows()) continue;
                    const scd::KnnIndex index = scd::build_knn_index(knn_train, k);
                    by_k["k" + std::to_string(k)] =
                        repeated_eval(knn_test, a, seed, [&](const scd::Dataset& ds) {
                            return scd::knn_scores(index, ds.features);
                        });
                }
                baselines["knn"] = by_k;
            }
        }
        out["baselines"] = baselines;
    }

    const std::string text = out.dump(2) + "\n";
    if (a.out_path.empty()) {
        std::cout << text;
    } else {
        scd::write_file(a.out_path, text);
        json resolved{{"subcommand", "eval"},
                      {"seed", seed},
                      {"model", a.model_path},
                      {"data", a.data_path},
                      {"corpus", a.corpus_dir},
                      {"embeddings", a.embeddings_path},
                      {"train-data", a.train_data_path},
                      {"out", a.out_path},
                      {"threshold", a.threshold},
                      {"baselines", a.baselines},
                      {"repeat", a.repeat},
                      {"resample-frac", a.resample_frac}};
        write_run_config(a.out_path + ".run.json", resolved);
        info("report written to " + a.out_path);
    }
    return 0;
}

// -------------------------------------------------------------- segment ----

struct SegmentArgs {
    std::string model_path;
    std::string input_path;
    std::string embeddings_path;
    std::string out_path;
    double threshold = 0.5;
    double nms = 0.0;
    bool lenient = false;
};

int run_segment(const SegmentArgs& a, std::uint64_t seed) {
    const scd::Model model = scd::load_model(a.model_path);
    const scd::EmbeddingTable table = scd::load_embeddings(a.embeddings_path);
    scd::ParseOptions opts;
    opts.lenient = a.lenient;
    opts.allow_missing_speaker = true;
    const scd::Conversation conv =
        scd::parse_conversation(scd::read_file(a.input_path), fs::path(a.input_path).stem().string(), opts);

    std::optional<double> nms;
    if (a.nms > 0.0) nms = a.nms;
    const auto points = scd::detect_change_points(model, conv, table, a.threshold, nms);
    const std::string csv = scd::serialize_change_points(points);
    if (a.out_path.empty()) {
        std::cout << csv;
    } else {
        scd::write_file(a.out_path, csv);
        json resolved{{"subcommand", "segment"},
                      {"seed", seed},
                      {"model", a.model_path},
                      {"input", a.input_path},
                      {"embeddings", a.embeddings_path},
                      {"out", a.out_path},
                      {"threshold", a.threshold},
                      {"nms", a.nms},
                      {"lenient", a.lenient}};
        write_run_config(a.out_path + ".run.json", resolved);
    }
    info("change points: " + std::to_string(points.size()));
    return 0;
}

// ------------------------------------------------------------ diar-eval ----

struct DiarArgs {
    std::string input_path;
    std::string out_path;
};

int run_diar_eval(const DiarArgs& a) {
    const auto vectors = scd::parse_diarization_json(scd::read_file(a.input_path));
    const scd::DiarizationErrors e = scd::diarization_to_cpd(vectors);
    const scd::PRF p = scd::diarization_prf(e);
    json out{{"type1", e.type1},
             {"type2", e.type2},
             {"boundary_tp", e.boundary_tp},
             {"within_tn", e.within_tn},
             {"prf",
              {{"precision", p.precision},
               {"recall", p.recall},
               {"f1", p.f1},
               {"precision_degenerate", p.precision_degenerate},
               {"recall_degenerate", p.recall_degenerate}}}};
    const std::string text = out.dump(2) + "\n";
    if (a.out_path.empty()) {
        std::cout << text;
    } else {
        scd::write_file(a.out_path, text);
        json resolved{{"subcommand", "diar-eval"}, {"input", a.input_path}, {"out", a.out_path}};
        write_run_config(a.out_path + ".run.json", resolved);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speaker change-point detection toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string config_path;
    app.add_option("--seed", seed, "seed for every random choice in the run");
    app.add_option("--config", config_path, "JSON config file (flags take precedence)");
    app.add_flag("--quiet", g_quiet, "suppress informational output");

    SynthArgs synth;
    auto* sub_synth = app.add_subcommand("synth", "generate a synthetic corpus + embeddings");
    sub_synth->fallthrough();
    auto* o_convs = sub_synth->add_option("--conversations", synth.cfg.n_conversations);
    auto* o_speakers = sub_synth->add_option("--speakers", synth.cfg.n_speakers);
    auto* o_dim = sub_synth->add_option("--dim", synth.cfg.embedding_dim);
    auto* o_wpt = sub_synth->add_option("--words-per-turn", synth.cfg.words_per_turn_mean);
    auto* o_turns = sub_synth->add_option("--turns", synth.cfg.turn_count_mean);
    auto* o_spread = sub_synth->add_option("--spread", synth.cfg.speaker_topic_spread);
    auto* o_pause = sub_synth->add_option("--pause", synth.cfg.pause_at_turn);
    auto* o_rmin = sub_synth->add_option("--rate-min", synth.cfg.speech_rate_min);
    auto* o_rmax = sub_synth->add_option("--rate-max", synth.cfg.speech_rate_max);
    auto* o_groups = sub_synth->add_option("--speaker-groups", synth.cfg.speaker_groups);
    auto* o_synth_out = sub_synth->add_option("--out", synth.out_dir)->required();

    FeaturizeArgs feat;
    auto* sub_feat = app.add_subcommand("featurize", "encode a corpus into a dataset cache");
    sub_feat->fallthrough();
    auto* o_f_corpus = sub_feat->add_option("--corpus", feat.corpus_dir)->required();
    auto* o_f_emb = sub_feat->add_option("--embeddings", feat.embeddings_path)->required();
    auto* o_f_out = sub_feat->add_option("--out", feat.out_path)->required();
    auto* o_f_window = sub_feat->add_option("--window", feat.window);
    auto* o_f_lenient = sub_feat->add_flag("--lenient", feat.lenient);

    TrainArgs train;
    auto* sub_train = app.add_subcommand("train", "train the classifier on a dataset cache");
    sub_train->fallthrough();
    auto* o_t_data = sub_train->add_option("--data", train.data_path)->required();
    auto* o_t_out = sub_train->add_option("--out", train.out_path)->required();
    auto* o_t_corpus = sub_train->add_option("--corpus", train.corpus_dir);
    auto* o_t_mode = sub_train->add_option("--split-mode", train.split_mode);
    auto* o_t_ratio = sub_train->add_option("--split-ratio", train.split_ratio);
    auto* o_t_noscale = sub_train->add_flag("--no-scale", train.no_scale);
    auto* o_t_layers = sub_train->add_option("--layers", train.layers);
    auto* o_t_lr = sub_train->add_option("--lr", train.hp.learning_rate);
    auto* o_t_batch = sub_train->add_option("--batch", train.hp.batch_size);
    auto* o_t_epochs = sub_train->add_option("--epochs", train.hp.epochs);
    auto* o_t_patience = sub_train->add_option("--patience", train.hp.early_stop_patience);
    auto* o_t_weights = sub_train->add_option("--class-weights", train.weight_mode,
                                              "inverse | uniform | explicit");
    auto* o_t_wsame = sub_train->add_option("--w-same", train.w_same);
    auto* o_t_wsplit = sub_train->add_option("--w-split", train.w_split);
    auto* o_t_act = sub_train->add_option("--activation", train.activation, "relu | tanh");
    auto* o_t_dropout = sub_train->add_option("--dropout", train.dropout);

    EvalArgs eval;
    auto* sub_eval = app.add_subcommand("eval", "evaluate a model (and baselines) on a test set");
    sub_eval->fallthrough();
    auto* o_e_model = sub_eval->add_option("--model", eval.model_path)->required();
    auto* o_e_data = sub_eval->add_option("--data", eval.data_path);
    auto* o_e_corpus = sub_eval->add_option("--corpus", eval.corpus_dir);
    auto* o_e_emb = sub_eval->add_option("--embeddings", eval.embeddings_path);
    auto* o_e_train = sub_eval->add_option("--train-data", eval.train_data_path);
    auto* o_e_out = sub_eval->add_option("--out", eval.out_path);
    auto* o_e_thresh = sub_eval->add_option("--threshold", eval.threshold);
    auto* o_e_base = sub_eval->add_option("--baselines", eval.baselines)->delimiter(',');
    auto* o_e_repeat = sub_eval->add_option("--repeat", eval.repeat);
    auto* o_e_frac = sub_eval->add_option("--resample-frac", eval.resample_frac);
    auto* o_e_points = sub_eval->add_flag("--roc-points", eval.roc_points);

    SegmentArgs seg;
    auto* sub_seg = app.add_subcommand("segment", "detect change points in one conversation");
    sub_seg->fallthrough();
    auto* o_s_model = sub_seg->add_option("--model", seg.model_path)->required();
    auto* o_s_input = sub_seg->add_option("--input", seg.input_path)->required();
    auto* o_s_emb = sub_seg->add_option("--embeddings", seg.embeddings_path)->required();
    auto* o_s_out = sub_seg->add_option("--out", seg.out_path);
    auto* o_s_thresh = sub_seg->add_option("--threshold", seg.threshold);
    auto* o_s_nms = sub_seg->add_option("--nms", seg.nms, "suppression radius in seconds");
    auto* o_s_lenient = sub_seg->add_flag("--lenient", seg.lenient);

    DiarArgs diar;
    auto* sub_diar = app.add_subcommand("diar-eval",
                                        "convert diarization vectors to boundary error counts");
    sub_diar->fallthrough();
    auto* o_d_input = sub_diar->add_option("--input", diar.input_path)->required();
    auto* o_d_out = sub_diar->add_option("--out", diar.out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const json cfg = load_config_file(config_path);
        if (sub_synth->parsed()) {
            overlay(cfg, "conversations", o_convs, synth.cfg.n_conversations);
            overlay(cfg, "speakers", o_speakers, synth.cfg.n_speakers);
            overlay(cfg, "dim", o_dim, synth.cfg.embedding_dim);
            overlay(cfg, "words-per-turn", o_wpt, synth.cfg.words_per_turn_mean);
            overlay(cfg, "turns", o_turns, synth.cfg.turn_count_mean);
            overlay(cfg, "spread", o_spread, synth.cfg.speaker_topic_spread);
            overlay(cfg, "pause", o_pause, synth.cfg.pause_at_turn);
            overlay(cfg, "rate-min", o_rmin, synth.cfg.speech_rate_min);
            overlay(cfg, "rate-max", o_rmax, synth.cfg.speech_rate_max);
            overlay(cfg, "speaker-groups", o_groups, synth.cfg.speaker_groups);
            overlay(cfg, "out", o_synth_out, synth.out_dir);
            return run_synth(synth, seed);
        }
        if (sub_feat->parsed()) {
            overlay(cfg, "corpus", o_f_corpus, feat.corpus_dir);
            overlay(cfg, "embeddings", o_f_emb, feat.embeddings_path);
            overlay(cfg, "out", o_f_out, feat.out_path);
            overlay(cfg, "window", o_f_window, feat.window);
            overlay(cfg, "lenient", o_f_lenient, feat.lenient);
            return run_featurize(feat);
        }
        if (sub_train->parsed()) {
            overlay(cfg, "data", o_t_data, train.data_path);
            overlay(cfg, "out", o_t_out, train.out_path);
            overlay(cfg, "corpus", o_t_corpus, train.corpus_dir);
            overlay(cfg, "split-mode", o_t_mode, train.split_mode);
            overlay(cfg, "split-ratio", o_t_ratio, train.split_ratio);
            overlay(cfg, "no-scale", o_t_noscale, train.no_scale);
            overlay(cfg, "layers", o_t_layers, train.layers);
            overlay(cfg, "lr", o_t_lr, train.hp.learning_rate);
            overlay(cfg, "batch", o_t_batch, train.hp.batch_size);
            overlay(cfg, "epochs", o_t_epochs, train.hp.epochs);
            overlay(cfg, "patience", o_t_patience, train.hp.early_stop_patience);
            overlay(cfg, "class-weights", o_t_weights, train.weight_mode);
            overlay(cfg, "w-same", o_t_wsame, train.w_same);
            overlay(cfg, "w-split", o_t_wsplit, train.w_split);
            overlay(cfg, "activation", o_t_act, train.activation);
            overlay(cfg, "dropout", o_t_dropout, train.dropout);
            return run_train(train, seed);
        }
        if (sub_eval->parsed()) {
            overlay(cfg, "model", o_e_model, eval.model_path);
            overlay(cfg, "data", o_e_data, eval.data_path);
            overlay(cfg, "corpus", o_e_corpus, eval.corpus_dir);
            overlay(cfg, "embeddings", o_e_emb, eval.embeddings_path);
            overlay(cfg, "train-data", o_e_train, eval.train_data_path);
            overlay(cfg, "out", o_e_out, eval.out_path);
            overlay(cfg, "threshold", o_e_thresh, eval.threshold);
            overlay(cfg, "baselines", o_e_base, eval.baselines);
            overlay(cfg, "repeat", o_e_repeat, eval.repeat);
            overlay(cfg, "resample-frac", o_e_frac, eval.resample_frac);
            overlay(cfg, "roc-points", o_e_points, eval.roc_points);
            return run_eval(eval, seed);
        }
        if (sub_seg->parsed()) {
            overlay(cfg, "model", o_s_model, seg.model_path);
            overlay(cfg, "input", o_s_input, seg.input_path);
            overlay(cfg, "embeddings", o_s_emb, seg.embeddings_path);
            overlay(cfg, "out", o_s_out, seg.out_path);
            overlay(cfg, "threshold", o_s_thresh, seg.threshold);
            overlay(cfg, "nms", o_s_nms, seg.nms);
            overlay(cfg, "lenient", o_s_lenient, seg.lenient);
            return run_segment(seg, seed);
        }
        if (sub_diar->parsed()) {
            overlay(cfg, "input", o_d_input, diar.input_path);
            overlay(cfg, "out", o_d_out, diar.out_path);
            return run_diar_eval(diar);
        }
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const scd::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const scd::ScdError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
