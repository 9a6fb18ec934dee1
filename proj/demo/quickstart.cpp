// End-to-end tour of the library on a small synthetic corpus: generate,
// encode, split, train, evaluate, and pull change points out of one
// conversation. Mirrors what the CLI does, but through the C++ API.
#include <iostream>

#include "scd/scd.hpp"

int main() {
    scd::SynthConfig cfg;
    cfg.n_conversations = 40;
    cfg.n_speakers = 6;
    cfg.embedding_dim = 16;
    cfg.words_per_turn_mean = 8.0;
    cfg.turn_count_mean = 6.0;
    cfg.speaker_topic_spread = 0.4;
    cfg.pause_at_turn = 0.3;
    cfg.seed = 42;
    auto [corpus, table] = scd::generate_synthetic(cfg);

    scd::Dataset full = scd::encode_corpus(corpus, table);
    const auto [n_same, n_split] = full.class_counts();
    std::cout << "windows: " << full.rows() << " (" << n_split << " split, " << n_same
              << " same), " << full.features.cols << " features each\n";

    const scd::CorpusSplit split =
        scd::split_corpus(corpus, 0.8, scd::SplitMode::ByWindow, cfg.seed);
    scd::Dataset train_ds = scd::select_rows(full, split.train_rows);
    scd::Dataset test_ds = scd::select_rows(full, split.test_rows);

    const scd::Scaler scaler = scd::fit_scaler(train_ds);
    train_ds = scd::apply_scaler(scaler, train_ds);
    const scd::Dataset test_scaled = scd::apply_scaler(scaler, test_ds);

    scd::Architecture arch;
    arch.layer_dims = scd::default_layer_dims(full.features.cols);
    scd::Hyperparams hp;
    hp.learning_rate = 1e-3;
    hp.epochs = 20;
    hp.batch_size = 32;  // ~1800 windows; the stock 256 leaves too few updates
    hp.seed = cfg.seed;

    scd::TrainResult result =
        scd::train(scd::init_model(arch, cfg.seed), train_ds, test_scaled, hp);
    result.model.scaler = scaler;

    const scd::EvalReport report = scd::evaluate_model(result.model, test_ds);
    std::cout << "split precision " << report.prf_split.precision << ", recall "
              << report.prf_split.recall << ", F1 " << report.prf_split.f1 << "\n";
    if (report.roc.micro.defined)
        std::cout << "micro AUC " << report.roc.micro.auc << "\n";

    const auto points =
        scd::detect_change_points(result.model, corpus.conversations.front(), table, 0.5);
    std::cout << "change points in " << corpus.conversations.front().id << ": "
              << points.size() << "\n";
    for (const auto& p : points)
        std::cout << "  t=" << p.time << "s p=" << p.p_split << "\n";
    return 0;
}
