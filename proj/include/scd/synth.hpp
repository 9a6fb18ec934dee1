// Synthetic conversation generator: seeded, deterministic corpora with
// controllable difficulty (embedding cluster spread, pause length, speaker
// count) plus a matching embedding table. Exists so the pipeline can be
// exercised end to end without any proprietary data.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "scd/common.hpp"
#include "scd/corpus.hpp"
#include "scd/embeddings.hpp"

namespace scd {

struct SynthConfig {
    std::size_t n_conversations = 10;
    std::size_t n_speakers = 4;
    std::size_t embedding_dim = 16;
    double words_per_turn_mean = 8.0;
    double turn_count_mean = 6.0;
    // Radius of each speaker's embedding cluster around its centroid.
    // 0 makes every word of a speaker share one exact vector.
    double speaker_topic_spread = 0.0;
    double pause_at_turn = 0.5;       // seconds between consecutive turns, exact
    double speech_rate_min = 10.0;    // chars/sec, drawn once per speaker
    double speech_rate_max = 20.0;
    // Speakers are partitioned into this many disjoint pools and each
    // conversation draws from a single pool. With > 1 pool the corpus falls
    // apart into speaker-disjoint conversation groups, which is what makes a
    // grouped train/test split possible.
    std::size_t speaker_groups = 1;
    std::uint64_t seed = 0;
};

inline void validate_synth_config(const SynthConfig& c) {
    if (c.n_conversations < 1) throw ConfigError("n_conversations must be >= 1");
    if (c.n_speakers < 1) throw ConfigError("n_speakers must be >= 1");
    if (c.embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
    if (!(c.words_per_turn_mean > 0.0)) throw ConfigError("words_per_turn_mean must be positive");
    if (!(c.turn_count_mean > 0.0)) throw ConfigError("turn_count_mean must be positive");
    if (!(c.speaker_topic_spread >= 0.0)) throw ConfigError("speaker_topic_spread must be >= 0");
    if (!(c.pause_at_turn >= 0.0)) throw ConfigError("pause_at_turn must be >= 0");
    if (!(c.speech_rate_min > 0.0) || c.speech_rate_min > c.speech_rate_max)
        throw ConfigError("speech rate range must satisfy 0 < min <= max");
    if (c.speaker_groups < 1) throw ConfigError("speaker_groups must be >= 1");
    if (c.speaker_groups > c.n_speakers)
        throw ConfigError("speaker_groups cannot exceed n_speakers");
    if (c.turn_count_mean > 1.0 && c.n_speakers / c.speaker_groups < 2)
        throw ConfigError("turns need at least 2 speakers per group; got " +
                          std::to_string(c.n_speakers) + " speakers in " +
                          std::to_string(c.speaker_groups) + " groups");
}

namespace detail {

constexpr std::size_t kSynthVocabPerSpeaker = 40;

inline std::string zero_pad(std::size_t value, std::size_t width) {
    std::string s = std::to_string(value);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

inline std::size_t digits(std::size_t n) {
    std::size_t d = 1;
    while (n >= 10) { n /= 10; ++d; }
    return d;
}

}  // namespace detail

// Generates n_conversations conversations of alternating speaker turns plus
// an embedding table covering every generated word.
//
// Structure, all drawn from one stream seeded with config.seed:
//   - speaker centroids are uniform directions on the unit sphere; each of
//     the speaker's 40 vocabulary words gets centroid + spread * g/sqrt(dim)
//     with g standard normal, so the expected distance to the centroid is
//     about `spread`
//   - word text is unique per speaker and padded to varying lengths so the
//     character-rate features carry signal
//   - each speaker speaks at a fixed rate drawn uniformly from the
//     configured range; duration = utf8 length / rate
//   - turn count per conversation is 1 + Poisson(turn_count_mean - 1), words
//     per turn 1 + Poisson(words_per_turn_mean - 1)
//   - consecutive turns never share a speaker; the gap between turns is
//     exactly pause_at_turn, within-turn gaps are uniform in [0.01, 0.05]
inline std::pair<Corpus, EmbeddingTable> generate_synthetic(const SynthConfig& config) {
    validate_synth_config(config);
    Rng rng(config.seed);

    const std::size_t dim = config.embedding_dim;
    const std::size_t spk_width = std::max<std::size_t>(2, detail::digits(config.n_speakers - 1));
    const std::size_t conv_width = std::max<std::size_t>(3, detail::digits(config.n_conversations - 1));

    std::vector<std::string> speaker_ids(config.n_speakers);
    for (std::size_t s = 0; s < config.n_speakers; ++s)
        speaker_ids[s] = "spk" + detail::zero_pad(s, spk_width);

    // Per-speaker vocabulary and vectors.
    EmbeddingTable table(dim);
    std::vector<std::vector<std::string>> vocab(config.n_speakers);
    std::vector<double> centroid(dim), vec(dim);
    for (std::size_t s = 0; s < config.n_speakers; ++s) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& v : centroid) {
                v = rng.normal();
                norm2 += v * v;
            }
        } while (norm2 == 0.0);
        const double inv_norm = 1.0 / std::sqrt(norm2);
        for (double& v : centroid) v *= inv_norm;

        const double noise_scale = config.speaker_topic_spread / std::sqrt(static_cast<double>(dim));
        vocab[s].reserve(detail::kSynthVocabPerSpeaker);
        for (std::size_t w = 0; w < detail::kSynthVocabPerSpeaker; ++w) {
            std::string word = "s" + std::to_string(s) + "w" + std::to_string(w);
            word.append(w % 7, 'x');  // varied lengths for the rate features
            for (std::size_t d = 0; d < dim; ++d)
                vec[d] = centroid[d] + noise_scale * rng.normal();
            table.set(word, vec);
            vocab[s].push_back(std::move(word));
        }
    }

    std::vector<double> speaker_rate(config.n_speakers);
    for (std::size_t s = 0; s < config.n_speakers; ++s)
        speaker_rate[s] = rng.uniform(config.speech_rate_min, config.speech_rate_max);

    // Disjoint speaker pools, round-robin assignment.
    std::vector<std::vector<std::size_t>> pools(config.speaker_groups);
    for (std::size_t s = 0; s < config.n_speakers; ++s)
        pools[s % config.speaker_groups].push_back(s);

    const double turn_lambda = std::max(0.0, config.turn_count_mean - 1.0);
    const double word_lambda = std::max(0.0, config.words_per_turn_mean - 1.0);

    Corpus corpus;
    corpus.conversations.reserve(config.n_conversations);
    for (std::size_t ci = 0; ci < config.n_conversations; ++ci) {
        const auto& pool = pools[ci % config.speaker_groups];
        Conversation conv{"conv" + detail::zero_pad(ci, conv_width), {}};

        const std::size_t turns = 1 + static_cast<std::size_t>(rng.poisson(turn_lambda));
        std::size_t speaker = pool[rng.uniform_int(pool.size())];
        double t = 0.0;
        for (std::size_t turn = 0; turn < turns; ++turn) {
            if (turn > 0) {
                // Uniform over the pool minus the current speaker.
                std::size_t idx = rng.uniform_int(pool.size() - 1);
                std::size_t count = 0;
                for (std::size_t k = 0; k < pool.size(); ++k) {
                    if (pool[k] == speaker) continue;
                    if (count == idx) { speaker = pool[k]; break; }
                    ++count;
                }
                t += config.pause_at_turn;
            }
            const std::size_t words = 1 + static_cast<std::size_t>(rng.poisson(word_lambda));
            for (std::size_t w = 0; w < words; ++w) {
                if (w > 0) t += rng.uniform(0.01, 0.05);
                const std::string& word = vocab[speaker][rng.uniform_int(vocab[speaker].size())];
                const double duration =
                    static_cast<double>(utf8_length(word)) / speaker_rate[speaker];
                conv.tokens.push_back({word, speaker_ids[speaker], t, t + duration});
                t += duration;
            }
        }
        corpus.conversations.push_back(std::move(conv));
    }
    return {std::move(corpus), std::move(table)};
}

}  // namespace scd
