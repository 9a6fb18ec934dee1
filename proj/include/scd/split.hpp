// Train/test splitting. By-window shuffles encoded window rows; grouped mode
// assigns whole conversations so train and test share no speaker, which
// requires moving entire speaker-connected components at once.
#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "scd/common.hpp"
#include "scd/corpus.hpp"

namespace scd {

enum class SplitMode { ByWindow, ByConversation };

inline SplitMode parse_split_mode(std::string_view s) {
    if (s == "by-window") return SplitMode::ByWindow;
    if (s == "by-conversation") return SplitMode::ByConversation;
    throw ConfigError("unknown split mode '" + std::string(s) +
                      "', expected by-window or by-conversation");
}

// Exactly one pair of members is populated, per `mode`: canonical dataset row
// indices (by-window) or conversation ids (by-conversation). Row indices are
// positions in the dataset built by encoding conversations in corpus order.
struct CorpusSplit {
    SplitMode mode = SplitMode::ByWindow;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

inline std::size_t window_count(const Conversation& conv) {
    return conv.tokens.size() >= 6 ? conv.tokens.size() - 5 : 0;
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

inline CorpusSplit split_corpus(const Corpus& corpus, double ratio, SplitMode mode,
                                std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ConfigError("split ratio must be in (0, 1), got " + format_double(ratio));
    Rng rng(seed);
    CorpusSplit split;
    split.mode = mode;

    if (mode == SplitMode::ByWindow) {
        std::size_t total = 0;
        for (const auto& conv : corpus.conversations) total += window_count(conv);
        if (total < 2)
            throw ValidationError("by-window split needs at least 2 windows, corpus has " +
                                  std::to_string(total));
        std::vector<std::size_t> rows(total);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        rng.shuffle(rows);
        auto train_n = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(total)));
        train_n = std::clamp<std::size_t>(train_n, 1, total - 1);
        split.train_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(train_n));
        split.test_rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(train_n), rows.end());
        std::sort(split.train_rows.begin(), split.train_rows.end());
        std::sort(split.test_rows.begin(), split.test_rows.end());
        return split;
    }

    // Grouped mode: conversations sharing any speaker must land on the same
    // side, so the unit of assignment is a connected component of the
    // conversation-speaker graph.
    const std::size_t n = corpus.conversations.size();
    if (n < 2)
        throw ValidationError("by-conversation split needs at least 2 conversations");
    detail::UnionFind uf(n);
    std::unordered_map<std::string, std::size_t> first_conv_of_speaker;
    for (std::size_t i = 0; i < n; ++i) {
        for (const WordToken& tok : corpus.conversations[i].tokens) {
            auto [it, inserted] = first_conv_of_speaker.try_emplace(tok.speaker, i);
            if (!inserted) uf.unite(it->second, i);
        }
    }
    std::unordered_map<std::size_t, std::size_t> root_to_component;
    std::vector<std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = uf.find(i);
        auto [it, inserted] = root_to_component.try_emplace(root, components.size());
        if (inserted) components.emplace_back();
        components[it->second].push_back(i);
    }
    if (components.size() < 2)
        throw ValidationError(
            "by-conversation split impossible: all conversations share speakers "
            "(one connected component)");

    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    const auto target_test = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround((1.0 - ratio) * static_cast<double>(n))));
    std::vector<bool> in_test(n, false);
    std::size_t test_count = 0;
    for (std::size_t c : order) {
        if (test_count >= target_test) break;
        for (std::size_t i : components[c]) {
            in_test[i] = true;
            ++test_count;
        }
    }
    if (test_count == n)
        throw ValidationError(
            "by-conversation split impossible: test side absorbed every conversation");
    for (std::size_t i = 0; i < n; ++i) {
        (in_test[i] ? split.test_ids : split.train_ids).push_back(corpus.conversations[i].id);
    }
    return split;
}

// Conversations whose id is in `ids`, in corpus order.
inline Corpus subset_by_ids(const Corpus& corpus, const std::vector<std::string>& ids) {
    Corpus out;
    for (const Conversation& conv : corpus.conversations)
        if (std::find(ids.begin(), ids.end(), conv.id) != ids.end())
            out.conversations.push_back(conv);
    return out;
}

}  // namespace scd
