// Word-embedding table with text .vec IO (`count dim` header, then one
// `word v1 .. vdim` line per word). Lookup misses fall back to the zero
// vector and are counted, since coverage gaps are a real evaluation hazard.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scd/common.hpp"
#include "scd/corpus.hpp"

namespace scd {

class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }

    bool contains(std::string_view word) const {
        return index_.find(std::string(word)) != index_.end();
    }

    // Insert or overwrite. Insertion order is preserved for serialization.
    void set(std::string_view word, std::span<const double> vec) {
        if (vec.size() != dim_)
            throw ValidationError("embedding for '" + std::string(word) + "' has dimension " +
                                  std::to_string(vec.size()) + ", table has " + std::to_string(dim_));
        auto it = index_.find(std::string(word));
        if (it != index_.end()) {
            std::copy(vec.begin(), vec.end(), vectors_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
            return;
        }
        index_.emplace(std::string(word), words_.size());
        words_.emplace_back(word);
        vectors_.insert(vectors_.end(), vec.begin(), vec.end());
    }

    // Known word: its vector. Unknown: the zero vector, and the miss counter
    // advances. Returned span stays valid until the next set().
    std::span<const double> lookup(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) {
            ++miss_count_;
            return zero_;
        }
        ++hit_count_;
        return {vectors_.data() + it->second * dim_, dim_};
    }

    // lookup() without touching the hit/miss counters; nullptr on miss.
    const double* find_vector(std::string_view word) const {
        auto it = index_.find(std::string(word));
        return it == index_.end() ? nullptr : vectors_.data() + it->second * dim_;
    }

    std::size_t hit_count() const { return hit_count_; }
    std::size_t miss_count() const { return miss_count_; }
    void reset_counters() const { hit_count_ = 0; miss_count_ = 0; }

    const std::vector<std::string>& words() const { return words_; }
    std::span<const double> vector_at(std::size_t i) const {
        return {vectors_.data() + i * dim_, dim_};
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<double> vectors_;  // row-major, words_.size() x dim_
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> zero_;
    mutable std::size_t hit_count_ = 0;
    mutable std::size_t miss_count_ = 0;
};

// Parses the .vec text format. First line: `<count> <dim>`. Then exactly
// count lines of `word v1 .. vdim`, space-separated. Duplicate words keep the
// last occurrence (with a warning).
inline EmbeddingTable parse_embeddings(std::string_view text) {
    std::size_t pos = 0;
    const std::size_t n = text.size();
    auto next_line = [&]() -> std::string_view {
        if (pos >= n) return {};
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = n;
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return line;
    };
    auto split_ws = [](std::string_view line) {
        std::vector<std::string_view> parts;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && line[i] == ' ') ++i;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ') ++i;
            if (i > start) parts.push_back(line.substr(start, i - start));
        }
        return parts;
    };

    const auto header = split_ws(next_line());
    if (header.size() != 2)
        throw ParseError("embedding header must be '<count> <dim>'");
    std::size_t count = 0, dim = 0;
    try {
        count = std::stoull(std::string(header[0]));
        dim = std::stoull(std::string(header[1]));
    } catch (const std::exception&) {
        throw ParseError("non-numeric embedding header");
    }
    if (dim == 0) throw ParseError("embedding dimension must be positive");

    EmbeddingTable table(dim);
    std::vector<double> vec(dim);
    for (std::size_t row = 0; row < count; ++row) {
        if (pos > n && row < count)
            throw ParseError("embedding file ends early: expected " + std::to_string(count) +
                             " rows, got " + std::to_string(row));
        const auto parts = split_ws(next_line());
        if (parts.empty())
            throw ParseError("embedding file ends early: expected " + std::to_string(count) +
                             " rows, got " + std::to_string(row));
        if (parts.size() != dim + 1)
            throw ParseError("embedding row " + std::to_string(row + 2) + ": expected " +
                             std::to_string(dim + 1) + " fields, got " + std::to_string(parts.size()));
        for (std::size_t d = 0; d < dim; ++d) {
            if (!parse_double(parts[d + 1], vec[d]))
                throw ParseError("embedding row " + std::to_string(row + 2) +
                                 ": non-numeric component '" + std::string(parts[d + 1]) + "'");
        }
        if (table.contains(parts[0]))
            warn("duplicate embedding for '" + std::string(parts[0]) + "', keeping last");
        table.set(parts[0], vec);
    }
    return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    return parse_embeddings(read_file(path));
}

inline std::string serialize_embeddings(const EmbeddingTable& table) {
    std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += table.words()[i];
        for (double v : table.vector_at(i)) {
            out += ' ';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    write_file(path, serialize_embeddings(table));
}

// Mean of the vectors for tokens[first..first+count); OOV words contribute
// zero vectors but still count in the divisor.
inline std::vector<double> average_embedding(const EmbeddingTable& table,
                                             std::span<const WordToken> tokens) {
    if (tokens.empty()) throw ValidationError("cannot average zero tokens");
    std::vector<double> acc(table.dim(), 0.0);
    for (const WordToken& tok : tokens) {
        const auto vec = table.lookup(tok.text);
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += vec[d];
    }
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& v : acc) v *= inv;
    return acc;
}

}  // namespace scd
