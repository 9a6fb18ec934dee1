// Sliding-window feature encoding: each window of w consecutive words (6 by
// default) becomes [avg embedding of first half | avg of second half |
// per-word durations | per-word character rates | inter-half gap], labeled
// Split when the speaker changes between the two halves.
#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scd/common.hpp"
#include "scd/corpus.hpp"
#include "scd/embeddings.hpp"
#include "scd/linalg.hpp"

namespace scd {

enum class Label : unsigned char { Same = 0, Split = 1 };

inline const char* label_name(Label l) { return l == Label::Split ? "Split" : "Same"; }

// Denominator floor for the rate features; keeps zero/negative durations
// from producing infinities.
constexpr double kRateEpsilon = 1e-3;

struct Window {
    std::string conversation_id;
    std::size_t index = 1;           // 1-based position of the first token
    std::vector<WordToken> tokens;   // exactly window_size consecutive tokens
    Label label = Label::Same;
};

// All windows of `window_size` consecutive tokens, stride 1: max(0, n-w+1)
// windows. window_size must be even; the label compares the speakers at
// positions w/2 and w/2+1.
inline std::vector<Window> make_windows(const Conversation& conv, std::size_t window_size = 6) {
    if (window_size < 2 || window_size % 2 != 0)
        throw ConfigError("window size must be even and >= 2, got " + std::to_string(window_size));
    std::vector<Window> out;
    if (conv.tokens.size() < window_size) {
        warn(conv.id + ": only " + std::to_string(conv.tokens.size()) +
             " tokens, shorter than window size " + std::to_string(window_size) +
             ", producing no windows");
        return out;
    }
    const std::size_t n_windows = conv.tokens.size() - window_size + 1;
    const std::size_t half = window_size / 2;
    out.reserve(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i) {
        Window w;
        w.conversation_id = conv.id;
        w.index = i + 1;
        w.tokens.assign(conv.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                        conv.tokens.begin() + static_cast<std::ptrdiff_t>(i + window_size));
        w.label = w.tokens[half - 1].speaker != w.tokens[half].speaker ? Label::Split
                                                                       : Label::Same;
        out.push_back(std::move(w));
    }
    return out;
}

inline std::size_t feature_length(std::size_t dim, std::size_t window_size = 6) {
    return 2 * dim + 2 * window_size + 1;
}

// Encodes one window as a vector of length 2*dim + 2*w + 1:
//   [0, dim)        mean embedding of the first half
//   [dim, 2*dim)    mean embedding of the second half
//   next w          durations end-start, clamped at 0
//   next w          rates charlen/max(duration, 1e-3), charlen in Unicode
//                   scalar values of the raw token text
//   last            gap between the halves, max(0, start of second half's
//                   first word - end of first half's last word)
inline std::vector<double> encode_window(const Window& window, const EmbeddingTable& table) {
    const std::size_t w = window.tokens.size();
    const std::size_t half = w / 2;
    const std::size_t dim = table.dim();
    std::vector<double> out;
    out.reserve(feature_length(dim, w));

    const auto first_avg =
        average_embedding(table, std::span<const WordToken>(window.tokens).subspan(0, half));
    const auto second_avg =
        average_embedding(table, std::span<const WordToken>(window.tokens).subspan(half, half));
    out.insert(out.end(), first_avg.begin(), first_avg.end());
    out.insert(out.end(), second_avg.begin(), second_avg.end());

    for (const WordToken& tok : window.tokens)
        out.push_back(std::max(0.0, tok.end - tok.start));
    for (const WordToken& tok : window.tokens) {
        const double duration = tok.end - tok.start;
        out.push_back(static_cast<double>(utf8_length(tok.text)) /
                      std::max(duration, kRateEpsilon));
    }
    out.push_back(std::max(0.0, window.tokens[half].start - window.tokens[half - 1].end));
    return out;
}

// Per-feature z-scoring of the trailing timing block; embedding features
// pass through untouched. Fit on training rows only.
struct Scaler {
    std::size_t offset = 0;        // first scaled column (2*dim)
    std::vector<double> mean;
    std::vector<double> stddev;    // zero-variance columns stored as 1

    bool empty() const { return mean.empty(); }

    void apply_row(std::span<double> row) const {
        if (row.size() != offset + mean.size())
            throw ValidationError("scaler fitted for " + std::to_string(offset + mean.size()) +
                                  " features, row has " + std::to_string(row.size()));
        for (std::size_t j = 0; j < mean.size(); ++j)
            row[offset + j] = (row[offset + j] - mean[j]) / stddev[j];
    }
};

struct Dataset {
    Matrix features;
    std::vector<Label> labels;
    // (conversation id, 1-based window index) per row.
    std::vector<std::pair<std::string, std::size_t>> provenance;
    std::size_t embedding_dim = 0;
    std::size_t window_size = 6;
    bool scaled = false;
    std::string corpus_hash;

    std::size_t rows() const { return features.rows; }
    std::pair<std::size_t, std::size_t> class_counts() const {
        std::size_t same = 0, split = 0;
        for (Label l : labels) (l == Label::Split ? split : same)++;
        return {same, split};
    }
};

inline Dataset encode_corpus(const Corpus& corpus, const EmbeddingTable& table,
                             std::size_t window_size = 6) {
    Dataset ds;
    ds.embedding_dim = table.dim();
    ds.window_size = window_size;
    ds.corpus_hash = corpus_hash(corpus);
    const std::size_t cols = feature_length(table.dim(), window_size);

    std::size_t total = 0;
    for (const Conversation& conv : corpus.conversations)
        if (conv.tokens.size() >= window_size) total += conv.tokens.size() - window_size + 1;
    ds.features = Matrix(total, cols);
    ds.labels.reserve(total);
    ds.provenance.reserve(total);

    std::size_t r = 0;
    for (const Conversation& conv : corpus.conversations) {
        for (const Window& w : make_windows(conv, window_size)) {
            const auto values = encode_window(w, table);
            std::copy(values.begin(), values.end(), ds.features.row(r).begin());
            ds.labels.push_back(w.label);
            ds.provenance.emplace_back(w.conversation_id, w.index);
            ++r;
        }
    }
    return ds;
}

inline Scaler fit_scaler(const Dataset& ds) {
    if (ds.rows() == 0) throw ValidationError("cannot fit scaler on empty dataset");
    Scaler s;
    s.offset = 2 * ds.embedding_dim;
    const std::size_t n_timing = ds.features.cols - s.offset;
    s.mean.assign(n_timing, 0.0);
    s.stddev.assign(n_timing, 0.0);
    const double inv_n = 1.0 / static_cast<double>(ds.rows());
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const auto row = ds.features.row(r);
        for (std::size_t j = 0; j < n_timing; ++j) s.mean[j] += row[s.offset + j];
    }
    for (double& m : s.mean) m *= inv_n;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const auto row = ds.features.row(r);
        for (std::size_t j = 0; j < n_timing; ++j) {
            const double d = row[s.offset + j] - s.mean[j];
            s.stddev[j] += d * d;
        }
    }
    for (double& v : s.stddev) {
        v = std::sqrt(v * inv_n);  // population std
        if (v == 0.0) v = 1.0;
    }
    return s;
}

inline Dataset apply_scaler(const Scaler& scaler, const Dataset& ds) {
    Dataset out = ds;
    for (std::size_t r = 0; r < out.rows(); ++r) scaler.apply_row(out.features.row(r));
    out.scaled = true;
    return out;
}

// Row subset in the given index order; provenance and labels follow.
inline Dataset select_rows(const Dataset& ds, std::span<const std::size_t> rows) {
    Dataset out;
    out.embedding_dim = ds.embedding_dim;
    out.window_size = ds.window_size;
    out.scaled = ds.scaled;
    out.corpus_hash = ds.corpus_hash;
    out.features = Matrix(rows.size(), ds.features.cols);
    out.labels.reserve(rows.size());
    out.provenance.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= ds.rows())
            throw ValidationError("row index " + std::to_string(r) + " out of range, dataset has " +
                                  std::to_string(ds.rows()) + " rows");
        const auto src = ds.features.row(r);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(ds.labels[r]);
        out.provenance.push_back(ds.provenance[r]);
    }
    return out;
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

inline std::uint64_t get_u64(std::string_view bytes, std::size_t& pos) {
    if (pos + 8 > bytes.size()) throw ParseError("file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 8;
    return v;
}

}  // namespace detail

// Binary row cache (magic, shape, row-major doubles, labels, provenance)
// plus a JSON sidecar at <path>.meta.json describing how the rows were made.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::string out = "SCDFEA01";
    detail::put_u64(out, ds.rows());
    detail::put_u64(out, ds.features.cols);
    out.append(reinterpret_cast<const char*>(ds.features.data.data()),
               ds.features.data.size() * sizeof(double));
    for (Label l : ds.labels) out += static_cast<char>(l);
    for (const auto& [id, index] : ds.provenance) {
        detail::put_u64(out, id.size());
        out += id;
        detail::put_u64(out, index);
    }
    write_file(path, out);

    nlohmann::json meta{
        {"format", "SCDFEA01"},
        {"rows", ds.rows()},
        {"feature_length", ds.features.cols},
        {"embedding_dim", ds.embedding_dim},
        {"window_size", ds.window_size},
        {"rate_epsilon", kRateEpsilon},
        {"clamping", "duration at 0, rate denominator at epsilon, gap at 0"},
        {"scaled", ds.scaled},
        {"corpus_hash", ds.corpus_hash},
        {"class_counts",
         {{"same", ds.class_counts().first}, {"split", ds.class_counts().second}}},
    };
    write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 8 || bytes.substr(0, 8) != "SCDFEA01")
        throw ParseError(path.string() + ": not a dataset cache (bad magic)");
    std::size_t pos = 8;
    const std::uint64_t rows = detail::get_u64(bytes, pos);
    const std::uint64_t cols = detail::get_u64(bytes, pos);

    Dataset ds;
    ds.features = Matrix(rows, cols);
    const std::size_t matrix_bytes = static_cast<std::size_t>(rows) * cols * sizeof(double);
    if (pos + matrix_bytes > bytes.size()) throw ParseError(path.string() + ": truncated matrix");
    std::memcpy(ds.features.data.data(), bytes.data() + pos, matrix_bytes);
    pos += matrix_bytes;

    if (pos + rows > bytes.size()) throw ParseError(path.string() + ": truncated labels");
    ds.labels.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto raw = static_cast<unsigned char>(bytes[pos + r]);
        if (raw > 1) throw ParseError(path.string() + ": bad label byte");
        ds.labels.push_back(static_cast<Label>(raw));
    }
    pos += rows;

    ds.provenance.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) {
        const std::uint64_t len = detail::get_u64(bytes, pos);
        if (pos + len > bytes.size()) throw ParseError(path.string() + ": truncated provenance");
        std::string id = bytes.substr(pos, len);
        pos += len;
        const std::uint64_t index = detail::get_u64(bytes, pos);
        ds.provenance.emplace_back(std::move(id), index);
    }

    const std::filesystem::path meta_path = path.string() + ".meta.json";
    if (!std::filesystem::exists(meta_path))
        throw IoError(path.string() + ": sidecar " + meta_path.string() + " is missing");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string() + ": " + e.what());
    }
    try {
        ds.embedding_dim = meta.at("embedding_dim").get<std::size_t>();
        ds.window_size = meta.at("window_size").get<std::size_t>();
        ds.scaled = meta.at("scaled").get<bool>();
        ds.corpus_hash = meta.value("corpus_hash", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path.string() + ": " + e.what());
    }
    if (feature_length(ds.embedding_dim, ds.window_size) != cols)
        throw ParseError(meta_path.string() + ": feature length does not match matrix shape");
    return ds;
}

}  // namespace scd
