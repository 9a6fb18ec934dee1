// Word-level transcript corpus: parsing, validation and serialization of the
// `word,speaker,start,end` CSV format, plus directory-level corpus IO.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scd/common.hpp"

namespace scd {

// One transcribed word. Times are seconds.
struct WordToken {
    std::string text;
    std::string speaker;  // opaque identifier; empty when the source had no speaker column
    double start = 0.0;
    double end = 0.0;
};

struct Conversation {
    std::string id;  // source filename stem
    std::vector<WordToken> tokens;
};

struct Corpus {
    std::vector<Conversation> conversations;
};

struct ParseOptions {
    // Strict (default): end < start, non-monotone starts, empty words and
    // negative starts are hard errors. Lenient: clamp/skip with a warning;
    // real speech-to-text output is noisy.
    bool lenient = false;
    // Accept a `word,start,end` header (no speaker column); used by the
    // segment command where gold speakers may not exist.
    bool allow_missing_speaker = false;
};

struct ValidationIssue {
    std::size_t row;  // 1-based CSV record number (header is row 1)
    std::string message;
};

namespace detail {

// RFC-4180 record splitter: quoted fields may contain commas, newlines and
// doubled quotes. Accepts LF and CRLF line endings.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool record_open = false;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty()) {
                    in_quotes = true;
                } else {
                    field += c;  // stray quote mid-field, keep literally
                }
                record_open = true;
                ++i;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                record_open = true;
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                record.push_back(std::move(field));
                field.clear();
                records.push_back(std::move(record));
                record.clear();
                record_open = false;
                ++i;
                break;
            default:
                field += c;
                record_open = true;
                ++i;
                break;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field at end of input");
    if (record_open || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// Flags every token-level and ordering violation without deciding policy;
// the loader turns these into errors (strict) or warnings (lenient).
inline std::vector<ValidationIssue> validate_conversation(const Conversation& conv) {
    std::vector<ValidationIssue> issues;
    double prev_start = -1.0;
    for (std::size_t i = 0; i < conv.tokens.size(); ++i) {
        const WordToken& tok = conv.tokens[i];
        const std::size_t row = i + 2;  // header is row 1
        if (tok.text.empty()) issues.push_back({row, "empty word text"});
        if (!(tok.start >= 0.0)) issues.push_back({row, "negative start time"});
        if (tok.end < tok.start)
            issues.push_back({row, "end time " + format_double(tok.end) + " < start time " +
                                       format_double(tok.start)});
        if (i > 0 && tok.start < prev_start)
            issues.push_back({row, "start times not non-decreasing"});
        prev_start = std::max(prev_start, tok.start);
    }
    return issues;
}

// Parses one conversation CSV. Header must be `word,speaker,start,end`
// (or `word,start,end` when opt.allow_missing_speaker is set). Row numbers in
// errors are 1-based record numbers including the header.
inline Conversation parse_conversation(std::string_view csv_bytes, std::string id,
                                       const ParseOptions& opt = {}) {
    std::vector<std::vector<std::string>> records;
    try {
        records = detail::parse_csv(csv_bytes);
    } catch (const ParseError& e) {
        throw ParseError(id + ": " + e.what());
    }
    if (records.empty())
        throw ParseError(id + ": empty input, expected header 'word,speaker,start,end'");

    static const std::vector<std::string> kHeader = {"word", "speaker", "start", "end"};
    static const std::vector<std::string> kHeaderNoSpeaker = {"word", "start", "end"};
    bool has_speaker = true;
    if (records[0] == kHeader) {
        has_speaker = true;
    } else if (opt.allow_missing_speaker && records[0] == kHeaderNoSpeaker) {
        has_speaker = false;
    } else {
        throw ParseError(id + ": bad header row, expected 'word,speaker,start,end'");
    }

    Conversation conv{std::move(id), {}};
    const std::size_t expected_cols = has_speaker ? 4 : 3;
    double prev_start = -1.0;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string row = "row " + std::to_string(r + 1);
        if (rec.size() != expected_cols)
            throw ParseError(conv.id + ": " + row + ": expected " + std::to_string(expected_cols) +
                             " columns, got " + std::to_string(rec.size()));

        WordToken tok;
        tok.text = rec[0];
        tok.speaker = has_speaker ? rec[1] : std::string();
        const std::string& start_field = rec[has_speaker ? 2 : 1];
        const std::string& end_field = rec[has_speaker ? 3 : 2];
        if (!parse_double(start_field, tok.start))
            throw ParseError(conv.id + ": " + row + ": non-numeric start time '" + start_field + "'");
        if (!parse_double(end_field, tok.end))
            throw ParseError(conv.id + ": " + row + ": non-numeric end time '" + end_field + "'");
        if (!std::isfinite(tok.start) || !std::isfinite(tok.end))
            throw ParseError(conv.id + ": " + row + ": non-finite time");

        if (tok.text.empty()) {
            if (!opt.lenient)
                throw ValidationError(conv.id + ": " + row + ": empty word text");
            warn(conv.id + ": " + row + ": empty word text, row skipped");
            continue;
        }
        if (tok.start < 0.0) {
            if (!opt.lenient)
                throw ValidationError(conv.id + ": " + row + ": negative start time");
            warn(conv.id + ": " + row + ": negative start time clamped to 0");
            tok.start = 0.0;
        }
        if (tok.end < tok.start) {
            if (!opt.lenient)
                throw ValidationError(conv.id + ": " + row + ": end time " +
                                      format_double(tok.end) + " < start time " +
                                      format_double(tok.start));
            warn(conv.id + ": " + row + ": end < start, clamped to start");
            tok.end = tok.start;
        }
        if (!conv.tokens.empty() && tok.start < prev_start) {
            if (!opt.lenient)
                throw ValidationError(conv.id + ": " + row + ": start times not non-decreasing");
            warn(conv.id + ": " + row + ": start times not non-decreasing");
        }
        prev_start = std::max(prev_start, tok.start);
        conv.tokens.push_back(std::move(tok));
    }
    return conv;
}

inline std::string serialize_conversation(const Conversation& conv) {
    std::string out = "word,speaker,start,end\n";
    for (const WordToken& tok : conv.tokens) {
        out += detail::csv_escape(tok.text);
        out += ',';
        out += detail::csv_escape(tok.speaker);
        out += ',';
        out += format_double(tok.start);
        out += ',';
        out += format_double(tok.end);
        out += '\n';
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

// Loads every *.csv in a directory (sorted by filename, so corpus order is
// stable); the conversation id is the filename stem.
inline Corpus load_corpus_dir(const std::filesystem::path& dir, const ParseOptions& opt = {}) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("corpus directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    Corpus corpus;
    for (const auto& file : files)
        corpus.conversations.push_back(parse_conversation(read_file(file), file.stem().string(), opt));
    return corpus;
}

inline void write_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const Conversation& conv : corpus.conversations)
        write_file(dir / (conv.id + ".csv"), serialize_conversation(conv));
}

// Content hash over ids and serialized rows; recorded in dataset sidecars so
// a cache can be traced back to the exact corpus it was built from.
inline std::string corpus_hash(const Corpus& corpus) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const Conversation& conv : corpus.conversations) {
        h = fnv1a64(conv.id, h);
        h = fnv1a64("\n", h);
        h = fnv1a64(serialize_conversation(conv), h);
    }
    return to_hex(h);
}

inline void check_unique_ids(const Corpus& corpus) {
    std::vector<std::string_view> ids;
    ids.reserve(corpus.conversations.size());
    for (const auto& c : corpus.conversations) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end())
        throw ValidationError("duplicate conversation id in corpus: " + std::string(*dup));
}

}  // namespace scd
