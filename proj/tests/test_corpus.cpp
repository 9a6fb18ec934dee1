#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "scd/common.hpp"
#include "scd/corpus.hpp"
#include "test_util.hpp"

using namespace scd;
using testutil::TempDir;
using testutil::WarnCapture;

namespace {

const std::string kMinimalCsv =
    "word,speaker,start,end\n"
    "shalom,A,0.0,0.4\n"
    "lekha,A,0.5,0.9\n";

}  // namespace

TEST_CASE("parse_conversation reads a minimal transcript") {
    Conversation conv = parse_conversation(kMinimalCsv, "c1");
    CHECK(conv.id == "c1");
    REQUIRE(conv.tokens.size() == 2);
    CHECK(conv.tokens[0].text == "shalom");
    CHECK(conv.tokens[0].speaker == "A");
    CHECK(conv.tokens[0].start == 0.0);
    CHECK(conv.tokens[0].end == 0.4);
    CHECK(conv.tokens[1].text == "lekha");
    CHECK(conv.tokens[1].end == 0.9);
}

TEST_CASE("parse_conversation accepts a header-only file") {
    Conversation conv = parse_conversation("word,speaker,start,end\n", "empty");
    CHECK(conv.tokens.empty());
}

TEST_CASE("parse_conversation rejects bad input") {
    SECTION("empty input") {
        CHECK_THROWS_MATCHES(parse_conversation("", "x"), ParseError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("empty input")));
    }
    SECTION("wrong header") {
        CHECK_THROWS_MATCHES(parse_conversation("token,who,begin,finish\n", "x"), ParseError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("bad header")));
    }
    SECTION("speakerless header needs the option") {
        CHECK_THROWS_AS(parse_conversation("word,start,end\nhi,0,1\n", "x"), ParseError);
    }
    SECTION("wrong column count names the row") {
        const std::string csv = "word,speaker,start,end\nhi,A,0.0,0.5\nextra,B,1.0\n";
        CHECK_THROWS_MATCHES(
            parse_conversation(csv, "x"), ParseError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("row 3")));
    }
    SECTION("non-numeric time") {
        const std::string csv = "word,speaker,start,end\nhi,A,zero,0.5\n";
        CHECK_THROWS_MATCHES(parse_conversation(csv, "x"), ParseError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("non-numeric start")));
    }
    SECTION("non-finite time") {
        const std::string csv = "word,speaker,start,end\nhi,A,nan,0.5\n";
        CHECK_THROWS_AS(parse_conversation(csv, "x"), ParseError);
    }
    SECTION("unterminated quote") {
        const std::string csv = "word,speaker,start,end\n\"hi,A,0.0,0.5\n";
        CHECK_THROWS_MATCHES(parse_conversation(csv, "x"), ParseError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("unterminated")));
    }
}

TEST_CASE("strict parsing rejects invalid rows with their row number") {
    SECTION("end before start") {
        const std::string csv = "word,speaker,start,end\nok,A,0.0,0.5\nhi,A,1.0,0.5\n";
        CHECK_THROWS_MATCHES(
            parse_conversation(csv, "x"), ValidationError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("row 3")));
    }
    SECTION("negative start") {
        const std::string csv = "word,speaker,start,end\nhi,A,-0.1,0.5\n";
        CHECK_THROWS_AS(parse_conversation(csv, "x"), ValidationError);
    }
    SECTION("empty word") {
        const std::string csv = "word,speaker,start,end\n,A,0.0,0.5\n";
        CHECK_THROWS_AS(parse_conversation(csv, "x"), ValidationError);
    }
    SECTION("non-monotone starts") {
        const std::string csv =
            "word,speaker,start,end\na,A,1.0,1.5\nb,A,0.2,0.6\n";
        CHECK_THROWS_AS(parse_conversation(csv, "x"), ValidationError);
    }
}

TEST_CASE("lenient parsing clamps and skips with warnings") {
    ParseOptions opt;
    opt.lenient = true;
    WarnCapture capture;

    const std::string csv =
        "word,speaker,start,end\n"
        ",A,0.0,0.2\n"
        "neg,A,-0.5,0.3\n"
        "swap,A,1.0,0.4\n"
        "back,A,0.6,0.9\n";
    Conversation conv = parse_conversation(csv, "noisy", opt);

    REQUIRE(conv.tokens.size() == 3);  // empty-word row skipped
    CHECK(conv.tokens[0].text == "neg");
    CHECK(conv.tokens[0].start == 0.0);  // clamped
    CHECK(conv.tokens[1].text == "swap");
    CHECK(conv.tokens[1].end == conv.tokens[1].start);  // clamped to start
    CHECK(conv.tokens[2].text == "back");               // kept despite going backwards

    CHECK(capture.any_contains("row 2"));
    CHECK(capture.any_contains("clamped to 0"));
    CHECK(capture.any_contains("clamped to start"));
    CHECK(capture.any_contains("not non-decreasing"));
}

TEST_CASE("allow_missing_speaker reads three-column files") {
    ParseOptions opt;
    opt.allow_missing_speaker = true;
    Conversation conv = parse_conversation("word,start,end\nhi,0.0,0.4\nthere,0.5,0.8\n", "ns", opt);
    REQUIRE(conv.tokens.size() == 2);
    CHECK(conv.tokens[0].speaker.empty());
    CHECK(conv.tokens[1].start == 0.5);
    // The four-column header still works with the option set.
    CHECK(parse_conversation(kMinimalCsv, "c1", opt).tokens.size() == 2);
}

TEST_CASE("csv quoting survives commas, quotes and newlines") {
    Conversation conv{"quoted", {}};
    conv.tokens.push_back({"a,b", "spk,1", 0.0, 0.1});
    conv.tokens.push_back({"say \"hi\"", "spk\"2", 0.2, 0.3});
    conv.tokens.push_back({"line\nbreak", "s", 0.4, 0.5});
    conv.tokens.push_back({"tab\rreturn", "s", 0.6, 0.7});

    const std::string bytes = serialize_conversation(conv);
    Conversation back = parse_conversation(bytes, conv.id);
    REQUIRE(back.tokens.size() == conv.tokens.size());
    for (std::size_t i = 0; i < conv.tokens.size(); ++i) {
        CHECK(back.tokens[i].text == conv.tokens[i].text);
        CHECK(back.tokens[i].speaker == conv.tokens[i].speaker);
        CHECK(back.tokens[i].start == conv.tokens[i].start);
        CHECK(back.tokens[i].end == conv.tokens[i].end);
    }
}

TEST_CASE("crlf input parses like lf input") {
    const std::string crlf = "word,speaker,start,end\r\nhi,A,0.0,0.4\r\nthere,B,0.5,0.9\r\n";
    Conversation conv = parse_conversation(crlf, "crlf");
    REQUIRE(conv.tokens.size() == 2);
    CHECK(conv.tokens[1].speaker == "B");
}

TEST_CASE("serialize_conversation emits the canonical format") {
    Conversation conv{"c", {{"hi", "A", 0.0, 0.5}, {"there", "B", 0.5, 1.25}}};
    CHECK(serialize_conversation(conv) ==
          "word,speaker,start,end\n"
          "hi,A,0,0.5\n"
          "there,B,0.5,1.25\n");
}

TEST_CASE("round trip is exact for random nasty conversations") {
    Rng rng(42);
    const std::string alphabet = "ab,\"\n\r x\xc3\xa9";  // includes a two-byte scalar
    for (int iter = 0; iter < 50; ++iter) {
        Conversation conv{"r" + std::to_string(iter), {}};
        double t = 0.0;
        const std::size_t n = 1 + rng.uniform_int(8);
        for (std::size_t i = 0; i < n; ++i) {
            std::string text, speaker;
            const std::size_t text_len = 1 + rng.uniform_int(6);
            for (std::size_t j = 0; j < text_len; ++j)
                text += alphabet[rng.uniform_int(alphabet.size())];
            if (text[0] == '\xc3' || text.back() == '\xc3') text = "a" + text + "a";
            const std::size_t spk_len = rng.uniform_int(4);
            for (std::size_t j = 0; j < spk_len; ++j)
                speaker += alphabet[rng.uniform_int(alphabet.size())];
            if (!speaker.empty() && (speaker[0] == '\xc3' || speaker.back() == '\xc3'))
                speaker = "s" + speaker + "s";
            const double start = t + rng.u01() * 0.2;
            const double end = start + rng.u01();
            conv.tokens.push_back({text, speaker, start, end});
            t = start;
        }
        Conversation back = parse_conversation(serialize_conversation(conv), conv.id);
        REQUIRE(back.tokens.size() == conv.tokens.size());
        for (std::size_t i = 0; i < conv.tokens.size(); ++i) {
            CHECK(back.tokens[i].text == conv.tokens[i].text);
            CHECK(back.tokens[i].speaker == conv.tokens[i].speaker);
            CHECK(back.tokens[i].start == conv.tokens[i].start);
            CHECK(back.tokens[i].end == conv.tokens[i].end);
        }
    }
}

TEST_CASE("validate_conversation reports 1-based rows counting the header") {
    Conversation conv{"v", {}};
    conv.tokens.push_back({"ok", "A", 0.0, 0.5});
    conv.tokens.push_back({"", "A", 0.6, 0.4});    // empty text and end < start
    conv.tokens.push_back({"back", "A", 0.1, 0.2});  // non-monotone
    auto issues = validate_conversation(conv);
    REQUIRE(issues.size() == 3);
    CHECK(issues[0].row == 3);
    CHECK(issues[1].row == 3);
    CHECK(issues[2].row == 4);
    CHECK(issues[2].message.find("non-decreasing") != std::string::npos);
}

TEST_CASE("corpus directory io round trips and sorts by id") {
    TempDir tmp;
    Corpus corpus;
    corpus.conversations.push_back(parse_conversation(kMinimalCsv, "zulu"));
    corpus.conversations.push_back(
        parse_conversation("word,speaker,start,end\nhey,B,0.0,0.3\n", "alpha"));
    write_corpus_dir(corpus, tmp.path);

    Corpus loaded = load_corpus_dir(tmp.path);
    REQUIRE(loaded.conversations.size() == 2);
    CHECK(loaded.conversations[0].id == "alpha");
    CHECK(loaded.conversations[1].id == "zulu");
    CHECK(loaded.conversations[1].tokens.size() == 2);

    // Non-csv files are ignored.
    write_file(tmp.path / "notes.txt", "ignore me");
    CHECK(load_corpus_dir(tmp.path).conversations.size() == 2);
}

TEST_CASE("load_corpus_dir fails on a missing directory") {
    TempDir tmp;
    CHECK_THROWS_AS(load_corpus_dir(tmp.path / "nope"), IoError);
}

TEST_CASE("corpus_hash is stable and content sensitive") {
    Corpus corpus;
    corpus.conversations.push_back(parse_conversation(kMinimalCsv, "c1"));
    const std::string h1 = corpus_hash(corpus);
    CHECK(h1 == corpus_hash(corpus));
    CHECK(h1.size() == 16);

    Corpus other = corpus;
    other.conversations[0].tokens[0].end = 0.41;
    CHECK(corpus_hash(other) != h1);

    Corpus renamed = corpus;
    renamed.conversations[0].id = "c2";
    CHECK(corpus_hash(renamed) != h1);
}

TEST_CASE("check_unique_ids rejects duplicates") {
    Corpus corpus;
    corpus.conversations.push_back({"a", {}});
    corpus.conversations.push_back({"b", {}});
    CHECK_NOTHROW(check_unique_ids(corpus));
    corpus.conversations.push_back({"a", {}});
    CHECK_THROWS_MATCHES(
        check_unique_ids(corpus), ValidationError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("duplicate")));
}
