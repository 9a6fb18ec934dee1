#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "scd/corpus.hpp"
#include "scd/embeddings.hpp"
#include "test_util.hpp"

using namespace scd;
using testutil::TempDir;
using testutil::WarnCapture;

TEST_CASE("embedding table stores and looks up vectors") {
    EmbeddingTable table(3);
    table.set("cat", std::vector<double>{1.0, 2.0, 3.0});
    table.set("dog", std::vector<double>{-1.0, 0.0, 0.5});

    CHECK(table.size() == 2);
    CHECK(table.dim() == 3);
    CHECK(table.contains("cat"));
    CHECK_FALSE(table.contains("mouse"));

    auto v = table.lookup("cat");
    REQUIRE(v.size() == 3);
    CHECK(v[1] == 2.0);
    CHECK(table.hit_count() == 1);
    CHECK(table.miss_count() == 0);

    auto miss = table.lookup("mouse");
    CHECK(miss.size() == 3);
    CHECK(miss[0] == 0.0);
    CHECK(miss[2] == 0.0);
    CHECK(table.miss_count() == 1);

    table.reset_counters();
    CHECK(table.hit_count() == 0);
    CHECK(table.miss_count() == 0);

    CHECK(table.find_vector("mouse") == nullptr);
    CHECK(table.find_vector("dog")[0] == -1.0);
    CHECK(table.miss_count() == 0);  // find_vector leaves the counters alone
}

TEST_CASE("embedding set overwrites in place") {
    EmbeddingTable table(2);
    table.set("w", std::vector<double>{1.0, 1.0});
    table.set("w", std::vector<double>{5.0, 6.0});
    CHECK(table.size() == 1);
    CHECK(table.lookup("w")[1] == 6.0);
    CHECK_THROWS_AS(table.set("bad", std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("parse_embeddings reads the text format") {
    const std::string text =
        "2 3\n"
        "hello 0.1 0.2 0.3\n"
        "world -1 0 2.5\n";
    EmbeddingTable table = parse_embeddings(text);
    CHECK(table.size() == 2);
    CHECK(table.dim() == 3);
    CHECK(table.lookup("world")[0] == -1.0);
    CHECK(table.lookup("hello")[2] == 0.3);
}

TEST_CASE("parse_embeddings tolerates extra spaces and crlf") {
    const std::string text = "1  2\r\nword  1.5   -2\r\n";
    EmbeddingTable table = parse_embeddings(text);
    REQUIRE(table.size() == 1);
    CHECK(table.lookup("word")[0] == 1.5);
    CHECK(table.lookup("word")[1] == -2.0);
}

TEST_CASE("parse_embeddings keeps the last duplicate with a warning") {
    WarnCapture capture;
    const std::string text =
        "2 2\n"
        "w 1 1\n"
        "w 3 4\n";
    EmbeddingTable table = parse_embeddings(text);
    CHECK(table.size() == 1);
    CHECK(table.lookup("w")[0] == 3.0);
    CHECK(capture.any_contains("duplicate"));
}

TEST_CASE("parse_embeddings rejects malformed input") {
    CHECK_THROWS_AS(parse_embeddings(""), ParseError);
    CHECK_THROWS_AS(parse_embeddings("abc def\n"), ParseError);
    CHECK_THROWS_AS(parse_embeddings("1\n"), ParseError);
    CHECK_THROWS_AS(parse_embeddings("1 0\n"), ParseError);
    // Truncated: header promises two rows, file has one.
    CHECK_THROWS_MATCHES(parse_embeddings("2 2\nw 1 2\n"), ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("ends early")));
    // Wrong field count on a data row.
    CHECK_THROWS_MATCHES(parse_embeddings("1 3\nw 1 2\n"), ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("row 2")));
    CHECK_THROWS_AS(parse_embeddings("1 2\nw 1 x\n"), ParseError);
}

TEST_CASE("embeddings round trip through files") {
    TempDir tmp;
    EmbeddingTable table(2);
    table.set("alpha", std::vector<double>{0.125, -3.5});
    table.set("beta", std::vector<double>{1e-9, 2e10});
    save_embeddings(table, tmp.path / "t.vec");

    EmbeddingTable back = load_embeddings(tmp.path / "t.vec");
    REQUIRE(back.size() == 2);
    CHECK(back.words() == table.words());
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto a = table.vector_at(i);
        auto b = back.vector_at(i);
        REQUIRE(a.size() == b.size());
        for (std::size_t d = 0; d < a.size(); ++d) CHECK(a[d] == b[d]);
    }
}

TEST_CASE("average_embedding counts oov words in the divisor") {
    EmbeddingTable table(2);
    table.set("a", std::vector<double>{3.0, 0.0});
    table.set("b", std::vector<double>{0.0, 6.0});

    std::vector<WordToken> tokens = {
        {"a", "s", 0.0, 0.1}, {"b", "s", 0.1, 0.2}, {"zzz", "s", 0.2, 0.3}};
    auto avg = average_embedding(table, tokens);
    REQUIRE(avg.size() == 2);
    CHECK(avg[0] == Catch::Approx(1.0));
    CHECK(avg[1] == Catch::Approx(2.0));

    CHECK_THROWS_AS(average_embedding(table, std::span<const WordToken>{}), ValidationError);
}
