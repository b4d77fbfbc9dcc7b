#include <doctest.h>

#include "revex/csv.hpp"

using namespace revex;

TEST_SUITE("csv") {

TEST_CASE("plain and quoted fields") {
    const auto rows = csv::parse("a,b,c\n1,\"x,y\",\"he said \"\"hi\"\"\"\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].fields == std::vector<std::string>{"1", "x,y", "he said \"hi\""});
    CHECK(rows[1].line == 2);
}

TEST_CASE("multi-line quoted field keeps its starting line") {
    const auto rows = csv::parse("h\n\"one\ntwo\"\nthree\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields[0] == "one\ntwo");
    CHECK(rows[2].line == 4);
}

TEST_CASE("crlf and blank lines") {
    const auto rows = csv::parse("a,b\r\n\r\n1,2\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].fields == std::vector<std::string>{"1", "2"});
}

TEST_CASE("empty trailing field") {
    const auto rows = csv::parse("a,b,\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields.size() == 3);
}

}  // TEST_SUITE
