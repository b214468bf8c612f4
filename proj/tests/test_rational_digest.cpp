#include <doctest.h>

#include "coactiv/digest.hpp"
#include "coactiv/rational.hpp"

using namespace coactiv;

TEST_CASE("rational parsing and printing") {
    CHECK(rational_to_string(*rational_from_string("0.5")) == "1/2");
    CHECK(rational_to_string(*rational_from_string("0.25")) == "1/4");
    CHECK(rational_to_string(*rational_from_string("1/2")) == "1/2");
    CHECK(rational_to_string(*rational_from_string("3")) == "3");
    CHECK(rational_to_string(*rational_from_string("-0.75")) == "-3/4");
    CHECK(rational_to_string(*rational_from_string("0.99999")) == "99999/100000");
    CHECK(*rational_from_string("2/4") == *rational_from_string("1/2"));
    CHECK(!rational_from_string("").has_value());
    CHECK(!rational_from_string("abc").has_value());
    CHECK(!rational_from_string("1/0").has_value());
    CHECK(!rational_from_string("1.2.3").has_value());
}

TEST_CASE("rational to double") {
    CHECK(rational_to_double(make_rational(1, 2)) == doctest::Approx(0.5));
    CHECK(rational_to_double(make_rational(2, 3)) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
          "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
}

TEST_CASE("sha256 chunked updates match one-shot") {
    std::string data(1000, 'x');
    Sha256 h;
    for (std::size_t i = 0; i < data.size(); i += 7)
        h.update(data.substr(i, 7));
    CHECK(h.hex_digest() == sha256_hex(data));
}
