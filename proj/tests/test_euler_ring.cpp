#include <doctest.h>

#include <limits>

#include "elc/errors.hpp"
#include "elc/euler_ring.hpp"

using namespace elc;

TEST_SUITE("euler_ring") {

TEST_CASE("weights are normalized to a positive leading entry")
{
    CHECK(normalize_weight({-1, 2}) == Weight{1, -2});
    CHECK(normalize_weight({0, -3}) == Weight{0, 3});
    CHECK(is_normalized({0, 1}));
    CHECK_FALSE(is_normalized({-2, 1}));
    CHECK_THROWS_AS(normalize_weight({0, 0}), Error);
}

TEST_CASE("unit prints as 1 and negates to minus one")
{
    const EulerElem one = EulerElem::unit(1);
    CHECK(to_string(one) == "1");
    CHECK(to_string(-one) == "\xE2\x88\x92" "1");
    CHECK((one + (-one)).is_zero());
    CHECK(to_string(one - one) == "0");
}

TEST_CASE("codimension-one terms and canonical order")
{
    EulerElem a(1);
    a.add_term(SubgroupLabel::full(), 1);
    a.add_term(SubgroupLabel::codim1({2}), -3);
    a.add_term(SubgroupLabel::codim1({1}), 1);
    CHECK(to_string(a) == "1 + 1\xC2\xB7[1] \xE2\x88\x92 3\xC2\xB7[2]");
    CHECK(a.coefficient(SubgroupLabel::codim1({2})) == -3);
    CHECK(a.coefficient(SubgroupLabel::codim1({3})) == 0);
}

TEST_CASE("add_term rejects malformed labels")
{
    EulerElem a(2);
    CHECK_THROWS_AS(a.add_term(SubgroupLabel::codim1({1}), 1), Error);
    CHECK_THROWS_AS(a.add_term(SubgroupLabel{{-1, 0}}, 1), Error);  // bypasses normalization
    CHECK_THROWS_AS(EulerElem(-1), Error);
}

TEST_CASE("cancellation prunes zero coefficients")
{
    EulerElem a(1);
    a.add_term(SubgroupLabel::codim1({1}), 2);
    a.add_term(SubgroupLabel::codim1({1}), -2);
    CHECK(a.terms().empty());
}

TEST_CASE("overflow is detected")
{
    EulerElem a(0);
    a.add_term(SubgroupLabel::full(), std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(a.add_term(SubgroupLabel::full(), 1), Error);
    CHECK_THROWS_AS(checked_mul(std::numeric_limits<std::int64_t>::min(), -1), Error);
}

TEST_CASE("compare respects the truncation flag")
{
    EulerElem a = EulerElem::unit(2);
    EulerElem b = EulerElem::unit(2);
    CHECK(compare(a, b) == Comparison::Equal);
    b.set_lower_unknown(true);
    CHECK(compare(a, b) == Comparison::UndecidableAtTruncation);
    b.add_term(SubgroupLabel::codim1({1, 1}), 1);
    CHECK(compare(a, b) == Comparison::Distinct);
    CHECK_THROWS_AS(compare(EulerElem(1), EulerElem(2)), Error);
}

TEST_CASE("the lower-stratum flag survives arithmetic and printing")
{
    EulerElem a = EulerElem::unit(2);
    a.set_lower_unknown(true);
    const EulerElem s = a + EulerElem::unit(2);
    CHECK(s.lower_unknown());
    CHECK(to_string(s) == "2 + O(codim\xE2\x89\xA5" "2)");
}

TEST_CASE("parse inverts print")
{
    const std::pair<const char*, int> cases[] = {
        {"1", 1},
        {"\xE2\x88\x92" "1", 0},
        {"0", 2},
        {"1 \xE2\x88\x92 1\xC2\xB7[1]", 1},
        {"2 + 1\xC2\xB7[0,1] \xE2\x88\x92 4\xC2\xB7[1,-2]", 2},
        {"\xE2\x88\x92" "1\xC2\xB7[1,1] + O(codim\xE2\x89\xA5" "2)", 2},
    };
    for (const auto& [text, rank] : cases) CHECK(to_string(parse_euler_elem(text, rank)) == text);
}

TEST_CASE("parse accepts ASCII fallbacks")
{
    const EulerElem e = parse_euler_elem("1 - 2*[1,-1] + O(codim>=2)", 2);
    CHECK(to_string(e) == "1 \xE2\x88\x92 2\xC2\xB7[1,-1] + O(codim\xE2\x89\xA5" "2)");
}

TEST_CASE("parse errors carry the offset")
{
    try {
        parse_euler_elem("1 + 2*[1", 1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 8);
    }
    CHECK_THROWS_AS(parse_euler_elem("1*[-1]", 1), ParseError);
    CHECK_THROWS_AS(parse_euler_elem("1*[1,1]", 1), ParseError);
    CHECK_THROWS_AS(parse_euler_elem("", 1), ParseError);
}

}
