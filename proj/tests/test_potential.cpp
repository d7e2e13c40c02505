#include <doctest.h>

#include <cstring>

#include "elc/errors.hpp"
#include "elc/potential.hpp"
#include "gallery.hpp"
#include "oracles.hpp"

using namespace elc;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("parse and evaluate")
{
    const Expr a = parse_expr("(x1^2 + x2^2 - 1)^2 / 4", 2);
    CHECK(a.eval(vec({1, 0})) == 0.0);
    CHECK(parse_expr("x1*x2", 2).eval(vec({3, 4})) == 12.0);
    CHECK(parse_expr("-x1^2", 1).eval(vec({3})) == -9.0);
    CHECK(parse_expr("2^-1", 0).eval(Eigen::VectorXd(0)) == 0.5);
    CHECK(parse_expr("1 - 2 - 3", 0).eval(Eigen::VectorXd(0)) == -4.0);
    CHECK(parse_expr("8 / 2 / 2", 0).eval(Eigen::VectorXd(0)) == 2.0);
    CHECK(parse_expr(" sqrt( 4 )*exp(0) + sin(0) + cos(0) ", 0).eval(Eigen::VectorXd(0)) == 3.0);
    CHECK(parse_expr("1.5e1 + .5", 0).eval(Eigen::VectorXd(0)) == 15.5);
}

TEST_CASE("syntax errors report the byte offset")
{
    try {
        parse_expr("x1 + * x2", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
        CHECK(e.code() == "syntax_error");
    }
    CHECK_THROWS_AS(parse_expr("(x1", 1), ParseError);
    CHECK_THROWS_AS(parse_expr("x1 x1", 1), ParseError);
    CHECK_THROWS_AS(parse_expr("x1^1.5", 1), ParseError);
    CHECK_THROWS_AS(parse_expr("", 1), ParseError);
}

TEST_CASE("unbound variables and unknown identifiers")
{
    try {
        parse_expr("x3", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.code() == "unbound_variable");
        CHECK(e.offset() == 0);
    }
    try {
        parse_expr("1 + tan(x1)", 1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.code() == "unknown_identifier");
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse_expr("x0", 2), ParseError);
    CHECK_THROWS_AS(parse_expr("x99999999999999999999", 2), ParseError);
    CHECK_THROWS_AS(parse_expr("x1", kMaxDimension + 1), ParseError);
}

TEST_CASE("domain faults are errors with the subexpression offset")
{
    try {
        parse_expr("1 + sqrt(x1)", 1).eval(vec({-1}));
        FAIL("expected a domain fault");
    } catch (const DomainError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse_expr("1 / x1", 1).eval(vec({0})), DomainError);
    CHECK_THROWS_AS(parse_expr("x1^-2", 1).eval(vec({0})), DomainError);
    CHECK_THROWS_AS(parse_expr("exp(x1)", 1).eval(vec({1000})), DomainError);
    CHECK_NOTHROW(parse_expr("sqrt(x1)", 1).eval(vec({0})));
    CHECK_THROWS_AS(parse_expr("sqrt(x1)", 1).jet2(vec({0})), DomainError);
    CHECK_THROWS_AS(parse_expr("x1", 1).eval(vec({1, 2})), Error);
}

TEST_CASE("analytic jets")
{
    const Expr a = parse_expr("(x1^2 + x2^2 - 1)^2 / 4", 2);
    const Jet2<double> j = a.jet2(vec({1, 0}));
    CHECK(j.grad.norm() == 0.0);
    CHECK(j.hess(0, 0) == doctest::Approx(2.0));
    CHECK(j.hess(0, 1) == 0.0);
    CHECK(j.hess(1, 1) == 0.0);

    const Jet2<double> p = parse_expr("x1*x2", 2).jet2(vec({0.3, -7}));
    CHECK(p.hess(0, 1) == 1.0);
    CHECK(p.hess(1, 0) == 1.0);
    CHECK(p.hess(0, 0) == 0.0);

    const Jet2<double> c = parse_expr("3.5", 2).jet2(vec({1, 2}));
    CHECK(c.grad.isZero());
    CHECK(c.hess.isZero());
}

TEST_CASE("jets match finite differences on the gallery")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> box(-1.5, 1.5);
    for (const auto& g : gallery::potentials()) {
        const Expr e = parse_expr(g.text, g.n);
        const oracle::Fn f = [&](const Eigen::VectorXd& q) { return e.eval(q); };
        for (int s = 0; s < 50; ++s) {
            Eigen::VectorXd q(g.n);
            for (auto& x : q) x = box(rng);
            const Jet2<double> j = e.jet2(q);
            const Eigen::VectorXd fdg = oracle::fd_gradient(f, q);
            CHECK((j.grad - fdg).norm() <= 1e-6 * std::max(1.0, fdg.norm()));
            CHECK((j.grad - e.gradient(q)).norm() <= 1e-14 * std::max(1.0, j.grad.norm()));
            const Eigen::MatrixXd fdh = oracle::fd_hessian(f, q);
            CHECK((j.hess - fdh).norm() <= 1e-6 * std::max(1.0, fdh.norm()));
            CHECK(j.hess == j.hess.transpose());
        }
    }
}

TEST_CASE("printing round-trips bit for bit")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> box(-1.2, 1.2);
    std::vector<std::pair<std::string, int>> texts = {
        {"-x1^2", 1},         {"(-x1)^2", 1},        {"x1 - (x2 - x1)", 2}, {"x1 / (x2 * x1)", 2},
        {"--x1 * -x2", 2},    {"(x1^2)^3", 1},       {"2^-1 * x1", 1},      {"0.1 + 1e-5 * x1", 1},
        {"x1 - -x1", 1},      {"(x1 + x2)^-2", 2},   {"exp(-(x1 - 0.3)^2)", 1}};
    for (const auto& g : gallery::potentials()) texts.emplace_back(g.text, g.n);
    for (const auto& [text, n] : texts) {
        const Expr e = parse_expr(text, n);
        const std::string printed = print(e);
        const Expr back = parse_expr(printed, n);
        CHECK(print(back) == printed);
        for (int s = 0; s < 100; ++s) {
            Eigen::VectorXd q(n);
            for (auto& x : q) x = box(rng) + 2.5;  // keep away from the poles above
            const double a = e.eval(q), b = back.eval(q);
            CHECK(std::memcmp(&a, &b, sizeof a) == 0);
        }
    }
}

TEST_CASE("invariance check")
{
    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    const SkewGeneratorSet g(2, {rot});
    std::mt19937_64 rng(1);
    const InvarianceCheck radial = check_invariance(parse_expr("(x1^2 + x2^2 - 1)^2 / 4", 2), g, 200, 1e-10, 2.0, rng);
    CHECK(radial.invariant);
    const InvarianceCheck linear = check_invariance(parse_expr("x1", 2), g, 200, 1e-10, 2.0, rng);
    CHECK_FALSE(linear.invariant);
    CHECK(linear.worst > 0.1);
    CHECK(check_invariance(parse_expr("x1", 2), SkewGeneratorSet(2, {}), 50, 1e-10, 2.0, rng).invariant);
}

}
