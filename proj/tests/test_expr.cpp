#include <doctest.h>

#include <random>

#include "coactiv/expr.hpp"
#include "oracles.hpp"

using namespace coactiv;

namespace {

Expr parsed(const std::string& text, const std::vector<std::string>& vars) {
    Expr e = parse_bool_expr_text(text);
    resolve_expr(e, vars, {}, false);
    return e;
}

}  // namespace

TEST_CASE("integer expression evaluation") {
    std::vector<std::string> vars = {"x", "y"};
    std::vector<std::int64_t> s = {3, -2};
    Lexer lex("x + y * 2 - min(x, y) + abs(y) + max(x, 5)");
    Expr e = parse_int_expr(lex);
    resolve_expr(e, vars, {}, false);
    // 3 + (-4) - (-2) + 2 + 5 = 8
    CHECK(eval_int(e, s) == 8);
    CHECK(oracle::eval_int_rpn(e, s) == 8);
}

TEST_CASE("boolean expression evaluation and precedence") {
    std::vector<std::string> vars = {"x", "y"};
    CHECK(eval_bool(parsed("x=1 | x=2 & y=0", vars), std::vector<std::int64_t>{1, 5}));
    // & binds tighter than |: (x=1) | ((x=2)&(y=0))
    CHECK_FALSE(
        eval_bool(parsed("x=2 & y=1 | x=3", vars), std::vector<std::int64_t>{2, 0}));
    CHECK(eval_bool(parsed("!(x=1)", vars), std::vector<std::int64_t>{2, 0}));
    CHECK(eval_bool(parsed("x!=1 & y<=0", vars), std::vector<std::int64_t>{2, 0}));
    CHECK(eval_bool(parsed("true", vars), std::vector<std::int64_t>{0, 0}));
}

TEST_CASE("type errors are rejected") {
    CHECK_THROWS_AS(parse_bool_expr_text("1 + true = 2"), ParseError);
    CHECK_THROWS_AS(parse_bool_expr_text("(x=1) + 2 = 3"), ParseError);
    CHECK_THROWS_AS(parse_bool_expr_text("x & y"), ParseError);
    CHECK_THROWS_AS(parse_bool_expr_text("x = (y = 1)"), ParseError);
}

TEST_CASE("division and decimals only in rational expressions") {
    CHECK_THROWS_AS(parse_bool_expr_text("x / 2 = 1"), ParseError);
    CHECK_THROWS_AS(parse_bool_expr_text("x = 0.5"), ParseError);
    Lexer lex("x / 2 + 0.25");
    Expr e = parse_rat_expr(lex, true);
    std::vector<std::string> vars = {"x"};
    resolve_expr(e, vars, {}, false);
    CHECK(eval_rat(e, std::vector<std::int64_t>{3}) == make_rational(7, 4));
}

TEST_CASE("canonical printing reparses to the same tree") {
    std::vector<std::string> texts = {
        "((x = 1) & (y < 2))",
        "(x + (y * 3)) >= (0 - y)",
        "!((x = 1) | (y = 2))",
        "min(x, (y + 1)) = max(x, 2)",
        "abs((x - y)) <= 4",
    };
    for (const auto& t : texts) {
        Expr e = parse_bool_expr_text(t);
        Expr e2 = parse_bool_expr_text(to_string(e));
        CHECK(e == e2);
    }
}

TEST_CASE("random expressions agree with the stack-machine oracle") {
    std::mt19937_64 rng(42);
    std::vector<std::string> vars = {"a", "b", "c"};
    for (int iter = 0; iter < 300; ++iter) {
        // random comparison over random arithmetic
        auto rand_arith = [&](auto&& self, int depth) -> Expr {
            if (depth == 0 || rng() % 3 == 0) {
                if (rng() % 2) return make_int_lit(std::int64_t(rng() % 11) - 5);
                std::size_t v = rng() % 3;
                return make_var(vars[v], int(v));
            }
            ExprOp ops[] = {ExprOp::Add, ExprOp::Sub, ExprOp::Mul, ExprOp::Min,
                            ExprOp::Max};
            Expr lhs = self(self, depth - 1);
            Expr rhs = self(self, depth - 1);
            if (rng() % 5 == 0) {
                Expr e;
                e.op = ExprOp::Abs;
                e.type = ExprType::Int;
                e.kids.push_back(std::move(lhs));
                return e;
            }
            return make_binary(ops[rng() % 5], std::move(lhs), std::move(rhs));
        };
        Expr e = rand_arith(rand_arith, 4);
        std::vector<std::int64_t> s = {std::int64_t(rng() % 7) - 3,
                                       std::int64_t(rng() % 7) - 3,
                                       std::int64_t(rng() % 7) - 3};
        CHECK(eval_int(e, s) == oracle::eval_int_rpn(e, s));
        // and the printed form evaluates identically
        Lexer lex(to_string(e));
        Expr round = parse_int_expr(lex);
        resolve_expr(round, vars, {}, false);
        CHECK(eval_int(round, s) == eval_int(e, s));
    }
}

TEST_CASE("label atoms resolve in property context") {
    Expr e = parse_bool_expr_text("\"goal\" | x=1", true);
    std::vector<std::string> vars = {"x"};
    std::vector<std::string> labels = {"goal"};
    resolve_expr(e, vars, labels, true);
    auto holds = [](int idx) { return idx == 0; };
    CHECK(eval_bool(e, std::vector<std::int64_t>{0}, holds));
    // bare label names fall back to the label namespace
    Expr bare = parse_bool_expr_text("goal", true);
    resolve_expr(bare, vars, labels, true);
    CHECK(eval_bool(bare, std::vector<std::int64_t>{0}, holds));
}
