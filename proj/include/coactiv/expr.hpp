#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "coactiv/errors.hpp"
#include "coactiv/rational.hpp"

namespace coactiv {

// Typed expression trees shared by guards, labels, updates, rewards,
// probability expressions, property targets and labeling predicates.
//
// Integer expressions: +, -, *, min, max, abs over variables and literals.
// Boolean expressions: comparisons (=, !=, <, <=, >, >=) and &, |, !.
// Rational expressions (probabilities, reward values) additionally allow
// / and decimal literals, evaluated exactly.

enum class ExprType { Int, Bool, Rat };

enum class ExprOp {
    IntLit, RatLit, BoolLit, Var, LabelRef,
    Neg, Not, Abs,
    Add, Sub, Mul, Div, Min, Max,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
};

struct Expr {
    ExprOp op = ExprOp::IntLit;
    ExprType type = ExprType::Int;
    std::int64_t ival = 0;     // IntLit
    bool bval = false;         // BoolLit
    Rational rval;             // RatLit
    std::string name;          // Var / LabelRef
    int index = -1;            // resolved feature or label index
    std::vector<Expr> kids;

    bool operator==(const Expr& other) const;
};

Expr make_int_lit(std::int64_t v);
Expr make_var(const std::string& name, int index = -1);
Expr make_binary(ExprOp op, Expr lhs, Expr rhs);

// Evaluation. Variables must be resolved (index >= 0) beforehand.
std::int64_t eval_int(const Expr& e, std::span<const std::int64_t> features);
bool eval_bool(const Expr& e, std::span<const std::int64_t> features);
// Variant with label atoms; label_holds receives the resolved label index.
bool eval_bool(const Expr& e, std::span<const std::int64_t> features,
               const std::function<bool(int)>& label_holds);
Rational eval_rat(const Expr& e, std::span<const std::int64_t> features);

// Canonical text. Binary operators are printed fully parenthesized so that
// parsing the output reproduces the tree exactly.
std::string to_string(const Expr& e);

// Binds Var nodes to feature indices by name; when allow_labels is set,
// names not found among features fall back to label atoms. Throws
// ParseError(UndeclaredId) for unknown names.
void resolve_expr(Expr& e, std::span<const std::string> feature_names,
                  std::span<const std::string> label_names, bool allow_labels);

// --- Lexing -----------------------------------------------------------

enum class Tok {
    End, Ident, IntLit, DecimalLit, StrLit,
    LBracket, RBracket, LParen, RParen, Comma, Semicolon, Colon, Prime,
    Arrow, Plus, Minus, Star, Slash, Eq, Neq, Lt, Le, Gt, Ge, Amp, Pipe,
    Bang, DotDot, Question,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

// Hand-rolled lexer with line/column tracking; `//` comments are skipped.
class Lexer {
public:
    explicit Lexer(std::string_view input);

    const Token& peek() const { return current_; }
    Token next();
    bool accept(Tok kind);
    Token expect(Tok kind, const std::string& what);
    [[noreturn]] void fail(DiagClass cls, const std::string& msg) const;
    [[noreturn]] void fail_at(const Token& t, DiagClass cls, const std::string& msg) const;

private:
    void advance();

    std::string_view input_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token current_;
};

// Expression sub-parsers used by the model and property grammars. All of
// them leave names unresolved; callers run resolve_expr afterwards.
Expr parse_bool_expr(Lexer& lex, bool allow_label_atoms = false);
Expr parse_int_expr(Lexer& lex);
// allow_vars is false for transition probabilities, which must be constant.
Expr parse_rat_expr(Lexer& lex, bool allow_vars);

// Convenience wrappers over whole strings (must consume all input).
Expr parse_bool_expr_text(const std::string& text, bool allow_label_atoms = false);

}  // namespace coactiv
