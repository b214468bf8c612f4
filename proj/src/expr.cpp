#include "coactiv/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace coactiv {

bool Expr::operator==(const Expr& other) const {
    if (op != other.op || type != other.type) return false;
    switch (op) {
        case ExprOp::IntLit: return ival == other.ival;
        case ExprOp::RatLit: return rval == other.rval;
        case ExprOp::BoolLit: return bval == other.bval;
        case ExprOp::Var:
        case ExprOp::LabelRef: return name == other.name;
        default: break;
    }
    return kids == other.kids;
}

Expr make_int_lit(std::int64_t v) {
    Expr e;
    e.op = ExprOp::IntLit;
    e.type = ExprType::Int;
    e.ival = v;
    return e;
}

Expr make_var(const std::string& name, int index) {
    Expr e;
    e.op = ExprOp::Var;
    e.type = ExprType::Int;
    e.name = name;
    e.index = index;
    return e;
}

Expr make_binary(ExprOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.op = op;
    switch (op) {
        case ExprOp::Eq: case ExprOp::Ne: case ExprOp::Lt: case ExprOp::Le:
        case ExprOp::Gt: case ExprOp::Ge: case ExprOp::And: case ExprOp::Or:
            e.type = ExprType::Bool;
            break;
        case ExprOp::Div:
            e.type = ExprType::Rat;
            break;
        default:
            e.type = lhs.type == ExprType::Rat || rhs.type == ExprType::Rat
                         ? ExprType::Rat
                         : ExprType::Int;
    }
    e.kids.push_back(std::move(lhs));
    e.kids.push_back(std::move(rhs));
    return e;
}

// --- Evaluation --------------------------------------------------------

std::int64_t eval_int(const Expr& e, std::span<const std::int64_t> features) {
    switch (e.op) {
        case ExprOp::IntLit: return e.ival;
        case ExprOp::Var:
            if (e.index < 0 || std::size_t(e.index) >= features.size())
                throw ModelError("unresolved variable '" + e.name + "' in expression");
            return features[std::size_t(e.index)];
        case ExprOp::Neg: return -eval_int(e.kids[0], features);
        case ExprOp::Abs: {
            auto v = eval_int(e.kids[0], features);
            return v < 0 ? -v : v;
        }
        case ExprOp::Add: return eval_int(e.kids[0], features) + eval_int(e.kids[1], features);
        case ExprOp::Sub: return eval_int(e.kids[0], features) - eval_int(e.kids[1], features);
        case ExprOp::Mul: return eval_int(e.kids[0], features) * eval_int(e.kids[1], features);
        case ExprOp::Min: {
            auto a = eval_int(e.kids[0], features), b = eval_int(e.kids[1], features);
            return a < b ? a : b;
        }
        case ExprOp::Max: {
            auto a = eval_int(e.kids[0], features), b = eval_int(e.kids[1], features);
            return a > b ? a : b;
        }
        default:
            throw ModelError("boolean operator in integer expression");
    }
}

bool eval_bool(const Expr& e, std::span<const std::int64_t> features,
               const std::function<bool(int)>& label_holds) {
    switch (e.op) {
        case ExprOp::BoolLit: return e.bval;
        case ExprOp::LabelRef:
            if (!label_holds)
                throw ModelError("label atom '" + e.name + "' not available here");
            return label_holds(e.index);
        case ExprOp::Not: return !eval_bool(e.kids[0], features, label_holds);
        case ExprOp::And:
            return eval_bool(e.kids[0], features, label_holds) &&
                   eval_bool(e.kids[1], features, label_holds);
        case ExprOp::Or:
            return eval_bool(e.kids[0], features, label_holds) ||
                   eval_bool(e.kids[1], features, label_holds);
        case ExprOp::Eq: return eval_int(e.kids[0], features) == eval_int(e.kids[1], features);
        case ExprOp::Ne: return eval_int(e.kids[0], features) != eval_int(e.kids[1], features);
        case ExprOp::Lt: return eval_int(e.kids[0], features) < eval_int(e.kids[1], features);
        case ExprOp::Le: return eval_int(e.kids[0], features) <= eval_int(e.kids[1], features);
        case ExprOp::Gt: return eval_int(e.kids[0], features) > eval_int(e.kids[1], features);
        case ExprOp::Ge: return eval_int(e.kids[0], features) >= eval_int(e.kids[1], features);
        default:
            throw ModelError("integer operator in boolean expression");
    }
}

bool eval_bool(const Expr& e, std::span<const std::int64_t> features) {
    return eval_bool(e, features, nullptr);
}

Rational eval_rat(const Expr& e, std::span<const std::int64_t> features) {
    switch (e.op) {
        case ExprOp::IntLit: return Rational(e.ival);
        case ExprOp::RatLit: return e.rval;
        case ExprOp::Var: return Rational(eval_int(e, features));
        case ExprOp::Neg: return -eval_rat(e.kids[0], features);
        case ExprOp::Abs: {
            Rational v = eval_rat(e.kids[0], features);
            return v < 0 ? Rational(-v) : v;
        }
        case ExprOp::Add: return eval_rat(e.kids[0], features) + eval_rat(e.kids[1], features);
        case ExprOp::Sub: return eval_rat(e.kids[0], features) - eval_rat(e.kids[1], features);
        case ExprOp::Mul: return eval_rat(e.kids[0], features) * eval_rat(e.kids[1], features);
        case ExprOp::Div: {
            Rational d = eval_rat(e.kids[1], features);
            if (d == 0) throw ModelError("division by zero in expression");
            return eval_rat(e.kids[0], features) / d;
        }
        case ExprOp::Min: {
            Rational a = eval_rat(e.kids[0], features), b = eval_rat(e.kids[1], features);
            return a < b ? a : b;
        }
        case ExprOp::Max: {
            Rational a = eval_rat(e.kids[0], features), b = eval_rat(e.kids[1], features);
            return a > b ? a : b;
        }
        default:
            throw ModelError("boolean operator in rational expression");
    }
}

// --- Printing ----------------------------------------------------------

namespace {

const char* op_symbol(ExprOp op) {
    switch (op) {
        case ExprOp::Add: return "+";
        case ExprOp::Sub: return "-";
        case ExprOp::Mul: return "*";
        case ExprOp::Div: return "/";
        case ExprOp::Eq: return "=";
        case ExprOp::Ne: return "!=";
        case ExprOp::Lt: return "<";
        case ExprOp::Le: return "<=";
        case ExprOp::Gt: return ">";
        case ExprOp::Ge: return ">=";
        case ExprOp::And: return "&";
        case ExprOp::Or: return "|";
        default: return "?";
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.op) {
        case ExprOp::IntLit:
            out += std::to_string(e.ival);
            return;
        case ExprOp::RatLit:
            out += rational_to_string(e.rval);
            return;
        case ExprOp::BoolLit:
            out += e.bval ? "true" : "false";
            return;
        case ExprOp::Var:
            out += e.name;
            return;
        case ExprOp::LabelRef:
            out += '"';
            out += e.name;
            out += '"';
            return;
        case ExprOp::Neg:
        case ExprOp::Not:
            out += e.op == ExprOp::Neg ? '-' : '!';
            if (e.kids[0].kids.empty()) {
                print(e.kids[0], out);
            } else {
                out += '(';
                print(e.kids[0], out);
                out += ')';
            }
            return;
        case ExprOp::Abs:
        case ExprOp::Min:
        case ExprOp::Max:
            out += e.op == ExprOp::Abs ? "abs(" : (e.op == ExprOp::Min ? "min(" : "max(");
            print(e.kids[0], out);
            if (e.kids.size() > 1) {
                out += ", ";
                print(e.kids[1], out);
            }
            out += ')';
            return;
        default:
            out += '(';
            print(e.kids[0], out);
            out += ' ';
            out += op_symbol(e.op);
            out += ' ';
            print(e.kids[1], out);
            out += ')';
            return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

void resolve_expr(Expr& e, std::span<const std::string> feature_names,
                  std::span<const std::string> label_names, bool allow_labels) {
    if (e.op == ExprOp::Var) {
        for (std::size_t i = 0; i < feature_names.size(); ++i) {
            if (feature_names[i] == e.name) {
                e.index = int(i);
                return;
            }
        }
        if (allow_labels) {
            for (std::size_t i = 0; i < label_names.size(); ++i) {
                if (label_names[i] == e.name) {
                    e.op = ExprOp::LabelRef;
                    e.type = ExprType::Bool;
                    e.index = int(i);
                    return;
                }
            }
        }
        throw ParseError(DiagClass::UndeclaredId, 0, 0, "unknown identifier '" + e.name + "'");
    }
    if (e.op == ExprOp::LabelRef) {
        for (std::size_t i = 0; i < label_names.size(); ++i) {
            if (label_names[i] == e.name) {
                e.index = int(i);
                return;
            }
        }
        throw ParseError(DiagClass::UndeclaredId, 0, 0, "unknown label \"" + e.name + "\"");
    }
    for (auto& k : e.kids) resolve_expr(k, feature_names, label_names, allow_labels);
}

// --- Lexer -------------------------------------------------------------

Lexer::Lexer(std::string_view input) : input_(input) {
    advance();
}

void Lexer::advance() {
    // skip whitespace and // comments
    while (pos_ < input_.size()) {
        char c = input_[pos_];
        if (c == '\n') {
            ++line_;
            col_ = 1;
            ++pos_;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++col_;
            ++pos_;
        } else if (c == '/' && pos_ + 1 < input_.size() && input_[pos_ + 1] == '/') {
            while (pos_ < input_.size() && input_[pos_] != '\n') ++pos_;
        } else {
            break;
        }
    }
    current_ = Token{Tok::End, "", line_, col_};
    if (pos_ >= input_.size()) return;

    auto start_line = line_;
    auto start_col = col_;
    auto make = [&](Tok k, std::string text, std::size_t len) {
        current_ = Token{k, std::move(text), start_line, start_col};
        pos_ += len;
        col_ += int(len);
    };

    char c = input_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t end = pos_;
        while (end < input_.size() &&
               (std::isalnum(static_cast<unsigned char>(input_[end])) || input_[end] == '_'))
            ++end;
        make(Tok::Ident, std::string(input_.substr(pos_, end - pos_)), end - pos_);
        return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t end = pos_;
        while (end < input_.size() && std::isdigit(static_cast<unsigned char>(input_[end]))) ++end;
        bool decimal = false;
        // "12.5" is a decimal literal, "12..15" is a range
        if (end + 1 < input_.size() && input_[end] == '.' &&
            std::isdigit(static_cast<unsigned char>(input_[end + 1]))) {
            decimal = true;
            ++end;
            while (end < input_.size() && std::isdigit(static_cast<unsigned char>(input_[end])))
                ++end;
        }
        make(decimal ? Tok::DecimalLit : Tok::IntLit,
             std::string(input_.substr(pos_, end - pos_)), end - pos_);
        return;
    }
    if (c == '"') {
        std::size_t end = pos_ + 1;
        while (end < input_.size() && input_[end] != '"' && input_[end] != '\n') ++end;
        if (end >= input_.size() || input_[end] != '"')
            throw ParseError(DiagClass::Syntax, start_line, start_col, "unterminated string");
        make(Tok::StrLit, std::string(input_.substr(pos_ + 1, end - pos_ - 1)), end - pos_ + 1);
        return;
    }

    auto two = pos_ + 1 < input_.size() ? input_.substr(pos_, 2) : std::string_view{};
    if (two == "->") { make(Tok::Arrow, "->", 2); return; }
    if (two == "!=") { make(Tok::Neq, "!=", 2); return; }
    if (two == "<=") { make(Tok::Le, "<=", 2); return; }
    if (two == ">=") { make(Tok::Ge, ">=", 2); return; }
    if (two == "..") { make(Tok::DotDot, "..", 2); return; }
    switch (c) {
        case '[': make(Tok::LBracket, "[", 1); return;
        case ']': make(Tok::RBracket, "]", 1); return;
        case '(': make(Tok::LParen, "(", 1); return;
        case ')': make(Tok::RParen, ")", 1); return;
        case ',': make(Tok::Comma, ",", 1); return;
        case ';': make(Tok::Semicolon, ";", 1); return;
        case ':': make(Tok::Colon, ":", 1); return;
        case '\'': make(Tok::Prime, "'", 1); return;
        case '+': make(Tok::Plus, "+", 1); return;
        case '-': make(Tok::Minus, "-", 1); return;
        case '*': make(Tok::Star, "*", 1); return;
        case '/': make(Tok::Slash, "/", 1); return;
        case '=': make(Tok::Eq, "=", 1); return;
        case '<': make(Tok::Lt, "<", 1); return;
        case '>': make(Tok::Gt, ">", 1); return;
        case '&': make(Tok::Amp, "&", 1); return;
        case '|': make(Tok::Pipe, "|", 1); return;
        case '!': make(Tok::Bang, "!", 1); return;
        case '?': make(Tok::Question, "?", 1); return;
        default:
            throw ParseError(DiagClass::Syntax, start_line, start_col,
                             std::string("unexpected character '") + c + "'");
    }
}

Token Lexer::next() {
    Token t = current_;
    advance();
    return t;
}

bool Lexer::accept(Tok kind) {
    if (current_.kind == kind) {
        advance();
        return true;
    }
    return false;
}

Token Lexer::expect(Tok kind, const std::string& what) {
    if (current_.kind != kind)
        fail(DiagClass::Syntax, "expected " + what + ", got '" + current_.text + "'");
    return next();
}

void Lexer::fail(DiagClass cls, const std::string& msg) const {
    throw ParseError(cls, current_.line, current_.col, msg);
}

void Lexer::fail_at(const Token& t, DiagClass cls, const std::string& msg) const {
    throw ParseError(cls, t.line, t.col, msg);
}

// --- Expression grammar -------------------------------------------------
//
//   bexpr  := bterm ('|' bterm)*
//   bterm  := bfact ('&' bfact)*
//   bfact  := '!' bfact | batom
//   batom  := 'true' | 'false' | '"'name'"'
//           | iexpr (cmp iexpr)?        -- bare parenthesized bexpr also lands here
//   iexpr  := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom
//   atom   := int | decimal | name | min(e,e) | max(e,e) | abs(e) | '(' expr ')'
//
// Type checking happens while parsing; '/' and decimal literals are only
// accepted in rational contexts.

namespace {

struct ExprParser {
    Lexer& lex;
    bool rational;      // rational context: allow '/' and decimals
    bool allow_vars;    // probabilities forbid state variables
    bool allow_labels;  // property targets allow label atoms

    Expr parse_bool() {
        Expr lhs = parse_and();
        while (lex.peek().kind == Tok::Pipe) {
            lex.next();
            Expr rhs = parse_and();
            require_bool(lhs);
            require_bool(rhs);
            lhs = make_binary(ExprOp::Or, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_not();
        while (lex.peek().kind == Tok::Amp) {
            lex.next();
            Expr rhs = parse_not();
            require_bool(lhs);
            require_bool(rhs);
            lhs = make_binary(ExprOp::And, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_not() {
        if (lex.accept(Tok::Bang)) {
            Expr inner = parse_not();
            require_bool(inner);
            Expr e;
            e.op = ExprOp::Not;
            e.type = ExprType::Bool;
            e.kids.push_back(std::move(inner));
            return e;
        }
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr lhs = parse_sum();
        ExprOp op;
        switch (lex.peek().kind) {
            case Tok::Eq: op = ExprOp::Eq; break;
            case Tok::Neq: op = ExprOp::Ne; break;
            case Tok::Lt: op = ExprOp::Lt; break;
            case Tok::Le: op = ExprOp::Le; break;
            case Tok::Gt: op = ExprOp::Gt; break;
            case Tok::Ge: op = ExprOp::Ge; break;
            default: return lhs;
        }
        Token t = lex.next();
        Expr rhs = parse_sum();
        if (lhs.type == ExprType::Bool || rhs.type == ExprType::Bool)
            lex.fail_at(t, DiagClass::TypeMismatch, "comparison of boolean operands");
        return make_binary(op, std::move(lhs), std::move(rhs));
    }

    Expr parse_sum() {
        Expr lhs = parse_term();
        while (lex.peek().kind == Tok::Plus || lex.peek().kind == Tok::Minus) {
            Token t = lex.next();
            Expr rhs = parse_term();
            require_arith(lhs, t);
            require_arith(rhs, t);
            lhs = make_binary(t.kind == Tok::Plus ? ExprOp::Add : ExprOp::Sub,
                              std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        while (lex.peek().kind == Tok::Star || lex.peek().kind == Tok::Slash) {
            Token t = lex.next();
            if (t.kind == Tok::Slash && !rational)
                lex.fail_at(t, DiagClass::TypeMismatch,
                            "division is only allowed in rational expressions");
            Expr rhs = parse_factor();
            require_arith(lhs, t);
            require_arith(rhs, t);
            lhs = make_binary(t.kind == Tok::Star ? ExprOp::Mul : ExprOp::Div,
                              std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_factor() {
        if (lex.peek().kind == Tok::Minus) {
            Token t = lex.next();
            Expr inner = parse_factor();
            require_arith(inner, t);
            if (inner.op == ExprOp::IntLit) {
                inner.ival = -inner.ival;
                return inner;
            }
            if (inner.op == ExprOp::RatLit) {
                inner.rval = -inner.rval;
                return inner;
            }
            Expr e;
            e.op = ExprOp::Neg;
            e.type = inner.type;
            e.kids.push_back(std::move(inner));
            return e;
        }
        return parse_atom();
    }

    Expr parse_atom() {
        Token t = lex.peek();
        switch (t.kind) {
            case Tok::IntLit: {
                lex.next();
                Expr e = make_int_lit(std::strtoll(t.text.c_str(), nullptr, 10));
                return e;
            }
            case Tok::DecimalLit: {
                if (!rational)
                    lex.fail_at(t, DiagClass::TypeMismatch,
                                "decimal literal in integer expression");
                lex.next();
                Expr e;
                e.op = ExprOp::RatLit;
                e.type = ExprType::Rat;
                e.rval = *rational_from_string(t.text);
                return e;
            }
            case Tok::StrLit: {
                if (!allow_labels)
                    lex.fail_at(t, DiagClass::Syntax, "label atom not allowed here");
                lex.next();
                Expr e;
                e.op = ExprOp::LabelRef;
                e.type = ExprType::Bool;
                e.name = t.text;
                return e;
            }
            case Tok::LParen: {
                lex.next();
                Expr e = parse_bool();  // most general; type carried on node
                lex.expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: {
                if (t.text == "true" || t.text == "false") {
                    lex.next();
                    Expr e;
                    e.op = ExprOp::BoolLit;
                    e.type = ExprType::Bool;
                    e.bval = t.text == "true";
                    return e;
                }
                if (t.text == "min" || t.text == "max" || t.text == "abs") {
                    lex.next();
                    lex.expect(Tok::LParen, "'('");
                    Expr a = parse_sum();
                    require_arith(a, t);
                    Expr e;
                    e.type = a.type;
                    e.kids.push_back(std::move(a));
                    if (t.text == "abs") {
                        e.op = ExprOp::Abs;
                    } else {
                        e.op = t.text == "min" ? ExprOp::Min : ExprOp::Max;
                        lex.expect(Tok::Comma, "','");
                        Expr b = parse_sum();
                        require_arith(b, t);
                        if (b.type == ExprType::Rat) e.type = ExprType::Rat;
                        e.kids.push_back(std::move(b));
                    }
                    lex.expect(Tok::RParen, "')'");
                    return e;
                }
                lex.next();
                if (!allow_vars)
                    lex.fail_at(t, DiagClass::UndeclaredId,
                                "identifier '" + t.text + "' not allowed in a constant expression");
                return make_var(t.text);
            }
            default:
                lex.fail_at(t, DiagClass::Syntax, "expected expression, got '" + t.text + "'");
        }
    }

    void require_bool(const Expr& e) {
        if (e.type != ExprType::Bool)
            lex.fail(DiagClass::TypeMismatch, "expected boolean operand");
    }

    void require_arith(const Expr& e, const Token& at) {
        if (e.type == ExprType::Bool)
            lex.fail_at(at, DiagClass::TypeMismatch, "boolean operand in arithmetic");
        if (e.type == ExprType::Rat && !rational)
            lex.fail_at(at, DiagClass::TypeMismatch, "rational operand in integer expression");
    }
};

}  // namespace

Expr parse_bool_expr(Lexer& lex, bool allow_label_atoms) {
    ExprParser p{lex, false, true, allow_label_atoms};
    Expr e = p.parse_bool();
    if (e.type != ExprType::Bool)
        lex.fail(DiagClass::TypeMismatch, "expected boolean expression");
    return e;
}

Expr parse_int_expr(Lexer& lex) {
    ExprParser p{lex, false, true, false};
    Expr e = p.parse_sum();
    if (e.type != ExprType::Int)
        lex.fail(DiagClass::TypeMismatch, "expected integer expression");
    return e;
}

Expr parse_rat_expr(Lexer& lex, bool allow_vars) {
    ExprParser p{lex, true, allow_vars, false};
    return p.parse_sum();
}

Expr parse_bool_expr_text(const std::string& text, bool allow_label_atoms) {
    Lexer lex(text);
    Expr e = parse_bool_expr(lex, allow_label_atoms);
    if (lex.peek().kind != Tok::End)
        lex.fail(DiagClass::Syntax, "trailing input after expression");
    return e;
}

}  // namespace coactiv
