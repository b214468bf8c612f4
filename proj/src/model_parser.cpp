#include "coactiv/model_parser.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "coactiv/errors.hpp"

namespace coactiv {

namespace {

bool is_literal(const Expr& e) {
    return e.op == ExprOp::IntLit || e.op == ExprOp::RatLit;
}

bool all_literal(const Expr& e) {
    if (is_literal(e)) return true;
    if (e.kids.empty()) return false;  // Var, BoolLit, LabelRef
    for (const auto& k : e.kids)
        if (!all_literal(k)) return false;
    return true;
}

Expr literal_from(const Rational& v) {
    if (boost::multiprecision::denominator(v) == 1) {
        return make_int_lit(boost::multiprecision::numerator(v).convert_to<std::int64_t>());
    }
    Expr e;
    e.op = ExprOp::RatLit;
    e.type = ExprType::Rat;
    e.rval = v;
    return e;
}

// Folds arithmetic subtrees whose operands are all literals, so that e.g.
// "1/2" and "0.5" land on the identical canonical node. Boolean operators
// are left untouched.
void fold_constants(Expr& e, const Lexer& lex, const Token& at) {
    for (auto& k : e.kids) fold_constants(k, lex, at);
    switch (e.op) {
        case ExprOp::Neg: case ExprOp::Abs: case ExprOp::Add: case ExprOp::Sub:
        case ExprOp::Mul: case ExprOp::Div: case ExprOp::Min: case ExprOp::Max:
            break;
        default:
            return;
    }
    if (!all_literal(e)) return;
    try {
        e = literal_from(eval_rat(e, {}));
    } catch (const ModelError&) {
        lex.fail_at(at, DiagClass::Range, "division by zero in constant expression");
    }
}

void subst_constants(Expr& e, const std::map<std::string, Rational>& consts,
                     bool int_context, const Lexer& lex, const Token& at) {
    if (e.op == ExprOp::Var) {
        auto it = consts.find(e.name);
        if (it == consts.end()) return;
        if (int_context && boost::multiprecision::denominator(it->second) != 1)
            lex.fail_at(at, DiagClass::TypeMismatch,
                        "rational constant '" + e.name + "' used in integer expression");
        e = literal_from(it->second);
        return;
    }
    for (auto& k : e.kids) subst_constants(k, consts, int_context, lex, at);
}

void resolve_here(Expr& e, const std::vector<std::string>& vars, const Lexer& lex,
                  const Token& at) {
    try {
        resolve_expr(e, vars, {}, false);
    } catch (const ParseError& pe) {
        lex.fail_at(at, pe.diag_class(), pe.detail());
    }
}

struct ModelParser {
    Lexer lex;
    FactoredMdp m;
    std::map<std::string, Rational> consts;
    std::vector<std::string> var_names;
    bool module_seen = false;

    explicit ModelParser(const std::string& text) : lex(text) {}

    FactoredMdp run() {
        while (lex.peek().kind != Tok::End) {
            Token t = lex.peek();
            if (t.kind != Tok::Ident)
                lex.fail(DiagClass::Syntax, "expected declaration, got '" + t.text + "'");
            if (t.text == "const") parse_const();
            else if (t.text == "label") parse_label();
            else if (t.text == "module") parse_module();
            else if (t.text == "rewards") parse_rewards();
            else
                lex.fail(DiagClass::Syntax, "unknown declaration '" + t.text + "'");
        }
        if (!module_seen)
            throw ParseError(DiagClass::Syntax, 1, 1, "model contains no module");
        return std::move(m);
    }

    // <rexpr> with constants substituted; must fold to a literal
    Rational parse_const_value() {
        Token at = lex.peek();
        Expr e = parse_rat_expr(lex, true);
        subst_constants(e, consts, false, lex, at);
        fold_constants(e, lex, at);
        if (!is_literal(e))
            lex.fail_at(at, DiagClass::UndeclaredId,
                        "expression must be constant here");
        return e.op == ExprOp::IntLit ? Rational(e.ival) : e.rval;
    }

    std::int64_t parse_int_const(const char* what) {
        Token at = lex.peek();
        Rational v = parse_const_value();
        if (boost::multiprecision::denominator(v) != 1)
            lex.fail_at(at, DiagClass::TypeMismatch,
                        std::string(what) + " must be an integer");
        return boost::multiprecision::numerator(v).convert_to<std::int64_t>();
    }

    void check_fresh_name(const Token& t) {
        if (consts.count(t.text))
            lex.fail_at(t, DiagClass::DuplicateDecl,
                        "'" + t.text + "' is already declared as a constant");
        for (const auto& v : m.variables)
            if (v.name == t.text)
                lex.fail_at(t, DiagClass::DuplicateDecl,
                            "'" + t.text + "' is already declared as a variable");
    }

    void parse_const() {
        lex.next();  // const
        Token name = lex.expect(Tok::Ident, "constant name");
        check_fresh_name(name);
        lex.expect(Tok::Eq, "'='");
        Rational v = parse_const_value();
        lex.expect(Tok::Semicolon, "';'");
        consts[name.text] = v;
        m.constants.push_back({name.text, v});
    }

    void parse_label() {
        lex.next();  // label
        Token name = lex.expect(Tok::StrLit, "label name string");
        for (const auto& l : m.labels)
            if (l.name == name.text)
                lex.fail_at(name, DiagClass::DuplicateDecl,
                            "label \"" + name.text + "\" declared twice");
        lex.expect(Tok::Eq, "'='");
        Token at = lex.peek();
        Expr e = parse_bool_expr(lex);
        subst_constants(e, consts, true, lex, at);
        fold_constants(e, lex, at);
        resolve_here(e, var_names, lex, at);
        lex.expect(Tok::Semicolon, "';'");
        m.labels.push_back({name.text, std::move(e)});
    }

    void parse_module() {
        Token mod = lex.next();  // module
        if (module_seen)
            lex.fail_at(mod, DiagClass::DuplicateDecl, "only one module is supported");
        module_seen = true;
        m.module_name = lex.expect(Tok::Ident, "module name").text;
        bool commands_started = false;
        while (true) {
            Token t = lex.peek();
            if (t.kind == Tok::Ident && t.text == "endmodule") {
                lex.next();
                break;
            }
            if (t.kind == Tok::LBracket) {
                commands_started = true;
                parse_command();
            } else if (t.kind == Tok::Ident) {
                if (commands_started)
                    lex.fail_at(t, DiagClass::Syntax,
                                "variable declarations must precede commands");
                parse_variable();
            } else if (t.kind == Tok::End) {
                lex.fail(DiagClass::Syntax, "unterminated module (missing endmodule)");
            } else {
                lex.fail_at(t, DiagClass::Syntax,
                            "expected variable or command, got '" + t.text + "'");
            }
        }
        if (m.variables.empty())
            lex.fail_at(mod, DiagClass::Syntax, "module declares no variables");
    }

    void parse_variable() {
        Token name = lex.next();
        check_fresh_name(name);
        lex.expect(Tok::Colon, "':'");
        lex.expect(Tok::LBracket, "'['");
        std::int64_t lo = parse_int_const("variable bound");
        lex.expect(Tok::DotDot, "'..'");
        std::int64_t hi = parse_int_const("variable bound");
        lex.expect(Tok::RBracket, "']'");
        Token init_tok = lex.expect(Tok::Ident, "'init'");
        if (init_tok.text != "init")
            lex.fail_at(init_tok, DiagClass::Syntax, "expected 'init'");
        std::int64_t init = parse_int_const("initial value");
        lex.expect(Tok::Semicolon, "';'");
        if (lo > hi)
            lex.fail_at(name, DiagClass::Range,
                        "empty range [" + std::to_string(lo) + ".." + std::to_string(hi) +
                            "] for variable '" + name.text + "'");
        if (init < lo || init > hi)
            lex.fail_at(name, DiagClass::OutOfBoundsInit,
                        "initial value " + std::to_string(init) + " of '" + name.text +
                            "' is outside [" + std::to_string(lo) + ".." +
                            std::to_string(hi) + "]");
        m.variables.push_back({name.text, lo, hi, init});
        var_names.push_back(name.text);
    }

    std::string parse_action_tag() {
        lex.expect(Tok::LBracket, "'['");
        Token a = lex.expect(Tok::Ident, "action name");
        lex.expect(Tok::RBracket, "']'");
        return a.text;
    }

    void parse_command() {
        Token start = lex.peek();
        std::string action = parse_action_tag();
        Token gat = lex.peek();
        Expr guard = parse_bool_expr(lex);
        subst_constants(guard, consts, true, lex, gat);
        fold_constants(guard, lex, gat);
        resolve_here(guard, var_names, lex, gat);
        lex.expect(Tok::Arrow, "'->'");

        Command cmd;
        cmd.action = action;
        cmd.guard = std::move(guard);
        Rational sum = 0;
        while (true) {
            cmd.updates.push_back(parse_update());
            sum += cmd.updates.back().probability;
            if (!lex.accept(Tok::Plus)) break;
        }
        lex.expect(Tok::Semicolon, "';'");
        if (sum != 1)
            lex.fail_at(start, DiagClass::ProbabilitySum,
                        "update probabilities of command [" + action + "] sum to " +
                            rational_to_string(sum) + ", expected 1");
        if (std::find(m.action_names.begin(), m.action_names.end(), action) ==
            m.action_names.end())
            m.action_names.push_back(action);
        m.commands.push_back(std::move(cmd));
    }

    UpdateBranch parse_update() {
        Token at = lex.peek();
        Expr p = parse_rat_expr(lex, true);
        subst_constants(p, consts, false, lex, at);
        fold_constants(p, lex, at);
        if (!is_literal(p))
            lex.fail_at(at, DiagClass::UndeclaredId,
                        "transition probabilities must be constant");
        Rational prob = p.op == ExprOp::IntLit ? Rational(p.ival) : p.rval;
        if (prob <= 0 || prob > 1)
            lex.fail_at(at, DiagClass::ProbabilitySum,
                        "update probability " + rational_to_string(prob) +
                            " is outside (0,1]");
        lex.expect(Tok::Colon, "':'");

        UpdateBranch u;
        u.probability = prob;
        Token t = lex.peek();
        if (t.kind == Tok::Ident && t.text == "true") {
            lex.next();  // no-op update
            return u;
        }
        while (true) {
            lex.expect(Tok::LParen, "'('");
            Token var = lex.expect(Tok::Ident, "variable name");
            lex.expect(Tok::Prime, "'''");
            lex.expect(Tok::Eq, "'='");
            Token eat = lex.peek();
            Expr rhs = parse_int_expr(lex);
            subst_constants(rhs, consts, true, lex, eat);
            fold_constants(rhs, lex, eat);
            resolve_here(rhs, var_names, lex, eat);
            lex.expect(Tok::RParen, "')'");

            int idx = -1;
            for (std::size_t i = 0; i < var_names.size(); ++i)
                if (var_names[i] == var.text) idx = int(i);
            if (idx < 0)
                lex.fail_at(var, DiagClass::UndeclaredId,
                            "assignment to undeclared variable '" + var.text + "'");
            for (const auto& a : u.assignments)
                if (a.var_index == idx)
                    lex.fail_at(var, DiagClass::DuplicateDecl,
                                "variable '" + var.text + "' assigned twice in one update");
            u.assignments.push_back({idx, var.text, std::move(rhs)});
            if (!lex.accept(Tok::Amp)) break;
        }
        return u;
    }

    void parse_rewards() {
        lex.next();  // rewards
        while (true) {
            Token t = lex.peek();
            if (t.kind == Tok::Ident && t.text == "endrewards") {
                lex.next();
                break;
            }
            if (t.kind == Tok::End)
                lex.fail(DiagClass::Syntax, "unterminated rewards block");
            Token a_at = lex.peek();
            std::string action = parse_action_tag();
            if (std::find(m.action_names.begin(), m.action_names.end(), action) ==
                m.action_names.end())
                lex.fail_at(a_at, DiagClass::UndeclaredId,
                            "reward for unknown action '" + action + "'");
            Token gat = lex.peek();
            Expr guard = parse_bool_expr(lex);
            subst_constants(guard, consts, true, lex, gat);
            fold_constants(guard, lex, gat);
            resolve_here(guard, var_names, lex, gat);
            lex.expect(Tok::Colon, "':'");
            Token vat = lex.peek();
            Expr value = parse_rat_expr(lex, true);
            subst_constants(value, consts, false, lex, vat);
            fold_constants(value, lex, vat);
            resolve_here(value, var_names, lex, vat);
            lex.expect(Tok::Semicolon, "';'");
            m.rewards.push_back({action, std::move(guard), std::move(value)});
        }
    }
};

}  // namespace

FactoredMdp parse_model(const std::string& text) {
    ModelParser p(text);
    return p.run();
}

FactoredMdp parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

Expr parse_predicate(const std::string& text, const FactoredMdp& m) {
    Expr e = parse_bool_expr_text(text);
    auto vars = m.variable_names();
    resolve_expr(e, vars, {}, false);
    return e;
}

}  // namespace coactiv
