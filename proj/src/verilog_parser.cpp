// SPDX-License-Identifier: Apache-2.0

#include "exsim/verilog.hpp"

#include <cctype>
#include <unordered_set>

namespace exsim {

const VModule* VDesign::find(std::string_view name) const {
    for (const auto& m : modules)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

enum class TokKind { Ident, Number, BasedNumber, Punct, Eof };

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;
    uint64_t value = 0;   // Number/BasedNumber
    uint32_t width = 0;   // BasedNumber; 0 = unsized
    int line = 1, col = 1;
};

const std::unordered_set<std::string> kUnsupportedKeywords = {
    "initial", "if", "else", "case", "casex", "casez", "for", "while", "repeat",
    "function", "task", "parameter", "localparam", "generate", "genvar",
    "integer", "real", "signed", "inout", "defparam", "specify", "fork",
    "forever", "deassign", "force", "release", "event", "tri", "supply0",
    "supply1", "time", "primitive", "table",
};

struct Lexer {
    std::string_view src;
    size_t pos = 0;
    int line = 1, col = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }

    void advance(size_t n) {
        for (size_t i = 0; i < n && pos < src.size(); i++, pos++) {
            if (src[pos] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
        }
    }

    void skip_space() {
        for (;;) {
            while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
                advance(1);
            if (pos + 1 < src.size() && src[pos] == '/' && src[pos + 1] == '/') {
                while (pos < src.size() && src[pos] != '\n') advance(1);
                continue;
            }
            if (pos + 1 < src.size() && src[pos] == '/' && src[pos + 1] == '*') {
                advance(2);
                while (pos + 1 < src.size() && !(src[pos] == '*' && src[pos + 1] == '/'))
                    advance(1);
                if (pos + 1 >= src.size()) fail("unterminated block comment");
                advance(2);
                continue;
            }
            return;
        }
    }

    Token next() {
        skip_space();
        Token t;
        t.line = line;
        t.col = col;
        if (pos >= src.size()) {
            t.kind = TokKind::Eof;
            return t;
        }
        char c = src[pos];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\\') {
            if (c == '\\') fail("unsupported construct: escaped identifier");
            size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
                    src[pos] == '$'))
                advance(1);
            t.kind = TokKind::Ident;
            t.text = std::string(src.substr(start, pos - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            uint64_t dec = 0;
            bool have_dec = false;
            size_t start = pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                if (dec > (UINT64_MAX - 9) / 10) fail("numeric literal overflows 64 bits");
                dec = dec * 10 + static_cast<uint64_t>(src[pos] - '0');
                have_dec = true;
                advance(1);
            }
            if (pos < src.size() && src[pos] == '\'') {
                advance(1);
                if (pos >= src.size()) fail("truncated based literal");
                char base = static_cast<char>(std::tolower(src[pos]));
                advance(1);
                int radix = base == 'b' ? 2 : base == 'o' ? 8 : base == 'd' ? 10 : base == 'h' ? 16 : 0;
                if (radix == 0) fail(std::string("bad numeric base '") + base + "'");
                uint64_t v = 0;
                bool any = false;
                while (pos < src.size()) {
                    char d = src[pos];
                    if (d == '_') {
                        advance(1);
                        continue;
                    }
                    int dv;
                    if (std::isdigit(static_cast<unsigned char>(d))) dv = d - '0';
                    else if (std::isxdigit(static_cast<unsigned char>(d))) dv = 10 + (std::tolower(d) - 'a');
                    else if (d == 'x' || d == 'X' || d == 'z' || d == 'Z')
                        fail("unsupported construct: x/z literal value");
                    else break;
                    if (dv >= radix) break;
                    if (v > (UINT64_MAX - static_cast<uint64_t>(dv)) / static_cast<uint64_t>(radix))
                        fail("numeric literal overflows 64 bits");
                    v = v * static_cast<uint64_t>(radix) + static_cast<uint64_t>(dv);
                    any = true;
                    advance(1);
                }
                if (!any) fail("based literal has no digits");
                t.kind = TokKind::BasedNumber;
                t.value = v;
                t.width = have_dec ? static_cast<uint32_t>(dec) : 0;
                if (have_dec && dec == 0) fail("zero-width literal");
                if (have_dec && dec > 64) fail("unsupported construct: literal wider than 64 bits");
                t.text = std::string(src.substr(start, pos - start));
                return t;
            }
            if (!have_dec) fail("malformed number");
            t.kind = TokKind::Number;
            t.value = dec;
            t.text = std::string(src.substr(start, pos - start));
            return t;
        }
        // punctuation; multi-char first
        static const char* two[] = {"<=", ".*"};
        for (const char* p : two) {
            if (src.substr(pos, 2) == p) {
                t.kind = TokKind::Punct;
                t.text = p;
                advance(2);
                return t;
            }
        }
        t.kind = TokKind::Punct;
        t.text = std::string(1, c);
        advance(1);
        return t;
    }
};

struct Parser {
    Lexer lex;
    Token tok;

    explicit Parser(std::string_view src) : lex{src} { tok = lex.next(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok.line, tok.col);
    }
    [[noreturn]] void unsupported(const std::string& what) const {
        throw ParseError("unsupported construct: " + what, tok.line, tok.col);
    }

    void bump() { tok = lex.next(); }

    bool at_punct(std::string_view p) const { return tok.kind == TokKind::Punct && tok.text == p; }
    bool at_ident(std::string_view s) const { return tok.kind == TokKind::Ident && tok.text == s; }

    void expect_punct(std::string_view p) {
        if (!at_punct(p)) fail("expected '" + std::string(p) + "', found '" + tok.text + "'");
        bump();
    }

    std::string expect_ident() {
        if (tok.kind != TokKind::Ident) fail("expected identifier, found '" + tok.text + "'");
        if (kUnsupportedKeywords.count(tok.text)) unsupported("'" + tok.text + "'");
        std::string s = tok.text;
        bump();
        return s;
    }

    uint64_t expect_number() {
        if (tok.kind != TokKind::Number) fail("expected number, found '" + tok.text + "'");
        uint64_t v = tok.value;
        bump();
        return v;
    }

    VRange parse_range() {
        expect_punct("[");
        int msb = static_cast<int>(expect_number());
        expect_punct(":");
        int lsb = static_cast<int>(expect_number());
        expect_punct("]");
        if (lsb != 0) unsupported("ranges not of the form [msb:0]");
        if (msb < lsb) unsupported("descending range");
        return VRange{msb, lsb};
    }

    // --- expressions -------------------------------------------------------

    VExprPtr mk(VExpr::Kind k) {
        auto e = std::make_unique<VExpr>();
        e->kind = k;
        e->line = tok.line;
        e->col = tok.col;
        return e;
    }

    VExprPtr parse_expr() { return parse_ternary(); }

    VExprPtr parse_ternary() {
        VExprPtr cond = parse_or();
        if (!at_punct("?")) return cond;
        auto e = mk(VExpr::Kind::Ternary);
        bump();
        VExprPtr then_e = parse_expr();
        expect_punct(":");
        VExprPtr else_e = parse_ternary();
        e->args.push_back(std::move(cond));
        e->args.push_back(std::move(then_e));
        e->args.push_back(std::move(else_e));
        return e;
    }

    VExprPtr parse_or() {
        VExprPtr a = parse_xor();
        while (at_punct("|")) {
            auto e = mk(VExpr::Kind::Or);
            bump();
            VExprPtr b = parse_xor();
            e->args.push_back(std::move(a));
            e->args.push_back(std::move(b));
            a = std::move(e);
        }
        return a;
    }

    VExprPtr parse_xor() {
        VExprPtr a = parse_and();
        while (at_punct("^")) {
            auto e = mk(VExpr::Kind::Xor);
            bump();
            VExprPtr b = parse_and();
            e->args.push_back(std::move(a));
            e->args.push_back(std::move(b));
            a = std::move(e);
        }
        return a;
    }

    VExprPtr parse_and() {
        VExprPtr a = parse_unary();
        while (at_punct("&")) {
            auto e = mk(VExpr::Kind::And);
            bump();
            VExprPtr b = parse_unary();
            e->args.push_back(std::move(a));
            e->args.push_back(std::move(b));
            a = std::move(e);
        }
        return a;
    }

    VExprPtr parse_unary() {
        if (at_punct("~")) {
            auto e = mk(VExpr::Kind::Not);
            bump();
            e->args.push_back(parse_unary());
            return e;
        }
        if (at_punct("&")) {
            auto e = mk(VExpr::Kind::RedAnd);
            bump();
            e->args.push_back(parse_unary());
            return e;
        }
        if (at_punct("|")) {
            auto e = mk(VExpr::Kind::RedOr);
            bump();
            e->args.push_back(parse_unary());
            return e;
        }
        if (at_punct("^")) unsupported("reduction xor");
        if (at_punct("!") || at_punct("-") || at_punct("+")) unsupported("operator " + tok.text);
        return parse_primary();
    }

    VExprPtr parse_primary() {
        if (at_punct("(")) {
            bump();
            VExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (at_punct("{")) {
            auto e = mk(VExpr::Kind::Concat);
            bump();
            VExprPtr first = parse_expr();
            // replication: {N{expr}}
            if (at_punct("{")) {
                if (first->kind != VExpr::Kind::Const)
                    fail("replication count must be a constant");
                auto rep = mk(VExpr::Kind::Replicate);
                rep->repeat = static_cast<uint32_t>(first->value);
                if (rep->repeat == 0) fail("zero replication count");
                bump();
                rep->args.push_back(parse_expr());
                expect_punct("}");
                expect_punct("}");
                return rep;
            }
            e->args.push_back(std::move(first));
            while (at_punct(",")) {
                bump();
                e->args.push_back(parse_expr());
            }
            expect_punct("}");
            return e;
        }
        if (tok.kind == TokKind::Number || tok.kind == TokKind::BasedNumber) {
            auto e = mk(VExpr::Kind::Const);
            e->value = tok.value;
            e->width = tok.kind == TokKind::BasedNumber ? tok.width : 0;
            bump();
            return e;
        }
        if (tok.kind == TokKind::Ident) {
            if (kUnsupportedKeywords.count(tok.text)) unsupported("'" + tok.text + "'");
            auto e = mk(VExpr::Kind::Ident);
            e->name = tok.text;
            bump();
            if (at_punct("[")) {
                bump();
                int first = static_cast<int>(expect_number());
                if (at_punct(":")) {
                    bump();
                    int second = static_cast<int>(expect_number());
                    e->kind = VExpr::Kind::PartSelect;
                    e->sel_msb = first;
                    e->sel_lsb = second;
                    if (first < second) unsupported("descending part select");
                } else {
                    e->kind = VExpr::Kind::Select;
                    e->sel_msb = e->sel_lsb = first;
                }
                expect_punct("]");
            }
            return e;
        }
        fail("expected expression, found '" + tok.text + "'");
    }

    // --- module items ------------------------------------------------------

    VPort parse_port() {
        VPort p;
        p.line = tok.line;
        if (at_ident("input")) {
            p.dir = VPort::Dir::Input;
        } else if (at_ident("output")) {
            p.dir = VPort::Dir::Output;
        } else if (at_ident("inout")) {
            unsupported("inout port");
        } else {
            fail("expected port direction, found '" + tok.text + "'");
        }
        bump();
        if (at_ident("reg")) {
            p.is_reg = true;
            bump();
        }
        if (at_ident("wire")) bump();
        if (at_punct("[")) p.range = parse_range();
        p.name = expect_ident();
        return p;
    }

    void parse_always(VModule& m) {
        int line = tok.line;
        bump(); // always
        expect_punct("@");
        if (at_punct("*")) {
            bump();
            parse_comb_stmt(m, line);
            return;
        }
        expect_punct("(");
        if (at_punct("*")) {
            bump();
            expect_punct(")");
            parse_comb_stmt(m, line);
            return;
        }
        if (at_ident("negedge")) unsupported("negedge clocking");
        if (!at_ident("posedge")) fail("expected 'posedge' or '*' in event control");
        bump();
        std::string clock = expect_ident();
        if (at_ident("or") || at_punct(",")) unsupported("multiple events in sensitivity list");
        expect_punct(")");

        if (at_ident("begin")) unsupported("begin/end block (one statement per always)");
        VClockedAssign ca;
        ca.line = line;
        ca.clock = clock;
        ca.lhs = expect_ident();
        if (at_punct("[")) unsupported("indexed assignment target");
        if (at_punct("=")) fail("blocking assignment in clocked block (use <=)");
        expect_punct("<=");
        ca.rhs = parse_expr();
        expect_punct(";");
        m.clocked.push_back(std::move(ca));
    }

    void parse_comb_stmt(VModule& m, int line) {
        if (at_ident("begin")) unsupported("begin/end block (one statement per always)");
        VAssign a;
        a.line = line;
        a.from_always_comb = true;
        a.lhs = expect_ident();
        if (at_punct("[")) unsupported("indexed assignment target");
        if (at_punct("<=")) fail("non-blocking assignment in combinational block (use =)");
        expect_punct("=");
        a.rhs = parse_expr();
        expect_punct(";");
        m.assigns.push_back(std::move(a));
    }

    void parse_instance(VModule& m, std::string module_name, int line) {
        VInstance inst;
        inst.line = line;
        inst.module_name = std::move(module_name);
        inst.instance_name = expect_ident();
        expect_punct("(");
        bool first = true;
        while (!at_punct(")")) {
            if (!first) expect_punct(",");
            first = false;
            if (at_punct(".*")) {
                inst.wildcard = true;
                bump();
                continue;
            }
            expect_punct(".");
            std::string port = expect_ident();
            expect_punct("(");
            VExprPtr e;
            if (!at_punct(")")) e = parse_expr();
            expect_punct(")");
            inst.connections.emplace_back(std::move(port), std::move(e));
        }
        expect_punct(")");
        expect_punct(";");
        m.instances.push_back(std::move(inst));
    }

    VModule parse_module() {
        VModule m;
        m.line = tok.line;
        bump(); // module
        m.name = expect_ident();
        expect_punct("(");
        if (!at_punct(")")) {
            for (;;) {
                m.ports.push_back(parse_port());
                if (at_punct(",")) {
                    bump();
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        expect_punct(";");

        while (!at_ident("endmodule")) {
            if (tok.kind == TokKind::Eof) fail("missing 'endmodule'");
            if (tok.kind != TokKind::Ident) fail("expected module item, found '" + tok.text + "'");
            if (kUnsupportedKeywords.count(tok.text)) unsupported("'" + tok.text + "'");

            if (at_ident("wire") || at_ident("reg")) {
                VDecl::Net net = at_ident("reg") ? VDecl::Net::Reg : VDecl::Net::Wire;
                int line = tok.line;
                bump();
                std::optional<VRange> range;
                if (at_punct("[")) range = parse_range();
                for (;;) {
                    VDecl d;
                    d.net = net;
                    d.range = range;
                    d.line = line;
                    d.name = expect_ident();
                    m.decls.push_back(std::move(d));
                    if (at_punct(",")) {
                        bump();
                        continue;
                    }
                    break;
                }
                expect_punct(";");
            } else if (at_ident("assign")) {
                VAssign a;
                a.line = tok.line;
                bump();
                a.lhs = expect_ident();
                if (at_punct("[")) unsupported("indexed assignment target");
                expect_punct("=");
                a.rhs = parse_expr();
                expect_punct(";");
                m.assigns.push_back(std::move(a));
            } else if (at_ident("always")) {
                parse_always(m);
            } else if (at_ident("input") || at_ident("output")) {
                unsupported("non-ANSI port declaration");
            } else {
                // submodule instantiation: <module> <inst> ( ... );
                int line = tok.line;
                std::string name = expect_ident();
                parse_instance(m, std::move(name), line);
            }
        }
        bump(); // endmodule
        return m;
    }

    VDesign parse_design() {
        VDesign d;
        while (tok.kind != TokKind::Eof) {
            if (tok.kind == TokKind::Ident && kUnsupportedKeywords.count(tok.text))
                unsupported("'" + tok.text + "'");
            if (!at_ident("module")) fail("expected 'module', found '" + tok.text + "'");
            d.modules.push_back(parse_module());
        }
        if (d.modules.empty()) fail("source contains no modules");
        for (size_t i = 0; i < d.modules.size(); i++)
            for (size_t j = i + 1; j < d.modules.size(); j++)
                if (d.modules[i].name == d.modules[j].name)
                    throw ParseError("duplicate module '" + d.modules[i].name + "'",
                                     d.modules[j].line, 1);
        return d;
    }
};

} // namespace

VDesign parse_mini_verilog(std::string_view source) {
    Parser p(source);
    return p.parse_design();
}

} // namespace exsim
