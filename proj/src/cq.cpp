#include "pclab/cq.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "engine.hpp"

namespace pclab {

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg), line(line_), col(col_) {}

std::vector<Var> Query::vars() const {
    std::vector<Var> out;
    std::set<Var> seen;
    auto add = [&](const Atom& a) {
        for (const auto& v : a.args)
            if (seen.insert(v).second) out.push_back(v);
    };
    add(head);
    for (const auto& a : body) add(a);
    return out;
}

std::vector<Var> Query::head_vars() const {
    std::vector<Var> out;
    std::set<Var> seen;
    for (const auto& v : head.args)
        if (seen.insert(v).second) out.push_back(v);
    return out;
}

bool Query::is_head_var(const Var& v) const {
    return std::find(head.args.begin(), head.args.end(), v) != head.args.end();
}

Query make_query(Atom head, std::vector<Atom> body, std::string name) {
    if (body.empty()) throw SchemaError("query body is empty");
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    std::map<std::string, std::size_t> arity;
    std::set<Var> body_vars;
    for (const auto& a : body) {
        auto [it, fresh] = arity.emplace(a.rel, a.args.size());
        if (!fresh && it->second != a.args.size())
            throw SchemaError("relation " + a.rel + " used with arities " + std::to_string(it->second) + " and " +
                              std::to_string(a.args.size()));
        body_vars.insert(a.args.begin(), a.args.end());
    }
    if (arity.count(head.rel)) throw SchemaError("head relation " + head.rel + " also occurs in the body");
    for (const auto& v : head.args)
        if (!body_vars.count(v)) throw SchemaError("unsafe head variable " + v);
    Query q;
    q.name = std::move(name);
    q.head = std::move(head);
    q.body = std::move(body);
    return q;
}

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Turnstile, Dot, LBrace, RBrace, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto adv = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n; ++k) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv();
            continue;
        }
        if (c == '#' || c == '%') {
            while (i < s.size() && s[i] != '\n') adv();
            continue;
        }
        int l = line, cl = col;
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), l, cl});
            adv(j - i);
            continue;
        }
        switch (c) {
            case '(': out.push_back({Tok::LParen, "(", l, cl}); adv(); continue;
            case ')': out.push_back({Tok::RParen, ")", l, cl}); adv(); continue;
            case ',': out.push_back({Tok::Comma, ",", l, cl}); adv(); continue;
            case '.': out.push_back({Tok::Dot, ".", l, cl}); adv(); continue;
            case '{': out.push_back({Tok::LBrace, "{", l, cl}); adv(); continue;
            case '}': out.push_back({Tok::RBrace, "}", l, cl}); adv(); continue;
            default: break;
        }
        if (c == ':' && i + 1 < s.size() && s[i + 1] == '-') {
            out.push_back({Tok::Turnstile, ":-", l, cl});
            adv(2);
            continue;
        }
        if (c == '<' && i + 1 < s.size() && s[i + 1] == '-') {
            out.push_back({Tok::Turnstile, "<-", l, cl});
            adv(2);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class QueryParser {
public:
    explicit QueryParser(std::vector<Token> toks) : t_(std::move(toks)) {}

    std::vector<Query> all() {
        std::vector<Query> out;
        if (peek().kind == Tok::Ident && peek().text == "query" && peek(1).kind == Tok::Ident &&
            peek(2).kind == Tok::LBrace) {
            std::set<std::string> names;
            while (peek().kind != Tok::End) {
                const Token& kw = expect(Tok::Ident, "'query'");
                if (kw.text != "query") throw ParseError("expected 'query'", kw.line, kw.col);
                const Token& name = expect(Tok::Ident, "query name");
                if (!names.insert(name.text).second)
                    throw ParseError("duplicate query name " + name.text, name.line, name.col);
                expect(Tok::LBrace, "'{'");
                out.push_back(rule(name.text));
                expect(Tok::RBrace, "'}'");
            }
        } else {
            out.push_back(rule(""));
            if (peek().kind != Tok::End)
                throw ParseError("trailing input after query", peek().line, peek().col);
        }
        return out;
    }

private:
    std::vector<Token> t_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }

    const Token& expect(Tok kind, const std::string& what) {
        const Token& tk = peek();
        if (tk.kind != kind)
            throw ParseError("expected " + what + (tk.kind == Tok::End ? " at end of input" : ", got '" + tk.text + "'"),
                             tk.line, tk.col);
        ++pos_;
        return tk;
    }

    Atom atom() {
        const Token& rel = expect(Tok::Ident, "relation name");
        if (!std::isupper(static_cast<unsigned char>(rel.text[0])))
            throw ParseError("relation name must begin with an uppercase letter: " + rel.text, rel.line, rel.col);
        Atom a;
        a.rel = rel.text;
        expect(Tok::LParen, "'('");
        if (peek().kind != Tok::RParen) {
            for (;;) {
                const Token& v = expect(Tok::Ident, "variable");
                if (!std::islower(static_cast<unsigned char>(v.text[0])))
                    throw ParseError("query arguments must be variables (lowercase identifiers); constants are not "
                                     "allowed: " + v.text,
                                     v.line, v.col);
                a.args.push_back(v.text);
                if (peek().kind != Tok::Comma) break;
                ++pos_;
            }
        }
        expect(Tok::RParen, "')'");
        return a;
    }

    Query rule(const std::string& name) {
        const Token& start = peek();
        Atom head = atom();
        expect(Tok::Turnstile, "':-'");
        std::vector<Atom> body;
        body.push_back(atom());
        while (peek().kind == Tok::Comma) {
            ++pos_;
            body.push_back(atom());
        }
        if (peek().kind == Tok::Dot) ++pos_;
        try {
            return make_query(std::move(head), std::move(body), name);
        } catch (const SchemaError& e) {
            throw ParseError(e.what(), start.line, start.col);
        }
    }
};

bool valid_value(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

Query parse_query(const std::string& text) {
    auto qs = parse_queries(text);
    if (qs.size() != 1) throw ParseError("expected exactly one query, found " + std::to_string(qs.size()), 1, 1);
    return qs.front();
}

std::vector<Query> parse_queries(const std::string& text) {
    QueryParser p(lex(text));
    return p.all();
}

Instance parse_instance(const std::string& text) {
    Instance inst;
    std::map<std::string, std::size_t> arity;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto toks = lex(line);
        if (toks.size() == 1) continue;
        std::size_t p = 0;
        auto fail = [&](const std::string& msg) { throw ParseError(msg, lineno, toks[p].col); };
        if (toks[p].kind != Tok::Ident || !std::isupper(static_cast<unsigned char>(toks[p].text[0])))
            fail("expected a relation name beginning with an uppercase letter");
        Fact f;
        f.rel = toks[p++].text;
        if (toks[p].kind != Tok::LParen) fail("expected '('");
        ++p;
        if (toks[p].kind != Tok::RParen) {
            for (;;) {
                if (toks[p].kind != Tok::Ident || !valid_value(toks[p].text)) fail("expected a data value");
                f.vals.push_back(toks[p++].text);
                if (toks[p].kind != Tok::Comma) break;
                ++p;
            }
        }
        if (toks[p].kind != Tok::RParen) fail("expected ')'");
        ++p;
        if (toks[p].kind == Tok::Dot) ++p;
        if (toks[p].kind != Tok::End) fail("one fact per line");
        auto [it, fresh] = arity.emplace(f.rel, f.vals.size());
        if (!fresh && it->second != f.vals.size())
            throw ParseError("relation " + f.rel + " used with two arities", lineno, 1);
        inst.insert(std::move(f));
    }
    return inst;
}

namespace {

template <class T>
std::string render(const std::string& rel, const std::vector<T>& args) {
    std::string s = rel + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i];
    }
    return s + ")";
}

}  // namespace

std::string to_string(const Atom& a) { return render(a.rel, a.args); }
std::string to_string(const Fact& f) { return render(f.rel, f.vals); }

std::string to_string(const Query& q) {
    std::string s = to_string(q.head) + " :- ";
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        if (i) s += ", ";
        s += to_string(q.body[i]);
    }
    return s + ".";
}

std::string to_string(const Valuation& v) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, val] : v) {
        if (!first) s += ", ";
        first = false;
        s += k + "->" + val;
    }
    return s + "}";
}

std::string to_string(const Instance& inst) {
    std::string s;
    for (const auto& f : inst) s += to_string(f) + "\n";
    return s;
}

std::set<Value> adom(const Instance& inst) {
    std::set<Value> out;
    for (const auto& f : inst) out.insert(f.vals.begin(), f.vals.end());
    return out;
}

std::map<std::string, std::size_t> schema_of(const Query& q) {
    std::map<std::string, std::size_t> s;
    for (const auto& a : q.body) {
        auto [it, fresh] = s.emplace(a.rel, a.args.size());
        if (!fresh && it->second != a.args.size()) throw SchemaError("arity conflict on " + a.rel);
    }
    return s;
}

std::map<std::string, std::size_t> schema_of(const Instance& inst) {
    std::map<std::string, std::size_t> s;
    for (const auto& f : inst) {
        auto [it, fresh] = s.emplace(f.rel, f.vals.size());
        if (!fresh && it->second != f.vals.size()) throw SchemaError("arity conflict on " + f.rel);
    }
    return s;
}

void check_same_schema(const Query& a, const Query& b) {
    auto sa = schema_of(a);
    for (const auto& [rel, ar] : schema_of(b)) {
        auto it = sa.find(rel);
        if (it != sa.end() && it->second != ar)
            throw SchemaError("relation " + rel + " has arity " + std::to_string(it->second) + " in one query and " +
                              std::to_string(ar) + " in the other");
    }
}

Instance evaluate(const Query& q, const Instance& inst) {
    auto schema = schema_of(q);
    detail::Interner rels, vals;
    auto cq = detail::compile(q, rels);
    std::vector<detail::GFact> facts;
    for (const auto& f : inst) {
        auto it = schema.find(f.rel);
        if (it == schema.end()) continue;
        if (it->second != f.vals.size())
            throw SchemaError("instance fact " + to_string(f) + " does not match the arity of " + f.rel);
        detail::GFact g;
        g.rel = rels.get(f.rel);
        for (const auto& v : f.vals) g.vals.push_back(vals.get(v));
        facts.push_back(std::move(g));
    }
    detail::FactIndex idx(std::move(facts), rels.size());
    Instance out;
    std::vector<int> assign(static_cast<std::size_t>(cq.nvars()), -1);
    detail::for_each_match(cq, idx, assign, [&](const std::vector<int>& a, const std::vector<int>&) {
        Fact h;
        h.rel = q.head.rel;
        for (int v : cq.head.args) h.vals.push_back(vals.name(a[static_cast<std::size_t>(v)]));
        out.insert(std::move(h));
        return false;
    });
    return out;
}

Fact apply(const Valuation& v, const Atom& a) {
    Fact f;
    f.rel = a.rel;
    for (const auto& x : a.args) {
        auto it = v.find(x);
        if (it == v.end()) throw std::invalid_argument("valuation is not defined on variable " + x);
        f.vals.push_back(it->second);
    }
    return f;
}

std::pair<Fact, Instance> apply_valuation(const Valuation& v, const Query& q) {
    Instance body;
    for (const auto& a : q.body) body.insert(apply(v, a));
    return {apply(v, q.head), body};
}

Atom substitute(const Substitution& s, const Atom& a) {
    Atom out;
    out.rel = a.rel;
    for (const auto& x : a.args) {
        auto it = s.find(x);
        out.args.push_back(it == s.end() ? x : it->second);
    }
    return out;
}

Query apply_substitution(const Substitution& s, const Query& q) {
    Query out;
    out.name = q.name;
    out.head = substitute(s, q.head);
    for (const auto& a : q.body) out.body.push_back(substitute(s, a));
    std::sort(out.body.begin(), out.body.end());
    out.body.erase(std::unique(out.body.begin(), out.body.end()), out.body.end());
    return out;
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
    Substitution out;
    for (const auto& [x, y] : inner) {
        auto it = outer.find(y);
        if (it == outer.end()) throw std::invalid_argument("composition: " + y + " is outside the outer domain");
        out[x] = it->second;
    }
    return out;
}

Substitution identity_substitution(const Query& q) {
    Substitution s;
    for (const auto& v : q.vars()) s[v] = v;
    return s;
}

bool is_simplification(const Substitution& theta, const Query& q) {
    for (const auto& v : q.vars())
        if (!theta.count(v)) return false;
    if (substitute(theta, q.head) != q.head) return false;
    for (const auto& a : q.body)
        if (!std::binary_search(q.body.begin(), q.body.end(), substitute(theta, a))) return false;
    return true;
}

bool is_idempotent(const Substitution& s) {
    for (const auto& [x, y] : s) {
        auto it = s.find(y);
        if ((it == s.end() ? y : it->second) != y) return false;
    }
    return true;
}

}  // namespace pclab
