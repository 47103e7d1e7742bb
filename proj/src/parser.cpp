#include "glp/parser.hpp"

#include <sodium.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace glp {

namespace {

enum class OpType { XFX, XFY, YFX };
struct OpDef {
  int prec;
  OpType type;
};

const std::map<std::string, OpDef>& infix_ops() {
  static const std::map<std::string, OpDef> ops = {
      {":-", {1200, OpType::XFX}}, {"|", {1100, OpType::XFY}},  {",", {1000, OpType::XFY}},
      {"=", {700, OpType::XFX}},   {"=\\=", {700, OpType::XFX}}, {":=", {700, OpType::XFX}},
      {"<", {700, OpType::XFX}},   {">", {700, OpType::XFX}},   {"=<", {700, OpType::XFX}},
      {">=", {700, OpType::XFX}},  {"=:=", {700, OpType::XFX}}, {"+", {500, OpType::YFX}},
      {"-", {500, OpType::YFX}},   {"*", {400, OpType::YFX}},   {"/", {400, OpType::YFX}},
      {"mod", {400, OpType::YFX}}, {":", {200, OpType::XFY}},
  };
  return ops;
}

class Parser {
public:
  Parser(std::vector<Token> toks, bool canonical) : toks_(std::move(toks)), canonical_(canonical) {}

  bool at_eof() const { return peek().kind == TokKind::Eof; }
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.col); }

  void expect_punct(const char* p) {
    const Token& t = next();
    if (t.kind != TokKind::Punct || t.text != p) fail(std::string("expected '") + p + "' but found '" + t.text + "'", t);
  }

  void begin_clause() {
    names_.clear();
    hints_.assign(1, "");
    nvars_ = 0;
  }

  Term parse(int maxprec) { return parse_expr(maxprec).first; }

  void expect_end() {
    const Token& t = next();
    if (t.kind != TokKind::End) fail("expected '.' at end of clause, found '" + t.text + "'", t);
  }

  std::map<std::string, uint64_t> names_;
  std::vector<std::string> hints_{""};
  uint64_t nvars_ = 0;

private:
  const OpDef* infix_of(const Token& t) const {
    const auto& ops = infix_ops();
    if (t.kind == TokKind::Op || (t.kind == TokKind::Punct && (t.text == "," || t.text == "|")) ||
        (t.kind == TokKind::Atom && t.text == "mod" && !t.adjacent_paren)) {
      auto it = ops.find(t.text);
      if (it != ops.end()) return &it->second;
    }
    return nullptr;
  }

  std::pair<Term, int> parse_expr(int maxprec) {
    auto [left, leftprec] = parse_primary(maxprec);
    for (;;) {
      const Token& t = peek();
      const OpDef* op = infix_of(t);
      if (!op || op->prec > maxprec) break;
      bool left_ok = op->type == OpType::YFX ? leftprec <= op->prec : leftprec < op->prec;
      if (!left_ok) break;
      std::string name = t.text;
      next();
      int rmax = op->type == OpType::XFY ? op->prec : op->prec - 1;
      Term right = parse_expr(rmax).first;
      left = Term::compound(name, {left, right});
      leftprec = op->prec;
    }
    return {left, leftprec};
  }

  Term variable(const Token& t) {
    if (canonical_) {
      if (t.text.size() > 2 && t.text[0] == '_' && t.text[1] == 'W') {
        uint64_t id = std::stoull(t.text.substr(2));
        if (id > nvars_) nvars_ = id;
        return t.reader ? Term::reader(id) : Term::writer(id);
      }
      if (t.text != "_") fail("canonical terms name variables as _W<id>", t);
    }
    uint64_t id;
    if (t.text == "_") {
      id = ++nvars_;
      hints_.push_back("_");
    } else {
      auto it = names_.find(t.text);
      if (it == names_.end()) {
        id = ++nvars_;
        hints_.push_back(t.text);
        names_.emplace(t.text, id);
      } else {
        id = it->second;
      }
    }
    return t.reader ? Term::reader(id, t.text) : Term::writer(id, t.text);
  }

  std::vector<Term> arglist(const char* close) {
    std::vector<Term> args;
    args.push_back(parse(999));
    while (peek().kind == TokKind::Punct && peek().text == ",") {
      next();
      args.push_back(parse(999));
    }
    expect_punct(close);
    return args;
  }

  std::pair<Term, int> parse_primary(int maxprec) {
    const Token& t = next();
    switch (t.kind) {
      case TokKind::Num: {
        auto d = Decimal::parse(t.text);
        if (!d) fail("bad number", t);
        return {Term::number(*d), 0};
      }
      case TokKind::Var:
        return {variable(t), 0};
      case TokKind::Atom:
      case TokKind::QAtom:
        if (t.adjacent_paren) {
          next();
          return {Term::compound(t.text, arglist(")")), 0};
        }
        return {Term::constant(t.text), 0};
      case TokKind::Punct:
        if (t.text == "(") {
          Term inner = parse(1200);
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") {
          if (peek().kind == TokKind::Punct && peek().text == "]") {
            next();
            return {Term::nil(), 0};
          }
          std::vector<Term> items{parse(999)};
          while (peek().kind == TokKind::Punct && peek().text == ",") {
            next();
            items.push_back(parse(999));
          }
          Term tail = Term::nil();
          if (peek().kind == TokKind::Punct && peek().text == "|") {
            next();
            tail = parse(999);
          }
          expect_punct("]");
          return {Term::list(items, tail), 0};
        }
        fail("unexpected '" + t.text + "'", t);
      case TokKind::Op:
        if (t.text == "?") fail("postfix ? applies only to a variable", t);
        if (t.adjacent_paren) {
          next();
          return {Term::compound(t.text, arglist(")")), 0};
        }
        if (t.text == "-") {
          const Token& n = peek();
          if (n.kind == TokKind::Num && n.line == t.line && n.col == t.col + 1) {
            next();
            auto d = Decimal::parse("-" + n.text);
            return {Term::number(*d), 0};
          }
          Term operand = parse_expr(200).first;
          return {Term::compound("-", {operand}), 200};
        }
        (void)maxprec;
        return {Term::constant(t.text), 0};
      case TokKind::End:
        fail("unexpected end of clause", t);
      case TokKind::Eof:
        fail("unexpected end of input", t);
    }
    fail("unexpected token", t);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  bool canonical_;
};

void flatten(const Term& t, std::vector<Term>& out) {
  if (t.is_compound() && t.name() == "," && t.arity() == 2) {
    flatten(t.arg(0), out);
    flatten(t.arg(1), out);
  } else if (!(t.is_constant() && t.name() == "true")) {
    out.push_back(t);
  }
}

void count_occurrences(const Term& t, std::map<VarKey, int>& counts) {
  if (t.is_var()) {
    ++counts[key_of(t)];
  } else if (t.is_compound()) {
    for (const auto& a : t.args()) count_occurrences(a, counts);
  }
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += to_string(ts[i]);
  }
  return out;
}

}  // namespace

std::string SrswViolation::str() const {
  std::ostringstream os;
  os << "clause " << clause << " (line " << line << "): " << (reader ? "reader " : "writer ") << var
     << (reader ? "?" : "") << " occurs " << count << " times";
  return os.str();
}

bool Module::writer_violations() const {
  for (const auto& v : srsw)
    if (!v.reader) return true;
  return false;
}

Module parse_module(std::string_view text, const std::string& name) {
  Parser p(tokenize(text), false);
  Module m;
  m.name = name;
  while (!p.at_eof()) {
    const Token& first = p.peek();
    p.begin_clause();
    Clause c;
    c.line = first.line;
    c.col = first.col;
    Term t = p.parse(1200);
    p.expect_end();
    if (t.is_compound() && t.name() == ":-" && t.arity() == 2) {
      c.head = t.arg(0);
      Term rest = t.arg(1);
      if (rest.is_compound() && rest.name() == "|" && rest.arity() == 2) {
        c.has_guard = true;
        flatten(rest.arg(0), c.guard);
        flatten(rest.arg(1), c.body);
      } else {
        flatten(rest, c.body);
      }
    } else {
      c.head = t;
    }
    if (!(c.head.is_constant() || c.head.is_compound()))
      throw ParseError("clause head must be an atom", c.line, c.col);
    c.nvars = p.nvars_;
    c.names = p.hints_;
    m.clauses.push_back(std::move(c));
  }
  m.srsw = srsw_check(m);
  m.hash = module_hash(m);
  return m;
}

Module load_module_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module(ss.str(), std::filesystem::path(path).stem().string());
}

ParsedTerm parse_term(std::string_view text, bool canonical) {
  Parser p(tokenize(text), canonical);
  p.begin_clause();
  ParsedTerm out;
  out.term = p.parse(1200);
  if (p.peek().kind == TokKind::End) p.next();
  if (!p.at_eof()) {
    const Token& t = p.peek();
    throw ParseError("trailing input after term: '" + t.text + "'", t.line, t.col);
  }
  out.names = p.names_;
  out.nvars = p.nvars_;
  return out;
}

std::vector<Term> parse_canonical_terms(std::string_view text) {
  Parser p(tokenize(text), true);
  std::vector<Term> out;
  while (!p.at_eof()) {
    p.begin_clause();
    out.push_back(p.parse(1200));
    p.expect_end();
  }
  return out;
}

std::vector<SrswViolation> srsw_check_clause(const Clause& c, size_t index) {
  std::set<uint64_t> waived;
  for (const auto& g : c.guard)
    if (g.is_compound() && g.name() == "ground" && g.arity() == 1 && g.arg(0).is_var()) waived.insert(g.arg(0).id());
  std::map<VarKey, int> counts;
  count_occurrences(c.head, counts);
  for (const auto& b : c.body) count_occurrences(b, counts);
  std::vector<SrswViolation> out;
  for (const auto& [k, n] : counts) {
    if (n < 2 || waived.count(k.id)) continue;
    if (c.names.size() > k.id && c.names[k.id] == "_") continue;
    SrswViolation v;
    v.clause = index;
    v.line = c.line;
    v.var = k.id < c.names.size() ? c.names[k.id] : ("_W" + std::to_string(k.id));
    v.reader = k.reader;
    v.count = n;
    out.push_back(v);
  }
  return out;
}

std::vector<SrswViolation> srsw_check(const Module& m) {
  std::vector<SrswViolation> out;
  for (size_t i = 0; i < m.clauses.size(); ++i) {
    auto v = srsw_check_clause(m.clauses[i], i);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::string print_clause(const Clause& c) {
  std::string out = to_string(c.head);
  if (c.has_guard || !c.body.empty()) {
    out += " :- ";
    if (c.has_guard) out += (c.guard.empty() ? std::string("true") : join_terms(c.guard)) + " | ";
    out += c.body.empty() ? std::string("true") : join_terms(c.body);
  }
  out += ".";
  return out;
}

std::string print_module(const Module& m) {
  std::string out;
  for (const auto& c : m.clauses) out += print_clause(c) + "\n";
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 15]);
  }
  return out;
}

std::string module_hash(const Module& m) { return "m_" + sha256_hex(print_module(m)); }

}  // namespace glp
