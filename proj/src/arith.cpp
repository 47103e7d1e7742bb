#include "glp/arith.hpp"

#include "glp/store.hpp"

namespace glp {

std::optional<Decimal> eval_arith(const Term& t, std::string* why) {
  auto fail = [&](const char* reason) -> std::optional<Decimal> {
    if (why) *why = reason;
    return std::nullopt;
  };
  switch (t.kind()) {
    case Kind::Number:
      return t.num();
    case Kind::Writer:
    case Kind::Reader:
      throw ContractViolation("evaluate called on a non-ground expression");
    case Kind::Constant:
      return fail("non-numeric");
    case Kind::Compound:
      break;
  }
  const std::string& f = t.name();
  if (t.arity() == 1 && f == "-") {
    auto a = eval_arith(t.arg(0), why);
    if (!a) return a;
    return -*a;
  }
  if (t.arity() == 1 && f == "+") return eval_arith(t.arg(0), why);
  if (t.arity() != 2) return fail("non-numeric");
  if (f != "+" && f != "-" && f != "*" && f != "/" && f != "mod") return fail("non-numeric");
  auto a = eval_arith(t.arg(0), why);
  if (!a) return a;
  auto b = eval_arith(t.arg(1), why);
  if (!b) return b;
  if (f == "+") return *a + *b;
  if (f == "-") return *a - *b;
  if (f == "*") return *a * *b;
  if (f == "/") {
    auto q = Decimal::divide(*a, *b);
    if (!q) return fail("division-by-zero");
    return q;
  }
  if (b->is_zero()) return fail("division-by-zero");
  auto r = Decimal::mod(*a, *b);
  if (!r) return fail("non-integer-mod");
  return r;
}

bool is_comparison(const std::string& name) {
  return name == "<" || name == ">" || name == "=<" || name == ">=" || name == "=:=";
}

bool compare_numbers(const std::string& op, const Decimal& a, const Decimal& b) {
  int c = a.compare(b);
  if (op == "<") return c < 0;
  if (op == ">") return c > 0;
  if (op == "=<") return c <= 0;
  if (op == ">=") return c >= 0;
  return c == 0;
}

}  // namespace glp
