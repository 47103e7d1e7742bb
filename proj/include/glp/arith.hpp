#pragma once

#include "glp/term.hpp"

#include <optional>
#include <string>

namespace glp {

// Evaluate a ground arithmetic expression (+ - * / mod, unary -). Returns nullopt with
// a reason on division by zero or a non-numeric leaf. Variables are a contract violation.
std::optional<Decimal> eval_arith(const Term& ground, std::string* why = nullptr);

bool is_comparison(const std::string& name);
// Apply a comparison operator to two numbers.
bool compare_numbers(const std::string& op, const Decimal& a, const Decimal& b);

}  // namespace glp
