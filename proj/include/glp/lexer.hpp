#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace glp {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
  int line;
  int col;
};

enum class TokKind { Var, Atom, QAtom, Num, Punct, Op, End, Eof };

struct Token {
  TokKind kind;
  std::string text;
  bool reader = false;        // Var followed by '?'
  bool adjacent_paren = false; // Atom/QAtom immediately followed by '('
  int line = 1;
  int col = 1;
};

std::vector<Token> tokenize(std::string_view src);

}  // namespace glp
