#include "glp/lexer.hpp"

#include <cctype>
#include <cstring>

namespace glp {

namespace {

bool is_symbol_char(char c) { return std::strchr("+-*/\\^<>=~:.?@#&$", c) != nullptr && c != '\0'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
  explicit Lexer(std::string_view s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = TokKind::Eof;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = TokKind::Num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text.push_back(take());
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
          t.text.push_back(take());
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text.push_back(take());
        }
      } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = TokKind::Var;
        while (pos_ < src_.size() && is_alnum(src_[pos_])) t.text.push_back(take());
        if (pos_ < src_.size() && src_[pos_] == '?') {
          take();
          t.reader = true;
        }
      } else if (std::islower(static_cast<unsigned char>(c))) {
        t.kind = TokKind::Atom;
        while (pos_ < src_.size() && is_alnum(src_[pos_])) t.text.push_back(take());
        t.adjacent_paren = pos_ < src_.size() && src_[pos_] == '(';
      } else if (c == '\'' || c == '"') {
        t.kind = TokKind::QAtom;
        char q = take();
        for (;;) {
          if (pos_ >= src_.size()) throw ParseError("unterminated quoted atom", t.line, t.col);
          char d = take();
          if (d == q) {
            if (pos_ < src_.size() && src_[pos_] == q) {  // doubled quote
              t.text.push_back(take());
              continue;
            }
            break;
          }
          if (d == '\\' && pos_ < src_.size()) {
            char e = take();
            t.text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
            continue;
          }
          t.text.push_back(d);
        }
        t.adjacent_paren = pos_ < src_.size() && src_[pos_] == '(';
      } else if (std::strchr("()[],|", c)) {
        t.kind = TokKind::Punct;
        t.text.push_back(take());
      } else if (c == '.' && (pos_ + 1 >= src_.size() || std::isspace(static_cast<unsigned char>(src_[pos_ + 1])) ||
                              src_[pos_ + 1] == '%')) {
        t.kind = TokKind::End;
        t.text.push_back(take());
      } else if (is_symbol_char(c)) {
        t.kind = TokKind::Op;
        while (pos_ < src_.size() && is_symbol_char(src_[pos_])) {
          if (src_[pos_] == '.' && (pos_ + 1 >= src_.size() || std::isspace(static_cast<unsigned char>(src_[pos_ + 1]))))
            break;
          t.text.push_back(take());
        }
        t.adjacent_paren = pos_ < src_.size() && src_[pos_] == '(';
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(std::move(t));
    }
  }

private:
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) take();
      if (pos_ < src_.size() && src_[pos_] == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
        continue;
      }
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '*') {
        int l = line_, c = col_;
        take();
        take();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) take();
        if (pos_ + 1 >= src_.size()) throw ParseError("unterminated comment", l, c);
        take();
        take();
        continue;
      }
      return;
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

}  // namespace glp
