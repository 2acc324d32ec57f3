#include <cctype>
#include <cstdlib>
#include <string>
#include <variant>
#include <vector>

#include "hlab/young.hpp"

namespace hlab {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  YoungFunction parse_all() {
    YoungFunction f = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return f;
  }

 private:
  using Arg = std::variant<double, YoungFunction>;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("young expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek_number() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
  }

  double number() {
    skip();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  std::string ident() {
    skip();
    size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (b == pos_) fail("expected function name");
    return s_.substr(b, pos_ - b);
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::vector<Arg> args() {
    std::vector<Arg> out;
    expect('(');
    skip();
    if (pos_ < s_.size() && s_[pos_] == ')') {
      ++pos_;
      return out;
    }
    while (true) {
      if (peek_number())
        out.emplace_back(number());
      else
        out.emplace_back(expr());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return out;
    }
  }

  double num_arg(const std::vector<Arg>& a, size_t i) {
    if (i >= a.size() || !std::holds_alternative<double>(a[i])) fail("expected numeric argument");
    return std::get<double>(a[i]);
  }

  YoungFunction fn_arg(const std::vector<Arg>& a, size_t i) {
    if (i >= a.size() || !std::holds_alternative<YoungFunction>(a[i])) fail("expected Young expression argument");
    return std::get<YoungFunction>(a[i]);
  }

  void arity(const std::vector<Arg>& a, size_t lo, size_t hi) {
    if (a.size() < lo || a.size() > hi) fail("wrong number of arguments");
  }

  YoungFunction expr() {
    std::string name = ident();
    auto a = args();
    if (name == "power") {
      arity(a, 1, 2);
      return YoungFunction::power(num_arg(a, 0), a.size() == 2 ? num_arg(a, 1) : 1.0);
    }
    if (name == "llogl") {
      arity(a, 1, 1);
      return YoungFunction::llogl(num_arg(a, 0));
    }
    if (name == "expl") {
      arity(a, 1, 1);
      return YoungFunction::expl(num_arg(a, 0));
    }
    if (name == "lll") {
      arity(a, 2, 2);
      return YoungFunction::lll(num_arg(a, 0), num_arg(a, 1));
    }
    if (name == "phi") {
      arity(a, 1, 1);
      double j = num_arg(a, 0);
      if (j != static_cast<int>(j)) fail("phi index must be an integer");
      return YoungFunction::phi(static_cast<int>(j));
    }
    if (name == "prod") {
      arity(a, 2, 2);
      return YoungFunction::product(fn_arg(a, 0), fn_arg(a, 1));
    }
    if (name == "compose") {
      arity(a, 2, 2);
      return YoungFunction::compose(fn_arg(a, 0), fn_arg(a, 1));
    }
    if (name == "scale") {
      arity(a, 2, 2);
      return fn_arg(a, 1).scaled(num_arg(a, 0));
    }
    fail("unknown Young family '" + name + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

YoungFunction parse_young(const std::string& text) { return Parser(text).parse_all(); }

}  // namespace hlab
