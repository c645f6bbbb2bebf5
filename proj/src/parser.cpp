// Recursive-descent parser for ring-element text.

#include <cctype>
#include <limits>

#include "l2approx/error.hpp"
#include "l2approx/group_ring.hpp"

namespace l2approx {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const GroupPtr& group)
      : text_(text), group_(group) {}

  RingElement parse() {
    RingElement result(group_);
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty expression");
    bool negative = false;
    if (peek() == '+' || peek() == '-') {
      negative = peek() == '-';
      ++pos_;
    }
    for (;;) {
      auto term = parse_term();
      result += negative ? -term : term;
      skip_ws();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-')
        throw ParseError(pos_, std::string("unexpected '") + peek() + "'");
      negative = peek() == '-';
      ++pos_;
    }
    return result;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string_view digits() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  RingElement parse_term() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "expected a term");
    mpz_class coefficient = 1;
    GroupElement element = group_->identity();
    bool have_factor = false;
    bool need_factor = false;
    const bool have_coefficient = std::isdigit(static_cast<unsigned char>(peek()));
    if (have_coefficient) {
      coefficient = mpz_class(std::string(digits()));
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        need_factor = true;
      }
    }
    for (;;) {
      skip_ws();
      if (at_end() || !ident_start(peek())) {
        if (need_factor) throw ParseError(pos_, "expected a generator");
        break;
      }
      const std::size_t factor_pos = pos_;
      auto factor = parse_factor();
      try {
        element = group_->multiply(element, factor);
      } catch (const InvalidArgument& e) {
        throw ParseError(factor_pos, e.what());
      }
      have_factor = true;
      need_factor = false;
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        need_factor = true;
      }
    }
    if (!have_coefficient && !have_factor) throw ParseError(pos_, "expected a term");
    return RingElement::monomial(group_, element, coefficient);
  }

  GroupElement parse_factor() {
    const std::size_t start = pos_;
    while (!at_end() && ident_char(peek())) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    std::int64_t exponent = 1;
    skip_ws();
    if (!at_end() && peek() == '^') {
      ++pos_;
      skip_ws();
      bool negative = false;
      if (!at_end() && (peek() == '-' || peek() == '+')) {
        negative = peek() == '-';
        ++pos_;
      }
      const std::size_t exp_pos = pos_;
      auto ds = digits();
      if (ds.empty()) throw ParseError(exp_pos, "expected an integer exponent");
      mpz_class e{std::string(ds)};
      if (negative) e = -e;
      if (!e.fits_slong_p()) throw ParseError(exp_pos, "exponent overflow");
      exponent = e.get_si();
    }
    try {
      if (name == "e") return group_->power(group_->identity(), exponent);
      auto gen = group_->find_generator(name);
      if (!gen) throw ParseError(start, "unknown generator '" + name + "'");
      return group_->generator(*gen, exponent);
    } catch (const ParseError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ParseError(start, e.what());
    }
  }

  std::string_view text_;
  const GroupPtr& group_;
  std::size_t pos_ = 0;
};

}  // namespace

RingElement parse_ring_element(std::string_view text, const GroupPtr& group) {
  return Parser(text, group).parse();
}

}  // namespace l2approx
