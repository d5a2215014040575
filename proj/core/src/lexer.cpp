#include "lexer.hpp"

#include <cctype>
#include <limits>

namespace grafcet::detail {

namespace {

bool is_word_start(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_word_char(char c) { return is_word_start(c) || c == '.'; }

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file,
                            std::vector<Diagnostic>& diagnostics) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < source.size(); ++k, ++i) {
      if (source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  auto span_from = [&](int l, int c) { return SourceSpan{file, l, c, line, column}; };

  while (i < source.size()) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < source.size() && source[i] != '\n') advance(1);
      continue;
    }
    const int l = line;
    const int col = column;
    if (is_word_start(c)) {
      std::size_t j = i;
      while (j < source.size() && is_word_char(source[j])) ++j;
      std::string text(source.substr(i, j - i));
      advance(j - i);
      tokens.push_back({TokenKind::word, std::move(text), span_from(l, col)});
      continue;
    }
    if (c == '"') {
      std::string text;
      advance(1);
      bool closed = false;
      while (i < source.size()) {
        const char d = source[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < source.size()) {
          text += source[i + 1];
          advance(2);
          continue;
        }
        text += d;
        advance(1);
      }
      if (!closed) {
        diagnostics.push_back({Severity::error, "unterminated string literal", span_from(l, col)});
      }
      tokens.push_back({TokenKind::string, std::move(text), span_from(l, col)});
      continue;
    }
    static constexpr std::string_view two_char[] = {":=", "!=", "<=", ">="};
    bool matched = false;
    for (auto op : two_char) {
      if (source.substr(i, 2) == op) {
        advance(2);
        tokens.push_back({TokenKind::punct, std::string(op), span_from(l, col)});
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one_char = "{}();:,*=<>+-";
    if (one_char.find(c) != std::string_view::npos) {
      advance(1);
      tokens.push_back({TokenKind::punct, std::string(1, c), span_from(l, col)});
      continue;
    }
    advance(1);
    diagnostics.push_back(
        {Severity::error, std::string("unexpected character '") + c + "'", span_from(l, col)});
  }
  tokens.push_back({TokenKind::end, "", SourceSpan{file, line, column, line, column}});
  return tokens;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != TokenKind::end) tokens_.push_back(Token{});
}

const Token& TokenStream::peek(std::size_t ahead) const {
  const std::size_t index = pos_ + ahead;
  return index < tokens_.size() ? tokens_[index] : tokens_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::accept_punct(std::string_view text) {
  if (!peek().is_punct(text)) return false;
  next();
  return true;
}

bool TokenStream::accept_word(std::string_view text) {
  if (!peek().is_word(text)) return false;
  next();
  return true;
}

bool is_all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::optional<long long> parse_integer(std::string_view digits, bool negative) {
  if (!is_all_digits(digits)) return std::nullopt;
  unsigned long long value = 0;
  const unsigned long long limit =
      negative ? static_cast<unsigned long long>(std::numeric_limits<long long>::max()) + 1
               : static_cast<unsigned long long>(std::numeric_limits<long long>::max());
  for (char c : digits) {
    const unsigned digit = static_cast<unsigned>(c - '0');
    if (value > (limit - digit) / 10) return std::nullopt;
    value = value * 10 + digit;
  }
  if (negative) {
    return value == limit ? std::numeric_limits<long long>::min()
                          : -static_cast<long long>(value);
  }
  return static_cast<long long>(value);
}

}  // namespace grafcet::detail
