#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grafcet/diagnostic.hpp"

namespace grafcet::detail {

enum class TokenKind { word, string, punct, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // unescaped contents for strings
  SourceSpan span;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::punct, t); }
  bool is_word(std::string_view t) const { return is(TokenKind::word, t); }
};

/// Shared tokenizer for .gft and .gsc sources. `#` starts a line comment;
/// LF and CRLF line endings are accepted.
std::vector<Token> tokenize(std::string_view source, const std::string& file,
                            std::vector<Diagnostic>& diagnostics);

/// Cursor over a token vector with a sticky end token.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::end; }
  bool accept_punct(std::string_view text);
  bool accept_word(std::string_view text);

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_all_digits(std::string_view text);
std::optional<long long> parse_integer(std::string_view digits, bool negative);

}  // namespace grafcet::detail
