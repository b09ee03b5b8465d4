#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stf/model/ast.hpp"

namespace stf {

enum class TokenKind { Keyword, Identifier, Int, Float, String, Punct, End, Invalid };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string lexeme;  ///< raw source text
    std::string text;    ///< decoded content (string literal body, otherwise the lexeme)
    SourceSpan span;

    bool is(TokenKind k, std::string_view t) const { return kind == k && lexeme == t; }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
};

struct LexError {
    std::string message;
    SourceSpan span;
};

struct LexResult {
    std::vector<Token> tokens;  ///< always terminated by an End token
    std::vector<LexError> errors;
};

bool is_keyword(std::string_view word);

/// Splits `text` into tokens, skipping whitespace, `//` line and `/* */`
/// block comments. Invalid characters become Invalid tokens plus an error.
LexResult lex(std::string_view text, const std::string& file = {});

}  // namespace stf
