#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace oracleforge::testlang::detail {

enum class TokenKind { Ident, Int, Long, Float, Double, Char, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string_view text;
    std::size_t offset = 0;

    bool is(std::string_view punct_or_word) const
    {
        return (kind == TokenKind::Punct || kind == TokenKind::Ident) && text == punct_or_word;
    }
};

// Comments and whitespace are skipped. Throws ParseError on unterminated
// literals or comments. The returned vector always ends with an End token.
std::vector<Token> lex(std::string_view source);

} // namespace oracleforge::testlang::detail
