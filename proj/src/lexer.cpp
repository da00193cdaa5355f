#include "lexer.hpp"

#include "oracleforge/testlang.hpp"

#include <array>
#include <cctype>

namespace oracleforge::testlang::detail {

namespace {

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool ident_char(char c)
{
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

constexpr std::array<std::string_view, 15> kMultiCharPunct = {
    "...", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "->", "::", "+=", "-=", "*=", "/=",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                out.push_back({TokenKind::End, src_.substr(src_.size()), src_.size()});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_trivia()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (c == '/' && peek(1) == '*') {
                auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) {
                    throw ParseError(pos_, "end of block comment");
                }
                pos_ = close + 2;
            } else {
                return;
            }
        }
    }

    char peek(std::size_t ahead) const
    {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    Token make(TokenKind kind, std::size_t start) const
    {
        return {kind, src_.substr(start, pos_ - start), start};
    }

    Token next()
    {
        std::size_t start = pos_;
        char c = src_[pos_];
        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_char(src_[pos_])) {
                ++pos_;
            }
            return make(TokenKind::Ident, start);
        }
        if (digit(c) || (c == '.' && digit(peek(1)))) {
            return number(start);
        }
        if (c == '"') {
            quoted('"');
            return make(TokenKind::String, start);
        }
        if (c == '\'') {
            quoted('\'');
            return make(TokenKind::Char, start);
        }
        for (auto p : kMultiCharPunct) {
            if (src_.substr(pos_, p.size()) == p) {
                pos_ += p.size();
                return make(TokenKind::Punct, start);
            }
        }
        ++pos_;
        return make(TokenKind::Punct, start);
    }

    void quoted(char quote)
    {
        std::size_t start = pos_;
        ++pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\\') {
                pos_ += 2;
                continue;
            }
            if (c == '\n') {
                break;
            }
            ++pos_;
            if (c == quote) {
                return;
            }
        }
        throw ParseError(start, quote == '"' ? "closing '\"'" : "closing '''");
    }

    Token number(std::size_t start)
    {
        bool is_float = false;
        if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            pos_ += 2;
            while (pos_ < src_.size() && (hex_digit(src_[pos_]) || src_[pos_] == '_')) {
                ++pos_;
            }
        } else if (src_[pos_] == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
            pos_ += 2;
            while (pos_ < src_.size() && (src_[pos_] == '0' || src_[pos_] == '1' || src_[pos_] == '_')) {
                ++pos_;
            }
        } else {
            while (pos_ < src_.size() && (digit(src_[pos_]) || src_[pos_] == '_')) {
                ++pos_;
            }
            if (pos_ < src_.size() && src_[pos_] == '.' && digit(peek(1))) {
                is_float = true;
                ++pos_;
                while (pos_ < src_.size() && (digit(src_[pos_]) || src_[pos_] == '_')) {
                    ++pos_;
                }
            } else if (pos_ < src_.size() && src_[pos_] == '.' && !ident_start(peek(1))) {
                // "1." is a double literal; "1.foo" is not something we lex
                is_float = true;
                ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t save = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                    ++pos_;
                }
                if (pos_ < src_.size() && digit(src_[pos_])) {
                    is_float = true;
                    while (pos_ < src_.size() && digit(src_[pos_])) {
                        ++pos_;
                    }
                } else {
                    pos_ = save;
                }
            }
        }
        TokenKind kind = is_float ? TokenKind::Double : TokenKind::Int;
        if (pos_ < src_.size()) {
            char suffix = src_[pos_];
            if (suffix == 'L' || suffix == 'l') {
                ++pos_;
                kind = TokenKind::Long;
            } else if (suffix == 'f' || suffix == 'F') {
                ++pos_;
                kind = TokenKind::Float;
            } else if (suffix == 'd' || suffix == 'D') {
                ++pos_;
                kind = TokenKind::Double;
            }
        }
        return make(kind, start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<Token> lex(std::string_view source)
{
    return Lexer(source).run();
}

} // namespace oracleforge::testlang::detail
