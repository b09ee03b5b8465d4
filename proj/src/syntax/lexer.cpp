#include "stf/syntax/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace stf {

namespace {

constexpr std::array<std::string_view, 54> kKeywords = {
    "thing",      "fragment",  "includes",   "import",     "property",    "message",      "port",
    "receives",   "sends",     "data_analytics", "dataset", "features",   "labels",       "sequential",
    "window",     "horizon",   "scaling",    "missing",    "model",       "automl",       "metric",
    "folds",      "budget",    "pretrained", "statechart", "init",        "state",        "on_entry",
    "on_exit",    "transition", "event",     "guard",      "configuration", "instance",   "connector",
    "var",        "print",     "if",         "else",       "while",       "and",          "or",
    "not",        "true",      "false",      "da_save",    "da_preprocess", "da_train",   "da_predict",
    "none",       "minmax",    "zscore",     "drop",       "mean_impute",
};

// Longest first so "<->" wins over "<=" and "<".
constexpr std::array<std::string_view, 24> kPunct = {
    "<->", "->", "==", "!=", "<=", ">=", "{", "}", "(", ")", ",", ":",
    "=",   ".",  "@",  "!",  "+",  "-",  "*", "/", "%", "<", ">", ";",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file) : src_(text), file_(file) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_trivia(out);
            if (pos_ >= src_.size()) break;
            out.tokens.push_back(next(out));
        }
        Token end;
        end.kind = TokenKind::End;
        end.span = span_at(pos_, pos_, line_, col_);
        out.tokens.push_back(end);
        return out;
    }

private:
    SourceSpan span_at(std::size_t b, std::size_t e, std::uint32_t line, std::uint32_t col) const {
        return SourceSpan{file_, line, col, b, e};
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia(LexResult& out) {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (src_.substr(pos_, 2) == "/*") {
                const std::size_t b = pos_;
                const auto line = line_, col = col_;
                advance();
                advance();
                while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
                if (pos_ >= src_.size()) {
                    out.errors.push_back({"unterminated block comment", span_at(b, pos_, line, col)});
                } else {
                    advance();
                    advance();
                }
            } else {
                break;
            }
        }
    }

    Token next(LexResult& out) {
        Token tok;
        const std::size_t b = pos_;
        const auto line = line_, col = col_;
        const char c = src_[pos_];
        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
            tok.lexeme = std::string(src_.substr(b, pos_ - b));
            tok.kind = is_keyword(tok.lexeme) ? TokenKind::Keyword : TokenKind::Identifier;
        } else if (digit(c)) {
            bool is_float = false;
            while (pos_ < src_.size() && digit(src_[pos_])) advance();
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' && digit(src_[pos_ + 1])) {
                is_float = true;
                advance();
                while (pos_ < src_.size() && digit(src_[pos_])) advance();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t look = pos_ + 1;
                if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
                if (look < src_.size() && digit(src_[look])) {
                    is_float = true;
                    while (pos_ < look) advance();
                    while (pos_ < src_.size() && digit(src_[pos_])) advance();
                }
            }
            tok.lexeme = std::string(src_.substr(b, pos_ - b));
            tok.kind = is_float ? TokenKind::Float : TokenKind::Int;
        } else if (c == '"') {
            advance();
            std::string body;
            bool closed = false;
            while (pos_ < src_.size()) {
                const char d = src_[pos_];
                if (d == '"') {
                    advance();
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\' && pos_ + 1 < src_.size()) {
                    advance();
                    const char e = src_[pos_];
                    body += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    advance();
                    continue;
                }
                body += d;
                advance();
            }
            tok.lexeme = std::string(src_.substr(b, pos_ - b));
            tok.text = std::move(body);
            tok.kind = TokenKind::String;
            if (!closed) out.errors.push_back({"unterminated string literal", span_at(b, pos_, line, col)});
            tok.span = span_at(b, pos_, line, col);
            return tok;
        } else {
            const auto rest = src_.substr(pos_);
            auto it = std::find_if(kPunct.begin(), kPunct.end(), [&](std::string_view p) { return rest.starts_with(p); });
            if (it != kPunct.end()) {
                for (std::size_t i = 0; i < it->size(); ++i) advance();
                tok.kind = TokenKind::Punct;
            } else {
                advance();
                while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) advance();
                tok.kind = TokenKind::Invalid;
            }
            tok.lexeme = std::string(src_.substr(b, pos_ - b));
            if (tok.kind == TokenKind::Invalid) {
                out.errors.push_back({"unexpected character '" + tok.lexeme + "'", span_at(b, pos_, line, col)});
            }
        }
        tok.text = tok.lexeme;
        tok.span = span_at(b, pos_, line, col);
        return tok;
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

LexResult lex(std::string_view text, const std::string& file) { return Lexer(text, file).run(); }

}  // namespace stf
