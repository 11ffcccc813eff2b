#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace omp2gap {

// Splits text into lines that keep their terminators, so joining them
// reproduces the input exactly.
std::vector<std::string> split_lines(std::string_view text);

// Line content without its trailing "\n" or "\r\n".
std::string_view line_body(std::string_view line);

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);
bool is_ident_start(char c);
bool is_ident_char(char c);
bool is_identifier(std::string_view s);

// Code-only view of a file. Each shadow line has the same length as the
// original body; comments and the contents of string/char literals are
// replaced by spaces (the quote characters stay), and preprocessor lines
// (with their continuations) are blanked entirely.
struct SourceShadow {
    std::vector<std::string> code;
    std::vector<bool> directive;
};

SourceShadow make_shadow(const std::vector<std::string>& lines);

enum class TokenKind { kIdentifier, kNumber, kString, kChar, kPunct };

struct Token {
    TokenKind kind;
    std::string text;  // literal placeholders carry only their quote characters
    int line;          // 0-based
    int col;           // 0-based
    int end_col;       // one past the last column

    bool is(std::string_view s) const { return kind != TokenKind::kString && text == s; }
    bool is_ident() const { return kind == TokenKind::kIdentifier; }
};

// Lexes shadow lines [first, last] inclusive.
std::vector<Token> lex_shadow(const SourceShadow& shadow, std::size_t first, std::size_t last);
std::vector<Token> lex_text(std::string_view code_line, int line_no = 0);

// Index of the last token of the C statement starting at `begin`, treating
// compound statements, if/else, loops, switch and do/while as single
// statements. nullopt when the tokens run out first.
std::optional<std::size_t> statement_end(const std::vector<Token>& toks, std::size_t begin);

// Index of the bracket that closes the opener at `open`, or nullopt.
std::optional<std::size_t> matching_close(const std::vector<Token>& toks, std::size_t open);

std::set<std::string> collect_identifiers(const SourceShadow& shadow);

bool is_c_keyword(std::string_view s);

}  // namespace omp2gap
