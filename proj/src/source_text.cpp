#include "omp2gap/source_text.hpp"

#include <array>
#include <cctype>

namespace omp2gap {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start + 1));
        start = nl + 1;
    }
    return lines;
}

std::string_view line_body(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string_view trim_left(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::string_view trim(std::string_view s) {
    s = trim_left(s);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !is_ident_start(s[0])) return false;
    for (char c : s) {
        if (!is_ident_char(c)) return false;
    }
    return true;
}

SourceShadow make_shadow(const std::vector<std::string>& lines) {
    enum class State { kCode, kBlockComment };
    SourceShadow shadow;
    shadow.code.reserve(lines.size());
    shadow.directive.reserve(lines.size());

    State state = State::kCode;
    bool continues_directive = false;
    for (const auto& raw : lines) {
        std::string_view body = line_body(raw);
        std::string out(body.size(), ' ');
        std::size_t i = 0;
        while (i < body.size()) {
            char c = body[i];
            if (state == State::kBlockComment) {
                if (c == '*' && i + 1 < body.size() && body[i + 1] == '/') {
                    state = State::kCode;
                    i += 2;
                } else {
                    ++i;
                }
                continue;
            }
            if (c == '/' && i + 1 < body.size() && body[i + 1] == '/') break;
            if (c == '/' && i + 1 < body.size() && body[i + 1] == '*') {
                state = State::kBlockComment;
                i += 2;
                continue;
            }
            if (c == '"' || c == '\'') {
                out[i] = c;
                std::size_t j = i + 1;
                while (j < body.size() && body[j] != c) {
                    j += (body[j] == '\\') ? 2 : 1;
                }
                if (j < body.size()) out[j] = c;
                i = j + 1;
                continue;
            }
            out[i] = c;
            ++i;
        }

        bool directive = continues_directive;
        if (!directive) {
            std::string_view code = trim_left(out);
            directive = !code.empty() && code[0] == '#';
        }
        if (directive) out.assign(out.size(), ' ');
        continues_directive = directive && !body.empty() && body.back() == '\\';

        shadow.code.push_back(std::move(out));
        shadow.directive.push_back(directive);
    }
    return shadow;
}

namespace {

constexpr std::array<std::string_view, 22> kMultiPunct = {
    "...", "<<=", ">>=", "->", "++", "--", "+=", "-=", "*=", "/=", "%=",
    "&=",  "|=",  "^=",  "<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
};

void lex_line(std::string_view code, int line_no, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < code.size()) {
        char c = code[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_ident_start(c)) {
            while (i < code.size() && is_ident_char(code[i])) ++i;
            out.push_back({TokenKind::kIdentifier, std::string(code.substr(start, i - start)),
                           line_no, static_cast<int>(start), static_cast<int>(i)});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < code.size() && std::isdigit(static_cast<unsigned char>(code[i + 1])))) {
            while (i < code.size() &&
                   (is_ident_char(code[i]) || code[i] == '.' ||
                    ((code[i] == '+' || code[i] == '-') &&
                     (code[i - 1] == 'e' || code[i - 1] == 'E')))) {
                ++i;
            }
            out.push_back({TokenKind::kNumber, std::string(code.substr(start, i - start)), line_no,
                           static_cast<int>(start), static_cast<int>(i)});
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t close = code.find(c, i + 1);
            i = (close == std::string_view::npos) ? code.size() : close + 1;
            out.push_back({c == '"' ? TokenKind::kString : TokenKind::kChar,
                           std::string(1, c) + std::string(1, c), line_no, static_cast<int>(start),
                           static_cast<int>(i)});
            continue;
        }
        std::size_t len = 1;
        for (auto p : kMultiPunct) {
            if (code.substr(i, p.size()) == p) {
                len = p.size();
                break;
            }
        }
        i += len;
        out.push_back({TokenKind::kPunct, std::string(code.substr(start, len)), line_no,
                       static_cast<int>(start), static_cast<int>(i)});
    }
}

bool is_opener(const Token& t) { return t.is("(") || t.is("[") || t.is("{"); }
bool is_closer(const Token& t) { return t.is(")") || t.is("]") || t.is("}"); }

char closer_for(const std::string& open) {
    return open == "(" ? ')' : open == "[" ? ']' : '}';
}

}  // namespace

std::vector<Token> lex_shadow(const SourceShadow& shadow, std::size_t first, std::size_t last) {
    std::vector<Token> toks;
    for (std::size_t l = first; l <= last && l < shadow.code.size(); ++l) {
        lex_line(shadow.code[l], static_cast<int>(l), toks);
    }
    return toks;
}

std::vector<Token> lex_text(std::string_view code_line, int line_no) {
    std::vector<Token> toks;
    lex_line(code_line, line_no, toks);
    return toks;
}

std::optional<std::size_t> matching_close(const std::vector<Token>& toks, std::size_t open) {
    if (open >= toks.size() || !is_opener(toks[open])) return std::nullopt;
    std::vector<char> stack;
    for (std::size_t i = open; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (is_opener(t)) {
            stack.push_back(closer_for(t.text));
        } else if (is_closer(t)) {
            if (stack.empty() || stack.back() != t.text[0]) return std::nullopt;
            stack.pop_back();
            if (stack.empty()) return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> statement_end(const std::vector<Token>& toks, std::size_t begin) {
    if (begin >= toks.size()) return std::nullopt;
    const Token& t = toks[begin];
    if (t.is("{")) return matching_close(toks, begin);
    if (t.is(";")) return begin;
    if (t.is_ident()) {
        auto paren_then_body = [&](std::size_t paren) -> std::optional<std::size_t> {
            if (paren >= toks.size() || !toks[paren].is("(")) return std::nullopt;
            auto close = matching_close(toks, paren);
            if (!close) return std::nullopt;
            return statement_end(toks, *close + 1);
        };
        if (t.text == "if") {
            auto end = paren_then_body(begin + 1);
            if (end && *end + 1 < toks.size() && toks[*end + 1].is("else")) {
                return statement_end(toks, *end + 2);
            }
            return end;
        }
        if (t.text == "for" || t.text == "while" || t.text == "switch") {
            return paren_then_body(begin + 1);
        }
        if (t.text == "else") return statement_end(toks, begin + 1);
        if (t.text == "do") {
            auto body = statement_end(toks, begin + 1);
            if (!body || *body + 2 >= toks.size() || !toks[*body + 1].is("while")) return std::nullopt;
            auto close = matching_close(toks, *body + 2);
            if (!close || *close + 1 >= toks.size() || !toks[*close + 1].is(";")) return std::nullopt;
            return *close + 1;
        }
        if (t.text != "default" && !is_c_keyword(t.text) && begin + 1 < toks.size() &&
            toks[begin + 1].is(":")) {
            return statement_end(toks, begin + 2);
        }
    }
    for (std::size_t i = begin; i < toks.size(); ++i) {
        if (is_opener(toks[i])) {
            auto close = matching_close(toks, i);
            if (!close) return std::nullopt;
            i = *close;
            continue;
        }
        if (is_closer(toks[i])) return std::nullopt;
        if (toks[i].is(";")) return i;
    }
    return std::nullopt;
}

std::set<std::string> collect_identifiers(const SourceShadow& shadow) {
    std::set<std::string> ids;
    if (shadow.code.empty()) return ids;
    for (const auto& t : lex_shadow(shadow, 0, shadow.code.size() - 1)) {
        if (t.is_ident()) ids.insert(t.text);
    }
    return ids;
}

bool is_c_keyword(std::string_view s) {
    static constexpr std::array<std::string_view, 37> kKeywords = {
        "auto",     "break",    "case",     "char",   "const",    "continue", "default",
        "do",       "double",   "else",     "enum",   "extern",   "float",    "for",
        "goto",     "if",       "inline",   "int",    "long",     "register", "restrict",
        "return",   "short",    "signed",   "sizeof", "static",   "struct",   "switch",
        "typedef",  "union",    "unsigned", "void",   "volatile", "while",    "_Bool",
        "_Complex", "_Imaginary"};
    for (auto k : kKeywords) {
        if (k == s) return true;
    }
    return false;
}

}  // namespace omp2gap
