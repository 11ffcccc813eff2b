#include "omp2gap/frontend.hpp"

#include <algorithm>
#include <array>

namespace omp2gap {

std::string_view directive_name(DirectiveKind k) {
    switch (k) {
        case DirectiveKind::kParallel: return "parallel";
        case DirectiveKind::kFor: return "for";
        case DirectiveKind::kParallelFor: return "parallel for";
        case DirectiveKind::kCritical: return "critical";
        case DirectiveKind::kSingle: return "single";
    }
    return "?";
}

std::string_view reduction_symbol(ReductionOp op) {
    switch (op) {
        case ReductionOp::kPlus: return "+";
        case ReductionOp::kTimes: return "*";
        case ReductionOp::kMinus: return "-";
    }
    return "?";
}

std::string CType::text() const { return base + array_suffix; }

std::string CType::declare(std::string_view name) const {
    std::string out = base;
    if (out.empty() || out.back() != '*') out += ' ';
    out += name;
    out += array_suffix;
    return out;
}

std::string TranslationUnit::text() const {
    std::string out;
    for (const auto& l : lines) out += l;
    return out;
}

const FunctionSpan* TranslationUnit::function_at(std::size_t line) const {
    for (const auto& f : functions) {
        if (line >= f.open_line && line <= f.close_line) return &f;
    }
    return nullptr;
}

const FunctionSpan* TranslationUnit::find_function(std::string_view name) const {
    for (const auto& f : functions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

std::optional<CType> TranslationUnit::lookup(std::string_view function, std::string_view ident) const {
    auto it = declarations.find({std::string(function), std::string(ident)});
    if (it != declarations.end()) return it->second;
    it = declarations.find({std::string(), std::string(ident)});
    if (it != declarations.end()) return it->second;
    return std::nullopt;
}

bool is_omp_pragma(std::string_view line) {
    std::string_view s = trim_left(line_body(line));
    if (s.empty() || s[0] != '#') return false;
    s = trim_left(s.substr(1));
    if (s.substr(0, 6) != "pragma") return false;
    s = s.substr(6);
    if (s.empty() || !(s[0] == ' ' || s[0] == '\t')) return false;
    s = trim_left(s);
    if (s.substr(0, 3) != "omp") return false;
    return s.size() == 3 || !is_ident_char(s[3]);
}

namespace {

bool is_storage_word(std::string_view s) {
    return s == "static" || s == "extern" || s == "register" || s == "inline" || s == "auto";
}

bool is_type_word(std::string_view s) {
    static constexpr std::array<std::string_view, 13> kWords = {
        "unsigned", "signed", "short", "long", "int", "char", "float",
        "double", "void", "_Bool", "_Complex", "const", "volatile"};
    return std::find(kWords.begin(), kWords.end(), s) != kWords.end() || is_storage_word(s);
}

bool is_base_type_word(std::string_view s) {
    return is_type_word(s) && s != "const" && s != "volatile" && !is_storage_word(s);
}

struct ParsedDecl {
    std::string name;
    CType type;
};

std::string join_tokens(const std::vector<Token>& toks, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i <= last; ++i) {
        if (!out.empty() && is_ident_char(out.back()) && !toks[i].text.empty() &&
            is_ident_char(toks[i].text[0])) {
            out += ' ';
        }
        out += toks[i].text;
    }
    return out;
}

// Reads the type-specifier prefix starting at `i`. Returns the index of the
// first declarator token, or nullopt when this is not a declaration.
std::optional<std::size_t> parse_specifiers(const std::vector<Token>& toks, std::size_t i,
                                            std::vector<std::string>& words, bool& is_const) {
    bool has_base = false;
    while (i < toks.size() && toks[i].is_ident()) {
        const std::string& w = toks[i].text;
        if (is_type_word(w)) {
            if (w == "const") is_const = true;
            if (is_base_type_word(w)) has_base = true;
            if (w != "const" && w != "volatile" && !is_storage_word(w)) words.push_back(w);
            ++i;
            continue;
        }
        if ((w == "struct" || w == "union" || w == "enum") && i + 1 < toks.size() &&
            toks[i + 1].is_ident()) {
            words.push_back(w + " " + toks[i + 1].text);
            has_base = true;
            i += 2;
            continue;
        }
        if (!has_base && !is_c_keyword(w)) {
            // Opaque typedef name: must be followed by a declarator.
            std::size_t j = i + 1;
            while (j < toks.size() && toks[j].is("*")) ++j;
            if (j + 1 < toks.size() && toks[j].is_ident() && !is_c_keyword(toks[j].text) &&
                (toks[j + 1].is("=") || toks[j + 1].is(";") || toks[j + 1].is(",") ||
                 toks[j + 1].is("[") || toks[j + 1].is(")"))) {
                words.push_back(w);
                has_base = true;
                ++i;
                continue;
            }
        }
        break;
    }
    if (!has_base) return std::nullopt;
    return i;
}

CType make_type(const std::vector<std::string>& words, int stars, std::string suffix, bool is_const) {
    CType t;
    for (const auto& w : words) {
        if (!t.base.empty()) t.base += ' ';
        t.base += w;
    }
    if (stars > 0) {
        t.base += ' ';
        t.base.append(static_cast<std::size_t>(stars), '*');
    }
    t.array_suffix = std::move(suffix);
    t.is_const = is_const && stars == 0;
    return t;
}

// Parses `specifiers declarator [= init] {, declarator [= init]} ;`.
std::vector<ParsedDecl> parse_declaration(const std::vector<Token>& toks, std::size_t i) {
    std::vector<std::string> words;
    bool is_const = false;
    auto decl_start = parse_specifiers(toks, i, words, is_const);
    if (!decl_start) return {};
    std::vector<ParsedDecl> out;
    i = *decl_start;
    while (i < toks.size()) {
        int stars = 0;
        while (i < toks.size() && (toks[i].is("*") || toks[i].is("const") || toks[i].is("restrict"))) {
            if (toks[i].is("*")) ++stars;
            ++i;
        }
        if (i >= toks.size() || !toks[i].is_ident() || is_c_keyword(toks[i].text)) return {};
        std::string name = toks[i].text;
        ++i;
        if (i < toks.size() && toks[i].is("(")) return {};  // function declarator
        std::string suffix;
        while (i < toks.size() && toks[i].is("[")) {
            auto close = matching_close(toks, i);
            if (!close) return {};
            suffix += "[" + (*close > i + 1 ? join_tokens(toks, i + 1, *close - 1) : std::string()) + "]";
            i = *close + 1;
        }
        out.push_back({name, make_type(words, stars, suffix, is_const)});
        if (i < toks.size() && toks[i].is("=")) {
            ++i;
            while (i < toks.size() && !toks[i].is(",") && !toks[i].is(";")) {
                if (toks[i].is("(") || toks[i].is("[") || toks[i].is("{")) {
                    auto close = matching_close(toks, i);
                    if (!close) return {};
                    i = *close + 1;
                    continue;
                }
                if (toks[i].is(")") || toks[i].is("}")) return {};
                ++i;
            }
        }
        if (i >= toks.size()) return {};
        if (toks[i].is(";")) return out;
        if (!toks[i].is(",")) return {};
        ++i;
    }
    return {};
}

std::vector<ParsedDecl> parse_parameters(const std::vector<Token>& toks, std::size_t open,
                                         std::size_t close) {
    std::vector<ParsedDecl> out;
    std::size_t begin = open + 1;
    int depth = 0;
    for (std::size_t i = open + 1; i <= close; ++i) {
        if (toks[i].is("(") || toks[i].is("[")) ++depth;
        if ((toks[i].is(")") || toks[i].is("]")) && i != close) --depth;
        if (i == close || (depth == 0 && toks[i].is(","))) {
            std::vector<std::string> words;
            bool is_const = false;
            auto d = parse_specifiers(toks, begin, words, is_const);
            if (d) {
                std::size_t j = *d;
                int stars = 0;
                while (j < i && (toks[j].is("*") || toks[j].is("const"))) {
                    if (toks[j].is("*")) ++stars;
                    ++j;
                }
                if (j < i && toks[j].is_ident()) {
                    std::string name = toks[j].text;
                    if (j + 1 < i && toks[j + 1].is("[")) ++stars;  // array parameter decays
                    out.push_back({name, make_type(words, stars, "", is_const)});
                }
            }
            begin = i + 1;
        }
    }
    return out;
}

std::size_t definition_start(const TranslationUnit& unit, std::size_t sig_line) {
    std::size_t l = sig_line;
    while (l > 0) {
        std::size_t prev = l - 1;
        if (unit.shadow.directive[prev]) break;
        if (!trim(unit.shadow.code[prev]).empty()) break;
        l = prev;
    }
    while (l < sig_line && trim(unit.body(l)).empty()) ++l;
    return l;
}

}  // namespace

std::vector<std::string> declared_names_at(const std::vector<Token>& toks, std::size_t at) {
    std::vector<std::string> names;
    for (auto& d : parse_declaration(toks, at)) names.push_back(std::move(d.name));
    return names;
}

TranslationUnit scan_source(std::string_view text, std::string path, Diagnostics& diags) {
    TranslationUnit unit;
    unit.source_path = std::move(path);
    unit.lines = split_lines(text);
    unit.shadow = make_shadow(unit.lines);
    const std::size_t n = unit.lines.size();

    for (std::size_t l = 0; l < n; ++l) {
        std::string_view b = trim_left(unit.body(l));
        if (b.substr(0, 8) == "#include") {
            unit.includes.emplace_back(unit.body(l));
            unit.include_lines.push_back(l);
        }
    }

    for (std::size_t l = 0; l < n; ++l) {
        bool starts_directive = unit.shadow.directive[l] && (l == 0 || !unit.shadow.directive[l - 1] ||
                                                             line_body(unit.lines[l - 1]).empty() ||
                                                             line_body(unit.lines[l - 1]).back() != '\\');
        if (!starts_directive || !is_omp_pragma(unit.lines[l])) continue;
        PragmaLocation loc{l, l, std::string(trim(unit.body(l)))};
        while (!loc.text.empty() && loc.text.back() == '\\' && loc.last_line + 1 < n) {
            loc.text.pop_back();
            ++loc.last_line;
            loc.text = std::string(trim(loc.text)) + " " + std::string(trim(unit.body(loc.last_line)));
        }
        unit.pragma_locations.push_back(std::move(loc));
        l = unit.pragma_locations.back().last_line;
    }

    auto toks = n ? lex_shadow(unit.shadow, 0, n - 1) : std::vector<Token>{};

    // Brace depth per line, function spans.
    unit.line_depth.assign(n, 0);
    std::vector<std::size_t> open_stack;  // token indices of unmatched `{`
    std::vector<std::size_t> fn_open;     // open token of each function, parallel to unit.functions
    std::size_t next_line = 0;
    for (std::size_t k = 0; k < toks.size(); ++k) {
        const Token& t = toks[k];
        while (next_line <= static_cast<std::size_t>(t.line)) {
            unit.line_depth[next_line++] = static_cast<int>(open_stack.size());
        }
        if (t.is("{")) {
            if (open_stack.empty() && k > 0 && toks[k - 1].is(")")) {
                int depth = 0;
                std::size_t j = k - 1;
                for (;; --j) {
                    if (toks[j].is(")")) ++depth;
                    if (toks[j].is("(") && --depth == 0) break;
                    if (j == 0) break;
                }
                if (depth == 0 && j > 0 && toks[j - 1].is_ident() && !is_c_keyword(toks[j - 1].text)) {
                    // Back up to the first token of the definition.
                    std::size_t s = j - 1;
                    while (s > 0 && !toks[s - 1].is(";") && !toks[s - 1].is("}")) --s;
                    FunctionSpan f;
                    f.name = toks[j - 1].text;
                    f.start_line = definition_start(unit, static_cast<std::size_t>(toks[s].line));
                    f.open_line = static_cast<std::size_t>(t.line);
                    unit.functions.push_back(f);
                    fn_open.push_back(k);
                    for (auto& p : parse_parameters(toks, j, k - 1)) {
                        auto key = std::make_pair(f.name, p.name);
                        if (unit.declarations.emplace(key, p.type).second) {
                            unit.declaration_lines.emplace(key, static_cast<std::size_t>(toks[j].line));
                        }
                    }
                }
            }
            open_stack.push_back(k);
        } else if (t.is("}")) {
            if (open_stack.empty()) {
                diags.error(t.line + 1, "unmatched '}'");
                continue;
            }
            std::size_t open = open_stack.back();
            open_stack.pop_back();
            if (!fn_open.empty() && fn_open.back() == open) {
                unit.functions.back().close_line = static_cast<std::size_t>(t.line);
            }
        }
    }
    while (next_line < n) unit.line_depth[next_line++] = static_cast<int>(open_stack.size());
    if (!open_stack.empty()) {
        diags.error(toks[open_stack.back()].line + 1, "unbalanced braces: '{' is never closed");
        if (!fn_open.empty() && unit.functions.back().close_line == 0) unit.functions.pop_back();
    }

    // Declaration index: try each statement start at file scope and inside functions.
    int depth = 0;
    const FunctionSpan* current = nullptr;
    std::size_t fn_idx = 0;
    for (std::size_t k = 0; k < toks.size(); ++k) {
        const Token& t = toks[k];
        bool at_start = k == 0 || toks[k - 1].is("{") || toks[k - 1].is("}") || toks[k - 1].is(";") ||
                        (k >= 2 && toks[k - 1].is("(") && toks[k - 2].is("for"));
        if (at_start && t.is_ident() && (depth == 0 || current)) {
            std::string scope = current ? current->name : std::string();
            for (auto& d : parse_declaration(toks, k)) {
                auto key = std::make_pair(scope, d.name);
                if (unit.declarations.emplace(key, d.type).second) {
                    unit.declaration_lines.emplace(key, static_cast<std::size_t>(t.line));
                }
            }
        }
        if (t.is("{")) {
            if (depth == 0 && fn_idx < fn_open.size() && fn_open[fn_idx] == k &&
                fn_idx < unit.functions.size()) {
                current = &unit.functions[fn_idx++];
            }
            ++depth;
        } else if (t.is("}") && depth > 0) {
            if (--depth == 0) current = nullptr;
        }
    }
    return unit;
}

std::optional<StructuredBlock> extract_structured_block(const TranslationUnit& unit,
                                                        std::size_t pragma_last_line,
                                                        Diagnostics& diags) {
    const int report_line = static_cast<int>(pragma_last_line) + 1;
    const std::size_t n = unit.lines.size();
    for (std::size_t l = pragma_last_line + 1; l < n; ++l) {
        if (unit.shadow.directive[l]) {
            if (is_omp_pragma(unit.lines[l])) {
                diags.error(static_cast<int>(l) + 1,
                            "pragma directly follows another pragma; stacked pragmas are not supported");
                return std::nullopt;
            }
            continue;
        }
        if (!trim(unit.shadow.code[l]).empty()) break;
    }
    if (pragma_last_line + 1 >= n) {
        diags.error(report_line, "pragma at end of file has no structured block");
        return std::nullopt;
    }
    auto toks = lex_shadow(unit.shadow, pragma_last_line + 1, n - 1);
    if (toks.empty()) {
        diags.error(report_line, "pragma at end of file has no structured block");
        return std::nullopt;
    }
    auto end = statement_end(toks, 0);
    if (!end) {
        diags.error(report_line, "structured block is not closed before end of file");
        return std::nullopt;
    }
    StructuredBlock b;
    b.start_line = static_cast<std::size_t>(toks[0].line);
    b.start_col = toks[0].col;
    b.end_line = static_cast<std::size_t>(toks[*end].line);
    b.end_col = toks[*end].end_col;
    b.form = toks[0].is("{") ? BlockForm::kBraced : BlockForm::kSingleStatement;
    return b;
}

void parse_pragmas(TranslationUnit& unit, Diagnostics& diags, bool serial_fallback) {
    unit.pragmas.clear();
    unit.fallback_elided.clear();
    for (const auto& loc : unit.pragma_locations) {
        Diagnostics local;
        auto d = parse_directive(loc.text, loc.first_line, local);
        if (!d && serial_fallback) {
            for (const auto& item : local.items()) {
                diags.warning(item.line, item.message + "; block left sequential");
            }
            unit.fallback_elided.push_back(loc.first_line);
            continue;
        }
        diags.append(local);
        if (!d) continue;
        d->last_line = loc.last_line;
        auto block = extract_structured_block(unit, loc.last_line, diags);
        if (!block) continue;
        unit.pragmas.push_back({std::move(*d), *block});
    }
}

TranslationUnit load_translation_unit(std::string_view text, std::string path, Diagnostics& diags,
                                      bool serial_fallback) {
    auto unit = scan_source(text, std::move(path), diags);
    parse_pragmas(unit, diags, serial_fallback);
    return unit;
}

}  // namespace omp2gap
