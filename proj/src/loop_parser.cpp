#include <charconv>

#include "omp2gap/frontend.hpp"

namespace omp2gap {

namespace {

std::string span_text(std::string_view line, const std::vector<Token>& toks, std::size_t first,
                      std::size_t last) {
    if (first > last) return {};
    auto b = static_cast<std::size_t>(toks[first].col);
    auto e = static_cast<std::size_t>(toks[last].end_col);
    return std::string(trim(line.substr(b, e - b)));
}

std::optional<long long> integer_literal(std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::optional<LoopHeader> parse_canonical_loop(std::string_view code_line, std::size_t line_index,
                                               Diagnostics& diags) {
    const int line = static_cast<int>(line_index) + 1;
    auto fail = [&](const std::string& why) -> std::optional<LoopHeader> {
        diags.error(line, "non-canonical loop: " + why);
        return std::nullopt;
    };

    code_line = line_body(code_line);
    auto toks = lex_text(code_line, static_cast<int>(line_index));
    if (toks.size() < 2 || !toks[0].is("for") || !toks[1].is("(")) {
        return fail("expected 'for (' at the start of the structured block");
    }
    auto close = matching_close(toks, 1);
    if (!close) return fail("loop header must be complete on one line");

    std::vector<std::size_t> semis;
    for (std::size_t i = 2; i < *close; ++i) {
        if (toks[i].is("(") || toks[i].is("[")) {
            auto c = matching_close(toks, i);
            if (!c) return fail("unbalanced brackets in loop header");
            i = *c;
            continue;
        }
        if (toks[i].is(";")) semis.push_back(i);
    }
    if (semis.size() != 2) return fail("loop header needs exactly init; condition; increment");

    LoopHeader h;
    h.header_line = line_index;
    h.for_col = toks[0].col;
    h.header_end_col = toks[*close].end_col;

    // init: [type] var = expr
    std::size_t init_b = 2, init_e = semis[0];
    std::size_t eq = init_b;
    while (eq < init_e && !toks[eq].is("=")) ++eq;
    if (eq == init_e || eq == init_b) return fail("init must have the form 'var = expr'");
    if (!toks[eq - 1].is_ident() || is_c_keyword(toks[eq - 1].text)) {
        return fail("init must assign a single loop variable");
    }
    for (std::size_t i = eq + 1; i < init_e; ++i) {
        if (toks[i].is("(") || toks[i].is("[")) {
            i = *matching_close(toks, i);
            continue;
        }
        if (toks[i].is(",")) return fail("comma in loop init");
    }
    if (eq + 1 >= init_e) return fail("init has no lower bound");
    h.var = toks[eq - 1].text;
    if (eq - 1 > init_b) {
        for (std::size_t i = init_b; i + 1 < eq; ++i) {
            if (!(toks[i].is_ident() || toks[i].is("*"))) return fail("init must have the form 'var = expr'");
        }
        h.inline_type = span_text(code_line, toks, init_b, eq - 2);
    }
    h.lower_bound = span_text(code_line, toks, eq + 1, init_e - 1);

    // condition: var < expr | var <= expr
    std::size_t cond_b = semis[0] + 1, cond_e = semis[1];
    if (cond_e - cond_b < 3) return fail("condition must have the form 'var < expr' or 'var <= expr'");
    if (!toks[cond_b].is(h.var)) return fail("condition must test the loop variable '" + h.var + "'");
    const Token& cmp = toks[cond_b + 1];
    if (cmp.is("<")) {
        h.comparison = Comparison::kLess;
    } else if (cmp.is("<=")) {
        h.comparison = Comparison::kLessEqual;
    } else if (cmp.is(">") || cmp.is(">=")) {
        return fail("only increasing loops are supported (condition uses '" + cmp.text + "')");
    } else {
        return fail("condition must use '<' or '<='");
    }
    h.upper_bound = span_text(code_line, toks, cond_b + 2, cond_e - 1);

    // increment: var++ | ++var | var += step | var = var + step
    std::size_t inc_b = semis[1] + 1, inc_e = *close;
    std::size_t inc_n = inc_e - inc_b;
    auto is_var = [&](std::size_t i) { return i < inc_e && toks[i].is(h.var); };
    if (inc_n == 2 && ((is_var(inc_b) && toks[inc_b + 1].is("++")) || (toks[inc_b].is("++") && is_var(inc_b + 1)))) {
        h.step = "1";
    } else if (inc_n == 2 && ((is_var(inc_b) && toks[inc_b + 1].is("--")) ||
                              (toks[inc_b].is("--") && is_var(inc_b + 1)))) {
        return fail("only increasing loops are supported (increment uses '--')");
    } else if (inc_n >= 3 && is_var(inc_b) && toks[inc_b + 1].is("+=")) {
        h.step = span_text(code_line, toks, inc_b + 2, inc_e - 1);
    } else if (inc_n >= 5 && is_var(inc_b) && toks[inc_b + 1].is("=") && is_var(inc_b + 2) &&
               toks[inc_b + 3].is("+")) {
        h.step = span_text(code_line, toks, inc_b + 4, inc_e - 1);
    } else if (inc_n >= 3 && is_var(inc_b) && toks[inc_b + 1].is("-=")) {
        return fail("only increasing loops are supported (increment uses '-=')");
    } else {
        return fail("increment must be 'var++', '++var' or 'var += step'");
    }
    if (auto lit = integer_literal(h.step); lit && *lit <= 0) {
        return fail("step must be positive, got " + h.step);
    }
    return h;
}

}  // namespace omp2gap
