#include <algorithm>
#include <array>
#include <charconv>

#include "omp2gap/frontend.hpp"

namespace omp2gap {

namespace {

class PragmaCursor {
public:
    explicit PragmaCursor(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool done() {
        skip_space();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    std::string_view word() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    // Content between a `(` at the cursor and its matching `)`.
    std::optional<std::string_view> parenthesized() {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '(') return std::nullopt;
        int depth = 0;
        std::size_t open = pos_;
        for (; pos_ < text_.size(); ++pos_) {
            if (text_[pos_] == '(') ++depth;
            if (text_[pos_] == ')' && --depth == 0) {
                ++pos_;
                return text_.substr(open + 1, pos_ - open - 2);
            }
        }
        pos_ = open;
        return std::nullopt;
    }
    void advance() { ++pos_; }
    int column() const { return static_cast<int>(pos_) + 1; }
    void seek(std::size_t p) { pos_ = p; }
    std::size_t pos() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

bool is_unsupported_clause(std::string_view s) {
    static constexpr std::array<std::string_view, 13> kKnown = {
        "nowait",   "schedule", "firstprivate", "lastprivate", "default", "collapse", "ordered",
        "copyin",   "if",       "proc_bind",    "copyprivate", "linear",  "allocate"};
    return std::find(kKnown.begin(), kKnown.end(), s) != kKnown.end();
}

bool is_unsupported_directive(std::string_view s) {
    static constexpr std::array<std::string_view, 15> kKnown = {
        "task",   "taskwait", "taskloop", "barrier", "atomic",  "master",  "sections",
        "section", "flush",   "ordered",  "simd",    "target",  "teams",   "threadprivate",
        "masked"};
    return std::find(kKnown.begin(), kKnown.end(), s) != kKnown.end();
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool clause_allowed(DirectiveKind kind, std::string_view clause) {
    switch (kind) {
        case DirectiveKind::kParallel:
        case DirectiveKind::kParallelFor: return true;
        case DirectiveKind::kFor: return clause == "private" || clause == "reduction";
        case DirectiveKind::kCritical:
        case DirectiveKind::kSingle: return false;
    }
    return false;
}

}  // namespace

std::optional<PragmaDirective> parse_directive(std::string_view pragma_text, std::size_t line_index,
                                               Diagnostics& diags) {
    const int line = static_cast<int>(line_index) + 1;
    auto fail = [&](int col, const std::string& msg) -> std::optional<PragmaDirective> {
        diags.error(line, "column " + std::to_string(col) + ": " + msg);
        return std::nullopt;
    };

    std::string joined(pragma_text);
    for (std::size_t p = joined.find("\\\n"); p != std::string::npos; p = joined.find("\\\n", p)) {
        joined.replace(p, 2, " ");
    }
    for (char& c : joined) {
        if (c == '\n' || c == '\r') c = ' ';
    }

    PragmaCursor cur(joined);
    if (cur.peek() != '#') return fail(cur.column(), "expected '#pragma omp'");
    cur.advance();
    if (cur.word() != "pragma") return fail(cur.column(), "expected '#pragma omp'");
    if (cur.word() != "omp") return fail(cur.column(), "expected '#pragma omp'");

    int name_col = (cur.skip_space(), cur.column());
    std::string_view name = cur.word();
    if (name.empty()) return fail(name_col, "missing directive name after '#pragma omp'");

    PragmaDirective d;
    d.line_index = line_index;
    d.last_line = line_index;
    if (name == "parallel") {
        std::size_t save = cur.pos();
        if (cur.word() == "for") {
            d.kind = DirectiveKind::kParallelFor;
        } else {
            cur.seek(save);
            d.kind = DirectiveKind::kParallel;
        }
    } else if (name == "for") {
        d.kind = DirectiveKind::kFor;
    } else if (name == "critical") {
        d.kind = DirectiveKind::kCritical;
        if (cur.peek() == '(') return fail(cur.column(), "named critical sections are not supported");
    } else if (name == "single") {
        d.kind = DirectiveKind::kSingle;
    } else if (is_unsupported_directive(name)) {
        return fail(name_col, "unsupported directive '" + std::string(name) + "'");
    } else {
        return fail(name_col, "unknown directive '" + std::string(name) + "'");
    }

    ClauseSet& cs = d.clauses;
    std::vector<std::string> seen;  // every identifier named in a data-sharing clause
    auto add_ident = [&](std::string_view id, int col, std::vector<std::string>& into) -> bool {
        if (!is_identifier(id) || is_c_keyword(id)) {
            fail(col, "expected an identifier, got '" + std::string(id) + "'");
            return false;
        }
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
            fail(col, "'" + std::string(id) + "' appears in more than one data-sharing clause");
            return false;
        }
        seen.emplace_back(id);
        into.emplace_back(id);
        return true;
    };

    while (!cur.done()) {
        if (cur.peek() == ',') {
            cur.advance();
            continue;
        }
        int col = cur.column();
        std::string_view clause = cur.word();
        if (clause.empty()) {
            return fail(col, std::string("unexpected character '") + cur.peek() + "'");
        }
        if (is_unsupported_clause(clause)) {
            return fail(col, "unsupported clause '" + std::string(clause) + "'");
        }
        if (clause != "num_threads" && clause != "private" && clause != "shared" && clause != "reduction") {
            return fail(col, "unknown clause '" + std::string(clause) + "'");
        }
        if (!clause_allowed(d.kind, clause)) {
            return fail(col, "clause '" + std::string(clause) + "' is not allowed on '" +
                                 std::string(directive_name(d.kind)) + "'");
        }
        int arg_col = cur.column();
        auto arg = cur.parenthesized();
        if (!arg) return fail(arg_col, "expected '(...)' after '" + std::string(clause) + "'");

        if (clause == "num_threads") {
            if (cs.num_threads) return fail(col, "duplicate num_threads clause");
            std::string_view v = trim(*arg);
            long long value = 0;
            std::string_view digits = v;
            bool negative = false;
            if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
                negative = digits[0] == '-';
                digits = trim_left(digits.substr(1));
            }
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
            if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
                return fail(arg_col + 1, "num_threads expects an integer literal, got '" + std::string(v) + "'");
            }
            cs.num_threads = negative ? -value : value;
        } else if (clause == "private" || clause == "shared") {
            auto& into = clause == "private" ? cs.private_vars : cs.shared_vars;
            for (auto id : split_list(*arg)) {
                if (!add_ident(id, arg_col + 1, into)) return std::nullopt;
            }
        } else {
            std::size_t colon = arg->find(':');
            if (colon == std::string_view::npos) {
                return fail(arg_col + 1, "reduction clause needs 'operator: list'");
            }
            std::string_view op = trim(arg->substr(0, colon));
            ReductionOp rop;
            if (op == "+") {
                rop = ReductionOp::kPlus;
            } else if (op == "*") {
                rop = ReductionOp::kTimes;
            } else if (op == "-") {
                rop = ReductionOp::kMinus;
            } else {
                return fail(arg_col + 1, "unsupported reduction operator '" + std::string(op) + "'");
            }
            std::vector<std::string> names;
            for (auto id : split_list(arg->substr(colon + 1))) {
                if (!add_ident(id, arg_col + 1 + static_cast<int>(colon) + 1, names)) return std::nullopt;
            }
            for (auto& n : names) cs.reductions.push_back({rop, std::move(n)});
        }
    }
    return d;
}

std::string render_clauses(const ClauseSet& cs) {
    std::string out;
    auto sep = [&] {
        if (!out.empty()) out += ' ';
    };
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& id : v) {
            if (!s.empty()) s += ", ";
            s += id;
        }
        return s;
    };
    if (cs.num_threads) {
        sep();
        out += "num_threads(" + std::to_string(*cs.num_threads) + ")";
    }
    if (!cs.shared_vars.empty()) {
        sep();
        out += "shared(" + list(cs.shared_vars) + ")";
    }
    if (!cs.private_vars.empty()) {
        sep();
        out += "private(" + list(cs.private_vars) + ")";
    }
    for (const auto& r : cs.reductions) {
        sep();
        out += "reduction(" + std::string(reduction_symbol(r.op)) + ": " + r.var + ")";
    }
    return out;
}

std::string render_directive(const PragmaDirective& d) {
    std::string out = "#pragma omp ";
    out += directive_name(d.kind);
    std::string clauses = render_clauses(d.clauses);
    if (!clauses.empty()) out += " " + clauses;
    return out;
}

}  // namespace omp2gap
