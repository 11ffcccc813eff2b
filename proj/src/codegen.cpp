#include "omp2gap/codegen.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

namespace omp2gap {

namespace {

constexpr std::string_view kCoreId = "__omp_core_id";
constexpr std::string_view kArgs = "__omp_args";
constexpr std::string_view kTeamWidth = "__omp_num_threads";

std::string indent(int level) { return std::string(static_cast<std::size_t>(4 * level), ' '); }

std::string accumulator_name(const std::string& var) { return "__omp_red_" + var; }
std::string partials_name(const std::string& var) { return "__omp_partials_" + var; }
std::string record_type(const RegionPlan& plan) { return plan.record_name + "_t"; }

std::string identity_of(ReductionOp op) { return op == ReductionOp::kTimes ? "1" : "0"; }

struct Replacement {
    int begin;
    int end;
    std::string text;
};

std::string apply_replacements(std::string_view line, std::vector<Replacement> reps) {
    std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    std::string out;
    int pos = 0;
    for (const auto& r : reps) {
        if (r.begin < pos) continue;
        out.append(line.substr(static_cast<std::size_t>(pos), static_cast<std::size_t>(r.begin - pos)));
        out += r.text;
        pos = r.end;
    }
    out.append(line.substr(static_cast<std::size_t>(pos)));
    return out;
}

// Shared record field for one variable; arrays are carried as a pointer to
// their first element.
std::string field_declaration(const TypedVar& v) {
    if (!v.type.is_array()) return CType{v.type.base, "", false}.declare(v.name);
    const std::string& suffix = v.type.array_suffix;
    std::size_t first_dim_end = suffix.find(']');
    std::string rest = suffix.substr(first_dim_end + 1);
    std::string base = v.type.base;
    if (rest.empty()) return CType{base + (base.back() == '*' ? "*" : " *"), "", false}.declare(v.name);
    return base + " (*" + v.name + ")" + rest;
}

// Replaces omp_get_thread_num() / omp_get_num_threads() calls on one range
// of tokens. Other omp_* calls are reported.
void rewrite_runtime_calls(const std::vector<Token>& toks, std::size_t i, std::string_view thread_num,
                           std::string_view num_threads, std::map<std::size_t, std::vector<Replacement>>& reps,
                           Diagnostics& diags) {
    const Token& t = toks[i];
    if (i + 1 >= toks.size() || !toks[i + 1].is("(")) return;
    if ((t.text == "omp_get_thread_num" || t.text == "omp_get_num_threads") && i + 2 < toks.size() &&
        toks[i + 2].is(")") && toks[i + 2].line == t.line) {
        reps[static_cast<std::size_t>(t.line)].push_back(
            {t.col, toks[i + 2].end_col,
             std::string(t.text == "omp_get_thread_num" ? thread_num : num_threads)});
        return;
    }
    diags.error(t.line + 1, "unsupported OpenMP runtime call '" + t.text + "'");
}

bool is_member_or_tag(const std::vector<Token>& toks, std::size_t i) {
    if (i == 0) return false;
    const Token& p = toks[i - 1];
    return p.is(".") || p.is("->") || p.is("struct") || p.is("union") || p.is("enum");
}

bool at_statement_start(const std::vector<Token>& toks, std::size_t i) {
    return i == 0 || toks[i - 1].is("{") || toks[i - 1].is("}") || toks[i - 1].is(";") ||
           (i >= 2 && toks[i - 1].is("(") && toks[i - 2].is("for"));
}

struct LoopEmission {
    const LoopHeader* header;  // as parsed from the original line
    std::string var_type;      // C type for casts, empty when unknown
    std::vector<ReductionVar> reductions;
    bool trailing_barrier;
};

class RegionEmitter {
public:
    RegionEmitter(const RegionPlan& plan, const TranslationUnit& unit, Diagnostics& diags)
        : plan_(plan), unit_(unit), diags_(diags) {
        std::string_view first = unit_.body(plan.block.start_line);
        base_indent_ = first.size() - trim_left(first).size();
    }

    std::vector<std::string> emit() {
        rewrite_tokens();
        std::vector<std::string> out;
        emit_range(plan_.block.start_line, plan_.block.end_line, 0, out);
        return out;
    }

private:
    const InnerDirective* inner_at(std::size_t line) const {
        for (const auto& in : plan_.inner_directives) {
            if (in.directive.line_index == line) return &in;
        }
        return nullptr;
    }

    std::string type_of_private(const std::string& name) const {
        for (const auto& v : plan_.vars.privates) {
            if (v.name == name && !v.type.is_array()) return v.type.base;
        }
        return {};
    }

    void rewrite_tokens() {
        std::set<std::string> shared;
        for (const auto& v : plan_.vars.shared) shared.insert(v.name);
        std::set<std::string> region_reduced;
        for (const auto& r : plan_.vars.reductions) region_reduced.insert(r.name);

        auto toks = lex_shadow(unit_.shadow, plan_.block.start_line, plan_.block.end_line);
        std::vector<std::pair<std::string, int>> suppressed;
        int depth = 0;
        const std::string fork_width = std::string(kArgs) + "->fork_width";
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.is("{")) {
                ++depth;
                continue;
            }
            if (t.is("}")) {
                --depth;
                while (!suppressed.empty() && suppressed.back().second > depth) suppressed.pop_back();
                continue;
            }
            if (!t.is_ident()) continue;
            if (at_statement_start(toks, i)) {
                for (const auto& name : declared_names_at(toks, i)) {
                    if (shared.count(name) || region_reduced.count(name)) {
                        diags_.warning(t.line + 1, "declaration of '" + name +
                                                       "' shadows a shared variable; it is not rewritten in this scope");
                        suppressed.emplace_back(name, depth);
                    }
                }
            }
            if (is_member_or_tag(toks, i)) continue;
            if (t.text.rfind("omp_", 0) == 0) {
                rewrite_runtime_calls(toks, i, "CLUSTER_CoreId()", fork_width, reps_, diags_);
                continue;
            }
            bool is_suppressed = std::any_of(suppressed.begin(), suppressed.end(),
                                             [&](const auto& s) { return s.first == t.text; });
            if (is_suppressed) continue;

            std::string replacement;
            if (region_reduced.count(t.text)) {
                replacement = accumulator_name(t.text);
            } else if (shared.count(t.text)) {
                replacement = std::string(kArgs) + "->" + t.text;
                for (const auto& in : plan_.inner_directives) {
                    bool reduced_here = std::any_of(in.reductions.begin(), in.reductions.end(),
                                                    [&](const ReductionVar& r) { return r.name == t.text; });
                    if (reduced_here && in.block.contains(static_cast<std::size_t>(t.line))) {
                        replacement = accumulator_name(t.text);
                    }
                }
            } else {
                continue;
            }
            reps_[static_cast<std::size_t>(t.line)].push_back({t.col, t.end_col, replacement});
        }
    }

    std::string rewritten(std::size_t line) const {
        auto it = reps_.find(line);
        std::string_view body = unit_.body(line);
        return it == reps_.end() ? std::string(body) : apply_replacements(body, it->second);
    }

    // Rewritten line with the region's base indentation swapped for the
    // worker's.
    std::string placed(const std::string& text, int extra) const {
        std::string_view rest = text;
        std::size_t lead = rest.size() - trim_left(rest).size();
        rest.remove_prefix(std::min(lead, base_indent_));
        if (trim(rest).empty()) return {};
        return indent(1 + extra) + std::string(rest);
    }

    std::string leading(const std::string& placed_line) const {
        return placed_line.substr(0, placed_line.size() - trim_left(placed_line).size());
    }

    void emit_range(std::size_t first, std::size_t last, int extra, std::vector<std::string>& out) {
        for (std::size_t l = first; l <= last; ++l) {
            if (is_omp_pragma(unit_.lines[l]) && unit_.shadow.directive[l]) {
                std::size_t pragma_end = l;
                while (pragma_end < last && !line_body(unit_.lines[pragma_end]).empty() &&
                       line_body(unit_.lines[pragma_end]).back() == '\\') {
                    ++pragma_end;
                }
                if (const InnerDirective* in = inner_at(l)) {
                    for (std::size_t k = pragma_end + 1; k < in->block.start_line; ++k) {
                        out.push_back(placed(rewritten(k), extra));
                    }
                    emit_inner(*in, extra, out);
                    l = in->block.end_line;
                } else {
                    l = pragma_end;  // elided under serial fallback
                }
                continue;
            }
            if (plan_.loop && l == plan_.block.start_line) {
                LoopEmission loop{&*plan_.loop, loop_type(*plan_.loop), {}, false};
                emit_loop(loop, plan_.block, extra, out);
                l = plan_.block.end_line;
                continue;
            }
            out.push_back(placed(rewritten(l), extra));
        }
    }

    std::string loop_type(const LoopHeader& h) const {
        return h.inline_type.empty() ? type_of_private(h.var) : h.inline_type;
    }

    void emit_inner(const InnerDirective& in, int extra, std::vector<std::string>& out) {
        const std::string ind = leading(placed(rewritten(in.block.start_line), extra));
        switch (in.directive.kind) {
            case DirectiveKind::kCritical:
                out.push_back(ind + "CRITICAL_ENTER();");
                emit_range(in.block.start_line, in.block.end_line, extra, out);
                out.push_back(ind + "CRITICAL_EXIT();");
                break;
            case DirectiveKind::kSingle:
                out.push_back(ind + "if (" + std::string(kCoreId) + " == 0) {");
                emit_range(in.block.start_line, in.block.end_line, extra + 1, out);
                out.push_back(ind + "}");
                out.push_back(ind + "CLUSTER_Barrier();");
                break;
            case DirectiveKind::kFor: {
                LoopEmission loop{&*in.loop, loop_type(*in.loop), in.reductions, true};
                emit_loop(loop, in.block, extra, out);
                break;
            }
            default:
                break;
        }
    }

    void emit_loop(const LoopEmission& loop, const StructuredBlock& block, int extra,
                   std::vector<std::string>& out) {
        const std::string header_text = rewritten(block.start_line);
        Diagnostics reparse;
        auto shadow = make_shadow({header_text});
        auto h = parse_canonical_loop(shadow.code[0], block.start_line, reparse);
        if (!h) {
            diags_.append(reparse);
            return;
        }
        const std::string placed_header = placed(header_text, extra);
        const std::string ind = leading(placed_header);
        const std::string in1 = ind + indent(1);
        const std::string ll = "long long";
        const std::string cast = loop.var_type.empty() ? "" : "(" + loop.var_type + ")";
        const std::string w = std::string(kArgs) + "->fork_width";
        const std::string id(kCoreId);

        out.push_back(ind + "{");
        out.push_back(in1 + ll + " __omp_lb = " + h->lower_bound + ";");
        out.push_back(in1 + ll + " __omp_ub = " + h->upper_bound + ";");
        out.push_back(in1 + ll + " __omp_step = " + h->step + ";");
        if (h->comparison == Comparison::kLess) {
            out.push_back(in1 + ll +
                          " __omp_count = __omp_ub > __omp_lb ? (__omp_ub - __omp_lb + __omp_step - 1) / __omp_step : 0;");
        } else {
            out.push_back(in1 + ll +
                          " __omp_count = __omp_ub >= __omp_lb ? (__omp_ub - __omp_lb + __omp_step) / __omp_step : 0;");
        }
        out.push_back(in1 + ll + " __omp_q = __omp_count / " + w + ";");
        out.push_back(in1 + ll + " __omp_r = __omp_count % " + w + ";");
        out.push_back(in1 + ll + " __omp_begin = " + id + " * __omp_q + (" + id + " < __omp_r ? " + id +
                      " : __omp_r);");
        out.push_back(in1 + ll + " __omp_end = __omp_begin + __omp_q + (" + id + " < __omp_r ? 1 : 0);");
        for (const auto& r : loop.reductions) {
            out.push_back(in1 + r.type.base + " " + accumulator_name(r.name) + " = " + identity_of(r.op) + ";");
        }

        std::string decl = h->inline_type.empty() ? "" : h->inline_type + " ";
        std::string new_header = "for (" + decl + h->var + " = " + cast + "(__omp_lb + __omp_begin * __omp_step); " +
                                 h->var + " < " + cast + "(__omp_lb + __omp_end * __omp_step); " + h->var +
                                 " += " + cast + "__omp_step)";
        std::string tail = header_text.substr(static_cast<std::size_t>(h->header_end_col));
        out.push_back(in1 + new_header + tail);
        if (block.end_line > block.start_line) {
            emit_range(block.start_line + 1, block.end_line, extra + 1, out);
        }
        for (const auto& r : loop.reductions) {
            out.push_back(in1 + std::string(kArgs) + "->" + partials_name(r.name) + "[" + id + "] = " +
                          accumulator_name(r.name) + ";");
        }
        out.push_back(ind + "}");
        if (!loop.trailing_barrier) return;
        out.push_back(ind + "CLUSTER_Barrier();");
        if (!loop.reductions.empty()) {
            emit_fold(loop.reductions, ind, out);
            out.push_back(ind + "CLUSTER_Barrier();");
        }
    }

public:
    static void emit_fold(const std::vector<ReductionVar>& reductions, const std::string& ind,
                          std::vector<std::string>& out) {
        const std::string in1 = ind + indent(1);
        const std::string in2 = ind + indent(2);
        out.push_back(ind + "if (" + std::string(kCoreId) + " == 0) {");
        out.push_back(in1 + "int __omp_k;");
        out.push_back(in1 + "for (__omp_k = 0; __omp_k < " + std::string(kArgs) + "->fork_width; __omp_k++) {");
        for (const auto& r : reductions) {
            std::string op = r.op == ReductionOp::kTimes ? " *= " : " += ";
            out.push_back(in2 + std::string(kArgs) + "->" + r.name + op + std::string(kArgs) + "->" +
                          partials_name(r.name) + "[__omp_k];");
        }
        out.push_back(in1 + "}");
        out.push_back(ind + "}");
    }

private:
    const RegionPlan& plan_;
    const TranslationUnit& unit_;
    Diagnostics& diags_;
    std::size_t base_indent_ = 0;
    std::map<std::size_t, std::vector<Replacement>> reps_;
};

int idle_barrier_count(const RegionPlan& plan) {
    int count = plan.vars.reductions.empty() ? 0 : 1;
    for (const auto& in : plan.inner_directives) {
        if (in.directive.kind == DirectiveKind::kSingle) count += 1;
        if (in.directive.kind == DirectiveKind::kFor) count += in.reductions.empty() ? 1 : 2;
    }
    return count;
}

bool uses_token(const std::string& text, std::string_view name) {
    for (std::size_t p = text.find(name); p != std::string::npos; p = text.find(name, p + 1)) {
        std::size_t after = p + name.size();
        bool left_ok = p == 0 || !is_ident_char(text[p - 1]);
        bool right_ok = after >= text.size() || !is_ident_char(text[after]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

std::string_view leading_space(std::string_view line) {
    return line.substr(0, line.size() - trim_left(line).size());
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

}  // namespace

std::string emit_shared_record(const RegionPlan& plan) {
    std::vector<std::string> out;
    out.push_back("typedef struct " + record_type(plan) + " {");
    std::set<std::string> fields;
    for (const auto& v : plan.vars.shared) {
        out.push_back(indent(1) + field_declaration(v) + ";");
        fields.insert(v.name);
    }
    std::vector<ReductionVar> reduced = plan.vars.reductions;
    for (const auto& in : plan.inner_directives) {
        for (const auto& r : in.reductions) {
            bool known = std::any_of(reduced.begin(), reduced.end(),
                                     [&](const ReductionVar& x) { return x.name == r.name; });
            if (!known) reduced.push_back(r);
        }
    }
    for (const auto& r : reduced) {
        if (!fields.count(r.name)) out.push_back(indent(1) + r.type.base + " " + r.name + ";");
        out.push_back(indent(1) + r.type.base + " " + partials_name(r.name) + "[" +
                      std::to_string(kClusterCores) + "];");
    }
    out.push_back(indent(1) + "int fork_width;");
    out.push_back("} " + record_type(plan) + ";");
    out.push_back("");
    out.push_back("static " + record_type(plan) + " " + plan.record_name + ";");
    return join_lines(out);
}

std::string rewrite_region_body(const RegionPlan& plan, const TranslationUnit& unit, int team_size,
                                Diagnostics& diags) {
    RegionEmitter emitter(plan, unit, diags);
    std::vector<std::string> body = emitter.emit();

    std::vector<std::string> tail;
    if (!plan.vars.reductions.empty()) {
        for (const auto& r : plan.vars.reductions) {
            tail.push_back(indent(1) + std::string(kArgs) + "->" + partials_name(r.name) + "[" +
                           std::string(kCoreId) + "] = " + accumulator_name(r.name) + ";");
        }
        tail.push_back(indent(1) + "CLUSTER_Barrier();");
        RegionEmitter::emit_fold(plan.vars.reductions, indent(1), tail);
    }

    std::vector<std::string> head;
    for (const auto& v : plan.vars.privates) head.push_back(indent(1) + v.type.declare(v.name) + ";");
    for (const auto& r : plan.vars.reductions) {
        head.push_back(indent(1) + r.type.base + " " + accumulator_name(r.name) + " = " + identity_of(r.op) + ";");
    }
    if (plan.fork_width < team_size) {
        for (const auto& in : plan.inner_directives) {
            bool barrier = in.directive.kind != DirectiveKind::kCritical;
            if (barrier && in.depth != 0) {
                diags.error(static_cast<int>(in.directive.line_index) + 1,
                            "'" + std::string(directive_name(in.directive.kind)) +
                                "' inside nested control flow needs a region as wide as the cluster (" +
                                std::to_string(team_size) + " cores)");
            }
        }
        head.push_back(indent(1) + "if (" + std::string(kCoreId) + " >= " + std::string(kArgs) + "->fork_width) {");
        for (int b = 0; b < idle_barrier_count(plan); ++b) head.push_back(indent(2) + "CLUSTER_Barrier();");
        head.push_back(indent(2) + "return;");
        head.push_back(indent(1) + "}");
    }

    std::string rest = join_lines(head) + join_lines(body) + join_lines(tail);
    std::vector<std::string> prologue;
    if (uses_token(rest, kArgs)) {
        prologue.push_back(indent(1) + record_type(plan) + " *" + std::string(kArgs) + " = (" + record_type(plan) +
                           " *)arg;");
    } else {
        prologue.push_back(indent(1) + "(void)arg;");
    }
    if (uses_token(rest, kCoreId)) {
        prologue.push_back(indent(1) + "int " + std::string(kCoreId) + " = CLUSTER_CoreId();");
    }
    return join_lines(prologue) + rest;
}

std::string emit_worker_and_master(const RegionPlan& plan, const TranslationUnit& unit, int team_size,
                                   Diagnostics& diags) {
    std::string out = "void " + plan.worker_name + "(void *arg)\n{\n";
    out += rewrite_region_body(plan, unit, team_size, diags);
    out += "}\n\n";
    out += "void " + plan.master_name + "(void *arg)\n{\n";
    out += indent(1) + "CLUSTER_CoresFork(" + plan.worker_name + ", arg);\n";
    out += "}\n";
    return out;
}

std::string rewrite_pragma_site(const RegionPlan& plan, const CodegenOptions& options, std::string_view lead,
                                bool track_team_width) {
    const std::string ind(lead);
    const std::string in1 = ind + indent(1);
    const std::string& rec = plan.record_name;
    std::vector<std::string> out;
    out.push_back(ind + "{");
    // privates now live in the worker; keep -Wunused quiet at the site
    for (const auto& v : plan.vars.privates) out.push_back(in1 + "(void)" + v.name + ";");
    for (const auto& v : plan.vars.shared) out.push_back(in1 + rec + "." + v.name + " = " + v.name + ";");
    for (const auto& r : plan.vars.reductions) out.push_back(in1 + rec + "." + r.name + " = " + r.name + ";");
    out.push_back(in1 + rec + ".fork_width = " + std::to_string(plan.fork_width) + ";");
    if (track_team_width) out.push_back(in1 + std::string(kTeamWidth) + " = " + std::to_string(plan.fork_width) + ";");

    std::string arg = "&" + rec;
    const std::string l1 = "__omp_l1_" + rec;
    if (options.emit_l1) {
        out.push_back(in1 + record_type(plan) + " *" + l1 + " = (" + record_type(plan) + " *)L1_Malloc(sizeof(" +
                      record_type(plan) + "));");
        out.push_back(in1 + "*" + l1 + " = " + rec + ";");
        arg = l1;
    }
    out.push_back(in1 + "CLUSTER_SendTask(0, " + plan.master_name + ", (void *)" + arg + ", 0);");
    out.push_back(in1 + "CLUSTER_Wait(0);");
    if (options.emit_l1) {
        out.push_back(in1 + rec + " = *" + l1 + ";");
        out.push_back(in1 + "L1_Free(" + l1 + ", sizeof(" + record_type(plan) + "));");
    }
    if (track_team_width) out.push_back(in1 + std::string(kTeamWidth) + " = 1;");
    for (const auto& v : plan.vars.shared) {
        if (!v.type.is_array() && !v.type.is_const) out.push_back(in1 + v.name + " = " + rec + "." + v.name + ";");
    }
    for (const auto& r : plan.vars.reductions) out.push_back(in1 + r.name + " = " + rec + "." + r.name + ";");
    out.push_back(ind + "}");
    return join_lines(out);
}

std::string output_path_for(std::string_view source_path, std::string_view outdir) {
    std::filesystem::path src{std::string(source_path)};
    std::string stem = src.extension() == ".c" ? src.stem().string() : src.filename().string();
    return (std::filesystem::path(std::string(outdir)) / (stem + "_gap.c")).string();
}

namespace {

struct Span {
    std::size_t first;
    std::size_t last;
    bool is_return;
};

// Top-level statements of a function body, by line.
std::vector<Span> statement_spans(const TranslationUnit& unit, const FunctionSpan& fn) {
    std::vector<Span> spans;
    auto toks = lex_shadow(unit.shadow, fn.open_line, fn.close_line);
    std::size_t open = 0;
    while (open < toks.size() && !toks[open].is("{")) ++open;
    auto close = matching_close(toks, open);
    if (!close) return spans;
    for (std::size_t i = open + 1; i < *close;) {
        auto end = statement_end(toks, i);
        if (!end || *end >= *close) break;
        spans.push_back({static_cast<std::size_t>(toks[i].line), static_cast<std::size_t>(toks[*end].line),
                         toks[i].is("return")});
        i = *end + 1;
    }
    return spans;
}

}  // namespace

std::optional<std::string> generate(const TranslationUnit& unit, const PlanResult& result,
                                    const CodegenOptions& options, Diagnostics& diags) {
    const std::size_t n = unit.lines.size();
    const auto& plans = result.plans;
    std::vector<bool> drop(n, false);
    std::vector<std::vector<std::string>> before(n + 1), after(n);

    for (const auto& plan : plans) {
        std::string_view trailing = std::string_view(unit.shadow.code[plan.block.end_line])
                                        .substr(static_cast<std::size_t>(plan.block.end_col));
        if (!trim(trailing).empty()) {
            diags.error(static_cast<int>(plan.block.end_line) + 1,
                        "code after the end of a parallel region on the same line is not supported");
        }
    }

    // Outside regions: runtime calls read the team width published by the sites.
    std::map<std::size_t, std::vector<Replacement>> outside;
    if (n > 0) {
        auto toks = lex_shadow(unit.shadow, 0, n - 1);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (!t.is_ident() || t.text.rfind("omp_", 0) != 0 || is_member_or_tag(toks, i)) continue;
            auto line = static_cast<std::size_t>(t.line);
            bool in_region = std::any_of(plans.begin(), plans.end(),
                                         [&](const RegionPlan& p) { return p.block.contains(line); });
            if (in_region) continue;
            rewrite_runtime_calls(toks, i, "(" + std::string(kTeamWidth) + " > 1 ? CLUSTER_CoreId() : 0)", kTeamWidth,
                                  outside, diags);
        }
    }
    const bool track_team_width = !outside.empty();

    // Headers.
    std::optional<std::size_t> last_include;
    for (std::size_t k = 0; k < unit.include_lines.size(); ++k) {
        std::size_t l = unit.include_lines[k];
        std::string_view inc = trim(unit.includes[k]);
        if (inc.find("<omp.h>") != std::string_view::npos || inc.find("\"omp.h\"") != std::string_view::npos) {
            drop[l] = true;
        }
        last_include = l;
    }
    std::vector<std::string> header{"#include \"" + std::string(kRuntimeHeader) + "\""};
    if (track_team_width) {
        header.push_back("");
        header.push_back("static int " + std::string(kTeamWidth) + " = 1;");
    }
    if (last_include) {
        auto& slot = after[*last_include];
        slot.insert(slot.end(), header.begin(), header.end());
    } else {
        header.push_back("");
        before[0].insert(before[0].end(), header.begin(), header.end());
    }

    // Pragmas dropped under serial fallback (including those inside regions,
    // which the worker emitter skips on its own).
    for (std::size_t first : result.elided_pragmas) {
        std::size_t l = first;
        drop[l] = true;
        while (l + 1 < n && !line_body(unit.lines[l]).empty() && line_body(unit.lines[l]).back() == '\\') {
            drop[++l] = true;
        }
    }

    if (!plans.empty()) {
        // Generated declarations go ahead of the first function with a region.
        const FunctionSpan* first_fn = unit.find_function(plans.front().function_name);
        std::size_t insert_at = first_fn ? first_fn->start_line : 0;
        std::vector<std::string> gen;
        for (const auto& plan : plans) {
            gen.push_back(emit_shared_record(plan));
        }
        for (const auto& plan : plans) {
            gen.push_back(emit_worker_and_master(plan, unit, result.team_size, diags));
        }
        auto& slot = before[insert_at];
        for (const auto& chunk : gen) {
            std::string text = chunk;
            if (!text.empty() && text.back() == '\n') text.pop_back();
            slot.push_back(text);
            slot.push_back("");
        }

        for (const auto& plan : plans) {
            for (std::size_t l = plan.directive.line_index; l <= plan.block.end_line; ++l) drop[l] = true;
            std::string site = rewrite_pragma_site(plan, options, leading_space(unit.body(plan.block.start_line)),
                                                   track_team_width);
            site.pop_back();
            before[plan.directive.line_index].push_back(site);
        }

        const FunctionSpan* main_fn = unit.find_function("main");
        if (!main_fn) {
            diags.error(static_cast<int>(plans.front().directive.line_index) + 1,
                        "parallel regions need a 'main' function to start and stop the cluster");
        } else {
            auto spans = statement_spans(unit, *main_fn);
            const std::string start = "CLUSTER_Start(0, " + std::to_string(result.team_size) + ");";
            const std::string stop = "CLUSTER_Stop(0);";
            bool all_in_main = std::all_of(plans.begin(), plans.end(),
                                           [](const RegionPlan& p) { return p.function_name == "main"; });
            auto span_of = [&](std::size_t line) -> std::optional<Span> {
                for (const auto& s : spans) {
                    if (line >= s.first && line <= s.last) return s;
                }
                return std::nullopt;
            };
            if (all_in_main) {
                const RegionPlan& first = plans.front();
                const RegionPlan& last = plans.back();
                std::size_t start_line = first.directive.line_index;
                if (auto s = span_of(first.block.start_line); s && s->first < start_line) start_line = s->first;
                std::size_t stop_line = last.block.end_line;
                if (auto s = span_of(last.block.end_line); s) stop_line = std::max(stop_line, s->last);
                std::size_t lead_line = is_omp_pragma(unit.lines[start_line]) ? first.block.start_line : start_line;
                const std::string lead(leading_space(unit.body(lead_line)));
                auto& b = before[start_line];
                b.insert(b.begin(), lead + start);
                after[stop_line].push_back(lead + stop);
            } else {
                std::size_t body_line = main_fn->open_line;
                if (spans.empty()) {
                    after[body_line].push_back(indent(1) + start);
                    before[main_fn->close_line].push_back(indent(1) + stop);
                } else {
                    const std::string lead(leading_space(unit.body(spans.front().first)));
                    auto& b = before[spans.front().first];
                    b.insert(b.begin(), lead + start);
                    if (spans.back().is_return) {
                        before[spans.back().first].push_back(lead + stop);
                    } else {
                        after[spans.back().last].push_back(lead + stop);
                    }
                }
            }
        }
    }

    if (diags.has_errors()) return std::nullopt;

    std::string out;
    for (std::size_t l = 0; l < n; ++l) {
        for (const auto& chunk : before[l]) {
            out += chunk;
            out += '\n';
        }
        if (!drop[l]) {
            std::string_view raw = unit.lines[l];
            std::string_view body = line_body(raw);
            std::string_view terminator = raw.substr(body.size());
            auto it = outside.find(l);
            out += it == outside.end() ? std::string(body) : apply_replacements(body, it->second);
            out += terminator;
        }
        for (const auto& chunk : after[l]) {
            out += chunk;
            out += '\n';
        }
    }
    for (const auto& chunk : before[n]) {
        out += chunk;
        out += '\n';
    }
    return out;
}

EmittedFile render_output(const TranslationUnit& unit, const PlanResult& plans, std::string_view outdir,
                          const CodegenOptions& options, Diagnostics& diags) {
    EmittedFile file;
    file.path = output_path_for(unit.source_path, outdir);
    if (auto text = generate(unit, plans, options, diags)) file.contents = std::move(*text);
    return file;
}

}  // namespace omp2gap
