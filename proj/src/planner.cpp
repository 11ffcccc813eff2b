#include "omp2gap/planner.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace omp2gap {

int clamp_fork_width(std::optional<long long> requested, int line, Diagnostics& diags) {
    if (!requested) return kClusterCores;
    if (*requested <= 0) {
        diags.error(line, "num_threads must be positive, got " + std::to_string(*requested));
        return 1;
    }
    if (*requested > kClusterCores) {
        diags.warning(line, "num_threads(" + std::to_string(*requested) + ") exceeds the " +
                                std::to_string(kClusterCores) + "-core cluster; using " +
                                std::to_string(kClusterCores));
        return kClusterCores;
    }
    return static_cast<int>(*requested);
}

long long iteration_count(Comparison cmp, long long lb, long long ub, long long step) {
    long long span = ub - lb + (cmp == Comparison::kLessEqual ? 1 : 0);
    if (span <= 0 || step <= 0) return 0;
    return (span + step - 1) / step;
}

long long iteration_count(const LoopHeader& loop, long long lb, long long ub) {
    long long step = 0;
    auto [ptr, ec] = std::from_chars(loop.step.data(), loop.step.data() + loop.step.size(), step);
    if (ec != std::errc() || ptr != loop.step.data() + loop.step.size()) return 0;
    return iteration_count(loop.comparison, lb, ub, step);
}

IterationRange static_partition(long long n, int width, int core) {
    const long long q = n / width;
    const long long r = n % width;
    const long long begin = core * q + std::min<long long>(core, r);
    return {begin, begin + q + (core < r ? 1 : 0)};
}

namespace {

bool contains_name(const std::vector<TypedVar>& v, std::string_view name) {
    return std::any_of(v.begin(), v.end(), [&](const TypedVar& t) { return t.name == name; });
}

bool contains_name(const std::vector<ReductionVar>& v, std::string_view name) {
    return std::any_of(v.begin(), v.end(), [&](const ReductionVar& t) { return t.name == name; });
}

std::optional<CType> resolve(const TranslationUnit& unit, std::string_view function, const std::string& name,
                             int line, Diagnostics& diags) {
    auto t = unit.lookup(function, name);
    if (!t) diags.error(line, "cannot resolve type of '" + name + "'");
    return t;
}

bool reserved_field(const std::string& name, int line, Diagnostics& diags) {
    if (name == "fork_width") {
        diags.error(line, "'fork_width' collides with the generated record field of the same name");
        return true;
    }
    return false;
}

std::optional<LoopHeader> loop_of(const TranslationUnit& unit, const StructuredBlock& block,
                                  std::string_view directive, Diagnostics& diags) {
    if (block.form != BlockForm::kSingleStatement ||
        trim_left(unit.shadow.code[block.start_line]).substr(0, 3) != "for") {
        diags.error(static_cast<int>(block.start_line) + 1,
                    "non-canonical loop: '" + std::string(directive) + "' must be followed by a for loop");
        return std::nullopt;
    }
    return parse_canonical_loop(unit.shadow.code[block.start_line], block.start_line, diags);
}

// Locals of the enclosing function used in the region without a clause.
void check_uncaptured(const TranslationUnit& unit, const RegionPlan& plan, Diagnostics& diags) {
    std::set<std::string> covered;
    for (const auto& v : plan.vars.shared) covered.insert(v.name);
    for (const auto& v : plan.vars.privates) covered.insert(v.name);
    for (const auto& v : plan.vars.reductions) covered.insert(v.name);
    if (plan.loop) covered.insert(plan.loop->var);
    for (const auto& in : plan.inner_directives) {
        if (in.loop) covered.insert(in.loop->var);
    }
    std::set<std::string> reported;
    auto toks = lex_shadow(unit.shadow, plan.block.start_line, plan.block.end_line);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (!t.is_ident() || covered.count(t.text) || reported.count(t.text)) continue;
        if (i > 0 && (toks[i - 1].is(".") || toks[i - 1].is("->"))) continue;
        auto key = std::make_pair(plan.function_name, t.text);
        auto decl = unit.declaration_lines.find(key);
        if (decl == unit.declaration_lines.end()) continue;
        if (plan.block.contains(decl->second)) continue;
        reported.insert(t.text);
        diags.error(t.line + 1, "'" + t.text + "' is local to '" + plan.function_name +
                                    "' but is not listed in a shared, private or reduction clause");
    }
}

}  // namespace

VarPlan classify_variables(const ClauseSet& clauses, const StructuredBlock& region,
                           const TranslationUnit& unit, std::string_view function,
                           const std::optional<LoopHeader>& loop, int line, Diagnostics& diags) {
    (void)region;
    VarPlan vars;
    std::set<std::string> seen;
    auto claim = [&](const std::string& name) {
        if (!seen.insert(name).second) {
            diags.error(line, "'" + name + "' is listed in conflicting data-sharing clauses");
            return false;
        }
        return true;
    };

    for (const auto& name : clauses.shared_vars) {
        if (!claim(name) || reserved_field(name, line, diags)) continue;
        if (auto t = resolve(unit, function, name, line, diags)) vars.shared.push_back({name, *t});
    }
    for (const auto& name : clauses.private_vars) {
        if (!claim(name)) continue;
        if (auto t = resolve(unit, function, name, line, diags)) vars.privates.push_back({name, *t});
    }
    for (const auto& r : clauses.reductions) {
        if (!claim(r.var) || reserved_field(r.var, line, diags)) continue;
        auto t = resolve(unit, function, r.var, line, diags);
        if (!t) continue;
        if (t->is_array()) {
            diags.error(line, "reduction on array '" + r.var + "' is not supported");
            continue;
        }
        vars.reductions.push_back({r.op, r.var, *t});
    }

    if (loop) {
        const std::string& iv = loop->var;
        if (contains_name(vars.shared, iv) || contains_name(vars.reductions, iv)) {
            diags.error(line, "loop variable '" + iv + "' must be private");
        } else if (!contains_name(vars.privates, iv) && loop->inline_type.empty()) {
            if (auto t = resolve(unit, function, iv, line, diags)) vars.privates.push_back({iv, *t});
        }
    }
    return vars;
}

PlanResult plan_regions(const TranslationUnit& unit, Diagnostics& diags, const PlanOptions& options) {
    PlanResult result;
    result.elided_pragmas = unit.fallback_elided;

    if (!unit.lines.empty()) {
        std::set<std::string> reported;
        for (const auto& t : lex_shadow(unit.shadow, 0, unit.lines.size() - 1)) {
            if (t.is_ident() && t.text.rfind(kReservedPrefix, 0) == 0 && reported.insert(t.text).second) {
                diags.error(t.line + 1, "identifier '" + t.text + "' uses the reserved prefix '" +
                                            std::string(kReservedPrefix) + "'");
            }
        }
    }

    auto soften = [&](int line, const std::string& message) {
        if (options.serial_fallback) {
            diags.warning(line, message + "; block left sequential");
        } else {
            diags.error(line, message);
        }
    };

    for (const auto& located : unit.pragmas) {
        const PragmaDirective& d = located.directive;
        const StructuredBlock& block = located.block;
        const int line = static_cast<int>(d.line_index) + 1;

        RegionPlan* region = nullptr;
        for (auto& p : result.plans) {
            if (p.block.contains(d.line_index)) region = &p;
        }

        if (d.kind == DirectiveKind::kParallel || d.kind == DirectiveKind::kParallelFor) {
            if (region) {
                soften(line, "nested parallel regions are not supported");
                if (options.serial_fallback) result.elided_pragmas.push_back(d.line_index);
                continue;
            }
            const FunctionSpan* fn = unit.function_at(d.line_index);
            if (!fn) {
                diags.error(line, "parallel region outside any function body");
                continue;
            }
            RegionPlan plan;
            plan.index = static_cast<int>(result.plans.size());
            plan.kind = d.kind;
            plan.directive = d;
            plan.block = block;
            plan.function_name = fn->name;
            auto requested = d.clauses.num_threads ? d.clauses.num_threads : options.default_cores;
            plan.fork_width = clamp_fork_width(requested, line, diags);
            if (d.kind == DirectiveKind::kParallelFor) {
                Diagnostics loop_diags;
                plan.loop = loop_of(unit, block, "parallel for", loop_diags);
                if (!plan.loop) {
                    if (options.serial_fallback) {
                        for (const auto& item : loop_diags.items()) {
                            diags.warning(item.line, item.message + "; block left sequential");
                        }
                        result.elided_pragmas.push_back(d.line_index);
                    } else {
                        diags.append(loop_diags);
                    }
                    continue;
                }
            }
            plan.vars = classify_variables(d.clauses, block, unit, fn->name, plan.loop, line, diags);
            const std::string stem = "__omp_region" + std::to_string(plan.index);
            plan.worker_name = stem + "_worker";
            plan.master_name = stem + "_master";
            plan.record_name = stem + "_args";
            result.plans.push_back(std::move(plan));
            continue;
        }

        if (!region) {
            soften(line, "orphaned directive '" + std::string(directive_name(d.kind)) +
                             "' outside any parallel region");
            if (options.serial_fallback) result.elided_pragmas.push_back(d.line_index);
            continue;
        }
        if (region->kind == DirectiveKind::kParallelFor && d.kind != DirectiveKind::kCritical) {
            diags.error(line, "'" + std::string(directive_name(d.kind)) +
                                  "' cannot be nested inside 'parallel for'");
            continue;
        }
        bool bad_nesting = false;
        for (const auto& outer : region->inner_directives) {
            if (!outer.block.contains(d.line_index)) continue;
            if (d.kind != DirectiveKind::kCritical && outer.directive.kind != DirectiveKind::kCritical) {
                diags.error(line, "'" + std::string(directive_name(d.kind)) + "' cannot be nested inside '" +
                                      std::string(directive_name(outer.directive.kind)) + "'");
                bad_nesting = true;
            } else if (outer.directive.kind == DirectiveKind::kCritical) {
                diags.error(line, "'" + std::string(directive_name(d.kind)) +
                                      "' cannot be nested inside 'critical'");
                bad_nesting = true;
            }
        }
        if (bad_nesting) continue;

        InnerDirective inner;
        inner.directive = d;
        inner.block = block;
        const int body_depth = unit.line_depth[region->block.start_line] +
                               (region->block.form == BlockForm::kBraced ? 1 : 0);
        inner.depth = unit.line_depth[d.line_index] - body_depth;

        if (d.kind == DirectiveKind::kFor) {
            inner.loop = loop_of(unit, block, "for", diags);
            if (!inner.loop) continue;
            VarPlan& rv = region->vars;
            const auto& fn = region->function_name;
            for (const auto& name : d.clauses.private_vars) {
                if (contains_name(rv.shared, name) || contains_name(rv.reductions, name)) {
                    diags.error(line, "'" + name + "' is shared in the enclosing region and cannot be private here");
                } else if (!contains_name(rv.privates, name)) {
                    if (auto t = resolve(unit, fn, name, line, diags)) rv.privates.push_back({name, *t});
                }
            }
            for (const auto& r : d.clauses.reductions) {
                if (contains_name(rv.privates, r.var) || contains_name(rv.reductions, r.var)) {
                    diags.error(line, "'" + r.var + "' must be shared in the enclosing region to be reduced here");
                    continue;
                }
                if (reserved_field(r.var, line, diags)) continue;
                auto t = resolve(unit, fn, r.var, line, diags);
                if (!t) continue;
                if (t->is_array()) {
                    diags.error(line, "reduction on array '" + r.var + "' is not supported");
                    continue;
                }
                if (!contains_name(rv.shared, r.var)) rv.shared.push_back({r.var, *t});
                inner.reductions.push_back({r.op, r.var, *t});
            }
            const std::string& iv = inner.loop->var;
            if (contains_name(rv.shared, iv) || contains_name(rv.reductions, iv)) {
                diags.error(line, "loop variable '" + iv + "' must be private");
            } else if (!contains_name(rv.privates, iv) && inner.loop->inline_type.empty()) {
                if (auto t = resolve(unit, fn, iv, line, diags)) rv.privates.push_back({iv, *t});
            }
        }
        region->inner_directives.push_back(std::move(inner));
    }

    for (const auto& plan : result.plans) {
        check_uncaptured(unit, plan, diags);
        result.team_size = std::max(result.team_size, plan.fork_width);
    }
    std::sort(result.elided_pragmas.begin(), result.elided_pragmas.end());
    return result;
}

}  // namespace omp2gap
