#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omp2gap/diagnostic.hpp"
#include "omp2gap/frontend.hpp"

namespace omp2gap {

// GAP8 cluster width: the fork width ceiling and the default team size.
inline constexpr int kClusterCores = 8;

// Prefix of every identifier the translator generates; input may not use it.
inline constexpr std::string_view kReservedPrefix = "__omp_";

struct TypedVar {
    std::string name;
    CType type;

    bool operator==(const TypedVar&) const = default;
};

struct ReductionVar {
    ReductionOp op;
    std::string name;
    CType type;

    bool operator==(const ReductionVar&) const = default;
};

struct VarPlan {
    std::vector<TypedVar> shared;
    std::vector<TypedVar> privates;
    std::vector<ReductionVar> reductions;

    bool operator==(const VarPlan&) const = default;
};

// A `for`, `critical` or `single` nested in a parallel region.
struct InnerDirective {
    PragmaDirective directive;
    StructuredBlock block;
    std::optional<LoopHeader> loop;       // `for` only
    std::vector<ReductionVar> reductions;  // combined right after the loop
    int depth = 0;                         // brace depth relative to the region body

    bool operator==(const InnerDirective&) const = default;
};

struct RegionPlan {
    int index = 0;
    DirectiveKind kind = DirectiveKind::kParallel;
    int fork_width = kClusterCores;
    std::string worker_name;
    std::string master_name;
    std::string record_name;
    std::string function_name;  // enclosing function of the pragma site
    PragmaDirective directive;
    VarPlan vars;  // shared also lists variables reduced by inner `for` directives
    std::optional<LoopHeader> loop;
    StructuredBlock block;
    std::vector<InnerDirective> inner_directives;

    bool operator==(const RegionPlan&) const = default;
};

struct PlanOptions {
    std::optional<long long> default_cores;  // fork width when num_threads is absent
    bool serial_fallback = false;
};

struct PlanResult {
    std::vector<RegionPlan> plans;
    std::vector<std::size_t> elided_pragmas;  // pragma first lines dropped under serial fallback
    int team_size = 0;                        // widest fork over all plans, 0 without plans
};

int clamp_fork_width(std::optional<long long> requested, int line, Diagnostics& diags);

// Trip count of `for (v = lb; v cmp ub; v += step)` with step > 0.
long long iteration_count(Comparison cmp, long long lb, long long ub, long long step);
// Same, reading the comparison and a literal step from the header.
long long iteration_count(const LoopHeader& loop, long long lb, long long ub);

// Half-open iteration range of one core under the block-static schedule.
struct IterationRange {
    long long begin = 0;
    long long end = 0;

    long long size() const { return end - begin; }
    bool operator==(const IterationRange&) const = default;
};

IterationRange static_partition(long long n, int width, int core);

VarPlan classify_variables(const ClauseSet& clauses, const StructuredBlock& region,
                           const TranslationUnit& unit, std::string_view function,
                           const std::optional<LoopHeader>& loop, int line, Diagnostics& diags);

PlanResult plan_regions(const TranslationUnit& unit, Diagnostics& diags,
                        const PlanOptions& options = {});

}  // namespace omp2gap
