#include <doctest.h>

#include "omp2gap/planner.hpp"

using namespace omp2gap;

namespace {

// Counts iterations by running the loop.
long long run_loop(Comparison cmp, long long lb, long long ub, long long step) {
    long long n = 0;
    for (long long v = lb; cmp == Comparison::kLess ? v < ub : v <= ub; v += step) ++n;
    return n;
}

PlanResult plan(std::string_view src, Diagnostics& diags, PlanOptions options = {}) {
    auto unit = load_translation_unit(src, "t.c", diags, options.serial_fallback);
    return plan_regions(unit, diags, options);
}

const TypedVar* find(const std::vector<TypedVar>& vs, std::string_view name) {
    for (const auto& v : vs) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("clamp_fork_width") {
    Diagnostics d;
    CHECK(clamp_fork_width(std::nullopt, 1, d) == 8);
    CHECK(clamp_fork_width(4, 1, d) == 4);
    CHECK(clamp_fork_width(1, 1, d) == 1);
    CHECK(clamp_fork_width(8, 1, d) == 8);
    CHECK(d.empty());
    CHECK(clamp_fork_width(12, 3, d) == 8);
    CHECK(d.size() == 1);
    CHECK_FALSE(d.has_errors());
    CHECK(d.items()[0].line == 3);

    Diagnostics e;
    clamp_fork_width(0, 1, e);
    clamp_fork_width(-2, 1, e);
    CHECK(e.size() == 2);
    CHECK(e.has_errors());
}

TEST_CASE("iteration_count examples") {
    CHECK(iteration_count(Comparison::kLess, 0, 100, 1) == 100);
    CHECK(iteration_count(Comparison::kLessEqual, 2, 10, 3) == 3);  // 2, 5, 8
    CHECK(iteration_count(Comparison::kLess, 5, 5, 1) == 0);
    CHECK(iteration_count(Comparison::kLessEqual, 5, 5, 1) == 1);
    CHECK(iteration_count(Comparison::kLess, 7, 3, 2) == 0);
}

TEST_CASE("iteration_count matches running the loop") {
    for (long long lb = -20; lb <= 20; ++lb) {
        for (long long ub = -20; ub <= 20; ++ub) {
            for (long long s = 1; s <= 4; ++s) {
                for (auto cmp : {Comparison::kLess, Comparison::kLessEqual}) {
                    REQUIRE(iteration_count(cmp, lb, ub, s) == run_loop(cmp, lb, ub, s));
                }
            }
        }
    }
}

TEST_CASE("static_partition examples") {
    CHECK(static_partition(16, 8, 3) == IterationRange{6, 8});
    CHECK(static_partition(10, 8, 1) == IterationRange{2, 4});
    CHECK(static_partition(10, 8, 0) == IterationRange{0, 2});
    CHECK(static_partition(10, 8, 2) == IterationRange{4, 5});
    CHECK(static_partition(10, 8, 7) == IterationRange{9, 10});
    CHECK(static_partition(5, 8, 6).size() == 0);
    CHECK(static_partition(5, 8, 6).begin == 5);
    CHECK(static_partition(0, 3, 2).size() == 0);
}

TEST_CASE("static_partition covers [0, n) exactly once") {
    for (long long n = 0; n <= 64; ++n) {
        for (int p = 1; p <= 8; ++p) {
            std::vector<int> hits(static_cast<std::size_t>(n), 0);
            for (int c = 0; c < p; ++c) {
                auto r = static_partition(n, p, c);
                for (long long i = r.begin; i < r.end; ++i) hits[static_cast<std::size_t>(i)]++;
            }
            for (int h : hits) REQUIRE(h == 1);
        }
    }
}

TEST_CASE("classify_variables groups and types") {
    Diagnostics d;
    auto r = plan("int main(void) {\n  double a, t, s;\n#pragma omp parallel shared(a) private(t) reduction(+:s)\n"
                  "  { t = a; s += t; }\n  return 0;\n}\n",
                  d);
    CHECK_FALSE(d.has_errors());
    REQUIRE(r.plans.size() == 1);
    const auto& v = r.plans[0].vars;
    REQUIRE(v.shared.size() == 1);
    CHECK(v.shared[0] == TypedVar{"a", CType{"double", "", false}});
    REQUIRE(v.privates.size() == 1);
    CHECK(v.privates[0].name == "t");
    REQUIRE(v.reductions.size() == 1);
    CHECK(v.reductions[0].op == ReductionOp::kPlus);
    CHECK(v.reductions[0].type.base == "double");
}

TEST_CASE("the induction variable is private once") {
    Diagnostics d;
    auto r = plan("int main(void) {\n  int i, a[4];\n#pragma omp parallel for shared(a) private(i)\n"
                  "  for (i = 0; i < 4; i++) a[i] = i;\n  return 0;\n}\n",
                  d);
    CHECK_FALSE(d.has_errors());
    REQUIRE(r.plans.size() == 1);
    CHECK(r.plans[0].vars.privates.size() == 1);
    CHECK(find(r.plans[0].vars.privates, "i"));

    Diagnostics d2;
    auto r2 = plan("int main(void) {\n  int i, a[4];\n#pragma omp parallel for shared(a)\n"
                   "  for (i = 0; i < 4; i++) a[i] = i;\n  return 0;\n}\n",
                   d2);
    REQUIRE(r2.plans.size() == 1);
    CHECK(r2.plans[0].vars.privates.size() == 1);

    Diagnostics d3;
    auto r3 = plan("int main(void) {\n  int a[4];\n#pragma omp parallel for shared(a)\n"
                   "  for (int i = 0; i < 4; i++) a[i] = i;\n  return 0;\n}\n",
                   d3);
    CHECK_FALSE(d3.has_errors());
    REQUIRE(r3.plans.size() == 1);
    CHECK(r3.plans[0].vars.privates.empty());
}

TEST_CASE("clause errors") {
    Diagnostics d;
    plan("int main(void) {\n  double s;\n#pragma omp parallel reduction(+:s) private(s)\n  { s = 1; }\n  return 0;\n}\n",
         d);
    CHECK(d.has_errors());

    Diagnostics d2;
    plan("int main(void) {\n#pragma omp parallel shared(nowhere)\n  { }\n  return 0;\n}\n", d2);
    CHECK(d2.mentions("cannot resolve type of 'nowhere'"));

    Diagnostics d3;
    plan("int main(void) {\n  int v[3];\n#pragma omp parallel reduction(+:v)\n  { }\n  return 0;\n}\n", d3);
    CHECK(d3.mentions("reduction on array"));
}

TEST_CASE("two regions give two plans with distinct names") {
    Diagnostics d;
    auto r = plan("int main(void) {\n#pragma omp parallel\n  { }\n#pragma omp parallel num_threads(2)\n  { }\n"
                  "  return 0;\n}\n",
                  d);
    CHECK_FALSE(d.has_errors());
    REQUIRE(r.plans.size() == 2);
    CHECK(r.plans[0].index == 0);
    CHECK(r.plans[1].index == 1);
    CHECK(r.plans[0].master_name != r.plans[1].master_name);
    CHECK(r.plans[0].worker_name == "__omp_region0_worker");
    CHECK(r.plans[1].record_name == "__omp_region1_args");
    CHECK(r.plans[1].fork_width == 2);
    CHECK(r.team_size == 8);
}

TEST_CASE("inner directives attach to their region") {
    Diagnostics d;
    auto r = plan("int main(void) {\n  int x = 0, i, a[8];\n#pragma omp parallel shared(x, a) private(i)\n  {\n"
                  "#pragma omp critical\n    x++;\n#pragma omp single\n    x += 2;\n#pragma omp for\n"
                  "    for (i = 0; i < 8; i++) a[i] = i;\n  }\n  return 0;\n}\n",
                  d);
    CHECK_FALSE(d.has_errors());
    REQUIRE(r.plans.size() == 1);
    const auto& inner = r.plans[0].inner_directives;
    REQUIRE(inner.size() == 3);
    CHECK(inner[0].directive.kind == DirectiveKind::kCritical);
    CHECK(inner[1].directive.kind == DirectiveKind::kSingle);
    CHECK(inner[2].directive.kind == DirectiveKind::kFor);
    CHECK(inner[2].loop.has_value());
    CHECK(inner[2].depth == 0);
}

TEST_CASE("inner for reductions become shared in the region") {
    Diagnostics d;
    auto r = plan("int main(void) {\n  int i; double s = 0;\n#pragma omp parallel private(i)\n  {\n"
                  "#pragma omp for reduction(+: s)\n    for (i = 0; i < 8; i++) s += i;\n  }\n  return 0;\n}\n",
                  d);
    CHECK_FALSE(d.has_errors());
    REQUIRE(r.plans.size() == 1);
    CHECK(find(r.plans[0].vars.shared, "s"));
    REQUIRE(r.plans[0].inner_directives.size() == 1);
    CHECK(r.plans[0].inner_directives[0].reductions.size() == 1);
}

TEST_CASE("orphans, nesting and misplaced directives") {
    Diagnostics d;
    plan("int main(void) {\n#pragma omp single\n  { }\n  return 0;\n}\n", d);
    CHECK(d.mentions("orphaned directive 'single'"));

    Diagnostics d2;
    plan("int main(void) {\n#pragma omp parallel\n  {\n#pragma omp parallel\n    { }\n  }\n  return 0;\n}\n", d2);
    CHECK(d2.mentions("nested parallel"));

    Diagnostics d3;
    plan("int x;\n#pragma omp parallel\nint y;\n", d3);
    CHECK(d3.has_errors());

    Diagnostics d4;
    plan("int main(void) {\n  int i, a[4];\n#pragma omp parallel shared(a) private(i)\n  {\n#pragma omp single\n"
         "    {\n#pragma omp for\n      for (i = 0; i < 4; i++) a[i] = i;\n    }\n  }\n  return 0;\n}\n",
         d4);
    CHECK(d4.mentions("cannot be nested inside 'single'"));

    Diagnostics d5;
    plan("int main(void) {\n  int i, a[4];\n#pragma omp parallel for shared(a)\n  for (i = 0; i < 4; i++) {\n"
         "#pragma omp single\n    a[i] = i;\n  }\n  return 0;\n}\n",
         d5);
    CHECK(d5.mentions("inside 'parallel for'"));

    Diagnostics d6;
    plan("int main(void) {\n  int i, a[4];\n#pragma omp parallel shared(a) private(i)\n  {\n#pragma omp for\n"
         "    while (i < 4) i++;\n  }\n  return 0;\n}\n",
         d6);
    CHECK(d6.mentions("non-canonical loop"));
}

TEST_CASE("serial fallback elides instead of failing") {
    Diagnostics d;
    auto r = plan("int main(void) {\n#pragma omp parallel\n  {\n#pragma omp parallel\n    { }\n  }\n"
                  "#pragma omp single\n  { }\n  return 0;\n}\n",
                  d, PlanOptions{std::nullopt, true});
    CHECK_FALSE(d.has_errors());
    CHECK(r.plans.size() == 1);
    CHECK(r.elided_pragmas == std::vector<std::size_t>{3, 6});
}

TEST_CASE("locals used without a clause are rejected") {
    Diagnostics d;
    plan("int g;\nint main(void) {\n  int x = 0;\n#pragma omp parallel\n  {\n    int y = g;\n    x = y;\n  }\n"
         "  return 0;\n}\n",
         d);
    CHECK(d.size() == 1);
    CHECK(d.mentions("'x' is local to 'main'"));
}

TEST_CASE("reserved prefix") {
    Diagnostics d;
    plan("int __omp_x;\nint main(void) {\n  return __omp_x;\n}\n", d);
    CHECK(d.mentions("reserved prefix"));
}

TEST_CASE("--cores sets the default width") {
    Diagnostics d;
    auto r = plan("int main(void) {\n#pragma omp parallel\n  { }\n#pragma omp parallel num_threads(2)\n  { }\n"
                  "  return 0;\n}\n",
                  d, PlanOptions{4, false});
    REQUIRE(r.plans.size() == 2);
    CHECK(r.plans[0].fork_width == 4);
    CHECK(r.plans[1].fork_width == 2);
    CHECK(r.team_size == 4);
}

TEST_CASE("planning is deterministic") {
    const char* src = "int main(void) {\n  double s = 0; int i;\n#pragma omp parallel for reduction(+: s)\n"
                      "  for (i = 0; i < 9; i++) s += i;\n  return 0;\n}\n";
    Diagnostics d1, d2;
    auto a = plan(src, d1);
    auto b = plan(src, d2);
    CHECK(a.plans == b.plans);
}
