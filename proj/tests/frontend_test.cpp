#include <doctest.h>

#include "omp2gap/frontend.hpp"

using namespace omp2gap;

namespace {

PragmaDirective parse_ok(std::string_view text) {
    Diagnostics diags;
    auto d = parse_directive(text, 0, diags);
    REQUIRE_MESSAGE(d.has_value(), text);
    CHECK(diags.empty());
    return *d;
}

Diagnostics parse_fail(std::string_view text) {
    Diagnostics diags;
    CHECK_FALSE(parse_directive(text, 0, diags).has_value());
    CHECK(diags.has_errors());
    return diags;
}

TranslationUnit load(std::string_view text, Diagnostics& diags) { return load_translation_unit(text, "t.c", diags); }

}  // namespace

TEST_CASE("shadow blanks comments, literals and preprocessor lines but keeps lengths") {
    std::vector<std::string> lines{"int a = 1; /* { */ char *s = \"{\";\n", "#define X {\n", "// }\n",
                                   "x = '}'; y = 2;\n"};
    auto sh = make_shadow(lines);
    REQUIRE(sh.code.size() == 4);
    for (std::size_t i = 0; i < lines.size(); ++i) CHECK(sh.code[i].size() == line_body(lines[i]).size());
    CHECK(sh.code[0].find('{') == std::string::npos);
    CHECK(sh.code[0].find("int a = 1;") == 0);
    CHECK(sh.directive[1]);
    CHECK(trim(sh.code[1]).empty());
    CHECK(trim(sh.code[2]).empty());
    CHECK(sh.code[3].find('}') == std::string::npos);
    CHECK(sh.code[3].find("y = 2;") != std::string::npos);
}

TEST_CASE("multi-line comments and continued directives") {
    std::vector<std::string> lines{"a = 1; /* start\n", " { still comment }\n", "end */ b = 2;\n",
                                   "#define Y \\\n", "  { }\n", "c = 3;\n"};
    auto sh = make_shadow(lines);
    CHECK(trim(sh.code[1]).empty());
    CHECK(trim(sh.code[2]) == "b = 2;");
    CHECK(trim(sh.code[4]).empty());
    CHECK(sh.directive[4]);
    CHECK(trim(sh.code[5]) == "c = 3;");
}

TEST_CASE("scan captures includes and lines") {
    Diagnostics diags;
    auto unit = load("#include <stdio.h>\nint x;\nint y;\n", diags);
    CHECK(diags.empty());
    CHECK(unit.lines.size() == 3);
    REQUIRE(unit.includes.size() == 1);
    CHECK(unit.includes[0] == "#include <stdio.h>");
    CHECK(unit.pragmas.empty());
    CHECK(unit.text() == "#include <stdio.h>\nint x;\nint y;\n");
}

TEST_CASE("file ending inside an open brace is a structural error at the last unmatched brace") {
    Diagnostics diags;
    load("int main(void) {\n  if (1) {\n    return 0;\n", diags);
    REQUIRE(diags.has_errors());
    CHECK(diags.mentions("never closed"));
    CHECK(diags.items()[0].line == 2);
}

TEST_CASE("parse_directive maps the grammar") {
    auto d = parse_ok("#pragma omp parallel for reduction(+: sum) num_threads(8)");
    CHECK(d.kind == DirectiveKind::kParallelFor);
    REQUIRE(d.clauses.reductions.size() == 1);
    CHECK(d.clauses.reductions[0] == Reduction{ReductionOp::kPlus, "sum"});
    CHECK(d.clauses.num_threads == 8);

    auto c = parse_ok("#pragma omp critical");
    CHECK(c.kind == DirectiveKind::kCritical);
    CHECK(c.clauses.empty());

    auto p = parse_ok("#  pragma   omp parallel shared(a,b) private( t )");
    CHECK(p.kind == DirectiveKind::kParallel);
    CHECK(p.clauses.shared_vars == std::vector<std::string>{"a", "b"});
    CHECK(p.clauses.private_vars == std::vector<std::string>{"t"});

    auto r = parse_ok("#pragma omp parallel reduction(*: p) reduction(-: q, r)");
    REQUIRE(r.clauses.reductions.size() == 3);
    CHECK(r.clauses.reductions[0].op == ReductionOp::kTimes);
    CHECK(r.clauses.reductions[2] == Reduction{ReductionOp::kMinus, "r"});

    CHECK(parse_ok("#pragma omp single").kind == DirectiveKind::kSingle);
    CHECK(parse_ok("#pragma omp for private(j)").kind == DirectiveKind::kFor);
}

TEST_CASE("parse_directive rejects what is outside the subset") {
    CHECK(parse_fail("#pragma omp task").mentions("unsupported directive 'task'"));
    CHECK(parse_fail("#pragma omp barrier").mentions("unsupported directive 'barrier'"));
    CHECK(parse_fail("#pragma omp bogus").mentions("unknown directive"));
    CHECK(parse_fail("#pragma omp parallel num_threads(2) num_threads(4)").mentions("duplicate num_threads"));
    CHECK(parse_fail("#pragma omp parallel for schedule(static)").mentions("unsupported clause 'schedule'"));
    CHECK(parse_fail("#pragma omp parallel reduction(max: m)").mentions("unsupported reduction operator"));
    CHECK(parse_fail("#pragma omp critical(name)").mentions("named critical"));
    CHECK(parse_fail("#pragma omp single private(x)").mentions("not allowed on 'single'"));
    CHECK(parse_fail("#pragma omp for shared(x)").mentions("not allowed on 'for'"));
    CHECK(parse_fail("#pragma omp parallel shared(a").mentions("column"));
    CHECK(parse_fail("#pragma omp parallel shared(a) private(a)").mentions("more than one data-sharing clause"));
    CHECK(parse_fail("#pragma omp").mentions("missing directive name"));
}

TEST_CASE("num_threads keeps the raw value for the planner") {
    CHECK(parse_ok("#pragma omp parallel num_threads(12)").clauses.num_threads == 12);
    CHECK(parse_ok("#pragma omp parallel num_threads(-1)").clauses.num_threads == -1);
}

TEST_CASE("render and reparse reach a fixpoint") {
    auto d = parse_ok("#pragma omp parallel private(t) num_threads(4) reduction(+: s) shared(a, b)");
    std::string once = render_directive(d);
    CHECK(once == "#pragma omp parallel num_threads(4) shared(a, b) private(t) reduction(+: s)");
    auto again = parse_ok(once);
    CHECK(again.clauses == d.clauses);
    CHECK(render_directive(again) == once);
}

TEST_CASE("braced block extents") {
    Diagnostics diags;
    // pragma on line 10, braces on 11 and 14 (1-based)
    std::string src =
        "int main(void) {\n"
        "int g1;\nint g2;\nint g3;\nint g4;\nint g5;\nint g6;\nint g7;\nint g8;\n"
        "#pragma omp parallel\n"
        "{\n"
        "  int x = 1;\n"
        "  x++;\n"
        "}\n"
        "return 0;\n}\n";
    auto unit = load(src, diags);
    CHECK_FALSE(diags.has_errors());
    REQUIRE(unit.pragmas.size() == 1);
    const auto& b = unit.pragmas[0].block;
    CHECK(unit.pragmas[0].directive.line_index == 9);
    CHECK(b.start_line == 10);
    CHECK(b.end_line == 13);
    CHECK(b.form == BlockForm::kBraced);
}

TEST_CASE("single statement blocks") {
    Diagnostics diags;
    auto unit = load("int main(void) {\n  int count = 0;\n#pragma omp parallel shared(count)\n  count++;\n  return 0;\n}\n",
                     diags);
    REQUIRE(unit.pragmas.size() == 1);
    CHECK(unit.pragmas[0].block.start_line == 3);
    CHECK(unit.pragmas[0].block.end_line == 3);
    CHECK(unit.pragmas[0].block.form == BlockForm::kSingleStatement);

    Diagnostics d2;
    auto u2 = load("int main(void) {\n  int i, a[4];\n#pragma omp parallel for shared(a)\n  for (i = 0; i < 4; i++)\n"
                   "    if (i)\n      a[i] = 1;\n    else\n      a[i] = 2;\n  return 0;\n}\n",
                   d2);
    REQUIRE(u2.pragmas.size() == 1);
    CHECK(u2.pragmas[0].block.start_line == 3);
    CHECK(u2.pragmas[0].block.end_line == 7);
}

TEST_CASE("braces inside literals do not count") {
    Diagnostics diags;
    auto unit = load("int main(void) {\n  const char *s = \"{\";\n#pragma omp parallel shared(s)\n  {\n"
                     "    char c = '{'; /* { */\n    (void)c;\n  }\n  return 0;\n}\n",
                     diags);
    CHECK_FALSE(diags.has_errors());
    REQUIRE(unit.pragmas.size() == 1);
    CHECK(unit.pragmas[0].block.start_line == 3);
    CHECK(unit.pragmas[0].block.end_line == 6);
}

TEST_CASE("stacked pragmas and pragmas without a block") {
    Diagnostics diags;
    load("int main(void) {\n#pragma omp parallel\n#pragma omp critical\n  { }\n  return 0;\n}\n", diags);
    CHECK(diags.mentions("stacked pragmas"));

    Diagnostics d2;
    load("int main(void) {\n  return 0;\n}\n#pragma omp parallel\n", d2);
    CHECK(d2.mentions("no structured block"));
}

TEST_CASE("canonical loops") {
    Diagnostics diags;
    auto h = parse_canonical_loop("for (i = 0; i < n; i++)", 0, diags);
    REQUIRE(h);
    CHECK(h->var == "i");
    CHECK(h->lower_bound == "0");
    CHECK(h->upper_bound == "n");
    CHECK(h->comparison == Comparison::kLess);
    CHECK(h->step == "1");

    auto h2 = parse_canonical_loop("for (i = 2; i <= 10; i += 3)", 0, diags);
    REQUIRE(h2);
    CHECK(h2->lower_bound == "2");
    CHECK(h2->upper_bound == "10");
    CHECK(h2->comparison == Comparison::kLessEqual);
    CHECK(h2->step == "3");

    auto h3 = parse_canonical_loop("   for (int k = a[0]; k < f(x, y); k = k + 2) {", 0, diags);
    REQUIRE(h3);
    CHECK(h3->inline_type == "int");
    CHECK(h3->lower_bound == "a[0]");
    CHECK(h3->upper_bound == "f(x, y)");
    CHECK(h3->step == "2");
    CHECK(h3->for_col == 3);

    CHECK(parse_canonical_loop("for (++j; j < 3; j++)", 0, diags) == std::nullopt);
    CHECK(diags.empty() == false);
}

TEST_CASE("non-canonical loops are diagnosed with the reason") {
    auto reason = [](std::string_view line) {
        Diagnostics d;
        CHECK_FALSE(parse_canonical_loop(line, 0, d).has_value());
        REQUIRE(d.size() == 1);
        CHECK(d.items()[0].message.rfind("non-canonical loop: ", 0) == 0);
        return d.items()[0].message;
    };
    CHECK(reason("for (i = n; i > 0; i--)").find("'>'") != std::string::npos);
    CHECK(reason("for (i = 0; i < n; i--)").find("'--'") != std::string::npos);
    CHECK(reason("for (i = 0; i < n; i *= 2)").find("increment") != std::string::npos);
    CHECK(reason("for (i = 0, j = 0; i < n; i++)").find("comma") != std::string::npos);
    CHECK(reason("for (i = 0; i < n; i += -1)").find("positive") != std::string::npos);
    CHECK(reason("while (i < n)").find("for (") != std::string::npos);
    CHECK(reason("for (i = 0; i != n; i++)").find("'<'") != std::string::npos);
}

TEST_CASE("declarations are indexed by function") {
    Diagnostics diags;
    auto unit = load("double g[4][2];\nint f(int n, double *v, int w[]) {\n  const long k = 2, *p;\n  return 0;\n}\n"
                     "int main(void) {\n  unsigned int u; double a, t[3];\n  return 0;\n}\n",
                     diags);
    CHECK_FALSE(diags.has_errors());
    CHECK(unit.lookup("", "g")->base == "double");
    CHECK(unit.lookup("", "g")->array_suffix == "[4][2]");
    CHECK(unit.lookup("f", "n")->base == "int");
    CHECK(unit.lookup("f", "v")->base == "double *");
    CHECK(unit.lookup("f", "w")->base == "int *");
    CHECK(unit.lookup("f", "k")->is_const);
    CHECK(unit.lookup("main", "u")->base == "unsigned int");
    CHECK(unit.lookup("main", "t")->array_suffix == "[3]");
    CHECK(unit.lookup("main", "g")->base == "double");  // file scope fallback
    CHECK_FALSE(unit.lookup("main", "n").has_value());
    REQUIRE(unit.find_function("main"));
    CHECK(unit.find_function("main")->open_line == 5);
}

TEST_CASE("serial fallback turns directive errors into warnings") {
    Diagnostics diags;
    auto unit = load_translation_unit("int main(void) {\n#pragma omp task\n  { }\n  return 0;\n}\n", "t.c", diags, true);
    CHECK_FALSE(diags.has_errors());
    CHECK(diags.mentions("block left sequential"));
    CHECK(unit.fallback_elided == std::vector<std::size_t>{1});
}

TEST_CASE("brace and call initializers do not hide later declarators") {
    Diagnostics diags;
    auto unit = load("struct pt { int x; };\nint g(int);\nint main(void) {\n"
                     "  struct pt q = {0}, r = { 1 }; int m[2] = {1, 2}, z = g(3);\n  return 0;\n}\n",
                     diags);
    CHECK_FALSE(diags.has_errors());
    CHECK(unit.lookup("main", "q")->base == "struct pt");
    CHECK(unit.lookup("main", "r")->base == "struct pt");
    CHECK(unit.lookup("main", "m")->array_suffix == "[2]");
    CHECK(unit.lookup("main", "z")->base == "int");
}
