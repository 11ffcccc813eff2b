#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omp2gap/diagnostic.hpp"
#include "omp2gap/source_text.hpp"

namespace omp2gap {

enum class DirectiveKind { kParallel, kFor, kParallelFor, kCritical, kSingle };
enum class ReductionOp { kPlus, kTimes, kMinus };

std::string_view directive_name(DirectiveKind k);
std::string_view reduction_symbol(ReductionOp op);

struct Reduction {
    ReductionOp op;
    std::string var;

    bool operator==(const Reduction&) const = default;
};

struct ClauseSet {
    std::optional<long long> num_threads;  // raw value, clamped by the planner
    std::vector<std::string> private_vars;
    std::vector<std::string> shared_vars;
    std::vector<Reduction> reductions;

    bool empty() const {
        return !num_threads && private_vars.empty() && shared_vars.empty() && reductions.empty();
    }
    bool operator==(const ClauseSet&) const = default;
};

struct PragmaDirective {
    DirectiveKind kind;
    ClauseSet clauses;
    std::size_t line_index = 0;  // first physical line of the pragma
    std::size_t last_line = 0;   // differs from line_index for `\` continuations

    bool operator==(const PragmaDirective&) const = default;
};

enum class BlockForm { kBraced, kSingleStatement };

struct StructuredBlock {
    std::size_t start_line = 0;
    std::size_t end_line = 0;  // inclusive
    BlockForm form = BlockForm::kBraced;
    int start_col = 0;
    int end_col = 0;  // one past the closing token

    bool contains(std::size_t line) const { return line >= start_line && line <= end_line; }
    bool operator==(const StructuredBlock&) const = default;
};

enum class Comparison { kLess, kLessEqual };

struct LoopHeader {
    std::string var;
    std::string inline_type;  // "int" for `for (int i = ...`, empty otherwise
    std::string lower_bound;
    std::string upper_bound;
    Comparison comparison = Comparison::kLess;
    std::string step;
    std::size_t header_line = 0;
    int for_col = 0;        // column of the `for` keyword
    int header_end_col = 0;  // one past the closing `)`

    bool operator==(const LoopHeader&) const = default;
};

// A declared C type split so it can be re-rendered around another name:
// `double *p[4]` has base "double *" and array_suffix "[4]".
struct CType {
    std::string base;
    std::string array_suffix;
    bool is_const = false;  // top-level const: never assigned back

    bool is_array() const { return !array_suffix.empty(); }
    std::string text() const;
    std::string declare(std::string_view name) const;
    bool operator==(const CType&) const = default;
};

struct FunctionSpan {
    std::string name;
    std::size_t start_line = 0;  // first line of the definition, including a leading comment
    std::size_t open_line = 0;   // line holding the body's `{`
    std::size_t close_line = 0;  // line holding the body's `}`
};

struct PragmaLocation {
    std::size_t first_line = 0;
    std::size_t last_line = 0;
    std::string text;  // continuation lines joined with a single space
};

struct LocatedPragma {
    PragmaDirective directive;
    StructuredBlock block;
};

struct TranslationUnit {
    std::string source_path;
    std::vector<std::string> lines;  // verbatim, terminators included
    SourceShadow shadow;
    std::vector<std::string> includes;
    std::vector<std::size_t> include_lines;
    std::vector<PragmaLocation> pragma_locations;
    std::vector<LocatedPragma> pragmas;  // filled by parse_pragmas
    std::map<std::pair<std::string, std::string>, CType> declarations;  // (function, ident); "" is file scope
    std::map<std::pair<std::string, std::string>, std::size_t> declaration_lines;
    std::vector<FunctionSpan> functions;
    std::vector<int> line_depth;  // brace depth at the start of each line
    std::vector<std::size_t> fallback_elided;  // pragmas dropped by parse_pragmas under serial fallback

    std::string text() const;
    std::string_view body(std::size_t line) const { return line_body(lines[line]); }
    const FunctionSpan* function_at(std::size_t line) const;
    const FunctionSpan* find_function(std::string_view name) const;
    std::optional<CType> lookup(std::string_view function, std::string_view ident) const;
};

bool is_omp_pragma(std::string_view line);

// Builds the unit with pragmas located but not yet parsed.
TranslationUnit scan_source(std::string_view text, std::string path, Diagnostics& diags);

std::optional<PragmaDirective> parse_directive(std::string_view pragma_text, std::size_t line_index,
                                               Diagnostics& diags);

std::optional<StructuredBlock> extract_structured_block(const TranslationUnit& unit,
                                                        std::size_t pragma_last_line,
                                                        Diagnostics& diags);

// `code_line` must already be free of comments (a shadow line works).
std::optional<LoopHeader> parse_canonical_loop(std::string_view code_line, std::size_t line_index,
                                               Diagnostics& diags);

// Parses every located pragma into unit.pragmas; failures become diagnostics.
// With `serial_fallback`, a directive that fails to parse is reported as a
// warning and recorded in unit.fallback_elided so its block stays sequential.
void parse_pragmas(TranslationUnit& unit, Diagnostics& diags, bool serial_fallback = false);

// scan_source followed by parse_pragmas.
TranslationUnit load_translation_unit(std::string_view text, std::string path, Diagnostics& diags,
                                      bool serial_fallback = false);

// Names declared by a declaration statement starting at toks[at]; empty when
// the tokens there are not a declaration.
std::vector<std::string> declared_names_at(const std::vector<Token>& toks, std::size_t at);

// Canonical clause text, e.g. `num_threads(4) shared(a, b) reduction(+: s)`.
std::string render_clauses(const ClauseSet& clauses);
std::string render_directive(const PragmaDirective& d);

}  // namespace omp2gap
