#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "omp2gap/codegen.hpp"
#include "omp2gap/diagnostic.hpp"

namespace omp2gap {

struct TranslateOptions {
    std::optional<long long> cores;  // --cores; default fork width for bare `parallel`
    bool serial_fallback = false;
    bool emit_l1 = false;
};

struct Translation {
    Diagnostics diags;
    std::optional<std::string> text;  // empty when errors were reported
    std::size_t regions = 0;
};

// frontend -> planner -> codegen on an in-memory source.
Translation translate_source(std::string_view source, const std::string& path, const TranslateOptions& options);

// Sequential variant of a program: omp pragmas deleted and omp.h replaced by
// single-thread stubs.
std::string serial_elision(std::string_view source);

std::size_t count_lines(std::string_view text);

enum class CompareMode { kOrderedNumeric, kUnorderedLines };

std::string_view compare_mode_name(CompareMode mode);
std::optional<CompareMode> parse_compare_mode(std::string_view name);

struct LineDelta {
    std::size_t line = 0;  // 1-based
    double expected = 0;
    double actual = 0;
    double relative = 0;
    bool within = true;
};

struct CompareResult {
    bool ok = true;
    std::vector<LineDelta> deltas;
    std::vector<std::string> notes;
};

// Last whitespace-separated token of the line that reads as a number,
// ignoring trailing punctuation.
std::optional<double> final_number(std::string_view line);

double relative_delta(double expected, double actual);

CompareResult compare_ordered(std::string_view actual, std::string_view expected, double tolerance);

// "thread 3" -> "thread *", "3 of 8" -> "* of *"
std::string wildcard_thread_ids(std::string_view line);

// Greeting lines (those with "<id> of <team>") are compared as sets and their
// ids must cover 0..team-1 exactly once; every other line is compared as a
// multiset after thread ids are wildcarded.
CompareResult compare_unordered(std::string_view actual, std::string_view expected, std::optional<int> team);

struct VerifyOptions {
    CompareMode mode = CompareMode::kOrderedNumeric;
    double tolerance = 1e-6;
    std::string cc = "cc";
    std::string shim_dir;
    std::optional<int> team;  // expected greeting team size in unordered mode
    int run_timeout_s = 10;
    bool keep_workdir = false;
    // applied to the translated text before it is built; fault injection in tests
    std::function<std::string(std::string)> rewrite_translation;
};

enum class Verdict { kPass, kFail };

struct VerifyReport {
    std::string program;
    bool translated = false;
    bool translated_built = false;
    bool oracle_built = false;
    bool ran = false;
    CompareMode mode = CompareMode::kOrderedNumeric;
    std::vector<LineDelta> deltas;
    std::vector<std::string> notes;
    std::string log;  // diagnostics, compiler and runtime output of failed stages
    std::size_t input_lines = 0;
    std::size_t output_lines = 0;
    int compiler_warnings = 0;
    std::string translated_output;
    std::string oracle_output;
    std::string workdir;
    Verdict verdict = Verdict::kFail;
};

VerifyReport verify_program(const std::string& path, const VerifyOptions& options);
void print_report(std::ostream& out, const VerifyReport& report);

struct AnalyticCheck {
    std::string match;  // substring selecting the output line
    double expect = 0;
    double abs_tol = 0;
};

struct CorpusEntry {
    std::string name;
    std::string file;
    CompareMode mode = CompareMode::kOrderedNumeric;
    double tolerance = 1e-6;
    std::optional<int> team;
    std::vector<AnalyticCheck> checks;
    std::size_t reference_input_lines = 0;
    std::size_t reference_output_lines = 0;
    std::string reference_percentage;
};

// Reads <dir>/corpus.json. Throws std::runtime_error on a missing or bad manifest.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

struct CorpusRow {
    CorpusEntry entry;
    VerifyReport report;
    std::vector<std::string> check_failures;
    bool pass = false;
};

std::vector<CorpusRow> run_corpus(const std::string& dir, const VerifyOptions& base, std::ostream& log);
void print_corpus_table(std::ostream& out, const std::vector<CorpusRow>& rows);

}  // namespace omp2gap
