#include "omp2gap/harness.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "omp2gap/frontend.hpp"
#include "omp2gap/planner.hpp"

namespace fs = std::filesystem;

namespace omp2gap {

Translation translate_source(std::string_view source, const std::string& path, const TranslateOptions& options) {
    Translation t;
    TranslationUnit unit = load_translation_unit(source, path, t.diags, options.serial_fallback);
    if (t.diags.has_errors()) return t;
    PlanOptions popts;
    popts.default_cores = options.cores;
    popts.serial_fallback = options.serial_fallback;
    PlanResult plans = plan_regions(unit, t.diags, popts);
    if (t.diags.has_errors()) return t;
    t.regions = plans.plans.size();
    CodegenOptions copts;
    copts.emit_l1 = options.emit_l1;
    t.text = generate(unit, plans, copts, t.diags);
    return t;
}

std::string serial_elision(std::string_view source) {
    Diagnostics ignored;
    TranslationUnit unit = scan_source(source, "", ignored);
    std::vector<bool> drop(unit.lines.size(), false);
    for (const auto& loc : unit.pragma_locations) {
        for (std::size_t l = loc.first_line; l <= loc.last_line; ++l) drop[l] = true;
    }
    std::set<std::size_t> omp_includes;
    for (std::size_t k = 0; k < unit.includes.size(); ++k) {
        std::string_view inc = unit.includes[k];
        if (inc.find("<omp.h>") != std::string_view::npos || inc.find("\"omp.h\"") != std::string_view::npos) {
            omp_includes.insert(unit.include_lines[k]);
        }
    }
    std::string out;
    for (std::size_t l = 0; l < unit.lines.size(); ++l) {
        if (omp_includes.count(l)) {
            out += "#define omp_get_thread_num() 0\n#define omp_get_num_threads() 1\n";
            continue;
        }
        if (!drop[l]) out += unit.lines[l];
    }
    return out;
}

std::size_t count_lines(std::string_view text) {
    std::size_t n = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    if (!text.empty() && text.back() != '\n') ++n;
    return n;
}

std::string_view compare_mode_name(CompareMode mode) {
    return mode == CompareMode::kOrderedNumeric ? "ordered" : "unordered";
}

std::optional<CompareMode> parse_compare_mode(std::string_view name) {
    if (name == "ordered" || name == "ordered_numeric") return CompareMode::kOrderedNumeric;
    if (name == "unordered" || name == "unordered_lines") return CompareMode::kUnorderedLines;
    return std::nullopt;
}

namespace {

std::vector<std::string> output_lines(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

}  // namespace

std::optional<double> final_number(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        std::string tok = *it;
        while (!tok.empty() && std::strchr(",;:)]}", tok.back())) tok.pop_back();
        while (!tok.empty() && std::strchr("([{", tok.front())) tok.erase(tok.begin());
        if (tok.empty()) continue;
        char* end = nullptr;
        errno = 0;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() + tok.size() && errno == 0 && std::isfinite(v)) return v;
    }
    return std::nullopt;
}

double relative_delta(double expected, double actual) {
    double diff = std::fabs(actual - expected);
    if (diff == 0) return 0;
    return diff / std::max(std::fabs(expected), std::fabs(actual));
}

CompareResult compare_ordered(std::string_view actual, std::string_view expected, double tolerance) {
    CompareResult c;
    auto a = output_lines(actual);
    auto e = output_lines(expected);
    if (a.size() != e.size()) {
        c.ok = false;
        c.notes.push_back("line count differs: " + std::to_string(a.size()) + " vs oracle " +
                          std::to_string(e.size()));
    }
    for (std::size_t i = 0; i < std::min(a.size(), e.size()); ++i) {
        auto av = final_number(a[i]);
        auto ev = final_number(e[i]);
        if (av && ev) {
            LineDelta d{i + 1, *ev, *av, relative_delta(*ev, *av), true};
            d.within = d.relative <= tolerance;
            if (!d.within) c.ok = false;
            c.deltas.push_back(d);
        } else if (a[i] != e[i]) {
            c.ok = false;
            c.notes.push_back("line " + std::to_string(i + 1) + ": '" + a[i] + "' vs oracle '" + e[i] + "'");
        }
    }
    return c;
}

namespace {

const std::regex& thread_word() {
    static const std::regex r(R"(\b([Tt]hread) [0-9]+)");
    return r;
}

const std::regex& id_of_team() {
    static const std::regex r(R"(\b([0-9]+) of ([0-9]+)\b)");
    return r;
}

}  // namespace

std::string wildcard_thread_ids(std::string_view line) {
    std::string s = std::regex_replace(std::string(line), id_of_team(), "* of *");
    return std::regex_replace(s, thread_word(), "$1 *");
}

CompareResult compare_unordered(std::string_view actual, std::string_view expected, std::optional<int> team) {
    CompareResult c;
    std::set<std::string> greet_a, greet_e;
    std::multiset<std::string> rest_a, rest_e;
    std::map<int, int> ids;
    std::set<int> teams;

    for (const auto& line : output_lines(actual)) {
        std::smatch m;
        if (std::regex_search(line, m, id_of_team())) {
            ids[std::stoi(m[1].str())]++;
            teams.insert(std::stoi(m[2].str()));
            greet_a.insert(wildcard_thread_ids(line));
        } else {
            rest_a.insert(wildcard_thread_ids(line));
        }
    }
    for (const auto& line : output_lines(expected)) {
        if (std::regex_search(line, id_of_team())) {
            greet_e.insert(wildcard_thread_ids(line));
        } else {
            rest_e.insert(wildcard_thread_ids(line));
        }
    }

    if (greet_a != greet_e) {
        c.ok = false;
        c.notes.push_back("greeting lines differ from the oracle's");
    }
    if (rest_a != rest_e) {
        c.ok = false;
        for (const auto& l : rest_a) {
            if (rest_a.count(l) != rest_e.count(l)) {
                c.notes.push_back("'" + l + "' appears " + std::to_string(rest_a.count(l)) + " times, oracle " +
                                  std::to_string(rest_e.count(l)));
            }
        }
        for (const auto& l : rest_e) {
            if (!rest_a.count(l)) c.notes.push_back("'" + l + "' missing (oracle has it)");
        }
    }
    if (!ids.empty()) {
        if (teams.size() != 1) {
            c.ok = false;
            c.notes.push_back("greetings disagree on the team size");
        } else {
            int width = *teams.begin();
            bool exact = static_cast<int>(ids.size()) == width;
            for (const auto& [id, n] : ids) exact = exact && id >= 0 && id < width && n == 1;
            if (!exact) {
                c.ok = false;
                c.notes.push_back("thread ids are not a permutation of 0.." + std::to_string(width - 1));
            }
            if (team && width != *team) {
                c.ok = false;
                c.notes.push_back("team of " + std::to_string(width) + ", expected " + std::to_string(*team));
            }
        }
    } else if (team) {
        c.ok = false;
        c.notes.push_back("no greeting lines to check the team against");
    }
    return c;
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'') {
            out += "'\\''";
        } else {
            out += ch;
        }
    }
    return out + "'";
}

struct Run {
    int status = -1;
    std::string output;
};

// Runs a shell command with stdout and stderr captured to a file.
Run run_shell(const std::string& command, const fs::path& capture) {
    std::string full = command + " >" + quote(capture.string()) + " 2>&1";
    int raw = std::system(full.c_str());
    Run r;
    r.status = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
    r.output = read_file(capture);
    return r;
}

Run run_program(const fs::path& exe, const fs::path& dir, const fs::path& out, int timeout_s) {
    std::string cmd = "cd " + quote(dir.string()) + " && timeout " + std::to_string(timeout_s) + " " +
                      quote(exe.string()) + " </dev/null >" + quote(out.string()) + " 2>" +
                      quote((out.string() + ".err"));
    int raw = std::system(cmd.c_str());
    Run r;
    r.status = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
    r.output = read_file(out);
    return r;
}

int count_warnings(const std::string& log) {
    int n = 0;
    for (std::size_t p = log.find("warning:"); p != std::string::npos; p = log.find("warning:", p + 1)) ++n;
    return n;
}

fs::path make_workdir() {
    std::string tmpl = (fs::temp_directory_path() / "omp2gap-verify-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("cannot create a temporary directory");
    return tmpl;
}

}  // namespace

VerifyReport verify_program(const std::string& path, const VerifyOptions& options) {
    VerifyReport r;
    r.program = fs::path(path).filename().string();
    r.mode = options.mode;

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        r.log = "cannot read " + path + "\n";
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string source = ss.str();
    r.input_lines = count_lines(source);

    Translation t = translate_source(source, path, {});
    for (const auto& d : t.diags.items()) r.log += format_diagnostic(path, d) + "\n";
    if (!t.text) return r;
    r.translated = true;
    if (options.rewrite_translation) t.text = options.rewrite_translation(*t.text);
    r.output_lines = count_lines(*t.text);

    fs::path work = make_workdir();
    r.workdir = work.string();
    fs::path shim = fs::absolute(options.shim_dir);
    std::string stem = fs::path(path).stem().string();
    write_file(work / (stem + "_gap.c"), *t.text);
    write_file(work / (stem + "_serial.c"), serial_elision(source));

    const std::string flags = "-std=c99 -Wall -Wextra";
    Run cobj = run_shell(options.cc + " " + flags + " -I" + quote(shim.string()) + " -c " +
                             quote((work / (stem + "_gap.c")).string()) + " -o " +
                             quote((work / "translated.o").string()),
                         work / "cc_translated.log");
    r.compiler_warnings = count_warnings(cobj.output);
    Run clink{1, {}};
    if (cobj.status == 0) {
        clink = run_shell(options.cc + " -std=c99 -I" + quote(shim.string()) + " " +
                              quote((work / "translated.o").string()) + " " + quote((shim / "gap_shim.c").string()) +
                              " -o " + quote((work / "translated").string()) + " -lpthread -lm",
                          work / "link_translated.log");
    }
    r.translated_built = cobj.status == 0 && clink.status == 0;
    if (!r.translated_built) r.log += "translated build failed:\n" + cobj.output + clink.output;
    if (r.compiler_warnings > 0 && r.translated_built) r.log += cobj.output;

    Run oracle_build = run_shell(options.cc + " -std=c99 " + quote((work / (stem + "_serial.c")).string()) + " -o " +
                                     quote((work / "oracle").string()) + " -lm",
                                 work / "cc_oracle.log");
    r.oracle_built = oracle_build.status == 0;
    if (!r.oracle_built) r.log += "oracle build failed:\n" + oracle_build.output;

    if (r.translated_built && r.oracle_built) {
        fs::create_directories(work / "run_translated");
        fs::create_directories(work / "run_oracle");
        Run a = run_program(work / "translated", work / "run_translated", work / "translated.out",
                            options.run_timeout_s);
        Run e = run_program(work / "oracle", work / "run_oracle", work / "oracle.out", options.run_timeout_s);
        r.translated_output = a.output;
        r.oracle_output = e.output;
        r.ran = a.status == 0 && e.status == 0;
        if (a.status != 0) {
            r.log += "translated program exited with " + std::to_string(a.status) + "\n" +
                     read_file(work / "translated.out.err");
        }
        if (e.status != 0) r.log += "oracle exited with " + std::to_string(e.status) + "\n";
    }

    bool compared = false;
    if (r.ran) {
        CompareResult c = options.mode == CompareMode::kOrderedNumeric
                           ? compare_ordered(r.translated_output, r.oracle_output, options.tolerance)
                           : compare_unordered(r.translated_output, r.oracle_output, options.team);
        r.deltas = c.deltas;
        r.notes = c.notes;
        compared = c.ok;
    }
    r.verdict = compared ? Verdict::kPass : Verdict::kFail;
    if (!options.keep_workdir) {
        std::error_code ec;
        fs::remove_all(work, ec);
        r.workdir.clear();
    }
    return r;
}

void print_report(std::ostream& out, const VerifyReport& r) {
    auto yn = [](bool b) { return b ? "ok" : "failed"; };
    out << "program:    " << r.program << "\n";
    out << "translate:  " << yn(r.translated) << "\n";
    out << "build:      translated " << yn(r.translated_built) << ", oracle " << yn(r.oracle_built);
    if (r.compiler_warnings) out << " (" << r.compiler_warnings << " warnings)";
    out << "\n";
    out << "mode:       " << compare_mode_name(r.mode) << "\n";
    for (const auto& d : r.deltas) {
        out << "  line " << d.line << ": oracle " << std::setprecision(15) << d.expected << ", got " << d.actual
            << ", rel " << std::setprecision(3) << d.relative << (d.within ? "" : "  OUT OF TOLERANCE") << "\n";
    }
    for (const auto& n : r.notes) out << "  " << n << "\n";
    if (r.verdict == Verdict::kFail && !r.log.empty()) out << r.log;
    out << "verdict:    " << (r.verdict == Verdict::kPass ? "PASS" : "FAIL") << "\n";
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
    fs::path manifest = fs::path(dir) / "corpus.json";
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("cannot read " + manifest.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(manifest.string() + ": " + e.what());
    }
    std::vector<CorpusEntry> entries;
    try {
        for (const auto& item : j.at("programs")) {
            CorpusEntry e;
            e.name = item.at("name").get<std::string>();
            e.file = item.at("file").get<std::string>();
            auto mode = parse_compare_mode(item.value("mode", "ordered"));
            if (!mode) throw std::runtime_error(e.name + ": unknown mode");
            e.mode = *mode;
            e.tolerance = item.value("tolerance", 1e-6);
            if (item.contains("team")) e.team = item["team"].get<int>();
            for (const auto& c : item.value("checks", nlohmann::json::array())) {
                e.checks.push_back({c.at("match").get<std::string>(), c.at("expect").get<double>(),
                                    c.at("abs_tol").get<double>()});
            }
            const auto& ref = item.at("reference");
            e.reference_input_lines = ref.at("input_lines").get<std::size_t>();
            e.reference_output_lines = ref.at("output_lines").get<std::size_t>();
            e.reference_percentage = ref.value("percentage", "");
            entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(manifest.string() + ": " + e.what());
    }
    return entries;
}

std::vector<CorpusRow> run_corpus(const std::string& dir, const VerifyOptions& base, std::ostream& log) {
    std::vector<CorpusRow> rows;
    for (const auto& entry : load_corpus(dir)) {
        VerifyOptions opts = base;
        opts.mode = entry.mode;
        opts.tolerance = entry.tolerance;
        opts.team = entry.team;
        CorpusRow row{entry, verify_program((fs::path(dir) / entry.file).string(), opts), {}, false};
        for (const auto& check : entry.checks) {
            std::optional<double> value;
            for (const auto& line : output_lines(row.report.translated_output)) {
                if (line.find(check.match) != std::string::npos) value = final_number(line);
            }
            if (!value) {
                row.check_failures.push_back("no line matching '" + check.match + "'");
            } else if (std::fabs(*value - check.expect) >= check.abs_tol) {
                std::ostringstream msg;
                msg << std::setprecision(15) << "'" << check.match << "' = " << *value << ", expected " << check.expect
                    << " +- " << check.abs_tol;
                row.check_failures.push_back(msg.str());
            }
        }
        row.pass = row.report.verdict == Verdict::kPass && row.check_failures.empty();
        if (!row.pass) {
            print_report(log, row.report);
            for (const auto& f : row.check_failures) log << "  check failed: " << f << "\n";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void print_corpus_table(std::ostream& out, const std::vector<CorpusRow>& rows) {
    out << std::left << std::setw(16) << "program" << std::setw(11) << "mode" << std::right << std::setw(6) << "in"
        << std::setw(7) << "out" << std::setw(7) << "ratio" << std::setw(8) << "ref in" << std::setw(8) << "ref out"
        << std::setw(8) << "ref %" << "  verdict\n";
    int passed = 0;
    for (const auto& row : rows) {
        const auto& r = row.report;
        double ratio = r.input_lines ? static_cast<double>(r.output_lines) / static_cast<double>(r.input_lines) : 0;
        out << std::left << std::setw(16) << row.entry.file << std::setw(11) << compare_mode_name(row.entry.mode)
            << std::right << std::setw(6) << r.input_lines << std::setw(7) << r.output_lines << std::setw(7)
            << std::fixed << std::setprecision(2) << ratio << std::defaultfloat << std::setw(8)
            << row.entry.reference_input_lines << std::setw(8) << row.entry.reference_output_lines << std::setw(8)
            << row.entry.reference_percentage << "  " << (row.pass ? "PASS" : "FAIL") << "\n";
        if (row.pass) ++passed;
    }
    out << passed << "/" << rows.size() << " PASS\n";
}

}  // namespace omp2gap
