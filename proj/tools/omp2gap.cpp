// omp2gap: OpenMP to GAP8 cluster source translator.
//
// exit codes: 0 ok, 1 I/O or verification failure, 2 unsupported input or bad usage

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "omp2gap/harness.hpp"

namespace fs = std::filesystem;
using namespace omp2gap;

#ifndef OMP2GAP_DEFAULT_SHIM_DIR
#define OMP2GAP_DEFAULT_SHIM_DIR "runtime"
#endif

namespace {

enum Exit { kOk = 0, kIoError = 1, kUnsupported = 2 };

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

int cmd_translate(const std::string& input, const std::string& outdir, const TranslateOptions& options,
                  bool strict_paths) {
    std::ifstream in(input, std::ios::binary);
    if (!in) {
        std::cerr << input << ": error: cannot read file\n";
        return kIoError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();

    Translation t = translate_source(ss.str(), input, options);
    for (const auto& d : t.diags.items()) std::cerr << format_diagnostic(input, d) << "\n";
    if (!t.text) return kUnsupported;

    std::error_code ec;
    if (!fs::is_directory(outdir, ec)) {
        if (strict_paths) {
            std::cerr << outdir << ": error: output directory does not exist\n";
            return kIoError;
        }
        fs::create_directories(outdir, ec);
        if (ec) {
            std::cerr << outdir << ": error: cannot create output directory: " << ec.message() << "\n";
            return kIoError;
        }
    }
    std::string path = output_path_for(input, outdir);
    std::ofstream out(path, std::ios::binary);
    out << *t.text;
    out.close();
    if (!out) {
        std::cerr << path << ": error: cannot write file\n";
        return kIoError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translate OpenMP C programs to the GAP8 cluster API"};
    app.require_subcommand(1);

    std::string input;
    std::string outdir(kDefaultOutputDir);
    long long cores = 0;
    TranslateOptions topts;
    bool strict_paths = false;
    auto* translate = app.add_subcommand("translate", "translate one C file");
    translate->add_option("file", input, "OpenMP C source")->required();
    translate->add_option("-o,--outdir", outdir, "output directory");
    auto* cores_opt = translate->add_option("--cores", cores, "fork width for regions without num_threads");
    translate->add_flag("--serial-fallback", topts.serial_fallback, "leave unsupported blocks sequential");
    translate->add_flag("--emit-l1", topts.emit_l1, "stage shared records in L1 with L1_Malloc/L1_Free");
    translate->add_flag("--strict-paper-paths", strict_paths, "fail when the output directory is missing");

    std::string mode_name = "ordered";
    VerifyOptions vopts;
    int team = 0;
    std::string shim_dir;
    auto* verify = app.add_subcommand("verify", "compare a translated program against its serial elision");
    verify->add_option("file", input, "OpenMP C source")->required();
    verify->add_option("--mode", mode_name, "ordered or unordered")
        ->check(CLI::IsMember({"ordered", "unordered", "ordered_numeric", "unordered_lines"}));
    verify->add_option("--tol", vopts.tolerance, "relative tolerance for ordered mode");
    auto* team_opt = verify->add_option("--team", team, "expected team size of greeting lines");
    verify->add_option("--shim-dir", shim_dir, "directory holding gap_shim.h and gap_shim.c");
    verify->add_flag("--keep", vopts.keep_workdir, "keep the temporary build directory");

    std::string corpus_dir = "corpus";
    auto* corpus = app.add_subcommand("corpus", "verify every program of a corpus");
    corpus->add_option("--dir", corpus_dir, "corpus directory with corpus.json");
    corpus->add_option("--shim-dir", shim_dir, "directory holding gap_shim.h and gap_shim.c");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUnsupported;
    }

    vopts.cc = env_or("OMP2GAP_CC", "cc");
    vopts.shim_dir = shim_dir.empty() ? env_or("OMP2GAP_SHIM_DIR", OMP2GAP_DEFAULT_SHIM_DIR) : shim_dir;

    if (translate->parsed()) {
        if (cores_opt->count()) topts.cores = cores;
        return cmd_translate(input, outdir, topts, strict_paths);
    }

    if (verify->parsed()) {
        vopts.mode = *parse_compare_mode(mode_name);
        if (team_opt->count()) vopts.team = team;
        VerifyReport report = verify_program(input, vopts);
        print_report(std::cout, report);
        return report.verdict == Verdict::kPass ? kOk : kIoError;
    }

    try {
        auto rows = run_corpus(corpus_dir, vopts, std::cerr);
        print_corpus_table(std::cout, rows);
        bool all = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const CorpusRow& r) { return r.pass; });
        return all ? kOk : kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
}
