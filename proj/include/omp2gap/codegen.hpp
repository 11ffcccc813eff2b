#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "omp2gap/diagnostic.hpp"
#include "omp2gap/frontend.hpp"
#include "omp2gap/planner.hpp"

namespace omp2gap {

// Header of the host runtime; the single spelling authority for the
// emitted cluster API.
inline constexpr std::string_view kRuntimeHeader = "gap_shim.h";
inline constexpr std::string_view kDefaultOutputDir = "output";

struct CodegenOptions {
    bool emit_l1 = false;  // stage records through L1_Malloc/L1_Free at each site
};

struct EmittedFile {
    std::string path;
    std::string contents;
};

// `struct <record>_t { ... } ` plus its global instance.
std::string emit_shared_record(const RegionPlan& plan);

// Worker function body (the statements between its braces), with shared and
// reduction names redirected and inner directives lowered. `team_size` is
// the cluster width the program starts with.
std::string rewrite_region_body(const RegionPlan& plan, const TranslationUnit& unit, int team_size,
                                Diagnostics& diags);

std::string emit_worker_and_master(const RegionPlan& plan, const TranslationUnit& unit, int team_size,
                                   Diagnostics& diags);

// Statement that replaces the pragma and its block at the original site.
// `indent` is the leading whitespace of the replaced block.
std::string rewrite_pragma_site(const RegionPlan& plan, const CodegenOptions& options, std::string_view indent,
                                bool track_team_width);

// Full translated file text. Returns nullopt when errors were reported.
std::optional<std::string> generate(const TranslationUnit& unit, const PlanResult& plans,
                                    const CodegenOptions& options, Diagnostics& diags);

// `<outdir>/<stem>_gap.c`
std::string output_path_for(std::string_view source_path, std::string_view outdir);

EmittedFile render_output(const TranslationUnit& unit, const PlanResult& plans, std::string_view outdir,
                          const CodegenOptions& options, Diagnostics& diags);

}  // namespace omp2gap
