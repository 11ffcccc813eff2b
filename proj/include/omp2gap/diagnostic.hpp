#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace omp2gap {

enum class Severity { kError, kWarning };

struct Diagnostic {
    Severity severity = Severity::kError;
    int line = 0;  // 1-based, 0 when not tied to a line
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

// Collects diagnostics across the pipeline. Any error suppresses emission.
class Diagnostics {
public:
    void error(int line, std::string message);
    void warning(int line, std::string message);
    void add(Diagnostic d) { items_.push_back(std::move(d)); }
    void append(const Diagnostics& other);

    bool has_errors() const;
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<Diagnostic>& items() const { return items_; }

    // True if any diagnostic message contains `needle`.
    bool mentions(std::string_view needle) const;

private:
    std::vector<Diagnostic> items_;
};

std::string_view severity_name(Severity s);

// `path:line: severity: message`
std::string format_diagnostic(std::string_view path, const Diagnostic& d);

}  // namespace omp2gap
