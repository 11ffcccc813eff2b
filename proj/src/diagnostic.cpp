#include "omp2gap/diagnostic.hpp"

#include <algorithm>

namespace omp2gap {

void Diagnostics::error(int line, std::string message) {
    items_.push_back({Severity::kError, line, std::move(message)});
}

void Diagnostics::warning(int line, std::string message) {
    items_.push_back({Severity::kWarning, line, std::move(message)});
}

void Diagnostics::append(const Diagnostics& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::has_errors() const {
    return std::any_of(items_.begin(), items_.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

bool Diagnostics::mentions(std::string_view needle) const {
    return std::any_of(items_.begin(), items_.end(), [&](const Diagnostic& d) {
        return d.message.find(needle) != std::string::npos;
    });
}

std::string_view severity_name(Severity s) {
    return s == Severity::kError ? "error" : "warning";
}

std::string format_diagnostic(std::string_view path, const Diagnostic& d) {
    std::string out(path);
    out += ':';
    out += std::to_string(d.line);
    out += ": ";
    out += severity_name(d.severity);
    out += ": ";
    out += d.message;
    return out;
}

}  // namespace omp2gap
