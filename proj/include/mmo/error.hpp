#ifndef MMO_ERROR_HPP
#define MMO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmo {

enum class ErrorKind {
    InvalidMeasurement,
    Bounds,
    BoundsMode,
    InvalidWeight,
    Dimension,
    ComparisonContext,
    EmptyPopulation,
    Space,
    Training,
    Configuration,
    Schedule,
    Coverage,
    Duplicate,
    Format,
    MissingMeasurement,
    Generation,
    EmptyGroup,
    Comparison,
    Usage,
};

inline auto to_string(ErrorKind kind) -> char const*
{
    switch (kind) {
    case ErrorKind::InvalidMeasurement: return "invalid-measurement";
    case ErrorKind::Bounds: return "bounds";
    case ErrorKind::BoundsMode: return "bounds-mode";
    case ErrorKind::InvalidWeight: return "invalid-weight";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::ComparisonContext: return "comparison-context";
    case ErrorKind::EmptyPopulation: return "empty-population";
    case ErrorKind::Space: return "space";
    case ErrorKind::Training: return "training";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Schedule: return "schedule";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Format: return "format";
    case ErrorKind::MissingMeasurement: return "missing-measurement";
    case ErrorKind::Generation: return "generation";
    case ErrorKind::EmptyGroup: return "empty-group";
    case ErrorKind::Comparison: return "comparison";
    case ErrorKind::Usage: return "usage";
    }
    return "unknown";
}

// All library failures surface as mmo::Error; kind() lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what)
        , kind_(kind)
    {
    }

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace mmo

#endif
