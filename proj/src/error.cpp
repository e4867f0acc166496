#include "ahcrf/error.hpp"

namespace ahcrf {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& detail)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + detail), line_(line) {}

}  // namespace ahcrf
