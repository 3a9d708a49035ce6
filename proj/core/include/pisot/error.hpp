#ifndef PISOT_ERROR_HPP
#define PISOT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pisot {

/* Values double as CLI exit codes. */
enum class ErrorKind {
    parse = 1,
    hypothesis = 2,
    unsupported_field = 3,
    cap = 4,
    internal = 5,
};

class Error : public std::runtime_error {
    ErrorKind kind_;

  public:
    Error(ErrorKind kind, std::string const& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
};

[[noreturn]] inline void fail(ErrorKind kind, std::string const& msg)
{
    throw Error(kind, msg);
}

} // namespace pisot

#endif
