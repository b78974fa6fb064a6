#pragma once

#include <stdexcept>
#include <string>

namespace radzero {

/// Base of every exception thrown by the library. `module()` names the
/// component that raised it so the CLI can tag diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

#define RADZERO_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        using Error::Error;                                               \
    };

RADZERO_DEFINE_ERROR(ParseError)
RADZERO_DEFINE_ERROR(ValidationError)
RADZERO_DEFINE_ERROR(UnknownCharacter)
RADZERO_DEFINE_ERROR(UnknownStructure)
RADZERO_DEFINE_ERROR(EmptyGlyph)
RADZERO_DEFINE_ERROR(InvalidParams)
RADZERO_DEFINE_ERROR(EmptySet)
RADZERO_DEFINE_ERROR(SlotMismatch)
RADZERO_DEFINE_ERROR(NotSingleRadical)
RADZERO_DEFINE_ERROR(InsufficientData)
RADZERO_DEFINE_ERROR(EmptyTraining)
RADZERO_DEFINE_ERROR(RangeError)
RADZERO_DEFINE_ERROR(IndexOutOfRange)
RADZERO_DEFINE_ERROR(EmptyInput)
RADZERO_DEFINE_ERROR(EmptyGroundTruth)
RADZERO_DEFINE_ERROR(Overlap)
RADZERO_DEFINE_ERROR(IoError)

#undef RADZERO_DEFINE_ERROR

}  // namespace radzero
