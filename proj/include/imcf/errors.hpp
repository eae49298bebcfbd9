#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

/// Coarse error families. The CLI maps `domain` to exit code 2 and
/// `numerical` to exit code 3.
enum class ErrorFamily { domain, numerical, io };

class Error : public std::runtime_error {
public:
    Error(ErrorFamily family, std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), family_(family), kind_(std::move(kind)) {}

    [[nodiscard]] ErrorFamily family() const noexcept { return family_; }
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    ErrorFamily family_;
    std::string kind_;
};

#define IMCF_DEFINE_ERROR(Name, Family)                                                     \
    class Name : public Error {                                                             \
    public:                                                                                 \
        explicit Name(const std::string& what) : Error(ErrorFamily::Family, #Name, what) {} \
    };

// Precondition violations on user-supplied data.
IMCF_DEFINE_ERROR(DomainError, domain)
IMCF_DEFINE_ERROR(NonMeanConvex, domain)
IMCF_DEFINE_ERROR(NotOnQuadric, domain)
IMCF_DEFINE_ERROR(NotUnitNormal, domain)
IMCF_DEFINE_ERROR(UnknownName, domain)
IMCF_DEFINE_ERROR(OutOfInterval, domain)
IMCF_DEFINE_ERROR(SpectrumMismatch, domain)
IMCF_DEFINE_ERROR(WrongSpaceForm, domain)
IMCF_DEFINE_ERROR(AtPole, domain)
IMCF_DEFINE_ERROR(PreconditionError, domain)
IMCF_DEFINE_ERROR(NoEvent, domain)

// Failures of the numerics themselves.
IMCF_DEFINE_ERROR(FocalDegeneracy, numerical)
IMCF_DEFINE_ERROR(DegenerateSample, numerical)
IMCF_DEFINE_ERROR(NoConvergence, numerical)
IMCF_DEFINE_ERROR(FactorNonPositive, numerical)

IMCF_DEFINE_ERROR(IOError, io)

#undef IMCF_DEFINE_ERROR

}  // namespace imcf
