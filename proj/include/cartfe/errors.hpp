#pragma once

#include <stdexcept>
#include <string>

namespace cartfe {

// Every failure raised by the library derives from Error so drivers can
// report and exit non-zero with a single catch.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define CARTFE_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
  public:                                    \
    using Error::Error;                      \
  }

CARTFE_DEFINE_ERROR(InvalidArgument);
CARTFE_DEFINE_ERROR(NameResolutionError);
CARTFE_DEFINE_ERROR(ConflictError);
CARTFE_DEFINE_ERROR(ParseError);
CARTFE_DEFINE_ERROR(EmptyDomainError);
CARTFE_DEFINE_ERROR(UnsupportedDomainError);
CARTFE_DEFINE_ERROR(DomainError);
CARTFE_DEFINE_ERROR(MissingGradientError);
CARTFE_DEFINE_ERROR(KindError);
CARTFE_DEFINE_ERROR(ArityError);
CARTFE_DEFINE_ERROR(GeometryError);
CARTFE_DEFINE_ERROR(IoError);
CARTFE_DEFINE_ERROR(IterationLimitError);
CARTFE_DEFINE_ERROR(LineSearchError);
CARTFE_DEFINE_ERROR(PreconditionError);
CARTFE_DEFINE_ERROR(AssertionFailure);

#undef CARTFE_DEFINE_ERROR

class SingularSystemError : public Error {
public:
  SingularSystemError(const std::string& what, int pivot)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

private:
  int pivot_;
};

#define CARTFE_THROW_IF(cond, Type, msg) \
  do {                                   \
    if (cond) throw Type(msg);           \
  } while (0)

}  // namespace cartfe
