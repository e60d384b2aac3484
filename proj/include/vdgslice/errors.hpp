#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vdgslice {

// Errors a user can fix by changing inputs. The CLI maps these to exit code 2.
class UserError : public std::runtime_error {
 public:
  UserError(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define VDGSLICE_DEFINE_ERROR(Name)                                       \
  class Name : public UserError {                                         \
   public:                                                                \
    explicit Name(const std::string& message) : UserError(#Name, message) {} \
  }

VDGSLICE_DEFINE_ERROR(ParseError);
VDGSLICE_DEFINE_ERROR(PreprocessorDirectiveFound);
VDGSLICE_DEFINE_ERROR(UnknownEntry);
VDGSLICE_DEFINE_ERROR(RecursionDetected);
VDGSLICE_DEFINE_ERROR(UnknownNode);
VDGSLICE_DEFINE_ERROR(SchemaError);
VDGSLICE_DEFINE_ERROR(RangeOverlap);
VDGSLICE_DEFINE_ERROR(NotOnRetainedPath);
VDGSLICE_DEFINE_ERROR(UnsupportedConstruct);
VDGSLICE_DEFINE_ERROR(UnmappedPredicate);
VDGSLICE_DEFINE_ERROR(UnboundedInterface);
VDGSLICE_DEFINE_ERROR(TreeTooLarge);

#undef VDGSLICE_DEFINE_ERROR

}  // namespace vdgslice
