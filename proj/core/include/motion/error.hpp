#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motion {

/// Base class for every error raised by the library. `kind()` is a stable,
/// machine-parsable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

#define MOTION_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(#Name, what) {}       \
  }

MOTION_DEFINE_ERROR(ShapeError);
MOTION_DEFINE_ERROR(ConfigError);
MOTION_DEFINE_ERROR(LabelError);
MOTION_DEFINE_ERROR(NumericalError);
MOTION_DEFINE_ERROR(FormatError);
MOTION_DEFINE_ERROR(IoError);
MOTION_DEFINE_ERROR(EmptyClipError);
MOTION_DEFINE_ERROR(InsufficientFramesError);
MOTION_DEFINE_ERROR(DatasetError);
MOTION_DEFINE_ERROR(DivergenceError);
MOTION_DEFINE_ERROR(EmptyStoreError);

#undef MOTION_DEFINE_ERROR

}  // namespace motion
