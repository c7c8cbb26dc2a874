#ifndef TECHTERM_ERROR_H_
#define TECHTERM_ERROR_H_

#include <stdexcept>
#include <string>

namespace techterm {

// Base class for all library errors. Input errors map to CLI exit code 2,
// numeric failures to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 2; }
};

#define TECHTERM_DEFINE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

TECHTERM_DEFINE_ERROR(EmptyGazetteer)
TECHTERM_DEFINE_ERROR(DegenerateDataset)
TECHTERM_DEFINE_ERROR(RatioError)
TECHTERM_DEFINE_ERROR(EmptyVocabulary)
TECHTERM_DEFINE_ERROR(ConfigError)
TECHTERM_DEFINE_ERROR(DimensionMismatch)
TECHTERM_DEFINE_ERROR(PositionOutOfRange)
TECHTERM_DEFINE_ERROR(LengthMismatch)
TECHTERM_DEFINE_ERROR(ModelMismatch)
TECHTERM_DEFINE_ERROR(FormatError)
TECHTERM_DEFINE_ERROR(IoError)

#undef TECHTERM_DEFINE_ERROR

// Non-finite loss or weights during training.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

}  // namespace techterm

#endif  // TECHTERM_ERROR_H_
