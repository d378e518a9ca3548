#ifndef SMCH2_ERROR_HPP
#define SMCH2_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace smch2 {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SMCH2_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

SMCH2_DEFINE_ERROR(InvalidGrid);
SMCH2_DEFINE_ERROR(GridMismatch);
SMCH2_DEFINE_ERROR(NonFinite);
SMCH2_DEFINE_ERROR(InvalidEpsilon);
SMCH2_DEFINE_ERROR(InvalidKappa);
SMCH2_DEFINE_ERROR(SpecViolation);
SMCH2_DEFINE_ERROR(JacobianCollapse);
SMCH2_DEFINE_ERROR(InvalidC);
SMCH2_DEFINE_ERROR(InvalidParams);
SMCH2_DEFINE_ERROR(RegimeViolation);
SMCH2_DEFINE_ERROR(DecayViolation);
SMCH2_DEFINE_ERROR(FrameMismatch);

#undef SMCH2_DEFINE_ERROR

// Raised by the configuration layer; carries one message per offending field.
class ConfigRejected : public Error {
 public:
  explicit ConfigRejected(std::vector<std::string> messages);

  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

}  // namespace smch2

#endif
