#ifndef PROTOSEG_ERROR_HPP
#define PROTOSEG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace protoseg {

// Error categories map onto the CLI exit codes: config errors exit 2, data
// errors exit 3, infeasible models exit 4.
enum class ErrorKind {
  Config,
  Data,
  Infeasible,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define PROTOSEG_DEFINE_ERROR(Name, Kind)                                     \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}  \
  };

PROTOSEG_DEFINE_ERROR(ConfigError, Config)
PROTOSEG_DEFINE_ERROR(ParameterError, Config)
PROTOSEG_DEFINE_ERROR(DimensionError, Data)
PROTOSEG_DEFINE_ERROR(SchemaError, Data)
PROTOSEG_DEFINE_ERROR(JoinError, Data)
PROTOSEG_DEFINE_ERROR(EmptyDatasetError, Data)
PROTOSEG_DEFINE_ERROR(EmptyClusterError, Data)
PROTOSEG_DEFINE_ERROR(UnknownCategoryError, Data)
PROTOSEG_DEFINE_ERROR(DegenerateCategoricalsError, Data)
PROTOSEG_DEFINE_ERROR(InfeasibleKError, Infeasible)
PROTOSEG_DEFINE_ERROR(InsufficientCurveError, Infeasible)

#undef PROTOSEG_DEFINE_ERROR

}  // namespace protoseg

#endif  // PROTOSEG_ERROR_HPP
