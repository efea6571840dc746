#ifndef QSD_ERRORS_HPP
#define QSD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qsd {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonHermitianInput : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct SingularOperator : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };
struct DegenerateEnsemble : Error { using Error::Error; };
struct NotFullRank : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SymmetryViolation : Error { using Error::Error; };
struct UnsupportedFamily : Error { using Error::Error; };
struct UnsupportedRegime : Error { using Error::Error; };
struct QOutOfRange : Error { using Error::Error; };
struct PeOutOfRange : Error { using Error::Error; };
struct NoRealRoot : Error { using Error::Error; };
struct InvalidCertificate : Error { using Error::Error; };
struct CommutationViolation : Error { using Error::Error; };
struct NotIdentityResolving : Error { using Error::Error; };
struct NonMonotone : Error { using Error::Error; };

} // namespace qsd

#endif
