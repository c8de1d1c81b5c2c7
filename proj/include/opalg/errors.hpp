#pragma once

#include <stdexcept>
#include <string>

namespace opalg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define OPALG_DEFINE_ERROR(Name)                                       \
    struct Name : Error {                                              \
        explicit Name(const std::string& what = #Name) : Error(what) {} \
    }

// group construction
OPALG_DEFINE_ERROR(ClosureCapExceeded);
OPALG_DEFINE_ERROR(NotBijective);
OPALG_DEFINE_ERROR(OrderCapExceeded);
OPALG_DEFINE_ERROR(NotASubgroup);

// algebra arithmetic
OPALG_DEFINE_ERROR(ParentMismatch);
OPALG_DEFINE_ERROR(UnsupportedParent);
OPALG_DEFINE_ERROR(NotAnInvolution);
OPALG_DEFINE_ERROR(EigSolverFailure);

// expectations
OPALG_DEFINE_ERROR(NotUnital);
OPALG_DEFINE_ERROR(NotStarClosed);
OPALG_DEFINE_ERROR(NoFiniteQuasiBasis);
OPALG_DEFINE_ERROR(NotFiniteIndex);
OPALG_DEFINE_ERROR(InclusionViolated);
OPALG_DEFINE_ERROR(NotUnitary);

// basic construction
OPALG_DEFINE_ERROR(NoQuasiBasis);
OPALG_DEFINE_ERROR(InconsistentSpan);
OPALG_DEFINE_ERROR(CertificationFailed);
OPALG_DEFINE_ERROR(DimensionCapExceeded);

// lattice
OPALG_DEFINE_ERROR(NotInNormalizer);
OPALG_DEFINE_ERROR(NotIMS);

// cli / io
OPALG_DEFINE_ERROR(SpecParse);
OPALG_DEFINE_ERROR(UnknownSuite);

#undef OPALG_DEFINE_ERROR

} // namespace opalg
