#ifndef CAPSIM_ERRORS_HPP
#define CAPSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace capsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sphere-geom
struct PoleError : Error { using Error::Error; };
struct DegenerateCurve : Error { using Error::Error; };

// zonal-analytics
struct OrderingError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };

// velocity-field
struct SingularityError : Error { using Error::Error; };
struct CoreError : Error { using Error::Error; };
struct TopologyError : Error { using Error::Error; };

// flow-integrator / interface-tracker
struct BandExit : Error { using Error::Error; };
struct ResolutionExhausted : Error { using Error::Error; };

// cli-io
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace capsim

#endif
