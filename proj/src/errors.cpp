#include "esterr/errors.hpp"

namespace esterr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidNoise: return "invalid-noise";
    case ErrorKind::InvalidPrior: return "invalid-prior";
    case ErrorKind::InvalidSigma: return "invalid-sigma";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnderflowExhausted: return "underflow-exhausted";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NonInvertible: return "non-invertible";
    case ErrorKind::SlopeUnderflow: return "slope-underflow";
    case ErrorKind::UnsupportedMode: return "unsupported-mode";
    case ErrorKind::DivergentMoment: return "divergent-moment";
    case ErrorKind::NoPrediction: return "no-prediction";
    case ErrorKind::ConfigParse: return "config-parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace esterr
