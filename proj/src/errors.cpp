#include "dfcal/errors.hpp"

namespace dfcal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::OutOfDomain: return "out of domain";
    case ErrorKind::DegeneratePartition: return "degenerate partition";
    case ErrorKind::EmptyBin: return "empty bin";
    case ErrorKind::DegenerateBin: return "degenerate bin";
    case ErrorKind::BoundsViolation: return "bounds violation";
    case ErrorKind::Numeric: return "numeric error";
  }
  return "error";
}

EmptyBinError::EmptyBinError(std::size_t bin)
    : Error(ErrorKind::EmptyBin,
            "bin " + std::to_string(bin) +
                " has no calibration points (reduce the bin count or use "
                "uniform-mass binning)"),
      bin_(bin) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dfcal
