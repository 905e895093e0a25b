#pragma once

#include <string>

#include "dfcal/batch.hpp"
#include "dfcal/binning.hpp"
#include "dfcal/covariate_shift.hpp"
#include "dfcal/density_ratio.hpp"

namespace dfcal {

// JSON model files. Every document carries a "type" tag; loading a document
// of the wrong type or with missing fields raises InvalidInput naming the
// offending field. Doubles are written in shortest round-trip form, so
// save -> load -> save is byte-identical.

std::string to_json(const BinningScheme& scheme);
std::string to_json(const CalibratorModel& model);
std::string to_json(const ShiftModel& model);
std::string to_json(const RatioModel& model);

/// Value of the "type" field: "binning", "histogram", "shift" or "density_ratio".
std::string model_type(const std::string& json);

BinningScheme scheme_from_json(const std::string& json);
CalibratorModel calibrator_from_json(const std::string& json);
ShiftModel shift_model_from_json(const std::string& json);
RatioModel ratio_model_from_json(const std::string& json);

}  // namespace dfcal
