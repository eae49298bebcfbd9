#pragma once

#include "imcf/errors.hpp"
#include "imcf/spectrum.hpp"
#include "imcf/spaceform.hpp"
#include "imcf/isocatalog.hpp"
#include "imcf/closedform.hpp"
#include "imcf/numflow.hpp"
#include "imcf/geomviz.hpp"

namespace imcf {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace imcf
