#pragma once

#include <string>

#include "kolmofix/measure.hpp"

namespace kolmofix {

/// CSV with header x1,...,xd,weight; doubles printed round-trip exact.
void write_measure_csv(const std::string& path, const DiscreteMeasure& mu);
DiscreteMeasure read_measure_csv(const std::string& path);

/// JSON {"axes": [{"lower", "upper", "cells"}...], "values": [...]}, values
/// row-major with the first axis slowest.
void write_grid_json(const std::string& path, const GridDensity& g);
GridDensity read_grid_json(const std::string& path);

}  // namespace kolmofix
