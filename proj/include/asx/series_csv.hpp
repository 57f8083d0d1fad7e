#pragma once

#include "asx/asclt.hpp"

#include <ostream>
#include <string>

namespace asx {

inline constexpr const char* kSeriesHeader = "N,D_N,A_N,limit,abs_error";

/// Header plus one LF-terminated row per checkpoint. D_N, A_N and limit are
/// printed with 12 significant digits; abs_error is |A_N - limit| of the
/// printed values with 15 significant digits, so recomputing it from the
/// other two columns agrees to within 1e-15.
void write_series_csv(std::ostream& out, const ConvergenceSeries& series);
std::string series_csv(const ConvergenceSeries& series);

}  // namespace asx
