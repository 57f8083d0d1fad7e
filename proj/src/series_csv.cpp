#include "asx/series_csv.hpp"

#include "asx/text.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace asx {

void write_series_csv(std::ostream& out, const ConvergenceSeries& series) {
    out << kSeriesHeader << '\n';
    for (const SeriesRow& row : series.rows) {
        const std::string average = format_sig12(row.average);
        const std::string limit = format_sig12(row.limit);
        const double gap = std::abs(parse_number(average, "A_N") - parse_number(limit, "limit"));
        char printed[32];
        std::snprintf(printed, sizeof printed, "%.15g", gap);
        out << row.n << ',' << format_sig12(row.cumulative_weight) << ',' << average << ',' << limit << ','
            << printed << '\n';
    }
}

std::string series_csv(const ConvergenceSeries& series) {
    std::ostringstream out;
    write_series_csv(out, series);
    return out.str();
}

}  // namespace asx
