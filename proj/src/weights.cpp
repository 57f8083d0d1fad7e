#include "asx/weights.hpp"

#include "asx/compensated_sum.hpp"
#include "asx/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asx {

namespace {

void require_start(std::uint64_t start) {
    if (start < WeightScheme::kDefaultStart) {
        throw std::invalid_argument("weight start index must be at least 3");
    }
}

}  // namespace

WeightScheme::WeightScheme(WeightKind kind, double kappa, std::uint64_t start)
    : kind_(kind), kappa_(kappa), start_(start) {
    require_start(start);
    if (std::isnan(kappa)) throw std::invalid_argument("kappa must be a number");
    switch (kind) {
        case WeightKind::FamilyA:
            if (!(kappa > 1.0) || !std::isfinite(kappa)) {
                throw std::invalid_argument("family a requires kappa > 1");
            }
            break;
        case WeightKind::FamilyB:
            if (!(kappa > 0.0 && kappa < 1.0)) {
                throw std::invalid_argument("family b requires 0 < kappa < 1");
            }
            break;
        case WeightKind::FamilyC:
            if (!(kappa >= 0.0 && kappa < 0.5)) {
                throw std::invalid_argument("family c requires 0 <= kappa < 1/2");
            }
            break;
        default:
            break;
    }
}

WeightScheme WeightScheme::log_average(std::uint64_t start) { return {WeightKind::LogAverage, 0.0, start}; }
WeightScheme WeightScheme::family_a(double kappa, std::uint64_t start) { return {WeightKind::FamilyA, kappa, start}; }
WeightScheme WeightScheme::family_b(double kappa, std::uint64_t start) { return {WeightKind::FamilyB, kappa, start}; }
WeightScheme WeightScheme::family_c(double kappa, std::uint64_t start) { return {WeightKind::FamilyC, kappa, start}; }
WeightScheme WeightScheme::flat_unit(std::uint64_t start) { return {WeightKind::FlatUnit, 0.0, start}; }

WeightScheme WeightScheme::parse(std::string_view text) {
    if (text == "log") return log_average();
    if (text == "flat") return flat_unit();
    if (text.size() > 2 && text[1] == ':') {
        const double kappa = parse_number(text.substr(2), "weight kappa");
        switch (text[0]) {
            case 'a': return family_a(kappa);
            case 'b': return family_b(kappa);
            case 'c': return family_c(kappa);
            default: break;
        }
    }
    throw std::invalid_argument("unknown weight scheme '" + std::string(text) +
                                "' (expected log, a:KAPPA, b:KAPPA, c:KAPPA or flat)");
}

std::string WeightScheme::name() const {
    switch (kind_) {
        case WeightKind::LogAverage: return "log";
        case WeightKind::FamilyA: return "a:" + format_shortest(kappa_);
        case WeightKind::FamilyB: return "b:" + format_shortest(kappa_);
        case WeightKind::FamilyC: return "c:" + format_shortest(kappa_);
        case WeightKind::FlatUnit: return "flat";
    }
    return "unknown";
}

double WeightScheme::closed_form(std::uint64_t n) const {
    if (n < 2) throw std::out_of_range("closed-form D_n needs n >= 2");
    const double log_n = std::log(static_cast<double>(n));
    switch (kind_) {
        case WeightKind::FamilyA:
            return std::pow(log_n, kappa_);
        case WeightKind::FamilyB:
            return std::exp(std::pow(log_n, kappa_));
        case WeightKind::FamilyC:
            return std::pow(log_n, 1.0 - kappa_) * std::exp(std::pow(log_n, kappa_));
        default:
            throw std::logic_error("closed-form D_n exists only for families a, b and c");
    }
}

double WeightScheme::default_rho() const {
    switch (kind_) {
        case WeightKind::FamilyB:
            return (1.0 - kappa_) / (2.0 * kappa_);
        case WeightKind::FamilyC:
            // kappa = 0 leaves rho unconstrained above
            return kappa_ > 0.0 ? std::min(1.0, (1.0 / kappa_ - 1.0) / 2.0) : 1.0;
        default:
            return 1.0;
    }
}

double weight(const WeightScheme& scheme, std::uint64_t n) {
    if (n < scheme.start()) {
        throw std::out_of_range("weight index " + std::to_string(n) + " is below the start index " +
                                std::to_string(scheme.start()));
    }
    const double dn = static_cast<double>(n);
    switch (scheme.kind()) {
        case WeightKind::LogAverage:
            return 1.0 / dn;
        case WeightKind::FlatUnit:
            return 1.0;
        default:
            break;
    }

    // d_n = D_n (1 - exp(-(g(n) - g(n-1)))) with g = log D. The difference of g
    // is rewritten through log1p/expm1 of log(n-1)/log(n) - 1 so it keeps full
    // precision when n is large.
    const double kappa = scheme.kappa();
    const double log_n = std::log(dn);
    const double rel = std::log1p(-1.0 / dn) / log_n;  // log(n-1)/log(n) - 1
    const double log_ratio = std::log1p(rel);           // log log(n-1) - log log n
    const double power_gap = -std::pow(log_n, kappa) * std::expm1(kappa * log_ratio);
    double dg = 0.0;
    switch (scheme.kind()) {
        case WeightKind::FamilyA:
            dg = -kappa * log_ratio;
            break;
        case WeightKind::FamilyB:
            dg = power_gap;
            break;
        case WeightKind::FamilyC:
            dg = -(1.0 - kappa) * log_ratio + power_gap;
            break;
        default:
            break;
    }
    return scheme.closed_form(n) * -std::expm1(-dg);
}

double cumulative(const WeightScheme& scheme, std::uint64_t n_max) {
    if (n_max < scheme.start()) {
        throw std::out_of_range("cumulative weight needs N >= start index");
    }
    CompensatedSum total;
    for (std::uint64_t n = scheme.start(); n <= n_max; ++n) total.add(weight(scheme, n));
    return total.value();
}

bool ConditionReport::liminf_ok() const { return min_n_dn > 0.0; }
bool ConditionReport::monotone_ok() const { return monotone_violations == 0; }
bool ConditionReport::ratio_ok() const {
    return std::isfinite(max_ratio) && max_ratio <= kRatioBound && tail_growth <= 1.0;
}

ConditionReport check_conditions(const WeightScheme& scheme, std::uint64_t n_lo, std::uint64_t n_hi,
                                 double weight_alpha, double rho) {
    if (n_lo < scheme.start()) throw std::invalid_argument("range start must be >= the weight start index");
    if (n_hi <= n_lo) throw std::invalid_argument("range must satisfy lo < hi");
    if (!(weight_alpha > 0.0 && weight_alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");

    ConditionReport report;
    report.n_lo = n_lo;
    report.n_hi = n_hi;
    report.weight_alpha = weight_alpha;
    report.rho = rho;
    report.min_n_dn = std::numeric_limits<double>::infinity();

    CompensatedSum running;
    for (std::uint64_t n = scheme.start(); n < n_lo; ++n) running.add(weight(scheme, n));

    const std::uint64_t tail_start = std::max(n_lo + 1, n_hi / 10);
    double head_max = 0.0;
    double tail_max = 0.0;
    double previous_scaled = 0.0;
    for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
        const double dn = static_cast<double>(n);
        const double d = weight(scheme, n);
        running.add(d);
        const double total = running.value();

        report.min_n_dn = std::min(report.min_n_dn, dn * d);

        const double scaled = std::pow(dn, weight_alpha) * d;
        if (n > kMonotoneBurnIn && n > n_lo && scaled > previous_scaled * (1.0 + 1e-12)) {
            ++report.monotone_violations;
        }
        previous_scaled = scaled;

        const double log_total = std::log(total);
        const double ratio = log_total > 0.0 ? dn * d * std::pow(log_total, rho) / total : 0.0;
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (n < tail_start) {
            head_max = std::max(head_max, ratio);
        } else {
            tail_max = std::max(tail_max, ratio);
        }
    }
    report.tail_growth = head_max > 0.0 ? tail_max / head_max
                                        : (tail_max > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return report;
}

}  // namespace asx
