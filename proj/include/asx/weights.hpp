#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace asx {

enum class WeightKind { LogAverage, FamilyA, FamilyB, FamilyC, FlatUnit };

/// Positive weights d_n for n >= start, zero before. For the three
/// slowly-varying families d_n is the exact increment D_n - D_{n-1} of
///   A: D_n = (log n)^kappa                        (kappa > 1)
///   B: D_n = exp((log n)^kappa)                   (0 < kappa < 1)
///   C: D_n = (log n)^(1-kappa) exp((log n)^kappa)  (0 <= kappa < 1/2)
/// so that normalising by the running sum is exact. FlatUnit (d_n = 1) is the
/// control that violates the growth condition.
class WeightScheme {
public:
    static constexpr std::uint64_t kDefaultStart = 3;

    static WeightScheme log_average(std::uint64_t start = kDefaultStart);
    static WeightScheme family_a(double kappa, std::uint64_t start = kDefaultStart);
    static WeightScheme family_b(double kappa, std::uint64_t start = kDefaultStart);
    static WeightScheme family_c(double kappa, std::uint64_t start = kDefaultStart);
    static WeightScheme flat_unit(std::uint64_t start = kDefaultStart);

    /// Parses "log", "a:KAPPA", "b:KAPPA", "c:KAPPA" or "flat".
    static WeightScheme parse(std::string_view text);

    WeightKind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    std::uint64_t start() const { return start_; }
    std::string name() const;

    /// Closed-form D_n for the families (n >= 2); throws for LogAverage/FlatUnit.
    double closed_form(std::uint64_t n) const;

    /// rho inside the admissible range for the family: A 1, B (1-kappa)/(2 kappa),
    /// C min(1, (1/kappa - 1)/2); 1 for LogAverage and FlatUnit.
    double default_rho() const;

private:
    WeightScheme(WeightKind kind, double kappa, std::uint64_t start);

    WeightKind kind_;
    double kappa_;
    std::uint64_t start_;
};

/// d_n; throws std::out_of_range for n < start.
double weight(const WeightScheme& scheme, std::uint64_t n);

/// D_N = sum_{n=start}^{N} d_n, summed in order with compensation.
double cumulative(const WeightScheme& scheme, std::uint64_t n_max);

struct ConditionReport {
    double min_n_dn = 0.0;                  // min of n d_n
    std::uint64_t monotone_violations = 0;  // increases of n^alpha d_n after burn-in
    double max_ratio = 0.0;                 // max of n d_n (log D_n)^rho / D_n
    double tail_growth = 0.0;               // max ratio over the last decade / max before it
    std::uint64_t n_lo = 0;
    std::uint64_t n_hi = 0;
    double weight_alpha = 0.0;
    double rho = 0.0;

    bool liminf_ok() const;
    bool monotone_ok() const;
    bool ratio_ok() const;
    bool passed() const { return liminf_ok() && monotone_ok() && ratio_ok(); }
};

inline constexpr std::uint64_t kMonotoneBurnIn = 100;
inline constexpr double kRatioBound = 10.0;

/// Finite-range scan of the three weight conditions. The conditions are
/// asymptotic, so this is a diagnostic on [n_lo, n_hi], not a proof:
///  - liminf n d_n > 0 is read as min n d_n > 0 on the range;
///  - n^alpha d_n eventually nonincreasing: increases counted for n > burn-in;
///  - limsup n d_n (log D_n)^rho / D_n < inf: the ratio stays below
///    kRatioBound and does not peak inside the final decade of the range.
/// (log D_n)^rho is taken as 0 while D_n <= 1.
ConditionReport check_conditions(const WeightScheme& scheme, std::uint64_t n_lo,
                                 std::uint64_t n_hi, double weight_alpha, double rho);

}  // namespace asx
