#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quasifix/metric_space.hpp"

namespace quasifix {

/// The nine comparison terms a contraction condition may draw on, evaluated at
/// an ordered pair (x, y). The four t2x_* terms reference T^2 x only, which is
/// what makes the condition ordered-pair sensitive.
enum class Term : std::uint16_t {
    xy = 0,       // d(x, y)
    x_tx = 1,     // d(x, Tx)
    y_ty = 2,     // d(y, Ty)
    x_ty = 3,     // d(x, Ty)
    y_tx = 4,     // d(y, Tx)
    t2x_x = 5,    // d(T^2 x, x)
    t2x_tx = 6,   // d(T^2 x, Tx)
    t2x_y = 7,    // d(T^2 x, y)
    t2x_ty = 8,   // d(T^2 x, Ty)
};

inline constexpr int kTermCount = 9;

inline const char* term_name(Term t) {
    static constexpr std::array<const char*, kTermCount> names = {
        "d(x,y)",     "d(x,Tx)",    "d(y,Ty)",   "d(x,Ty)",   "d(y,Tx)",
        "d(T2x,x)",   "d(T2x,Tx)",  "d(T2x,y)",  "d(T2x,Ty)"};
    return names[static_cast<std::size_t>(t)];
}

/// Nonempty subset of the nine comparison terms, defining which contraction
/// condition is being tested. Bit i corresponds to Term(i).
class TermSet {
public:
    explicit TermSet(std::uint16_t bits) : bits_(bits) {
        if (bits == 0) throw std::invalid_argument("TermSet: must enable at least one term");
        if (bits >= (1u << kTermCount))
            throw std::invalid_argument("TermSet: mask has bits beyond the nine terms");
    }

    static TermSet banach() { return TermSet{0b000000001}; }
    static TermSet kannan() { return TermSet{0b000000110}; }
    static TermSet quasi() { return TermSet{0b000011111}; }
    static TermSet generalized() { return TermSet{0b111111111}; }

    bool contains(Term t) const { return (bits_ >> static_cast<int>(t)) & 1u; }
    std::uint16_t bits() const { return bits_; }
    bool subset_of(const TermSet& other) const { return (bits_ & ~other.bits_) == 0; }
    bool operator==(const TermSet&) const = default;

    /// Display name: a preset name when the mask matches one, else
    /// "custom:<9-bit mask>" with bit 0 (d(x,y)) printed first.
    std::string name() const {
        if (*this == banach()) return "banach";
        if (*this == kannan()) return "kannan";
        if (*this == quasi()) return "quasi";
        if (*this == generalized()) return "generalized";
        std::string mask;
        for (int i = 0; i < kTermCount; ++i) mask += ((bits_ >> i) & 1u) ? '1' : '0';
        return "custom:" + mask;
    }

    /// Inverse of name(): accepts the preset names and a 9-bit mask, with or
    /// without the "custom:" prefix.
    static TermSet parse(const std::string& text) {
        if (text == "banach") return banach();
        if (text == "kannan") return kannan();
        if (text == "quasi") return quasi();
        if (text == "generalized") return generalized();
        constexpr const char* prefix = "custom:";
        const bool prefixed = text.rfind(prefix, 0) == 0;
        const bool bare_mask =
            text.size() == kTermCount &&
            text.find_first_not_of("01") == std::string::npos;
        if (prefixed || bare_mask) {
            const std::string mask = prefixed ? text.substr(7) : text;
            if (mask.size() != kTermCount)
                throw std::invalid_argument("TermSet: custom mask must have exactly 9 bits");
            std::uint16_t bits = 0;
            for (int i = 0; i < kTermCount; ++i) {
                if (mask[static_cast<std::size_t>(i)] == '1')
                    bits |= static_cast<std::uint16_t>(1u << i);
                else if (mask[static_cast<std::size_t>(i)] != '0')
                    throw std::invalid_argument("TermSet: custom mask must contain only 0 and 1");
            }
            return TermSet{bits};
        }
        throw std::invalid_argument("TermSet: unknown term set '" + text + "'");
    }

private:
    std::uint16_t bits_;
};

/// Result of the minimal-modulus search for one condition.
///
/// minimal_q is the exact maximum over ordered pairs of the displacement ratio
/// (+inf when some pair has positive displacement but a vanishing comparison
/// maximum, possible only for term sets excluding d(x,y)). The witness is the
/// first argmax pair in row-major order; it is absent only on single-point
/// spaces, where there are no ordered pairs at all.
struct ContractionReport {
    TermSet terms = TermSet::generalized();
    Index power = 1;
    double minimal_q = 0.0;
    std::optional<std::pair<Index, Index>> witness;
    bool contractive = false;
};

/// All nine term values at (x, y), in Term order.
inline std::array<double, kTermCount> term_values(const FiniteMetricSpace& s, const SelfMap& T,
                                                  Index x, Index y) {
    const Index tx = T(x);
    const Index ty = T(y);
    const Index ttx = T(tx);
    return {s.dist(x, y),   s.dist(x, tx),  s.dist(y, ty),
            s.dist(x, ty),  s.dist(y, tx),  s.dist(ttx, x),
            s.dist(ttx, tx), s.dist(ttx, y), s.dist(ttx, ty)};
}

/// Maximum of the enabled term values at the ordered pair (x, y).
inline double comparison_max(const FiniteMetricSpace& s, const SelfMap& T, const TermSet& terms,
                             Index x, Index y) {
    detail::check_map(s, T, "comparison_max");
    detail::check_point(s, x, "comparison_max");
    detail::check_point(s, y, "comparison_max");
    const auto values = term_values(s, T, x, y);
    double m = 0.0;
    for (int i = 0; i < kTermCount; ++i)
        if (terms.contains(static_cast<Term>(i))) m = std::max(m, values[static_cast<std::size_t>(i)]);
    return m;
}

namespace detail {

/// Shared argmax scan over ordered pairs x != y. ratio(x, y) conventions:
/// zero numerator contributes 0, zero denominator with positive numerator
/// contributes +inf. Ties keep the row-major-first pair.
template <typename RatioFn>
std::pair<double, std::optional<std::pair<Index, Index>>> max_ratio_scan(Index n, RatioFn&& ratio) {
    double best = 0.0;
    std::optional<std::pair<Index, Index>> witness;
    for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) {
            if (x == y) continue;
            const double r = ratio(x, y);
            if (!witness || r > best) {
                best = r;
                witness = std::make_pair(x, y);
            }
        }
    return {witness ? best : 0.0, witness};
}

inline double displacement_ratio(double numerator, double denominator) {
    if (numerator == 0.0) return 0.0;
    if (denominator == 0.0) return kInfinity;
    return numerator / denominator;
}

}  // namespace detail

/// Exact minimal contraction modulus of T^k for the given term set: the
/// maximum over ordered pairs (x, y), x != y, of
/// d(T^k x, T^k y) / comparison_max(T^k, terms, x, y).
/// The map is in the class iff minimal_q < 1 (strictly; q = 1 is out).
inline ContractionReport minimal_q(const FiniteMetricSpace& s, const SelfMap& T,
                                   const TermSet& terms, Index power = 1) {
    detail::check_map(s, T, "minimal_q");
    if (power < 1) throw std::invalid_argument("minimal_q: power must be >= 1");
    const SelfMap S = compose_power(T, power);

    auto [q, witness] = detail::max_ratio_scan(s.size(), [&](Index x, Index y) {
        const auto values = term_values(s, S, x, y);
        double den = 0.0;
        for (int i = 0; i < kTermCount; ++i)
            if (terms.contains(static_cast<Term>(i)))
                den = std::max(den, values[static_cast<std::size_t>(i)]);
        return detail::displacement_ratio(s.dist(S(x), S(y)), den);
    });

    ContractionReport report;
    report.terms = terms;
    report.power = power;
    report.minimal_q = q;
    report.witness = witness;
    report.contractive = q < 1.0;
    return report;
}

/// The four preset conditions at k = 1, in lattice order: banach, kannan,
/// quasi, generalized.
inline std::vector<ContractionReport> classify_all(const FiniteMetricSpace& s, const SelfMap& T) {
    return {minimal_q(s, T, TermSet::banach()), minimal_q(s, T, TermSet::kannan()),
            minimal_q(s, T, TermSet::quasi()), minimal_q(s, T, TermSet::generalized())};
}

/// Direct for-all-pairs check of d(T^k x, T^k y) <= q * comparison_max at a
/// given q. Serves as the independent oracle against minimal_q. Returns the
/// first violating ordered pair in row-major order when the check fails.
struct FeasibilityResult {
    bool feasible = true;
    std::optional<std::pair<Index, Index>> violation;
};

inline FeasibilityResult feasibility_check(const FiniteMetricSpace& s, const SelfMap& T,
                                           const TermSet& terms, Index power, double q) {
    detail::check_map(s, T, "feasibility_check");
    if (power < 1) throw std::invalid_argument("feasibility_check: power must be >= 1");
    if (q < 0.0) throw std::invalid_argument("feasibility_check: q must be nonnegative");
    const SelfMap S = compose_power(T, power);
    for (Index x = 0; x < s.size(); ++x)
        for (Index y = 0; y < s.size(); ++y) {
            if (x == y) continue;
            const double lhs = s.dist(S(x), S(y));
            const double rhs = q * comparison_max(s, S, terms, x, y);
            if (lhs > rhs) return {false, std::make_pair(x, y)};
        }
    return {};
}

}  // namespace quasifix
