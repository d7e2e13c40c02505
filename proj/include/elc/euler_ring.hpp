#pragma once

// Additive group of the Euler ring U(T^l), truncated to the strata that the
// sphere formulas populate: the full torus and its codimension-one subgroups
// H_m = { e^{i phi} : (m, phi) in 2 pi Z }. Anything of codimension >= 2 is
// tracked only as a flag.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace elc {

using Weight = std::vector<std::int64_t>;

/// Returns m or -m, whichever has its first nonzero entry positive.
/// Throws elc::Error("zero_weight") for the zero vector.
Weight normalize_weight(Weight m);

bool is_normalized(const Weight& m);

/// Overflow-checked integer arithmetic; throws elc::Error("overflow").
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

/// Basis label of U(T^l): the full torus (empty weight) or H_m.
struct SubgroupLabel {
    Weight weight;

    static SubgroupLabel full() { return {}; }
    static SubgroupLabel codim1(Weight m) { return {normalize_weight(std::move(m))}; }

    bool is_full() const noexcept { return weight.empty(); }

    friend auto operator<=>(const SubgroupLabel&, const SubgroupLabel&) = default;
};

class EulerElem {
public:
    using Terms = std::map<SubgroupLabel, std::int64_t>;

    explicit EulerElem(int rank = 0);

    /// chi(G/G^+), the unity of the ring.
    static EulerElem unit(int rank);

    int rank() const noexcept { return rank_; }
    const Terms& terms() const noexcept { return terms_; }
    bool lower_unknown() const noexcept { return lower_unknown_; }
    bool is_zero() const noexcept { return terms_.empty() && !lower_unknown_; }

    std::int64_t coefficient(const SubgroupLabel& label) const;

    /// Adds c * label, pruning a coefficient that cancels to zero.
    void add_term(const SubgroupLabel& label, std::int64_t c);
    void set_lower_unknown(bool flag) noexcept { lower_unknown_ = flag; }

    EulerElem& operator+=(const EulerElem& other);

    friend EulerElem operator+(EulerElem a, const EulerElem& b) { return a += b; }
    friend EulerElem operator-(const EulerElem& a);
    friend EulerElem operator-(const EulerElem& a, const EulerElem& b) { return a + (-b); }
    friend bool operator==(const EulerElem&, const EulerElem&) = default;

private:
    int rank_;
    Terms terms_;
    bool lower_unknown_ = false;
};

inline EulerElem negate(const EulerElem& a) { return -a; }
inline EulerElem add(const EulerElem& a, const EulerElem& b) { return a + b; }
inline EulerElem unit(int rank) { return EulerElem::unit(rank); }

/// Comparison of two truncated elements. Differences on the known strata are
/// decisive; agreement there is only conclusive when neither side carries an
/// unknown lower-stratum part.
enum class Comparison { Distinct, Equal, UndecidableAtTruncation };

Comparison compare(const EulerElem& a, const EulerElem& b);
std::string to_string(Comparison c);

/// Canonical text, e.g. "1 − 2·[1,0] + 1·[1,1] + O(codim≥2)"; "0" for zero.
std::string to_string(const EulerElem& a);

/// Inverse of to_string. Also accepts ASCII '-', '*' and ">=". `rank` is used
/// when the text carries no weight vector; a weight of another length is an
/// error.
EulerElem parse_euler_elem(std::string_view text, int rank);

std::string weight_to_string(const Weight& m);

}  // namespace elc
