#include "elc/euler_ring.hpp"

#include <algorithm>

#include "elc/errors.hpp"
#include "text_cursor.hpp"

namespace elc {

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error("overflow", "integer overflow in addition");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("overflow", "integer overflow in multiplication");
    return r;
}

bool is_normalized(const Weight& m)
{
    auto it = std::find_if(m.begin(), m.end(), [](std::int64_t x) { return x != 0; });
    return it != m.end() && *it > 0;
}

Weight normalize_weight(Weight m)
{
    auto it = std::find_if(m.begin(), m.end(), [](std::int64_t x) { return x != 0; });
    if (it == m.end()) throw Error("zero_weight", "zero weight is not a codimension-one label");
    if (*it < 0) {
        for (auto& x : m) x = checked_mul(x, -1);
    }
    return m;
}

EulerElem::EulerElem(int rank) : rank_(rank)
{
    if (rank < 0) throw Error("invalid_rank", "torus rank must be nonnegative");
}

EulerElem EulerElem::unit(int rank)
{
    EulerElem e(rank);
    e.add_term(SubgroupLabel::full(), 1);
    return e;
}

std::int64_t EulerElem::coefficient(const SubgroupLabel& label) const
{
    auto it = terms_.find(label);
    return it == terms_.end() ? 0 : it->second;
}

void EulerElem::add_term(const SubgroupLabel& label, std::int64_t c)
{
    if (!label.is_full()) {
        if (label.weight.size() != static_cast<std::size_t>(rank_))
            throw Error("rank_mismatch", "weight length differs from torus rank");
        if (!is_normalized(label.weight))
            throw Error("unnormalized_weight", "codimension-one label must be normalized");
    }
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(label, c);
    if (!inserted) {
        it->second = checked_add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

EulerElem& EulerElem::operator+=(const EulerElem& other)
{
    if (rank_ != other.rank_) throw Error("rank_mismatch", "cannot add elements of different torus rank");
    for (const auto& [label, c] : other.terms_) add_term(label, c);
    lower_unknown_ = lower_unknown_ || other.lower_unknown_;
    return *this;
}

EulerElem operator-(const EulerElem& a)
{
    EulerElem r(a.rank_);
    for (const auto& [label, c] : a.terms_) r.terms_.emplace(label, checked_mul(c, -1));
    r.lower_unknown_ = a.lower_unknown_;
    return r;
}

Comparison compare(const EulerElem& a, const EulerElem& b)
{
    if (a.rank() != b.rank()) throw Error("rank_mismatch", "cannot compare elements of different torus rank");
    if (a.terms() != b.terms()) return Comparison::Distinct;
    if (a.lower_unknown() || b.lower_unknown()) return Comparison::UndecidableAtTruncation;
    return Comparison::Equal;
}

std::string to_string(Comparison c)
{
    switch (c) {
    case Comparison::Distinct: return "Distinct";
    case Comparison::Equal: return "Equal";
    case Comparison::UndecidableAtTruncation: return "UndecidableAtTruncation";
    }
    return "?";
}

std::string weight_to_string(const Weight& m)
{
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(m[i]);
    }
    return s + "]";
}

std::string to_string(const EulerElem& a)
{
    std::string out;
    bool first = true;
    for (const auto& [label, c] : a.terms()) {
        std::string magnitude = (c < 0) ? std::to_string(c).substr(1) : std::to_string(c);
        if (first) {
            if (c < 0) out += detail::kMinus;
        } else {
            out += (c < 0) ? std::string(" ") + std::string(detail::kMinus) + " " : std::string(" + ");
        }
        out += magnitude;
        if (!label.is_full()) {
            out += detail::kDot;
            out += weight_to_string(label.weight);
        }
        first = false;
    }
    if (first) out = "0";
    if (a.lower_unknown()) {
        out += " + O(codim";
        out += detail::kGeq;
        out += "2)";
    }
    return out;
}

namespace {

bool accept_lower_marker(detail::TextCursor& cur)
{
    if (!cur.accept("O(")) return false;
    cur.expect("codim");
    if (!cur.accept(detail::kGeq)) cur.expect(">=");
    if (cur.integer() != 2) cur.fail("expected codim>=2 marker");
    cur.expect(")");
    return true;
}

}  // namespace

EulerElem parse_euler_elem(std::string_view text, int rank)
{
    detail::TextCursor cur(text, "Euler ring element");
    EulerElem out(rank);
    if (cur.done()) cur.fail("empty input");

    bool first = true;
    while (!cur.done()) {
        bool negative = false;
        if (!first) {
            if (cur.accept("+")) {
                negative = false;
            } else if (cur.accept_minus()) {
                negative = true;
            } else {
                cur.fail("expected '+' or minus between terms");
            }
        } else if (cur.accept_minus()) {
            negative = true;
        }
        first = false;

        if (accept_lower_marker(cur)) {
            if (negative) cur.fail("lower-stratum marker cannot be negated");
            out.set_lower_unknown(true);
            continue;
        }

        std::int64_t c = cur.integer();
        if (negative) c = -c;
        if (cur.accept_times()) {
            cur.expect("[");
            Weight m;
            do {
                m.push_back(cur.signed_integer());
            } while (cur.accept(","));
            cur.expect("]");
            if (static_cast<int>(m.size()) != rank) cur.fail("weight length differs from rank");
            if (!is_normalized(m)) cur.fail("weight is not normalized");
            out.add_term(SubgroupLabel{std::move(m)}, c);
        } else {
            out.add_term(SubgroupLabel::full(), c);
        }
    }
    return out;
}

}  // namespace elc
