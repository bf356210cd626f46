#include "tmfchase/element.hpp"

#include "tmfchase/error.hpp"

#include <algorithm>
#include <sstream>

namespace tmfchase {

SummandOrder SummandOrder::finite(std::uint64_t n)
{
    if (n < 2 || (n & (n - 1)) != 0)
        throw Error(ErrorCode::SchemaViolation,
                    "summand order must be a power of 2 (>= 2) or infinite, got " + std::to_string(n));
    SummandOrder o;
    o.value_ = n;
    return o;
}

Coeff Element::coeff_of(const std::string& gen) const
{
    auto it = std::lower_bound(terms_.begin(), terms_.end(), gen,
                               [](const Term& t, const std::string& g) { return t.gen < g; });
    if (it != terms_.end() && it->gen == gen)
        return it->coeff;
    return 0;
}

void Element::set_coeff(const std::string& gen, Coeff c)
{
    auto it = std::lower_bound(terms_.begin(), terms_.end(), gen,
                               [](const Term& t, const std::string& g) { return t.gen < g; });
    if (it != terms_.end() && it->gen == gen) {
        if (c == 0)
            terms_.erase(it);
        else
            it->coeff = c;
    } else if (c != 0) {
        terms_.insert(it, Term{gen, c});
    }
}

bool Element::operator<(const Element& other) const
{
    if (spectrum_ != other.spectrum_)
        return spectrum_ < other.spectrum_;
    if (stem() != other.stem())
        return stem() < other.stem();
    return terms_ < other.terms_;
}

std::string format_terms(const std::vector<Term>& terms)
{
    if (terms.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms) {
        if (!first)
            os << "+";
        first = false;
        if (t.coeff != 1)
            os << t.coeff << "*";
        os << t.gen;
    }
    return os.str();
}

std::string Element::to_string() const
{
    std::string s = format_terms(terms_);
    if (delta8_power_ != 0)
        s = (s == "0" ? s : "delta8^" + std::to_string(delta8_power_) + "*(" + s + ")");
    return s;
}

}  // namespace tmfchase
