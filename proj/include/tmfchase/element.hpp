#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmfchase {

using Coeff = std::int64_t;

// Order of a cyclic summand: 2^k with k >= 1, or infinite (order() == 0).
class SummandOrder {
public:
    SummandOrder() : value_(0) {}
    static SummandOrder infinite() { return SummandOrder(); }
    static SummandOrder finite(std::uint64_t n);

    bool is_infinite() const { return value_ == 0; }
    std::uint64_t value() const { return value_; }  // 0 means infinite

    Coeff reduce(Coeff c) const
    {
        if (value_ == 0)
            return c;
        Coeff m = static_cast<Coeff>(value_);
        Coeff r = c % m;
        return r < 0 ? r + m : r;
    }

    bool operator==(const SummandOrder&) const = default;

private:
    std::uint64_t value_;
};

struct Term {
    std::string gen;
    Coeff coeff = 0;

    auto operator<=>(const Term&) const = default;
};

// Formal integer combination of same-stem generators of one spectrum,
// coefficients reduced modulo the summand orders by the owning chart.
// delta8_power tracks formal translation by the 192-periodic operator.
class Element {
public:
    Element() = default;
    Element(std::string spectrum, int stem) : spectrum_(std::move(spectrum)), stem_(stem) {}

    const std::string& spectrum() const { return spectrum_; }
    int base_stem() const { return stem_; }
    int stem() const { return stem_ + 192 * delta8_power_; }
    int delta8_power() const { return delta8_power_; }
    void set_delta8_power(int k) { delta8_power_ = k; }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Coeff coeff_of(const std::string& gen) const;
    // Inserts/replaces a term keeping terms sorted by generator name.
    void set_coeff(const std::string& gen, Coeff c);

    bool operator==(const Element& other) const = default;
    bool operator<(const Element& other) const;

    std::string to_string() const;

private:
    std::string spectrum_;
    int stem_ = 0;
    int delta8_power_ = 0;
    std::vector<Term> terms_;  // sorted by gen, all coeffs nonzero
};

std::string format_terms(const std::vector<Term>& terms);

}  // namespace tmfchase
