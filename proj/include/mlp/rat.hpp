#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace mlp {

// Exact rational. Values whose numerator and denominator fit in int64 are kept
// inline; anything larger lives in an mpq_class. The representation is
// canonical, so two equal values always share a representation.
class Rat {
public:
    Rat() = default;
    Rat(int v) : n_(v) {}
    Rat(long v) : n_(v) { if (v == INT64_MIN) set_big(mpq_class(mpz_class(v))); }
    Rat(long long v) : Rat(static_cast<long>(v)) {}
    Rat(unsigned v) : n_(v) {}
    Rat(int64_t num, int64_t den);
    explicit Rat(const mpq_class& q) { assign(q); }
    explicit Rat(const mpz_class& z) { assign(mpq_class(z)); }

    Rat(const Rat& o) : n_(o.n_), d_(o.d_) {
        if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Rat(Rat&&) noexcept = default;
    Rat& operator=(const Rat& o) {
        if (this != &o) {
            n_ = o.n_;
            d_ = o.d_;
            if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
            else big_.reset();
        }
        return *this;
    }
    Rat& operator=(Rat&&) noexcept = default;

    static Rat parse(std::string_view s);          // accepts any "p/q", normalizes
    static Rat parse_canonical(std::string_view s); // rejects non-canonical text
    std::string str() const;

    bool is_small() const { return !big_; }
    bool is_zero() const { return !big_ && n_ == 0; }
    bool is_integer() const { return big_ ? big_->get_den() == 1 : d_ == 1; }
    int sign() const { return big_ ? sgn(*big_) : (n_ > 0) - (n_ < 0); }
    mpz_class num() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(n_)); }
    mpz_class den() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(d_)); }
    mpq_class to_mpq() const;
    double to_double() const;

    Rat operator-() const;
    Rat& operator+=(const Rat& o);
    Rat& operator-=(const Rat& o);
    Rat& operator*=(const Rat& o);
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) {
        if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
        if (a.big_ && b.big_) return *a.big_ == *b.big_;
        return false;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        int c = compare(a, b);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    static int compare(const Rat& a, const Rat& b);

    friend std::ostream& operator<<(std::ostream& os, const Rat& r);

private:
    void assign(const mpq_class& q);
    void set_big(mpq_class q) { big_ = std::make_unique<mpq_class>(std::move(q)); }
    void from_i128(__int128 num, __int128 den);

    int64_t n_ = 0;
    int64_t d_ = 1;
    std::unique_ptr<mpq_class> big_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
inline Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }
mpz_class floor(const Rat& r);
Rat pow2(long e);  // 2^e for any integer e

// Binary encoding size of a rational: 1 + bits(|p|) + bits(q), each term at least 1.
long encoding_size(const Rat& r);

}  // namespace mlp
