#include "mlp/rat.hpp"

#include <cctype>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mlp {

namespace {

constexpr int64_t kMin = INT64_MIN;

bool fits(__int128 v) { return v > static_cast<__int128>(kMin) && v <= static_cast<__int128>(INT64_MAX); }

unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
        unsigned __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

mpz_class mpz_from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(u >> 64));
    mpz_class r = (hi << 64) + mpz_class(static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFull));
    return neg ? mpz_class(-r) : r;
}

bool fits_small(const mpz_class& z) { return mpz_fits_slong_p(z.get_mpz_t()) && z != kMin; }

}  // namespace

Rat::Rat(int64_t num, int64_t den) {
    if (den == 0) throw std::domain_error("zero denominator");
    from_i128(num, den);
}

void Rat::from_i128(__int128 num, __int128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (fits(num) && fits(den)) {
        int64_t a = static_cast<int64_t>(num), b = static_cast<int64_t>(den);
        int64_t g = std::gcd(a < 0 ? -a : a, b);
        n_ = a / g;
        d_ = b / g;
        big_.reset();
        return;
    }
    unsigned __int128 g = gcd128(num < 0 ? -static_cast<unsigned __int128>(num) : num, den);
    if (g > 1) {
        num /= static_cast<__int128>(g);
        den /= static_cast<__int128>(g);
    }
    if (fits(num) && fits(den)) {
        n_ = static_cast<int64_t>(num);
        d_ = static_cast<int64_t>(den);
        big_.reset();
    } else {
        mpq_class q(mpz_from_i128(num), mpz_from_i128(den));
        set_big(std::move(q));
    }
}

void Rat::assign(const mpq_class& q0) {
    mpq_class q = q0;
    q.canonicalize();
    if (fits_small(q.get_num()) && fits_small(q.get_den())) {
        n_ = q.get_num().get_si();
        d_ = q.get_den().get_si();
        big_.reset();
    } else {
        set_big(std::move(q));
    }
}

mpq_class Rat::to_mpq() const {
    if (big_) return *big_;
    return mpq_class(mpz_class(static_cast<long>(n_)), mpz_class(static_cast<long>(d_)));
}

double Rat::to_double() const { return big_ ? big_->get_d() : static_cast<double>(n_) / static_cast<double>(d_); }

Rat Rat::operator-() const {
    Rat r;
    if (big_) r.assign(-*big_);
    else {
        r.n_ = -n_;
        r.d_ = d_;
    }
    return r;
}

Rat& Rat::operator+=(const Rat& o) {
    if (!big_ && !o.big_) {
        if (d_ == 1 && o.d_ == 1) {
            int64_t s;
            if (!__builtin_add_overflow(n_, o.n_, &s) && s != kMin) {
                n_ = s;
                return *this;
            }
        }
        int64_t g = std::gcd(d_, o.d_);
        __int128 da = d_ / g, db = o.d_ / g;
        __int128 t = static_cast<__int128>(n_) * db + static_cast<__int128>(o.n_) * da;
        __int128 den = da * static_cast<__int128>(o.d_);
        from_i128(t, den);
        return *this;
    }
    assign(to_mpq() + o.to_mpq());
    return *this;
}

Rat& Rat::operator-=(const Rat& o) {
    if (!big_ && !o.big_) {
        if (d_ == 1 && o.d_ == 1) {
            int64_t s;
            if (!__builtin_sub_overflow(n_, o.n_, &s) && s != kMin) {
                n_ = s;
                return *this;
            }
        }
        int64_t g = std::gcd(d_, o.d_);
        __int128 da = d_ / g, db = o.d_ / g;
        __int128 t = static_cast<__int128>(n_) * db - static_cast<__int128>(o.n_) * da;
        __int128 den = da * static_cast<__int128>(o.d_);
        from_i128(t, den);
        return *this;
    }
    assign(to_mpq() - o.to_mpq());
    return *this;
}

Rat& Rat::operator*=(const Rat& o) {
    if (!big_ && !o.big_) {
        if (n_ == 0 || o.n_ == 0) {
            n_ = 0;
            d_ = 1;
            return *this;
        }
        int64_t g1 = std::gcd(n_ < 0 ? -n_ : n_, o.d_);
        int64_t g2 = std::gcd(o.n_ < 0 ? -o.n_ : o.n_, d_);
        int64_t a = n_ / g1, b = o.n_ / g2, c = d_ / g2, d = o.d_ / g1;
        int64_t num, den;
        if (!__builtin_mul_overflow(a, b, &num) && !__builtin_mul_overflow(c, d, &den) && num != kMin) {
            n_ = num;
            d_ = den;
            return *this;
        }
        from_i128(static_cast<__int128>(a) * b, static_cast<__int128>(c) * d);
        return *this;
    }
    assign(to_mpq() * o.to_mpq());
    return *this;
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    if (!big_ && !o.big_) {
        Rat inv;
        inv.n_ = o.n_ < 0 ? -o.d_ : o.d_;
        inv.d_ = o.n_ < 0 ? -o.n_ : o.n_;
        return *this *= inv;
    }
    assign(to_mpq() / o.to_mpq());
    return *this;
}

int Rat::compare(const Rat& a, const Rat& b) {
    if (!a.big_ && !b.big_) {
        if (a.d_ == b.d_) return (a.n_ > b.n_) - (a.n_ < b.n_);
        __int128 l = static_cast<__int128>(a.n_) * b.d_;
        __int128 r = static_cast<__int128>(b.n_) * a.d_;
        return (l > r) - (l < r);
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return (c > 0) - (c < 0);
}

std::string Rat::str() const {
    if (big_) return big_->get_str();
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

namespace {

// Parses an optionally signed decimal integer; canonical means no '+' sign,
// no leading zeros and no "-0".
bool parse_int(std::string_view s, mpz_class& out, bool canonical, bool allow_sign) {
    if (s.empty()) return false;
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        if (!allow_sign || (canonical && s[0] == '+')) return false;
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) return false;
    for (size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    std::string_view digits = s.substr(i);
    if (canonical && digits.size() > 1 && digits[0] == '0') return false;
    out = mpz_class(std::string(digits));
    if (canonical && neg && out == 0) return false;
    if (neg) out = -out;
    return true;
}

Rat parse_impl(std::string_view s, bool canonical) {
    auto slash = s.find('/');
    mpz_class p, q(1);
    if (!parse_int(s.substr(0, slash), p, canonical, true))
        throw std::invalid_argument("bad rational '" + std::string(s) + "'");
    if (slash != std::string_view::npos) {
        if (!parse_int(s.substr(slash + 1), q, canonical, !canonical) || q == 0)
            throw std::invalid_argument("bad rational '" + std::string(s) + "'");
        if (canonical) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
            if (q == 1 || g != 1)
                throw std::invalid_argument("non-canonical rational '" + std::string(s) + "'");
        }
    }
    return Rat(mpq_class(p, q));
}

long bits(const mpz_class& z) {
    if (z == 0) return 0;
    return static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

}  // namespace

Rat Rat::parse(std::string_view s) { return parse_impl(s, false); }
Rat Rat::parse_canonical(std::string_view s) { return parse_impl(s, true); }

mpz_class floor(const Rat& r) {
    mpz_class out;
    mpq_class q = r.to_mpq();
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Rat pow2(long e) {
    mpz_class p = 1;
    p <<= static_cast<mp_bitcnt_t>(e < 0 ? -e : e);
    return e < 0 ? Rat(mpq_class(mpz_class(1), p)) : Rat(p);
}

long encoding_size(const Rat& r) {
    mpz_class p = abs(r.num());
    long bp = bits(p), bq = bits(r.den());
    return 1 + (bp < 1 ? 1 : bp) + (bq < 1 ? 1 : bq);
}

}  // namespace mlp
