#pragma once

#include <Eigen/Core>

#include "mlp/rat.hpp"

namespace Eigen {
template <>
struct NumTraits<mlp::Rat> : GenericNumTraits<mlp::Rat> {
    typedef mlp::Rat Real;
    typedef mlp::Rat NonInteger;
    typedef mlp::Rat Nested;
    typedef mlp::Rat Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 3,
        MulCost = 3
    };
    static inline mlp::Rat epsilon() { return 0; }
    static inline mlp::Rat dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};
}  // namespace Eigen

namespace mlp {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Mat = MatrixX<Rat>;
using Vec = VectorX<Rat>;

inline Vec zeros(Eigen::Index n) { return Vec::Constant(n, Rat(0)); }
inline Mat zeros(Eigen::Index r, Eigen::Index c) { return Mat::Constant(r, c, Rat(0)); }

template <typename DA, typename DB>
Rat dot(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    Rat s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!a(i).is_zero() && !b(i).is_zero()) s += a(i) * b(i);
    return s;
}

inline Rat norm_inf(const Vec& v) {
    Rat m = 0;
    for (const auto& x : v) m = max(m, abs(x));
    return m;
}

inline Rat norm_1(const Vec& v) {
    Rat s = 0;
    for (const auto& x : v) s += abs(x);
    return s;
}

}  // namespace mlp
