#include "mlp/linalg.hpp"

#include <vector>

namespace mlp {

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(Mat& a, Eigen::Index ncols) {
    std::vector<int> piv;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < ncols && r < a.rows(); ++c) {
        Eigen::Index p = r;
        while (p < a.rows() && a(p, c).is_zero()) ++p;
        if (p == a.rows()) continue;
        if (p != r) a.row(p).swap(a.row(r));
        Rat inv = Rat(1) / a(r, c);
        for (Eigen::Index j = c; j < a.cols(); ++j)
            if (!a(r, j).is_zero()) a(r, j) *= inv;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == r || a(i, c).is_zero()) continue;
            Rat f = a(i, c);
            for (Eigen::Index j = c; j < a.cols(); ++j)
                if (!a(r, j).is_zero()) a(i, j) -= f * a(r, j);
        }
        piv.push_back(static_cast<int>(c));
        ++r;
    }
    return piv;
}

}  // namespace

int rank(const Mat& a) {
    Mat w = a;
    return static_cast<int>(rref(w, w.cols()).size());
}

std::optional<Mat> inverse(const Mat& a) {
    if (a.rows() != a.cols()) return std::nullopt;
    Eigen::Index n = a.rows();
    Mat w(n, 2 * n);
    w.leftCols(n) = a;
    w.rightCols(n) = Mat::Identity(n, n);
    if (static_cast<Eigen::Index>(rref(w, n).size()) != n) return std::nullopt;
    return Mat(w.rightCols(n));
}

std::optional<Vec> solve_unique(const Mat& a, const Vec& c) {
    Eigen::Index n = a.cols();
    Mat w(a.rows(), n + 1);
    w.leftCols(n) = a;
    w.col(n) = c;
    auto piv = rref(w, n);
    if (static_cast<Eigen::Index>(piv.size()) != n) return std::nullopt;
    for (Eigen::Index i = n; i < w.rows(); ++i)
        if (!w(i, n).is_zero()) return std::nullopt;
    return Vec(w.col(n).head(n));
}

}  // namespace mlp
