#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mlp/types.hpp"

namespace mlp {

// Raw block data of a k-level instance. Levels are 1-based in every accessor;
// the vectors below are indexed from 0.
struct MlpData {
    int k = 0;
    std::vector<int> n;                  // variables per level
    std::vector<int> m;                  // rows per level
    std::vector<std::vector<Mat>> A;     // A[l][i] is m_l x n_i
    std::vector<Vec> b;                  // b[l] has length m_l
    std::vector<std::vector<Vec>> c;     // c[l][i] has length n_i, zero for i < l

    MlpData() = default;
    MlpData(int k, std::vector<int> n, std::vector<int> m);  // all-zero blocks
};

// Immutable, validated instance. Copies share the underlying data.
class MlpInstance {
public:
    MlpInstance() : MlpInstance(MlpData(1, {0}, {0})) {}
    explicit MlpInstance(MlpData d);

    const MlpData& data() const { return *d_; }
    int k() const { return d_->k; }
    int n(int l) const { return d_->n[l - 1]; }
    int m(int l) const { return d_->m[l - 1]; }
    int n_total() const { return offsets_.back(); }
    int offset(int l) const { return offsets_[l - 1]; }  // first global index of level l
    int level_of(int var) const;
    const Mat& A(int l, int i) const { return d_->A[l - 1][i - 1]; }
    const Vec& b(int l) const { return d_->b[l - 1]; }
    const Vec& c(int l, int i) const { return d_->c[l - 1][i - 1]; }

    // Row r of level l and objective of level l, both over all n_total variables.
    Vec row(int l, int r) const;
    Vec objective(int l) const;

private:
    std::shared_ptr<const MlpData> d_;
    std::vector<int> offsets_;
};

struct Point {
    std::vector<Vec> x;  // x[l-1] holds level l's variables

    static Point zero(const MlpInstance& inst);
    static Point from_flat(const MlpInstance& inst, const Vec& z);
    Vec flat() const;
};

struct ConditionReport {
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    std::vector<std::string> violations;

    std::string summary() const;  // "C1=yes C2=yes C3=no"
};

long encoding_size(const Vec& v);
long encoding_size(const Mat& a);
long encoding_size(const MlpInstance& inst);

ConditionReport check_conditions(const MlpInstance& inst);
Vec residuals_at(const MlpInstance& inst, const Point& p, int level);
Rat objective_at(const MlpInstance& inst, const Point& p, int level);
bool satisfies_rows(const MlpInstance& inst, const Point& p);  // every level's rows hold

// MLP1 text format.
MlpInstance parse_mlp1(const std::string& text);
std::string format_mlp1(const MlpInstance& inst);
Point parse_point(const MlpInstance& inst, const std::string& text);
std::string format_point(const Point& p);

// Named variables of a constructed instance.
struct VarInfo {
    std::string name;   // e.g. "s1[2]"
    std::string role;   // e.g. "s1"
    int level = 0;
    int local = 0;
    int global = 0;
};

struct Varmap {
    std::vector<VarInfo> vars;  // ordered by global index

    int at(const std::string& name) const;                  // global index, throws if absent
    std::vector<int> role(const std::string& role) const;   // globals in creation order
    bool has(const std::string& name) const;
    std::string to_json(const std::string& gadget, const std::string& source) const;
};

using Term = std::pair<int, Rat>;
using Terms = std::vector<Term>;

// Incremental construction by variable handle. Handles are returned in
// creation order; build() lays variables out level by level.
class Builder {
public:
    explicit Builder(int k);

    int var(int level, const std::string& role, const std::string& name = "");
    void ge(int level, const Terms& lhs, const Rat& rhs);  // lhs >= rhs
    void le(int level, const Terms& lhs, const Rat& rhs);  // lhs <= rhs
    void eq(int level, const Terms& lhs, const Rat& rhs);  // as two rows
    void box(int level, int v);                             // 0 <= v <= 1 as literal rows
    void obj(int level, int v, const Rat& coef);
    int level_of(int v) const { return vars_[v].level; }
    int k() const { return k_; }
    int size() const { return static_cast<int>(vars_.size()); }

    // Adds a new bottom level below all existing ones.
    void push_level();

    std::pair<MlpInstance, Varmap> build() const;

    // Global index of a handle in the instance produced by build().
    std::vector<int> layout() const;

private:
    struct V {
        int level;
        std::string role, name;
    };
    struct R {
        int level;
        Terms lhs;
        Rat rhs;
    };
    int k_;
    std::vector<V> vars_;
    std::vector<R> rows_;
    std::vector<std::map<int, Rat>> obj_;
    std::map<std::string, int> role_count_;
};

// Builder seeded with an existing instance; handle i is global index i.
Builder builder_from(const MlpInstance& inst, const Varmap* vm = nullptr);

}  // namespace mlp
