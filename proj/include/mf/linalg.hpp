#pragma once

#include "mf/rat.hpp"

#include <iosfwd>
#include <set>
#include <vector>

namespace mf {

// Sparse vector over Q: entries sorted by index, no stored zeros.
struct SparseVec {
    std::vector<std::pair<int, Rat>> e;

    bool zero() const { return e.empty(); }
    int lead() const { return e.empty() ? -1 : e.front().first; }
    const Rat* at(int i) const;
    void set(int i, Rat v);
    SparseVec& axpy(const Rat& c, const SparseVec& o); // *this += c * o
    SparseVec& scale(const Rat& c);
    SparseVec scaled(const Rat& c) const;
    bool operator==(const SparseVec&) const = default;

    static SparseVec unit(int i) {
        SparseVec v;
        v.e.emplace_back(i, Rat(1));
        return v;
    }
};

// Column-major exact matrix block.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<SparseVec> col;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), col(c) {}
    bool zero() const;
    static Mat identity(int n);
};

SparseVec apply(const Mat& m, const SparseVec& x);
Mat compose(const Mat& a, const Mat& b); // a * b
Mat transpose(const Mat& m);

// Mutually reduced column echelon family: distinct lead indices, lead
// coefficient 1, every vector zero at the others' leads. The reduced basis of
// a subspace in this form is unique, which is what makes downstream
// representative choices canonical.
struct Echelon {
    std::vector<SparseVec> vecs; // kept sorted by lead index
    std::vector<int> leads;      // parallel to vecs

    size_t size() const { return vecs.size(); }
    bool contains_lead(int i) const;

    // Subtracts multiples of basis vectors to clear v's coordinates at all
    // lead indices; records the multiplier used per basis position in coeffs
    // (if given). Returns the residue.
    SparseVec reduce(SparseVec v, std::vector<Rat>* coeffs = nullptr) const;

    // Reduces, and if the residue is nonzero inserts it (normalized, with
    // back-elimination so the family stays mutually reduced). Returns the
    // inserted position or -1 if v reduced to zero.
    int insert(SparseVec v);
};

// Result of echelonizing the columns of a map V_src -> V_tgt.
struct ColSpace {
    Echelon image;                     // reduced echelon basis of the column span
    std::vector<SparseVec> preimage;   // preimage[k]: source vector mapping to image.vecs[k]
    std::vector<SparseVec> kernel;     // reduced echelon basis of the right kernel
    int rank() const { return int(image.size()); }
};

ColSpace column_space(const Mat& m);

// Reduced row echelon form surface: deterministic pivot set, reduced matrix,
// canonical (pivot-ordered, re-echelonized) kernel basis.
struct RrefResult {
    int rank = 0;
    std::set<int> pivots;             // pivot column indices
    Mat reduced;                      // RREF of the input
    std::vector<SparseVec> kernel;    // right kernel, reduced echelon form
};

RrefResult rref(const Mat& m);

// Debug dump: header "w d rows cols", then "row col num/den" per entry.
void dump_block(std::ostream& os, int w, int d, const Mat& m);

} // namespace mf
