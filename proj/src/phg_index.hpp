#pragma once

#include "affine.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

struct IndexTerm {
    Affine alpha;
    int p = 0;

    friend bool operator==(const IndexTerm& x, const IndexTerm& y) { return x.alpha == y.alpha && x.p == y.p; }
};

class IndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Index set generated by finitely many base terms with integer step 1.
// The infinite sentinel models vanishing to infinite order at a face.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::vector<IndexTerm> terms, int n = 3, std::string name = {});

    static IndexSet infinite(int n = 3);
    static IndexSet single(Affine alpha, int p = 0, int n = 3);

    bool is_infinite() const { return infinite_; }
    bool empty() const { return !infinite_ && terms_.empty(); }
    int dim() const { return n_; }
    const std::vector<IndexTerm>& terms() const { return terms_; }
    const std::string& name() const { return name_; }
    void set_name(std::string s) { name_ = std::move(s); }

    // Leading term at the configured dimension. Throws for empty and infinite sets.
    IndexTerm leading() const;
    double leading_value() const;

    bool contains(const IndexTerm& t) const;

    std::string str() const;

    friend bool operator==(const IndexSet& x, const IndexSet& y);
    friend bool operator!=(const IndexSet& x, const IndexSet& y) { return !(x == y); }

private:
    std::vector<IndexTerm> terms_;
    int n_ = 3;
    bool infinite_ = false;
    std::string name_;

    void canonicalize();
    friend IndexSet canonical(const IndexSet& e);
};

IndexSet canonical(const IndexSet& e);
IndexSet indexset_sum(const IndexSet& e, const IndexSet& f);
IndexSet indexset_shift(const IndexSet& e, const Affine& c);
IndexSet indexset_union(const IndexSet& e, const IndexSet& f);
IndexTerm leading_order(const IndexSet& e);

// Compare two affine exponents at the configured dimension.
int compare_at(const Affine& x, const Affine& y, int n);

nlohmann::json indexset_to_json(const IndexSet& e);
IndexSet indexset_from_json(const nlohmann::json& j, int n = 3);

} // namespace acclab
