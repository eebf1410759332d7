#include "phg_index.hpp"

#include <algorithm>
#include <sstream>

namespace acclab {

int compare_at(const Affine& x, const Affine& y, int n) {
    Rational vx = x.at(n), vy = y.at(n);
    if (vx < vy) return -1;
    if (vy < vx) return 1;
    return 0;
}

IndexSet::IndexSet(std::vector<IndexTerm> terms, int n, std::string name)
    : terms_(std::move(terms)), n_(n), name_(std::move(name)) {
    for (const auto& t : terms_)
        if (t.p < 0) throw IndexError("index term with negative log power");
    canonicalize();
}

IndexSet IndexSet::infinite(int n) {
    IndexSet e;
    e.n_ = n;
    e.infinite_ = true;
    return e;
}

IndexSet IndexSet::single(Affine alpha, int p, int n) { return IndexSet({{alpha, p}}, n); }

void IndexSet::canonicalize() {
    if (infinite_) {
        terms_.clear();
        return;
    }
    const int n = n_;
    std::sort(terms_.begin(), terms_.end(), [n](const IndexTerm& x, const IndexTerm& y) {
        int c = compare_at(x.alpha, y.alpha, n);
        if (c != 0) return c < 0;
        if (x.p != y.p) return x.p > y.p;
        return symbolic_less(x.alpha, y.alpha);
    });
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
    std::vector<IndexTerm> kept;
    for (const auto& t : terms_) {
        bool dominated = false;
        for (const auto& s : terms_) {
            if (s.p != t.p || s == t) continue;
            Affine d = t.alpha - s.alpha;
            if (d.is_constant() && d.a.denominator() == 1 && d.a > 0) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(t);
    }
    terms_ = std::move(kept);
}

IndexSet canonical(const IndexSet& e) {
    IndexSet c = e;
    c.canonicalize();
    return c;
}

IndexTerm IndexSet::leading() const {
    if (infinite_) throw IndexError("leading order of an infinite-order set is undefined");
    if (terms_.empty()) throw IndexError("empty index set: use the infinite-order sentinel instead");
    return terms_.front();
}

double IndexSet::leading_value() const { return leading().alpha.value(n_); }

bool IndexSet::contains(const IndexTerm& t) const {
    if (infinite_) return false;
    for (const auto& s : terms_) {
        if (s.p != t.p) continue;
        Affine d = t.alpha - s.alpha;
        if (d.is_constant() && d.a.denominator() == 1 && d.a >= 0) return true;
    }
    return false;
}

std::string IndexSet::str() const {
    if (infinite_) return "inf";
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << ", ";
        os << "(" << terms_[i].alpha.str() << "," << terms_[i].p << ")";
    }
    os << "}";
    return os.str();
}

bool operator==(const IndexSet& x, const IndexSet& y) {
    if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
    return x.n_ == y.n_ && x.terms_ == y.terms_;
}

static void check_dims(const IndexSet& e, const IndexSet& f) {
    if (e.dim() != f.dim()) throw IndexError("index sets configured with different dimensions");
}

IndexSet indexset_sum(const IndexSet& e, const IndexSet& f) {
    check_dims(e, f);
    if (e.is_infinite() || f.is_infinite()) return IndexSet::infinite(e.dim());
    std::vector<IndexTerm> out;
    out.reserve(e.terms().size() * f.terms().size());
    for (const auto& a : e.terms())
        for (const auto& b : f.terms()) out.push_back({a.alpha + b.alpha, a.p + b.p});
    return IndexSet(std::move(out), e.dim());
}

IndexSet indexset_shift(const IndexSet& e, const Affine& c) {
    if (e.is_infinite()) return e;
    std::vector<IndexTerm> out = e.terms();
    for (auto& t : out) t.alpha += c;
    return IndexSet(std::move(out), e.dim(), e.name());
}

IndexSet indexset_union(const IndexSet& e, const IndexSet& f) {
    check_dims(e, f);
    if (e.is_infinite()) return f;
    if (f.is_infinite()) return e;
    std::vector<IndexTerm> out = e.terms();
    out.insert(out.end(), f.terms().begin(), f.terms().end());
    return IndexSet(std::move(out), e.dim());
}

IndexTerm leading_order(const IndexSet& e) { return e.leading(); }

nlohmann::json indexset_to_json(const IndexSet& e) {
    if (e.is_infinite()) return "inf";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : e.terms()) {
        nlohmann::json row = {t.alpha.a.numerator(), t.alpha.a.denominator(), t.p};
        if (!t.alpha.is_constant()) {
            row.push_back(t.alpha.b.numerator());
            row.push_back(t.alpha.b.denominator());
        }
        arr.push_back(row);
    }
    return arr;
}

IndexSet indexset_from_json(const nlohmann::json& j, int n) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return IndexSet::infinite(n);
        throw IndexError("index set string must be \"inf\"");
    }
    if (!j.is_array()) throw IndexError("index set must be an array of [num, den, p] triples or \"inf\"");
    std::vector<IndexTerm> terms;
    for (const auto& row : j) {
        if (!row.is_array() || (row.size() != 3 && row.size() != 5))
            throw IndexError("index term must be [num, den, p] or [num, den, p, n_num, n_den]");
        auto den = row[1].get<std::int64_t>();
        if (den == 0) throw IndexError("zero denominator in index term");
        Affine alpha(Rational(row[0].get<std::int64_t>(), den));
        if (row.size() == 5) {
            auto bden = row[4].get<std::int64_t>();
            if (bden == 0) throw IndexError("zero denominator in index term");
            alpha.b = Rational(row[3].get<std::int64_t>(), bden);
        }
        terms.push_back({alpha, row[2].get<int>()});
    }
    if (terms.empty()) throw IndexError("empty index set: use \"inf\" for infinite-order vanishing");
    return IndexSet(std::move(terms), n);
}

} // namespace acclab
