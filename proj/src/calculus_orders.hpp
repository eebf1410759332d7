#pragma once

#include "corner_blowup.hpp"
#include "phg_index.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace acclab {

class CalculusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrabilityError : public CalculusError {
public:
    IntegrabilityError(const std::string& face, const std::string& order)
        : CalculusError("pushforward not integrable at " + face + " (order " + order + " is not > 0)"), face_(face) {}
    const std::string& face() const { return face_; }

private:
    std::string face_;
};

enum class Calculus { b, conic, sc, acc, smooth_eps };

const char* calculus_name(Calculus c);
Calculus calculus_from_name(const std::string& s);

// Face orders are the actual leading orders of the kernel at each face of the
// calculus' heat space, offsets included; the diagonal face carries -(n+3)/2 - k.
struct CalculusOrders {
    Calculus calculus = Calculus::b;
    int n = 3;
    Affine k;
    std::map<std::string, IndexSet> face_orders;
    // Coefficient calculi of an acc element at F_1010 (b) and F_0101 (conic).
    std::shared_ptr<const CalculusOrders> coeff_b;
    std::shared_ptr<const CalculusOrders> coeff_conic;
    bool conjectural = false;
    std::vector<std::string> notes;

    const IndexSet& at(const std::string& face) const;
};

bool operator==(const CalculusOrders& a, const CalculusOrders& b);

Affine diagonal_order(const Affine& k);

CalculusOrders make_b(const IndexSet& e110, Affine k, int n = 3);
CalculusOrders make_conic(const IndexSet& e100, const IndexSet& e010, const IndexSet& e112, Affine k, int n = 3);
CalculusOrders make_sc(const IndexSet& e110, const IndexSet& e220, Affine k, int n = 3);
CalculusOrders make_acc(const IndexSet& e1010, const IndexSet& e1001, const IndexSet& e0110, const IndexSet& e0101,
                        Affine k, int n = 3, std::shared_ptr<const CalculusOrders> coeff_b = nullptr,
                        std::shared_ptr<const CalculusOrders> coeff_conic = nullptr);

// Index sets relative to the normalizing offsets (-1/2 at F_110, -(n+2)/2 at F_220).
IndexSet b_index_110(const CalculusOrders& a);
IndexSet sc_index_110(const CalculusOrders& a);
IndexSet sc_index_220(const CalculusOrders& a);

CalculusOrders b_compose(const CalculusOrders& a, const CalculusOrders& b);

struct ConicViolation {
    std::string inequality;
    double lhs;
};
std::vector<ConicViolation> conic_preconditions(const CalculusOrders& a, const CalculusOrders& b);
CalculusOrders conic_compose(const CalculusOrders& a, const CalculusOrders& b);

// Closed form of the sc composition theorem.
CalculusOrders sc_compose(const CalculusOrders& a, const CalculusOrders& b);

using FaceOrders = std::map<std::string, IndexSet>;

struct PushforwardResult {
    FaceOrders orders;
    // Target faces whose preimage faces contribute the same leading exponent;
    // the rule does not synthesize the extra log term such coincidences can produce.
    std::vector<std::string> coincidences;
};

PushforwardResult pushforward_orders(const CornerSpace& space3, const BMapSpec& map_c, const FaceOrders& orders,
                                     const Monomial& bweight);

// Orders of a kernel pulled back along a lift map: the sum over target faces of
// e(i,j) times their orders; faces absent from every lift row carry infinite order.
FaceOrders lift_orders(const BMapSpec& map, const FaceOrders& target_orders, int n);

// Weight that turns the product of the lifted kernels and the lifted triple density
// into a b-density on the triple space.
Monomial sc_triple_b_weight(int n);

struct ScPipeline {
    FaceOrders kappa_a, kappa_b, product, pushforward_input;
    Monomial bweight;
    PushforwardResult result;
    CalculusOrders composed;
};

ScPipeline sc_compose_pipeline(const CalculusOrders& a, const CalculusOrders& b);

CalculusOrders acc_compose(const CalculusOrders& a, const CalculusOrders& b);

enum class KernelKind { b_heat_kernel, conic_heat_kernel, sc_heat_kernel, acc_heat_kernel };
const char* kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& s);

// mu0 is the exponent parameter of the conic expansion.
CalculusOrders canonical_kernel_orders(KernelKind kind, int n = 3, Rational mu0 = 0);

struct LiftedOperatorFace {
    std::string face;
    Monomial prefactor;
    std::string model_operator;
    std::string time_variable;
    std::vector<std::string> time_faces;
    std::string display;
};

std::vector<LiftedOperatorFace> lifted_heat_operator_table();

// Symbolic entry of a printed order table: constant + sum of named index sets.
struct OrderFormula {
    bool infinite = false;
    Affine constant;
    std::vector<std::string> symbols;
    std::string str() const;
};

OrderFormula parse_order_formula(const std::vector<std::string>& tokens);
IndexSet eval_order_formula(const OrderFormula& f, const std::map<std::string, IndexSet>& env, int n);

nlohmann::json orders_to_json(const CalculusOrders& a);
CalculusOrders orders_from_json(const nlohmann::json& j);
std::string orders_table(const CalculusOrders& a);

} // namespace acclab
