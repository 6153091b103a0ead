#pragma once

#include "catalia/ast.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace catalia {

using Tuple = std::vector<Integer>;
using ParamAssignment = std::map<std::string, Integer, std::less<>>;

/// Integer expression of a structure map.
class MapExpr {
public:
    enum class Kind { Const, IntArg, Child, Param, Add, Sub, Mul };

    MapExpr() : MapExpr(constant(0)) {}

    static MapExpr constant(Integer v);
    static MapExpr constant(long v) { return constant(Integer(v)); }
    /// Integer argument of the constructor at argument position `pos`.
    static MapExpr int_arg(std::size_t pos);
    /// Component `comp` of the catamorphism value of the ADT argument at position `pos`.
    static MapExpr child(std::size_t pos, std::size_t comp);
    static MapExpr param(std::string name);
    static MapExpr add(MapExpr a, MapExpr b);
    static MapExpr sub(MapExpr a, MapExpr b);
    static MapExpr mul(MapExpr a, MapExpr b);

    [[nodiscard]] Kind kind() const { return node_->kind; }
    [[nodiscard]] const Integer& value() const { return node_->value; }
    [[nodiscard]] std::size_t pos() const { return node_->pos; }
    [[nodiscard]] std::size_t comp() const { return node_->comp; }
    [[nodiscard]] const std::string& name() const { return node_->name; }
    [[nodiscard]] const MapExpr& lhs() const { return node_->kids[0]; }
    [[nodiscard]] const MapExpr& rhs() const { return node_->kids[1]; }

    [[nodiscard]] bool has_params() const;
    /// Renders with the given names for integer arguments and child components.
    [[nodiscard]] std::string to_string(const std::vector<std::string>& arg_names, std::size_t degree) const;

    friend bool operator==(const MapExpr& a, const MapExpr& b);

private:
    struct Node {
        Kind kind = Kind::Const;
        Integer value;
        std::size_t pos = 0;
        std::size_t comp = 0;
        std::string name;
        std::vector<MapExpr> kids;
    };
    explicit MapExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct StructureMap {
    std::string ctor;
    std::vector<MapExpr> outputs;
};

using StructureMaps = std::map<std::string, StructureMap, std::less<>>;

/// Concrete catamorphism of degree N covering every constructor of a signature.
struct Catamorphism {
    std::size_t degree = 1;
    StructureMaps maps;

    [[nodiscard]] const StructureMap& map_for(std::string_view ctor) const;
    [[nodiscard]] std::string to_string(const AdtSignature& adts) const;
    friend bool operator==(const Catamorphism& a, const Catamorphism& b);
};

struct ParamDecl {
    std::string name;
    std::optional<Integer> lower;
    std::optional<Integer> upper;
};

struct TemplateCatamorphism {
    std::size_t degree = 1;
    StructureMaps maps;
    std::vector<ParamDecl> params;
    /// Uniform parameter bound, if any (used for reporting and the ladder measure).
    std::optional<Integer> bound;

    [[nodiscard]] const StructureMap& map_for(std::string_view ctor) const;
    [[nodiscard]] const ParamDecl* find_param(std::string_view name) const;
    /// Number of points of the parameter grid; nullopt when unbounded.
    [[nodiscard]] std::optional<Integer> space_size() const;
    [[nodiscard]] std::string describe() const;
};

/// Evaluates a structure-map expression. Throws MissingParameter for unassigned parameters.
Integer eval_map(const MapExpr& e, const std::vector<Integer>& int_args, const std::vector<Tuple>& child_values,
                 const ParamAssignment* params = nullptr);

/// Value of a ground ADT term; integer arguments may be ground arithmetic. Throws NonGroundApplication.
Tuple eval_ground(const Catamorphism& cata, const Term& t);
/// Value of a ground integer term (literals and arithmetic).
Integer eval_int_ground(const Term& t);

/// Builds the term for a structure-map output, folding literal arithmetic.
/// `args[pos]` is the integer term at `pos`; `children[pos]` the tuple of the ADT argument at `pos`;
/// parameters become integer variables of the same name.
Term map_to_term(const MapExpr& e, const std::vector<Term>& args, const std::vector<std::vector<Term>>& children);

/// Size catamorphism: every constructor maps to 1 + the sum of its children, integers ignored.
Catamorphism default_catamorphism(const AdtSignature& adts);

/// Affine template: per constructor and component, one parameter per ADT child (same component),
/// one per integer argument and a constant.
TemplateCatamorphism linear_template(const AdtSignature& adts, std::size_t degree,
                                     std::optional<Integer> bound = std::nullopt);

/// Element `index` of the template ladder. With `raise_degree`, elements past the fifth grow the
/// degree at bound 4 instead of doubling the bound at degree 3.
TemplateCatamorphism ladder_element(const AdtSignature& adts, std::size_t index, bool raise_degree = false);
std::vector<TemplateCatamorphism> template_ladder(const AdtSignature& adts, std::size_t cap,
                                                  bool raise_degree = false);

/// Substitutes parameters, producing the canonical affine form. Throws OutOfBounds / MissingParameter.
Catamorphism instantiate(const TemplateCatamorphism& tmpl, const ParamAssignment& assignment);

/// Name of the integer function computing component `comp` of the catamorphism on `adt`.
std::string cata_function_name(const std::string& adt, std::size_t comp);

/// `(define-funs-rec ...)` for every component of every ADT of the signature.
std::string cata_definitions(const Catamorphism& cata, const AdtSignature& adts);

} // namespace catalia
