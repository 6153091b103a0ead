#include "catalia/catamorphism.hpp"

#include "catalia/error.hpp"
#include "catalia/sexpr.hpp"
#include "catalia/term_ops.hpp"

namespace catalia {

// ---------------------------------------------------------------------------
// MapExpr

MapExpr MapExpr::constant(Integer v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    return MapExpr(n);
}

MapExpr MapExpr::int_arg(std::size_t pos) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::IntArg;
    n->pos = pos;
    return MapExpr(n);
}

MapExpr MapExpr::child(std::size_t pos, std::size_t comp) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Child;
    n->pos = pos;
    n->comp = comp;
    return MapExpr(n);
}

MapExpr MapExpr::param(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Param;
    n->name = std::move(name);
    return MapExpr(n);
}

MapExpr MapExpr::add(MapExpr a, MapExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Add;
    n->kids = {std::move(a), std::move(b)};
    return MapExpr(n);
}

MapExpr MapExpr::sub(MapExpr a, MapExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sub;
    n->kids = {std::move(a), std::move(b)};
    return MapExpr(n);
}

MapExpr MapExpr::mul(MapExpr a, MapExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Mul;
    n->kids = {std::move(a), std::move(b)};
    return MapExpr(n);
}

bool MapExpr::has_params() const {
    if (kind() == Kind::Param) return true;
    for (const auto& k : node_->kids)
        if (k.has_params()) return true;
    return false;
}

std::string MapExpr::to_string(const std::vector<std::string>& arg_names, std::size_t degree) const {
    auto arg = [&](std::size_t pos) { return pos < arg_names.size() ? arg_names[pos] : "_" + std::to_string(pos); };
    switch (kind()) {
        case Kind::Const: return value().get_str();
        case Kind::IntArg: return arg(pos());
        case Kind::Child: return degree == 1 ? arg(pos()) : arg(pos()) + "." + std::to_string(comp());
        case Kind::Param: return name();
        case Kind::Add: return "(" + lhs().to_string(arg_names, degree) + " + " + rhs().to_string(arg_names, degree) + ")";
        case Kind::Sub: return "(" + lhs().to_string(arg_names, degree) + " - " + rhs().to_string(arg_names, degree) + ")";
        case Kind::Mul: return lhs().to_string(arg_names, degree) + "*" + rhs().to_string(arg_names, degree);
    }
    return "?";
}

bool operator==(const MapExpr& a, const MapExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case MapExpr::Kind::Const: return a.value() == b.value();
        case MapExpr::Kind::IntArg: return a.pos() == b.pos();
        case MapExpr::Kind::Child: return a.pos() == b.pos() && a.comp() == b.comp();
        case MapExpr::Kind::Param: return a.name() == b.name();
        default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

// ---------------------------------------------------------------------------
// Catamorphisms and templates

const StructureMap& Catamorphism::map_for(std::string_view ctor) const {
    auto it = maps.find(ctor);
    if (it == maps.end()) throw MissingDefinition("no structure map for constructor '" + std::string(ctor) + "'");
    return it->second;
}

bool operator==(const Catamorphism& a, const Catamorphism& b) {
    if (a.degree != b.degree || a.maps.size() != b.maps.size()) return false;
    for (const auto& [name, m] : a.maps) {
        auto it = b.maps.find(name);
        if (it == b.maps.end() || it->second.outputs != m.outputs) return false;
    }
    return true;
}

namespace {

std::string describe_maps(const StructureMaps& maps, std::size_t degree, const AdtSignature& adts) {
    std::string out;
    for (const auto& name : adts.adt_names()) {
        for (const auto& ctor : adts.find_adt(name)->constructors) {
            auto it = maps.find(ctor.name);
            if (it == maps.end()) continue;
            std::vector<std::string> names;
            std::string lhs = ctor.name;
            if (!ctor.fields.empty()) {
                lhs += "(";
                for (std::size_t i = 0; i < ctor.fields.size(); ++i) {
                    names.push_back(ctor.fields[i].selector);
                    lhs += (i ? ", " : "") + ctor.fields[i].selector;
                }
                lhs += ")";
            }
            out += "  " + lhs + " -> (";
            for (std::size_t k = 0; k < it->second.outputs.size(); ++k)
                out += (k ? ", " : "") + it->second.outputs[k].to_string(names, degree);
            out += ")\n";
        }
    }
    return out;
}

} // namespace

std::string Catamorphism::to_string(const AdtSignature& adts) const {
    return "degree " + std::to_string(degree) + "\n" + describe_maps(maps, degree, adts);
}

const StructureMap& TemplateCatamorphism::map_for(std::string_view ctor) const {
    auto it = maps.find(ctor);
    if (it == maps.end()) throw MissingDefinition("no structure map for constructor '" + std::string(ctor) + "'");
    return it->second;
}

const ParamDecl* TemplateCatamorphism::find_param(std::string_view name) const {
    for (const auto& p : params)
        if (p.name == name) return &p;
    return nullptr;
}

std::optional<Integer> TemplateCatamorphism::space_size() const {
    Integer n = 1;
    for (const auto& p : params) {
        if (!p.lower || !p.upper) return std::nullopt;
        Integer width = *p.upper - *p.lower + 1;
        if (width < 0) width = 0;
        n *= width;
    }
    return n;
}

std::string TemplateCatamorphism::describe() const {
    std::string s = "linear template, degree " + std::to_string(degree);
    if (bound) s += ", bounds [" + Integer(-*bound).get_str() + ", " + bound->get_str() + "]";
    else s += ", unbounded";
    return s + ", " + std::to_string(params.size()) + " parameters";
}

Integer eval_map(const MapExpr& e, const std::vector<Integer>& int_args, const std::vector<Tuple>& child_values,
                 const ParamAssignment* params) {
    switch (e.kind()) {
        case MapExpr::Kind::Const: return e.value();
        case MapExpr::Kind::IntArg: return int_args.at(e.pos());
        case MapExpr::Kind::Child: return child_values.at(e.pos()).at(e.comp());
        case MapExpr::Kind::Param: {
            if (params) {
                auto it = params->find(e.name());
                if (it != params->end()) return it->second;
            }
            throw MissingParameter("parameter '" + e.name() + "' has no value");
        }
        case MapExpr::Kind::Add:
            return eval_map(e.lhs(), int_args, child_values, params) + eval_map(e.rhs(), int_args, child_values, params);
        case MapExpr::Kind::Sub:
            return eval_map(e.lhs(), int_args, child_values, params) - eval_map(e.rhs(), int_args, child_values, params);
        case MapExpr::Kind::Mul:
            return eval_map(e.lhs(), int_args, child_values, params) * eval_map(e.rhs(), int_args, child_values, params);
    }
    return 0;
}

Integer eval_int_ground(const Term& t) {
    switch (t.kind()) {
        case TermKind::Lit: return t.value();
        case TermKind::Arith: {
            Integer a = eval_int_ground(t.args()[0]);
            Integer b = eval_int_ground(t.args()[1]);
            switch (t.op()) {
                case ArithOp::Add: return a + b;
                case ArithOp::Sub: return a - b;
                case ArithOp::Mul: return a * b;
                case ArithOp::Div: return smt_div(a, b);
                case ArithOp::Mod: return smt_mod(a, b);
            }
            break;
        }
        default: break;
    }
    throw NonGroundApplication("not a ground integer term: " + t.to_string());
}

Tuple eval_ground(const Catamorphism& cata, const Term& t) {
    if (t.kind() != TermKind::Cons) throw NonGroundApplication("not a ground constructor term: " + t.to_string());
    const StructureMap& m = cata.map_for(t.name());
    std::vector<Integer> ints(t.args().size());
    std::vector<Tuple> kids(t.args().size());
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        const Term& a = t.args()[i];
        if (a.sort().is_adt()) kids[i] = eval_ground(cata, a);
        else ints[i] = eval_int_ground(a);
    }
    Tuple out;
    out.reserve(m.outputs.size());
    for (const auto& e : m.outputs) out.push_back(eval_map(e, ints, kids));
    return out;
}

Term map_to_term(const MapExpr& e, const std::vector<Term>& args, const std::vector<std::vector<Term>>& children) {
    switch (e.kind()) {
        case MapExpr::Kind::Const: return Term::lit(e.value());
        case MapExpr::Kind::IntArg: return args.at(e.pos());
        case MapExpr::Kind::Child: return children.at(e.pos()).at(e.comp());
        case MapExpr::Kind::Param: return Term::var(e.name(), Sort::integer());
        case MapExpr::Kind::Add:
            return fold_add(map_to_term(e.lhs(), args, children), map_to_term(e.rhs(), args, children));
        case MapExpr::Kind::Sub:
            return fold_sub(map_to_term(e.lhs(), args, children), map_to_term(e.rhs(), args, children));
        case MapExpr::Kind::Mul:
            return fold_mul(map_to_term(e.lhs(), args, children), map_to_term(e.rhs(), args, children));
    }
    return Term::lit(0);
}

Catamorphism default_catamorphism(const AdtSignature& adts) {
    Catamorphism c;
    c.degree = 1;
    for (const auto& fam : adts.families())
        for (const auto& adt : fam)
            for (const auto& ctor : adt.constructors) {
                MapExpr e = MapExpr::constant(1);
                for (std::size_t i = 0; i < ctor.fields.size(); ++i)
                    if (ctor.fields[i].sort.is_adt()) e = MapExpr::add(e, MapExpr::child(i, 0));
                c.maps[ctor.name] = StructureMap{ctor.name, {e}};
            }
    return c;
}

TemplateCatamorphism linear_template(const AdtSignature& adts, std::size_t degree, std::optional<Integer> bound) {
    TemplateCatamorphism t;
    t.degree = degree;
    t.bound = bound;
    auto declare = [&](std::string name) {
        ParamDecl p{std::move(name), std::nullopt, std::nullopt};
        if (bound) {
            p.lower = -*bound;
            p.upper = *bound;
        }
        t.params.push_back(p);
        return MapExpr::param(t.params.back().name);
    };
    for (const auto& fam : adts.families())
        for (const auto& adt : fam)
            for (const auto& ctor : adt.constructors) {
                StructureMap m{ctor.name, {}};
                for (std::size_t k = 0; k < degree; ++k) {
                    const std::string prefix = "p!" + ctor.name + "!" + std::to_string(k) + "!";
                    std::optional<MapExpr> e;
                    for (std::size_t i = 0; i < ctor.fields.size(); ++i) {
                        MapExpr operand = ctor.fields[i].sort.is_adt() ? MapExpr::child(i, k) : MapExpr::int_arg(i);
                        MapExpr term = MapExpr::mul(declare(prefix + std::to_string(i)), operand);
                        e = e ? MapExpr::add(*e, term) : term;
                    }
                    MapExpr c = declare(prefix + "c");
                    m.outputs.push_back(e ? MapExpr::add(*e, c) : c);
                }
                t.maps[ctor.name] = std::move(m);
            }
    return t;
}

TemplateCatamorphism ladder_element(const AdtSignature& adts, std::size_t index, bool raise_degree) {
    if (index < 3) return linear_template(adts, index + 1, Integer(1));
    if (index < 5 || !raise_degree) {
        Integer b;
        mpz_ui_pow_ui(b.get_mpz_t(), 2, index - 2);
        return linear_template(adts, 3, b);
    }
    return linear_template(adts, index - 1, Integer(4));
}

std::vector<TemplateCatamorphism> template_ladder(const AdtSignature& adts, std::size_t cap, bool raise_degree) {
    std::vector<TemplateCatamorphism> out;
    for (std::size_t i = 0; i < cap; ++i) out.push_back(ladder_element(adts, i, raise_degree));
    return out;
}

namespace {

struct Affine {
    std::vector<std::pair<Integer, MapExpr>> terms;  // coefficient, operand
    Integer constant;
};

// Decomposes an affine template output (sum of param*operand terms plus a param constant).
void decompose(const MapExpr& e, const ParamAssignment& m, Affine& out) {
    auto value = [&](const MapExpr& p) {
        auto it = m.find(p.name());
        if (it == m.end()) throw MissingParameter("parameter '" + p.name() + "' has no value");
        return it->second;
    };
    switch (e.kind()) {
        case MapExpr::Kind::Add:
            decompose(e.lhs(), m, out);
            decompose(e.rhs(), m, out);
            return;
        case MapExpr::Kind::Mul:
            if (e.lhs().kind() == MapExpr::Kind::Param && !e.rhs().has_params()) {
                out.terms.emplace_back(value(e.lhs()), e.rhs());
                return;
            }
            break;
        case MapExpr::Kind::Param: out.constant += value(e); return;
        case MapExpr::Kind::Const: out.constant += e.value(); return;
        default: break;
    }
    throw Error("structure map is not in affine template form");
}

MapExpr scaled(const Integer& c, const MapExpr& operand) {
    if (c == 1) return operand;
    return MapExpr::mul(MapExpr::constant(c), operand);
}

MapExpr canonical(const Affine& a) {
    std::optional<MapExpr> e;
    for (const auto& [c, op] : a.terms)
        if (c > 0) e = e ? MapExpr::add(*e, scaled(c, op)) : scaled(c, op);
    for (const auto& [c, op] : a.terms)
        if (c < 0) {
            MapExpr t = scaled(Integer(-c), op);
            e = e ? MapExpr::sub(*e, t) : MapExpr::sub(MapExpr::constant(0), t);
        }
    if (!e) return MapExpr::constant(a.constant);
    if (a.constant > 0) return MapExpr::add(*e, MapExpr::constant(a.constant));
    if (a.constant < 0) return MapExpr::sub(*e, MapExpr::constant(Integer(-a.constant)));
    return *e;
}

} // namespace

Catamorphism instantiate(const TemplateCatamorphism& tmpl, const ParamAssignment& assignment) {
    for (const auto& p : tmpl.params) {
        auto it = assignment.find(p.name);
        if (it == assignment.end()) throw MissingParameter("parameter '" + p.name + "' has no value");
        if ((p.lower && it->second < *p.lower) || (p.upper && it->second > *p.upper))
            throw OutOfBounds("parameter '" + p.name + "' = " + it->second.get_str() + " is out of bounds");
    }
    Catamorphism c;
    c.degree = tmpl.degree;
    for (const auto& [name, m] : tmpl.maps) {
        StructureMap out{name, {}};
        for (const auto& e : m.outputs) {
            Affine a;
            decompose(e, assignment, a);
            out.outputs.push_back(canonical(a));
        }
        c.maps[name] = std::move(out);
    }
    return c;
}

std::string cata_function_name(const std::string& adt, std::size_t comp) {
    return "cata!" + adt + "!" + std::to_string(comp);
}

namespace {

std::string smt_of_map(const MapExpr& e, const std::vector<std::string>& field_terms,
                       const std::vector<std::string>& field_sorts) {
    switch (e.kind()) {
        case MapExpr::Kind::Const:
            return e.value() < 0 ? "(- " + Integer(-e.value()).get_str() + ")" : e.value().get_str();
        case MapExpr::Kind::IntArg: return field_terms.at(e.pos());
        case MapExpr::Kind::Child:
            return "(" + quote_symbol(cata_function_name(field_sorts.at(e.pos()), e.comp())) + " " +
                   field_terms.at(e.pos()) + ")";
        case MapExpr::Kind::Param: return quote_symbol(e.name());
        case MapExpr::Kind::Add:
            return "(+ " + smt_of_map(e.lhs(), field_terms, field_sorts) + " " +
                   smt_of_map(e.rhs(), field_terms, field_sorts) + ")";
        case MapExpr::Kind::Sub:
            return "(- " + smt_of_map(e.lhs(), field_terms, field_sorts) + " " +
                   smt_of_map(e.rhs(), field_terms, field_sorts) + ")";
        case MapExpr::Kind::Mul:
            return "(* " + smt_of_map(e.lhs(), field_terms, field_sorts) + " " +
                   smt_of_map(e.rhs(), field_terms, field_sorts) + ")";
    }
    return "0";
}

} // namespace

std::string cata_definitions(const Catamorphism& cata, const AdtSignature& adts) {
    if (adts.empty()) return {};
    std::string decls;
    std::string bodies;
    for (const auto& fam : adts.families())
        for (const auto& adt : fam)
            for (std::size_t k = 0; k < cata.degree; ++k) {
                decls += " (" + quote_symbol(cata_function_name(adt.name, k)) + " ((x " + quote_symbol(adt.name) +
                         ")) Int)";
                // Nested ite over testers; the last constructor is the default branch.
                std::string body;
                for (std::size_t c = adt.constructors.size(); c-- > 0;) {
                    const Constructor& ctor = adt.constructors[c];
                    std::vector<std::string> terms;
                    std::vector<std::string> sorts;
                    for (const auto& f : ctor.fields) {
                        terms.push_back("(" + quote_symbol(f.selector) + " x)");
                        sorts.push_back(f.sort.is_adt() ? f.sort.name() : std::string());
                    }
                    std::string value = smt_of_map(cata.map_for(ctor.name).outputs.at(k), terms, sorts);
                    if (body.empty()) body = value;
                    else body = "(ite ((_ is " + quote_symbol(ctor.name) + ") x) " + value + " " + body + ")";
                }
                bodies += " " + body;
            }
    return "(define-funs-rec (" + decls.substr(1) + ") (" + bodies.substr(1) + "))\n";
}

} // namespace catalia
