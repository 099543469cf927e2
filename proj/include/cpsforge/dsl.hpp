#pragma once

// Model files: line-oriented blocks
//
//   model scalar_robin;
//   chart { coords t, x; boundary x; }
//   fields { scalar u; }
//   background { metric diag(-1, 1); function V(s); function f(t) = 1/2; const k; }
//   lagrangian { let K = ...; L = ...; ell = ...; }
//   bc { u: robin(f); }
//   constraints { box(u) = 0; }
//   vectors { xi dt = (1, 0); evol shift = { u: 1 }; }
//
// Comments start with # or //.

#include "cpsforge/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cpsforge::dsl {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Name, Call, Neg, Binary, Tuple };
    Kind kind = Kind::Number;
    std::string text; // literal, name, callee or operator
    std::vector<NodePtr> kids;
    int line = 0;
    int column = 0;
};

struct Statement {
    // coords, boundary, max_jet_order, scalar, oneform, lieform, metric,
    // function, const, let, L, ell, bc, constraint, xi, evol
    std::string head;
    std::vector<std::string> words;
    std::vector<NodePtr> exprs;
    int line = 0;
    int column = 0;
};

struct Block {
    std::string name;
    std::vector<Statement> statements;
    int line = 0;
    int column = 0;
};

struct Document {
    std::string model_name;
    std::vector<Block> blocks;
};

[[nodiscard]] Document parse_document(const std::string& text);
[[nodiscard]] std::string print_document(const Document& doc);
[[nodiscard]] std::string print_node(const NodePtr& n);

struct BuildOptions {
    int max_jet_order = -1; // overrides the chart statement when positive
    std::string fallback_name;
};

[[nodiscard]] Model build_model(const Document& doc, const std::string& source, const BuildOptions& options = {});
[[nodiscard]] Model parse_model(const std::string& text, const BuildOptions& options = {});
[[nodiscard]] Model load_model(const std::string& path, const BuildOptions& options = {});

} // namespace cpsforge::dsl
