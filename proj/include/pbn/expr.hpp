#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbn {

/// Boolean expression over gene variables. Nodes are stored in a flat
/// arena with children preceding parents; the root is the last node.
class BoolExpr {
public:
  enum class Kind : std::uint8_t { Const, Var, Not, And, Or };

  struct Node {
    Kind kind;
    int lhs = -1;   // left child (or Not operand)
    int rhs = -1;   // right child
    int var = -1;   // variable index (Var) or 0/1 (Const)
  };

  static BoolExpr constant(bool value);
  static BoolExpr variable(int index);
  static BoolExpr negation(BoolExpr operand);
  static BoolExpr conjunction(BoolExpr lhs, BoolExpr rhs);
  static BoolExpr disjunction(BoolExpr lhs, BoolExpr rhs);

  /// Evaluates against a bit-packed state (bit i holds gene i).
  bool evaluate(std::uint64_t state) const;

  /// Largest variable index referenced, -1 if none.
  int max_variable() const;

  /// Sorted, deduplicated variable indices appearing in the tree.
  std::vector<int> variables() const;

  std::string to_string(const std::vector<std::string>& names) const;

  const std::vector<Node>& nodes() const { return nodes_; }

private:
  std::vector<Node> nodes_;
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& message, std::size_t pos)
      : std::runtime_error(message + " at position " + std::to_string(pos)),
        position(pos) {}
};

/// Parses `expr := term ('|' term)* ; term := factor ('&' factor)* ;
/// factor := '!' factor | '(' expr ')' | name | '0' | '1'`.
/// Names resolve to indices into gene_names; unknown names throw ParseError.
BoolExpr parse_expression(const std::string& text,
                          const std::vector<std::string>& gene_names);

}  // namespace pbn
