#include "pbn/expr.hpp"

#include <algorithm>
#include <cctype>

namespace pbn {

namespace {

int append(std::vector<BoolExpr::Node>& nodes, BoolExpr::Node node) {
  nodes.push_back(node);
  return static_cast<int>(nodes.size()) - 1;
}

// Appends the nodes of `src` into `dst`, shifting child indices.
int splice(std::vector<BoolExpr::Node>& dst, const BoolExpr& src) {
  const int offset = static_cast<int>(dst.size());
  for (const auto& n : src.nodes()) {
    BoolExpr::Node shifted = n;
    if (shifted.lhs >= 0) shifted.lhs += offset;
    if (shifted.rhs >= 0) shifted.rhs += offset;
    dst.push_back(shifted);
  }
  return static_cast<int>(dst.size()) - 1;
}

}  // namespace

BoolExpr BoolExpr::constant(bool value) {
  BoolExpr e;
  append(e.nodes_, {Kind::Const, -1, -1, value ? 1 : 0});
  return e;
}

BoolExpr BoolExpr::variable(int index) {
  BoolExpr e;
  append(e.nodes_, {Kind::Var, -1, -1, index});
  return e;
}

BoolExpr BoolExpr::negation(BoolExpr operand) {
  BoolExpr e;
  int child = splice(e.nodes_, operand);
  append(e.nodes_, {Kind::Not, child, -1, -1});
  return e;
}

BoolExpr BoolExpr::conjunction(BoolExpr lhs, BoolExpr rhs) {
  BoolExpr e;
  int l = splice(e.nodes_, lhs);
  int r = splice(e.nodes_, rhs);
  append(e.nodes_, {Kind::And, l, r, -1});
  return e;
}

BoolExpr BoolExpr::disjunction(BoolExpr lhs, BoolExpr rhs) {
  BoolExpr e;
  int l = splice(e.nodes_, lhs);
  int r = splice(e.nodes_, rhs);
  append(e.nodes_, {Kind::Or, l, r, -1});
  return e;
}

bool BoolExpr::evaluate(std::uint64_t state) const {
  // Children precede parents, so a single left-to-right pass suffices.
  std::vector<char> value(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Const:
        value[i] = static_cast<char>(n.var);
        break;
      case Kind::Var:
        value[i] = static_cast<char>((state >> n.var) & 1u);
        break;
      case Kind::Not:
        value[i] = !value[n.lhs];
        break;
      case Kind::And:
        value[i] = value[n.lhs] && value[n.rhs];
        break;
      case Kind::Or:
        value[i] = value[n.lhs] || value[n.rhs];
        break;
    }
  }
  return value.back() != 0;
}

int BoolExpr::max_variable() const {
  int max = -1;
  for (const auto& n : nodes_)
    if (n.kind == Kind::Var) max = std::max(max, n.var);
  return max;
}

std::vector<int> BoolExpr::variables() const {
  std::vector<int> vars;
  for (const auto& n : nodes_)
    if (n.kind == Kind::Var) vars.push_back(n.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::string BoolExpr::to_string(const std::vector<std::string>& names) const {
  std::vector<std::string> text(nodes_.size());
  // Parenthesize children whose operator binds weaker than the parent.
  auto prec = [](Kind k) {
    switch (k) {
      case Kind::Or: return 0;
      case Kind::And: return 1;
      default: return 2;
    }
  };
  std::vector<int> node_prec(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    node_prec[i] = prec(n.kind);
    auto wrap = [&](int child, int min_prec) {
      if (node_prec[child] < min_prec) return "(" + text[child] + ")";
      return text[child];
    };
    switch (n.kind) {
      case Kind::Const:
        text[i] = n.var ? "1" : "0";
        break;
      case Kind::Var:
        text[i] = names.at(n.var);
        break;
      case Kind::Not:
        text[i] = "!" + wrap(n.lhs, 2);
        break;
      case Kind::And:
        text[i] = wrap(n.lhs, 1) + " & " + wrap(n.rhs, 1);
        break;
      case Kind::Or:
        text[i] = wrap(n.lhs, 0) + " | " + wrap(n.rhs, 0);
        break;
    }
  }
  return text.back();
}

namespace {

class Parser {
public:
  Parser(const std::string& text, const std::vector<std::string>& names)
      : text_(text), names_(names) {}

  BoolExpr parse() {
    BoolExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

private:
  BoolExpr parse_expr() {
    BoolExpr lhs = parse_term();
    while (peek() == '|') {
      ++pos_;
      lhs = BoolExpr::disjunction(std::move(lhs), parse_term());
    }
    return lhs;
  }

  BoolExpr parse_term() {
    BoolExpr lhs = parse_factor();
    while (peek() == '&') {
      ++pos_;
      lhs = BoolExpr::conjunction(std::move(lhs), parse_factor());
    }
    return lhs;
  }

  BoolExpr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return BoolExpr::negation(parse_factor());
    }
    if (c == '(') {
      ++pos_;
      BoolExpr e = parse_expr();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw ParseError("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (c == '0' || c == '1') {
      // A bare digit is a constant; digits inside names are handled below.
      ++pos_;
      return BoolExpr::constant(c == '1');
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it == names_.end())
        throw ParseError("unknown gene name '" + name + "'", start);
      return BoolExpr::variable(static_cast<int>(it - names_.begin()));
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  const std::string& text_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace

BoolExpr parse_expression(const std::string& text,
                          const std::vector<std::string>& gene_names) {
  return Parser(text, gene_names).parse();
}

}  // namespace pbn
