#include <set>
#include <stdexcept>

#include "iife/features.hpp"

namespace iife::features {

struct FeatureExpr::Node {
  NodeType type = NodeType::Column;
  std::string name;
  UnaryOp unary = UnaryOp::Square;
  BinaryOp binary = BinaryOp::Add;
  std::vector<FeatureExpr> children;
  std::size_t size = 1;
};

namespace {

struct OpSpelling {
  std::string_view text;
  bool unary;
  int op;
};

constexpr OpSpelling kSpellings[] = {
    {"add", false, static_cast<int>(BinaryOp::Add)},
    {"sub", false, static_cast<int>(BinaryOp::Sub)},
    {"rsub", false, static_cast<int>(BinaryOp::RSub)},
    {"mul", false, static_cast<int>(BinaryOp::Mul)},
    {"min", false, static_cast<int>(BinaryOp::Min)},
    {"max", false, static_cast<int>(BinaryOp::Max)},
    {"div", false, static_cast<int>(BinaryOp::SafeDiv)},
    {"rdiv", false, static_cast<int>(BinaryOp::RSafeDiv)},
    {"mod", false, static_cast<int>(BinaryOp::Mod)},
    {"rmod", false, static_cast<int>(BinaryOp::RMod)},
    {"gbmin", false, static_cast<int>(BinaryOp::GroupMin)},
    {"gbmax", false, static_cast<int>(BinaryOp::GroupMax)},
    {"gbmean", false, static_cast<int>(BinaryOp::GroupMean)},
    {"gbmedian", false, static_cast<int>(BinaryOp::GroupMedian)},
    {"gbstd", false, static_cast<int>(BinaryOp::GroupStd)},
    {"sq", true, static_cast<int>(UnaryOp::Square)},
    {"abs", true, static_cast<int>(UnaryOp::Abs)},
    {"sqrtabs", true, static_cast<int>(UnaryOp::SqrtAbs)},
    {"sigmoid", true, static_cast<int>(UnaryOp::Sigmoid)},
    {"inv", true, static_cast<int>(UnaryOp::Reciprocal)},
};

void render_into(const FeatureExpr& e, std::string& out) {
  switch (e.type()) {
    case FeatureExpr::NodeType::Column:
      out += "col:";
      for (char ch : e.column_name()) {
        if (ch == '\\' || ch == ',' || ch == '(' || ch == ')') out.push_back('\\');
        out.push_back(ch);
      }
      return;
    case FeatureExpr::NodeType::Unary:
      out += op_name(e.unary_op());
      out.push_back('(');
      render_into(e.child(), out);
      out.push_back(')');
      return;
    case FeatureExpr::NodeType::Binary:
      out += op_name(e.binary_op());
      out.push_back('(');
      render_into(e.left(), out);
      out.push_back(',');
      render_into(e.right(), out);
      out.push_back(')');
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FeatureExpr parse_all() {
    FeatureExpr e = parse_node();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_expr: " + what + " at offset " + std::to_string(pos_) +
                                " in \"" + std::string(text_) + "\"");
  }

  void expect(char ch) {
    if (pos_ >= text_.size()) {
      if (ch == ')') fail("unbalanced parenthesis: missing ')'");
      fail(std::string("expected '") + ch + "' but input ended");
    }
    if (text_[pos_] != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  FeatureExpr parse_node() {
    if (text_.substr(pos_, 4) == "col:") {
      pos_ += 4;
      std::string name;
      while (pos_ < text_.size()) {
        const char ch = text_[pos_];
        if (ch == '\\') {
          if (pos_ + 1 >= text_.size()) fail("dangling escape");
          name.push_back(text_[pos_ + 1]);
          pos_ += 2;
          continue;
        }
        if (ch == ',' || ch == '(' || ch == ')') break;
        name.push_back(ch);
        ++pos_;
      }
      if (name.empty()) fail("empty column name");
      return FeatureExpr::column(std::move(name));
    }

    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= 'a' && text_[pos_] <= 'z') ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word.empty()) fail("expected an operator or col:NAME");
    const OpSpelling* spelling = nullptr;
    for (const auto& s : kSpellings) {
      if (s.text == word) spelling = &s;
    }
    if (spelling == nullptr) {
      pos_ = start;
      fail("unknown operator '" + std::string(word) + "'");
    }
    expect('(');
    FeatureExpr first = parse_node();
    if (spelling->unary) {
      expect(')');
      return FeatureExpr::unary(static_cast<UnaryOp>(spelling->op), std::move(first));
    }
    expect(',');
    FeatureExpr second = parse_node();
    expect(')');
    return FeatureExpr::binary(static_cast<BinaryOp>(spelling->op), std::move(first),
                               std::move(second));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_columns(const FeatureExpr& e, std::set<std::string>& out) {
  switch (e.type()) {
    case FeatureExpr::NodeType::Column:
      out.insert(e.column_name());
      return;
    case FeatureExpr::NodeType::Unary:
      collect_columns(e.child(), out);
      return;
    case FeatureExpr::NodeType::Binary:
      collect_columns(e.left(), out);
      collect_columns(e.right(), out);
      return;
  }
}

}  // namespace

bool is_groupby(BinaryOp op) {
  switch (op) {
    case BinaryOp::GroupMin:
    case BinaryOp::GroupMax:
    case BinaryOp::GroupMean:
    case BinaryOp::GroupMedian:
    case BinaryOp::GroupStd:
      return true;
    default:
      return false;
  }
}

std::string_view op_name(BinaryOp op) {
  for (const auto& s : kSpellings) {
    if (!s.unary && s.op == static_cast<int>(op)) return s.text;
  }
  throw std::logic_error("unnamed binary operator");
}

std::string_view op_name(UnaryOp op) {
  for (const auto& s : kSpellings) {
    if (s.unary && s.op == static_cast<int>(op)) return s.text;
  }
  throw std::logic_error("unnamed unary operator");
}

FeatureExpr FeatureExpr::column(std::string name) {
  if (name.empty()) throw std::invalid_argument("column reference needs a name");
  auto node = std::make_shared<Node>();
  node->type = NodeType::Column;
  node->name = std::move(name);
  return FeatureExpr(std::move(node));
}

FeatureExpr FeatureExpr::unary(UnaryOp op, FeatureExpr child) {
  auto node = std::make_shared<Node>();
  node->type = NodeType::Unary;
  node->unary = op;
  node->size = 1 + child.node_count();
  node->children.push_back(std::move(child));
  return FeatureExpr(std::move(node));
}

FeatureExpr FeatureExpr::binary(BinaryOp op, FeatureExpr left, FeatureExpr right) {
  if (is_groupby(op) && !left.is_column()) {
    throw std::invalid_argument("group-by operand must be a column reference");
  }
  auto node = std::make_shared<Node>();
  node->type = NodeType::Binary;
  node->binary = op;
  node->size = 1 + left.node_count() + right.node_count();
  node->children.push_back(std::move(left));
  node->children.push_back(std::move(right));
  return FeatureExpr(std::move(node));
}

FeatureExpr::NodeType FeatureExpr::type() const { return node_->type; }

bool FeatureExpr::is_column() const { return node_->type == NodeType::Column; }

const std::string& FeatureExpr::column_name() const {
  if (node_->type != NodeType::Column) throw std::logic_error("not a column reference");
  return node_->name;
}

UnaryOp FeatureExpr::unary_op() const {
  if (node_->type != NodeType::Unary) throw std::logic_error("not a unary node");
  return node_->unary;
}

BinaryOp FeatureExpr::binary_op() const {
  if (node_->type != NodeType::Binary) throw std::logic_error("not a binary node");
  return node_->binary;
}

const FeatureExpr& FeatureExpr::child() const {
  if (node_->type != NodeType::Unary) throw std::logic_error("not a unary node");
  return node_->children[0];
}

const FeatureExpr& FeatureExpr::left() const {
  if (node_->type != NodeType::Binary) throw std::logic_error("not a binary node");
  return node_->children[0];
}

const FeatureExpr& FeatureExpr::right() const {
  if (node_->type != NodeType::Binary) throw std::logic_error("not a binary node");
  return node_->children[1];
}

std::size_t FeatureExpr::node_count() const { return node_->size; }

bool operator==(const FeatureExpr& a, const FeatureExpr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.type != y.type || x.size != y.size) return false;
  switch (x.type) {
    case FeatureExpr::NodeType::Column:
      return x.name == y.name;
    case FeatureExpr::NodeType::Unary:
      return x.unary == y.unary && x.children[0] == y.children[0];
    case FeatureExpr::NodeType::Binary:
      return x.binary == y.binary && x.children[0] == y.children[0] &&
             x.children[1] == y.children[1];
  }
  return false;
}

std::size_t order(const FeatureExpr& e) {
  switch (e.type()) {
    case FeatureExpr::NodeType::Column:
      return 1;
    case FeatureExpr::NodeType::Unary:
      return order(e.child());
    case FeatureExpr::NodeType::Binary:
      return order(e.left()) + order(e.right());
  }
  return 0;
}

std::vector<std::string> referenced_columns(const FeatureExpr& e) {
  std::set<std::string> names;
  collect_columns(e, names);
  return {names.begin(), names.end()};
}

std::string render_expr(const FeatureExpr& e) {
  std::string out;
  render_into(e, out);
  return out;
}

FeatureExpr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

ColumnKind output_kind(const FeatureExpr& e, const tabular::Table& t) {
  if (e.is_column()) return t.column(e.column_name()).kind;
  return ColumnKind::Numeric;
}

void validate_expr(const FeatureExpr& e, const tabular::Table& t) {
  switch (e.type()) {
    case FeatureExpr::NodeType::Column:
      if (t.find(e.column_name()) == nullptr) {
        throw std::invalid_argument("expression " + render_expr(e) + " references unknown column '" +
                                    e.column_name() + "'");
      }
      return;
    case FeatureExpr::NodeType::Unary:
      validate_expr(e.child(), t);
      return;
    case FeatureExpr::NodeType::Binary:
      validate_expr(e.left(), t);
      validate_expr(e.right(), t);
      if (is_groupby(e.binary_op()) &&
          t.column(e.left().column_name()).kind != ColumnKind::Categorical) {
        throw std::invalid_argument("group-by in " + render_expr(e) +
                                    " must group by a categorical column");
      }
      return;
  }
}

}  // namespace iife::features
