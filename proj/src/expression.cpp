#include "wstab/expression.hpp"

#include <cctype>
#include <memory>
#include <sstream>

#include "wstab/errors.hpp"

namespace wstab {

namespace {

struct Node {
  Expression::Op op = Expression::Op::Const;
  double value = 0.0;
  std::unique_ptr<Node> a, b;
};
using NodePtr = std::unique_ptr<Node>;

NodePtr leaf(double v) {
  auto n = std::make_unique<Node>();
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n) { return n->op == Expression::Op::Const; }

const std::map<std::string, Expression::Op>& function_table() {
  using Op = Expression::Op;
  static const std::map<std::string, Op> t = {
      {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},   {"exp", Op::Exp},
      {"log", Op::Log},   {"sqrt", Op::Sqrt}, {"atan", Op::Atan}, {"asin", Op::Asin},
      {"acos", Op::Acos}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"atan2", Op::Atan2}};
  return t;
}

}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(const std::string& s, const std::map<std::string, double>& params)
      : s_(s), params_(params) {}

  Expression run() {
    NodePtr root = sum();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    Expression e;
    e.text_ = s_;
    emit(*root, e.code_);
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression \"" << s_ << "\": " << what << " at position " << pos_;
    throw ConfigError(os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static double fold(Op op, double a, double b) {
    switch (op) {
      case Op::Add: return a + b;
      case Op::Sub: return a - b;
      case Op::Mul: return a * b;
      case Op::Div: return a / b;
      case Op::Pow: return std::pow(a, b);
      case Op::Atan2: return std::atan2(a, b);
      default: return 0.0;
    }
  }
  static double fold1(Op op, double a) {
    switch (op) {
      case Op::Neg: return -a;
      case Op::Sin: return std::sin(a);
      case Op::Cos: return std::cos(a);
      case Op::Tan: return std::tan(a);
      case Op::Exp: return std::exp(a);
      case Op::Log: return std::log(a);
      case Op::Sqrt: return std::sqrt(a);
      case Op::Atan: return std::atan(a);
      case Op::Asin: return std::asin(a);
      case Op::Acos: return std::acos(a);
      case Op::Sinh: return std::sinh(a);
      case Op::Cosh: return std::cosh(a);
      default: return 0.0;
    }
  }

  NodePtr binary(Op op, NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return leaf(fold(op, a->value, b->value));
    auto n = std::make_unique<Node>();
    n->op = op;
    if (op == Op::Pow && is_const(b)) {
      const double p = b->value;
      n->op = (p == std::round(p) && std::abs(p) <= 16) ? Op::PowInt : Op::PowConst;
      n->value = p;
      n->a = std::move(a);
      return n;
    }
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  NodePtr unary(Op op, NodePtr a) {
    if (is_const(a)) return leaf(fold1(op, a->value));
    auto n = std::make_unique<Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
  }

  NodePtr sum() {
    NodePtr l = product();
    for (;;) {
      if (accept('+')) l = binary(Op::Add, std::move(l), product());
      else if (accept('-')) l = binary(Op::Sub, std::move(l), product());
      else return l;
    }
  }
  NodePtr product() {
    NodePtr l = signed_power();
    for (;;) {
      if (accept('*')) l = binary(Op::Mul, std::move(l), signed_power());
      else if (accept('/')) l = binary(Op::Div, std::move(l), signed_power());
      else return l;
    }
  }
  // -a^b parses as -(a^b).
  NodePtr signed_power() {
    if (accept('-')) return unary(Op::Neg, signed_power());
    if (accept('+')) return signed_power();
    NodePtr base = primary();
    if (accept('^')) return binary(Op::Pow, std::move(base), signed_power());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return leaf(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      const auto& fns = function_table();
      if (auto f = fns.find(id); f != fns.end()) {
        expect('(');
        NodePtr a = sum();
        if (f->second == Op::Atan2) {
          expect(',');
          NodePtr b = sum();
          expect(')');
          return binary(Op::Atan2, std::move(a), std::move(b));
        }
        expect(')');
        return unary(f->second, std::move(a));
      }
      if (id == "u" || id == "v") {
        auto n = std::make_unique<Node>();
        n->op = id == "u" ? Op::VarU : Op::VarV;
        return n;
      }
      if (id == "pi") return leaf(M_PI);
      if (id == "e") return leaf(M_E);
      if (auto p = params_.find(id); p != params_.end()) return leaf(p->second);
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static void emit(const Node& n, std::vector<Expression::Instr>& code) {
    if (n.a) emit(*n.a, code);
    if (n.b) emit(*n.b, code);
    code.push_back({n.op, n.value});
  }

  const std::string& s_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(const std::string& text, const std::map<std::string, double>& params) {
  return ExpressionParser(text, params).run();
}

}  // namespace wstab
