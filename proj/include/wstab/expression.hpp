// Arithmetic expressions in the chart parameters u, v, used by config-file
// chart specs. Compiled once to a postfix program, then evaluated on double
// or on J2 so chart derivatives stay exact.
//
// Grammar: sums, products, unary minus, right-associative '^', parentheses,
// numbers, the constants pi and e, named parameters, and the functions
// sin cos tan exp log sqrt atan asin acos sinh cosh atan2(y, x).
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wstab/jet.hpp"

namespace wstab {

class Expression {
 public:
  enum class Op {
    Const, VarU, VarV, Add, Sub, Mul, Div, Neg, PowInt, PowConst, Pow,
    Sin, Cos, Tan, Exp, Log, Sqrt, Atan, Asin, Acos, Sinh, Cosh, Atan2
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  Expression() = default;
  // Throws ConfigError naming the offending token and its position.
  static Expression parse(const std::string& text,
                          const std::map<std::string, double>& params = {});

  const std::string& text() const { return text_; }

  template <class T>
  T eval(const T& u, const T& v) const;

 private:
  std::string text_;
  std::vector<Instr> code_;
  friend class ExpressionParser;
};

namespace detail {
template <class T>
T int_power(const T& a, int n) {
  if (n < 0) return T(1.0) / int_power(a, -n);
  T r(1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}
}  // namespace detail

template <class T>
T Expression::eval(const T& u, const T& v) const {
  using std::acos, std::asin, std::atan, std::atan2, std::cos, std::cosh, std::exp, std::log,
      std::pow, std::sin, std::sinh, std::sqrt, std::tan;
  std::vector<T> st;
  st.reserve(code_.size());
  auto pop = [&st] {
    T x = st.back();
    st.pop_back();
    return x;
  };
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: st.push_back(T(in.value)); break;
      case Op::VarU: st.push_back(u); break;
      case Op::VarV: st.push_back(v); break;
      case Op::Neg: st.back() = -st.back(); break;
      case Op::PowInt: st.back() = detail::int_power(st.back(), static_cast<int>(in.value)); break;
      case Op::PowConst: st.back() = pow(st.back(), in.value); break;
      case Op::Sin: st.back() = sin(st.back()); break;
      case Op::Cos: st.back() = cos(st.back()); break;
      case Op::Tan: st.back() = tan(st.back()); break;
      case Op::Exp: st.back() = exp(st.back()); break;
      case Op::Log: st.back() = log(st.back()); break;
      case Op::Sqrt: st.back() = sqrt(st.back()); break;
      case Op::Atan: st.back() = atan(st.back()); break;
      case Op::Asin: st.back() = asin(st.back()); break;
      case Op::Acos: st.back() = acos(st.back()); break;
      case Op::Sinh: st.back() = sinh(st.back()); break;
      case Op::Cosh: st.back() = cosh(st.back()); break;
      default: {
        const T b = pop();
        const T a = pop();
        switch (in.op) {
          case Op::Add: st.push_back(a + b); break;
          case Op::Sub: st.push_back(a - b); break;
          case Op::Mul: st.push_back(a * b); break;
          case Op::Div: st.push_back(a / b); break;
          case Op::Pow: st.push_back(exp(b * log(a))); break;
          case Op::Atan2: st.push_back(atan2(a, b)); break;
          default: break;
        }
      }
    }
  }
  return st.back();
}

}  // namespace wstab
