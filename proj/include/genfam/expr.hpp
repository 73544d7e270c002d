#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genfam/common.hpp"
#include "genfam/jet.hpp"

namespace genfam {

// Scalar expressions over base variables q1..qn, fiber variables l1..lk and
// named parameters. Grammar (see docs/problem-format.md):
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)*            -- right associative
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' requires a constant integer exponent; functions are sqrt, sin, cos,
// exp, log. No implicit multiplication.

enum class ExprKind : std::uint8_t {
  constant,
  variable,   // index into the combined (q1..qn, l1..lk) coordinate vector
  parameter,  // named scalar looked up at evaluation time
  neg,
  add,
  sub,
  mul,
  div,
  pow_int,
  call,
};

enum class ExprFunc : std::uint8_t { sqrt, sin, cos, exp, log };

struct ExprNode {
  ExprKind kind{};
  double number = 0.0;   // constant value
  int var = -1;          // variable index
  long long ipow = 0;    // integer exponent for pow_int
  ExprFunc func{};       // builtin for call
  std::string name;      // parameter name
  int a = -1, b = -1;    // child indices into the arena
  std::size_t src_off = 0, src_len = 0;
};

class ExprAst {
 public:
  ExprAst() = default;

  int base_dim() const { return n_; }
  int fiber_dim() const { return k_; }
  const std::vector<std::string>& parameter_names() const { return params_; }
  const std::string& source() const { return src_; }

  // Evaluates over any scalar S supporting the arithmetic of Jet2/double.
  // Vars(i) must return the i-th combined coordinate as S, Constant(c) must
  // lift a double. Parameter values come from the supplied table.
  template <class S, class VarFn, class ConstFn>
  S eval(VarFn&& vars, ConstFn&& lift,
         const std::map<std::string, double>& params) const {
    return eval_node<S>(root_, vars, lift, params);
  }

  double eval_scalar(const Eigen::VectorXd& x,
                     const std::map<std::string, double>& params) const {
    return eval<double>([&](int i) { return x(i); },
                        [](double c) { return c; }, params);
  }

  Jet2 eval_jet(const Eigen::VectorXd& x,
                const std::map<std::string, double>& params) const {
    const int d = static_cast<int>(x.size());
    return eval<Jet2>([&](int i) { return Jet2::variable(d, i, x(i)); },
                      [d](double c) { return Jet2::constant(d, c); }, params);
  }

  // Round-trippable text form (fully parenthesized).
  std::string to_string() const { return print_node(root_); }

  static ExprAst parse(std::string_view src, int n, int k,
                       const std::map<std::string, double>& params);

 private:
  template <class S, class VarFn, class ConstFn>
  S eval_node(int idx, VarFn& vars, ConstFn& lift,
              const std::map<std::string, double>& params) const {
    const ExprNode& nd = nodes_[idx];
    try {
      switch (nd.kind) {
        case ExprKind::constant:
          return lift(nd.number);
        case ExprKind::variable:
          return vars(nd.var);
        case ExprKind::parameter: {
          auto it = params.find(nd.name);
          if (it == params.end())
            throw domain_error("parameter '" + nd.name + "' has no value");
          return lift(it->second);
        }
        case ExprKind::neg:
          return -eval_node<S>(nd.a, vars, lift, params);
        case ExprKind::add:
          return eval_node<S>(nd.a, vars, lift, params) +
                 eval_node<S>(nd.b, vars, lift, params);
        case ExprKind::sub:
          return eval_node<S>(nd.a, vars, lift, params) -
                 eval_node<S>(nd.b, vars, lift, params);
        case ExprKind::mul:
          return eval_node<S>(nd.a, vars, lift, params) *
                 eval_node<S>(nd.b, vars, lift, params);
        case ExprKind::div:
          return div_checked(eval_node<S>(nd.a, vars, lift, params),
                             eval_node<S>(nd.b, vars, lift, params));
        case ExprKind::pow_int:
          return pow_int(eval_node<S>(nd.a, vars, lift, params), nd.ipow);
        case ExprKind::call: {
          S arg = eval_node<S>(nd.a, vars, lift, params);
          switch (nd.func) {
            case ExprFunc::sqrt:
              return sqrt_checked(arg);
            case ExprFunc::sin:
              using std::sin;
              return sin(arg);
            case ExprFunc::cos:
              using std::cos;
              return cos(arg);
            case ExprFunc::exp:
              using std::exp;
              return exp(arg);
            case ExprFunc::log:
              return log_checked(arg);
          }
          throw domain_error("unreachable function kind");
        }
      }
      throw domain_error("unreachable node kind");
    } catch (const domain_error& e) {
      if (e.annotated()) throw;
      throw domain_error(std::string(e.what()) + " in '" +
                             src_.substr(nd.src_off, nd.src_len) +
                             "' (offset " + std::to_string(nd.src_off) + ")",
                         true);
    }
  }

  static double div_checked(double a, double b) {
    if (b == 0.0) throw domain_error("division by zero");
    return a / b;
  }
  static Jet2 div_checked(const Jet2& a, const Jet2& b) { return a / b; }
  static double sqrt_checked(double u) {
    if (u < 0.0) throw domain_error("sqrt of negative value");
    return std::sqrt(u);
  }
  static Jet2 sqrt_checked(const Jet2& u) { return sqrt(u); }
  static double log_checked(double u) {
    if (!(u > 0.0)) throw domain_error("log of non-positive value");
    return std::log(u);
  }
  static Jet2 log_checked(const Jet2& u) { return log(u); }

  std::string print_node(int idx) const;

  std::vector<ExprNode> nodes_;
  int root_ = -1;
  int n_ = 0, k_ = 0;
  std::vector<std::string> params_;
  std::string src_;

  friend class ExprParser;
};

namespace detail {

struct Token {
  enum class Type { number, ident, op, lparen, rparen, comma, end };
  Type type{};
  double number = 0.0;
  char op = 0;
  std::string text;
  std::size_t off = 0, len = 0;
};

}  // namespace detail

class ExprParser {
 public:
  ExprParser(std::string_view src, int n, int k,
             const std::map<std::string, double>& params)
      : src_(src), n_(n), k_(k), params_(&params) {
    tokenize();
  }

  ExprAst run() {
    ExprAst ast;
    ast.src_ = std::string(src_);
    ast.n_ = n_;
    ast.k_ = k_;
    nodes_ = &ast.nodes_;
    ast.root_ = parse_expr(0);
    expect_end();
    for (const auto& nd : ast.nodes_)
      if (nd.kind == ExprKind::parameter) {
        bool seen = false;
        for (const auto& p : ast.params_) seen = seen || p == nd.name;
        if (!seen) ast.params_.push_back(nd.name);
      }
    return ast;
  }

 private:
  using Token = detail::Token;

  void tokenize() {
    std::size_t i = 0;
    while (i < src_.size()) {
      const char c = src_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token t;
      t.off = i;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = src_.data() + i;
        const char* end = src_.data() + src_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin)
          throw parse_error("malformed number", i);
        t.type = Token::Type::number;
        t.number = value;
        t.len = static_cast<std::size_t>(ptr - begin);
        i += t.len;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                src_[j] == '_'))
          ++j;
        t.type = Token::Type::ident;
        t.text = std::string(src_.substr(i, j - i));
        t.len = j - i;
        i = j;
      } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
        t.type = Token::Type::op;
        t.op = c;
        t.len = 1;
        ++i;
      } else if (c == '(') {
        t.type = Token::Type::lparen;
        t.len = 1;
        ++i;
      } else if (c == ')') {
        t.type = Token::Type::rparen;
        t.len = 1;
        ++i;
      } else if (c == ',') {
        t.type = Token::Type::comma;
        t.len = 1;
        ++i;
      } else {
        throw parse_error(std::string("unexpected character '") + c + "'", i);
      }
      tokens_.push_back(std::move(t));
    }
    Token end;
    end.type = Token::Type::end;
    end.off = src_.size();
    tokens_.push_back(end);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  void expect_end() {
    if (peek().type != Token::Type::end)
      throw parse_error("trailing input", peek().off);
  }

  static int left_bp(char op) {
    switch (op) {
      case '+':
      case '-':
        return 10;
      case '*':
      case '/':
        return 20;
      case '^':
        return 50;
    }
    return -1;
  }
  // '^' is right associative, the rest are left associative.
  static int right_bp(char op) { return op == '^' ? 49 : left_bp(op) + 1; }
  static constexpr int kUnaryBp = 30;

  int add_node(ExprNode nd) {
    nodes_->push_back(std::move(nd));
    return static_cast<int>(nodes_->size() - 1);
  }

  int parse_expr(int min_bp) {
    int lhs = parse_prefix();
    for (;;) {
      const Token& t = peek();
      if (t.type != Token::Type::op) break;
      const int lbp = left_bp(t.op);
      if (lbp < min_bp) break;
      const char op = t.op;
      advance();
      int rhs = parse_expr(right_bp(op));
      ExprNode nd;
      nd.a = lhs;
      nd.b = rhs;
      nd.src_off = (*nodes_)[lhs].src_off;
      nd.src_len = (*nodes_)[rhs].src_off + (*nodes_)[rhs].src_len - nd.src_off;
      switch (op) {
        case '+':
          nd.kind = ExprKind::add;
          break;
        case '-':
          nd.kind = ExprKind::sub;
          break;
        case '*':
          nd.kind = ExprKind::mul;
          break;
        case '/':
          nd.kind = ExprKind::div;
          break;
        case '^': {
          nd.kind = ExprKind::pow_int;
          nd.b = -1;
          nd.ipow = fold_integer_exponent(rhs, t.off);
          break;
        }
      }
      lhs = add_node(std::move(nd));
    }
    return lhs;
  }

  int parse_prefix() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::number: {
        advance();
        ExprNode nd;
        nd.kind = ExprKind::constant;
        nd.number = t.number;
        nd.src_off = t.off;
        nd.src_len = t.len;
        return add_node(std::move(nd));
      }
      case Token::Type::op:
        if (t.op == '-') {
          advance();
          int operand = parse_expr(kUnaryBp);
          ExprNode nd;
          nd.kind = ExprKind::neg;
          nd.a = operand;
          nd.src_off = t.off;
          nd.src_len =
              (*nodes_)[operand].src_off + (*nodes_)[operand].src_len - t.off;
          return add_node(std::move(nd));
        }
        throw parse_error(std::string("unexpected operator '") + t.op + "'",
                          t.off);
      case Token::Type::lparen: {
        advance();
        int inner = parse_expr(0);
        if (peek().type != Token::Type::rparen)
          throw parse_error("expected ')'", peek().off);
        advance();
        return inner;
      }
      case Token::Type::ident:
        return parse_ident();
      case Token::Type::rparen:
        throw parse_error("unexpected ')'", t.off);
      case Token::Type::comma:
        throw parse_error("unexpected ','", t.off);
      case Token::Type::end:
        throw parse_error("unexpected end of input", t.off);
    }
    throw parse_error("unreachable", t.off);
  }

  int parse_ident() {
    const Token t = advance();
    if (peek().type == Token::Type::lparen) {
      std::optional<ExprFunc> fn;
      if (t.text == "sqrt") fn = ExprFunc::sqrt;
      else if (t.text == "sin") fn = ExprFunc::sin;
      else if (t.text == "cos") fn = ExprFunc::cos;
      else if (t.text == "exp") fn = ExprFunc::exp;
      else if (t.text == "log") fn = ExprFunc::log;
      if (!fn) throw parse_error("unknown function '" + t.text + "'", t.off);
      advance();  // '('
      int arg = parse_expr(0);
      if (peek().type == Token::Type::comma)
        throw parse_error("function '" + t.text + "' takes one argument",
                          peek().off);
      if (peek().type != Token::Type::rparen)
        throw parse_error("expected ')'", peek().off);
      const Token close = advance();
      ExprNode nd;
      nd.kind = ExprKind::call;
      nd.func = *fn;
      nd.a = arg;
      nd.src_off = t.off;
      nd.src_len = close.off + close.len - t.off;
      return add_node(std::move(nd));
    }
    // Variable q<i>/l<i> or parameter.
    if (auto idx = variable_index(t.text, t.off)) {
      ExprNode nd;
      nd.kind = ExprKind::variable;
      nd.var = *idx;
      nd.src_off = t.off;
      nd.src_len = t.len;
      return add_node(std::move(nd));
    }
    if (params_->count(t.text)) {
      ExprNode nd;
      nd.kind = ExprKind::parameter;
      nd.name = t.text;
      nd.src_off = t.off;
      nd.src_len = t.len;
      return add_node(std::move(nd));
    }
    throw parse_error("unknown identifier '" + t.text + "'", t.off);
  }

  std::optional<int> variable_index(const std::string& name,
                                    std::size_t off) const {
    if (name.size() < 2) return std::nullopt;
    const char head = name[0];
    if (head != 'q' && head != 'l') return std::nullopt;
    int index = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i])))
        return std::nullopt;
      index = index * 10 + (name[i] - '0');
      if (index > 1'000'000) return std::nullopt;
    }
    if (index < 1) return std::nullopt;
    if (head == 'q') {
      if (index > n_)
        throw parse_error("base variable '" + name +
                              "' exceeds base dimension " + std::to_string(n_),
                          off);
      return index - 1;
    }
    if (index > k_)
      throw parse_error("fiber variable '" + name +
                            "' exceeds fiber dimension " + std::to_string(k_),
                        off);
    return n_ + index - 1;
  }

  // The exponent subtree must fold to an integer without variables or
  // parameters; this keeps '^' total on its domain.
  long long fold_integer_exponent(int idx, std::size_t op_off) const {
    const double v = fold_constant(idx, op_off);
    if (!(std::abs(v) <= 1e15) || v != std::llrint(v))
      throw parse_error("fractional exponent", (*nodes_)[idx].src_off);
    return std::llrint(v);
  }

  double fold_constant(int idx, std::size_t op_off) const {
    const ExprNode& nd = (*nodes_)[idx];
    switch (nd.kind) {
      case ExprKind::constant:
        return nd.number;
      case ExprKind::neg:
        return -fold_constant(nd.a, op_off);
      case ExprKind::add:
        return fold_constant(nd.a, op_off) + fold_constant(nd.b, op_off);
      case ExprKind::sub:
        return fold_constant(nd.a, op_off) - fold_constant(nd.b, op_off);
      case ExprKind::mul:
        return fold_constant(nd.a, op_off) * fold_constant(nd.b, op_off);
      case ExprKind::pow_int:
        return std::pow(fold_constant(nd.a, op_off),
                        static_cast<double>(nd.ipow));
      default:
        throw parse_error("exponent must be a constant integer", nd.src_off);
    }
  }

  std::string_view src_;
  int n_, k_;
  const std::map<std::string, double>* params_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<ExprNode>* nodes_ = nullptr;
};

inline ExprAst ExprAst::parse(std::string_view src, int n, int k,
                              const std::map<std::string, double>& params) {
  if (src.empty()) throw parse_error("empty expression", 0);
  return ExprParser(src, n, k, params).run();
}

inline std::string ExprAst::print_node(int idx) const {
  const ExprNode& nd = nodes_[idx];
  char buf[40];
  switch (nd.kind) {
    case ExprKind::constant:
      std::snprintf(buf, sizeof(buf), "%.17g", nd.number);
      return buf;
    case ExprKind::variable:
      return nd.var < n_ ? "q" + std::to_string(nd.var + 1)
                         : "l" + std::to_string(nd.var - n_ + 1);
    case ExprKind::parameter:
      return nd.name;
    case ExprKind::neg:
      return "(-" + print_node(nd.a) + ")";
    case ExprKind::add:
      return "(" + print_node(nd.a) + " + " + print_node(nd.b) + ")";
    case ExprKind::sub:
      return "(" + print_node(nd.a) + " - " + print_node(nd.b) + ")";
    case ExprKind::mul:
      return "(" + print_node(nd.a) + " * " + print_node(nd.b) + ")";
    case ExprKind::div:
      return "(" + print_node(nd.a) + " / " + print_node(nd.b) + ")";
    case ExprKind::pow_int:
      return "(" + print_node(nd.a) + " ^ " +
             (nd.ipow < 0 ? "(" + std::to_string(nd.ipow) + ")"
                          : std::to_string(nd.ipow)) +
             ")";
    case ExprKind::call: {
      const char* names[] = {"sqrt", "sin", "cos", "exp", "log"};
      return std::string(names[static_cast<int>(nd.func)]) + "(" +
             print_node(nd.a) + ")";
    }
  }
  return "";
}

}  // namespace genfam
