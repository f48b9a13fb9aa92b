#include "brinkmann/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace brinkmann::dsl {

namespace {

struct FunctionEntry {
  const char* name;
  Function fn;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Function::Sin}, {"cos", Function::Cos},   {"exp", Function::Exp},
    {"log", Function::Log}, {"sqrt", Function::Sqrt}, {"tanh", Function::Tanh},
};

constexpr double kPi = 3.14159265358979323846;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords) : text_(text), coords_(coords) {}

  NodePtr parse() {
    NodePtr root = parse_sum();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "', expected operator or end of input");
    }
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr binary(NodeKind kind, std::size_t offset, NodePtr l, NodePtr r) {
    Node n;
    n.kind = kind;
    n.offset = offset;
    n.lhs = std::move(l);
    n.rhs = std::move(r);
    return make_node(std::move(n));
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = binary(NodeKind::Add, at, lhs, parse_product());
      } else if (accept('-')) {
        lhs = binary(NodeKind::Sub, at, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = binary(NodeKind::Mul, at, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(NodeKind::Div, at, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) {
      Node n;
      n.kind = NodeKind::Neg;
      n.offset = at;
      n.lhs = parse_unary();
      return make_node(std::move(n));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return binary(NodeKind::Pow, at, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "expected expression, found end of input");
    const std::size_t at = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    throw ParseError(at, std::string("expected expression, found '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
        while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
        end = e;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + at, text_.data() + end, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + end) throw ParseError(at, "malformed number");
    pos_ = end;
    Node n;
    n.kind = NodeKind::Constant;
    n.value = value;
    n.offset = at;
    return make_node(std::move(n));
  }

  NodePtr parse_name() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    const std::string name(text_.substr(at, end - at));
    pos_ = end;

    for (const auto& f : kFunctions) {
      if (name == f.name) {
        if (!accept('(')) throw ParseError(pos_, "expected '(' after function name '" + name + "'");
        Node n;
        n.kind = NodeKind::Call;
        n.function = f.fn;
        n.offset = at;
        n.lhs = parse_sum();
        if (!accept(')')) throw ParseError(pos_, "expected ')'");
        return make_node(std::move(n));
      }
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == name) {
        Node n;
        n.kind = NodeKind::Variable;
        n.variable = static_cast<int>(i);
        n.offset = at;
        return make_node(std::move(n));
      }
    }
    if (name == "pi") {
      Node n;
      n.kind = NodeKind::Constant;
      n.value = kPi;
      n.offset = at;
      return make_node(std::move(n));
    }
    throw UnknownIdentifierError(at, name);
  }

  std::string_view text_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

std::string format_constant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Node& n, const std::vector<std::string>& coords, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      out += format_constant(n.value);
      return;
    case NodeKind::Variable:
      out += coords.at(static_cast<std::size_t>(n.variable));
      return;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, coords, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, coords, out);
      out += ')';
      return;
    default:
      break;
  }
  const char* op = n.kind == NodeKind::Add   ? " + "
                   : n.kind == NodeKind::Sub ? " - "
                   : n.kind == NodeKind::Mul ? " * "
                   : n.kind == NodeKind::Div ? " / "
                                             : "^";
  out += '(';
  print(*n.lhs, coords, out);
  out += op;
  print(*n.rhs, coords, out);
  out += ')';
}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return a.value == b.value;
    case NodeKind::Variable:
      return a.variable == b.variable;
    case NodeKind::Neg:
      return equal(*a.lhs, *b.lhs);
    case NodeKind::Call:
      return a.function == b.function && equal(*a.lhs, *b.lhs);
    default:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

bool any_variable(const Node& n, const std::function<bool(int)>& pred) {
  if (n.kind == NodeKind::Variable) return pred(n.variable);
  if (n.lhs && any_variable(*n.lhs, pred)) return true;
  if (n.rhs && any_variable(*n.rhs, pred)) return true;
  return false;
}

}  // namespace

const char* function_name(Function f) {
  for (const auto& e : kFunctions) {
    if (e.fn == f) return e.name;
  }
  return "?";
}

Expr::Expr(NodePtr root, std::vector<std::string> coords) : root_(std::move(root)), coords_(std::move(coords)) {}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, coords_, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (!root_ || !other.root_) return !root_ && !other.root_;
  return equal(*root_, *other.root_);
}

bool Expr::is_constant() const {
  return !root_ || !any_variable(*root_, [](int) { return true; });
}

bool Expr::depends_on(int coordinate) const {
  return root_ && any_variable(*root_, [coordinate](int v) { return v == coordinate; });
}

Expr Expr::constant(double value, std::vector<std::string> coords) {
  Node n;
  n.kind = NodeKind::Constant;
  n.value = value;
  return Expr(make_node(std::move(n)), std::move(coords));
}

Expr Expr::variable(int index, std::vector<std::string> coords) {
  Node n;
  n.kind = NodeKind::Variable;
  n.variable = index;
  return Expr(make_node(std::move(n)), std::move(coords));
}

Expr parse_expr(std::string_view text, const std::vector<std::string>& coords) {
  return Expr(Parser(text, coords).parse(), coords);
}

// ---------------------------------------------------------------------------
// Program

Program::Program(const Expr& expr) : dim_(static_cast<int>(expr.coords().size())) {
  if (expr.empty()) {
    code_.push_back({Op::Const, -1, 0.0, 0});
    depth_ = 1;
    return;
  }
  emit(expr.root());
  int depth = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Const:
      case Op::Var:
        ++depth;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow:
        --depth;
        break;
      default:
        break;
    }
    depth_ = std::max(depth_, depth);
  }
  constant_ = expr.is_constant();
  if (constant_) {
    try {
      constant_value_ = eval<double>(std::span<const double>());
    } catch (const EvalError&) {
      constant_ = false;  // keep the failure for evaluation time
    }
  }
}

void Program::emit(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant:
      code_.push_back({Op::Const, -1, n.value, n.offset});
      return;
    case NodeKind::Variable:
      code_.push_back({Op::Var, n.variable, 0.0, n.offset});
      return;
    case NodeKind::Neg:
      emit(*n.lhs);
      code_.push_back({Op::Neg, -1, 0.0, n.offset});
      return;
    case NodeKind::Call: {
      emit(*n.lhs);
      Op op = Op::Sin;
      switch (n.function) {
        case Function::Sin: op = Op::Sin; break;
        case Function::Cos: op = Op::Cos; break;
        case Function::Exp: op = Op::Exp; break;
        case Function::Log: op = Op::Log; break;
        case Function::Sqrt: op = Op::Sqrt; break;
        case Function::Tanh: op = Op::Tanh; break;
      }
      code_.push_back({op, -1, 0.0, n.offset});
      return;
    }
    case NodeKind::Pow: {
      const Expr exponent(n.rhs, {});
      if (exponent.is_constant()) {
        Program p(exponent);
        if (p.is_constant()) {
          emit(*n.lhs);
          code_.push_back({Op::PowConst, -1, p.constant_value(), n.offset});
          return;
        }
      }
      emit(*n.lhs);
      emit(*n.rhs);
      code_.push_back({Op::Pow, -1, 0.0, n.offset});
      return;
    }
    default:
      break;
  }
  emit(*n.lhs);
  emit(*n.rhs);
  const Op op = n.kind == NodeKind::Add   ? Op::Add
                : n.kind == NodeKind::Sub ? Op::Sub
                : n.kind == NodeKind::Mul ? Op::Mul
                                          : Op::Div;
  code_.push_back({op, -1, 0.0, n.offset});
}

template <class T>
T Program::eval(std::span<const T> vars) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  thread_local std::vector<T> stack;
  stack.clear();
  stack.reserve(static_cast<std::size_t>(depth_));
  for (const Instr& ins : code_) {
    switch (ins.op) {
      case Op::Const:
        stack.emplace_back(ins.value);
        break;
      case Op::Var:
        stack.push_back(vars[static_cast<std::size_t>(ins.index)]);
        break;
      case Op::Neg:
        stack.back() = -stack.back();
        break;
      case Op::Sin:
        stack.back() = sin(stack.back());
        break;
      case Op::Cos:
        stack.back() = cos(stack.back());
        break;
      case Op::Exp:
        stack.back() = exp(stack.back());
        break;
      case Op::Tanh:
        stack.back() = tanh(stack.back());
        break;
      case Op::Log:
        if (!(value_of(stack.back()) > 0.0)) throw EvalError(ins.offset, "log of nonpositive value");
        stack.back() = log(stack.back());
        break;
      case Op::Sqrt:
        if (value_of(stack.back()) < 0.0) throw EvalError(ins.offset, "sqrt of negative value");
        stack.back() = sqrt(stack.back());
        break;
      case Op::PowConst: {
        const double base = value_of(stack.back());
        const bool integral = ins.value == std::floor(ins.value);
        if (base < 0.0 && !integral) throw EvalError(ins.offset, "non-integer power of negative value");
        if (base == 0.0 && ins.value < 0.0) throw EvalError(ins.offset, "division by zero");
        stack.back() = pow_const(stack.back(), ins.value);
        break;
      }
      default: {
        T rhs = std::move(stack.back());
        stack.pop_back();
        T& lhs = stack.back();
        switch (ins.op) {
          case Op::Add:
            lhs = lhs + rhs;
            break;
          case Op::Sub:
            lhs = lhs - rhs;
            break;
          case Op::Mul:
            lhs = lhs * rhs;
            break;
          case Op::Div:
            if (value_of(rhs) == 0.0) throw EvalError(ins.offset, "division by zero");
            lhs = lhs / rhs;
            break;
          case Op::Pow:
            if (!(value_of(lhs) > 0.0)) throw EvalError(ins.offset, "power with nonpositive base");
            lhs = exp(rhs * log(lhs));
            break;
          default:
            break;
        }
      }
    }
  }
  return stack.back();
}

template double Program::eval<double>(std::span<const double>) const;
template Dual1 Program::eval<Dual1>(std::span<const Dual1>) const;
template Dual2 Program::eval<Dual2>(std::span<const Dual2>) const;

Jet eval_expr(const Expr& e, std::span<const double> bindings, const EvalMode& mode) {
  const std::size_t n = e.coords().size();
  if (bindings.size() < n) throw DomainError("eval_expr: bindings do not cover all coordinates");
  const Program program(e);
  Jet jet;
  jet.partials.assign(n, 0.0);
  if (!mode.dual) {
    jet.value = program.eval<double>(bindings.first(n));
    return jet;
  }
  std::vector<int> dirs = mode.directions;
  if (dirs.empty()) {
    for (std::size_t i = 0; i < n; ++i) dirs.push_back(static_cast<int>(i));
  }
  if (dirs.size() > static_cast<std::size_t>(kMaxDim)) throw DomainError("eval_expr: too many directions");
  const int m = static_cast<int>(dirs.size());
  std::vector<Dual1> vars(n);
  for (std::size_t i = 0; i < n; ++i) vars[i] = make_constant<Dual1>(bindings[i], m);
  for (int k = 0; k < m; ++k) {
    const auto i = static_cast<std::size_t>(dirs[static_cast<std::size_t>(k)]);
    if (i >= n) throw DomainError("eval_expr: direction out of range");
    vars[i] = make_variable<Dual1>(bindings[i], k, m);
  }
  const Dual1 r = program.eval<Dual1>(vars);
  jet.value = r.v;
  for (int k = 0; k < m; ++k) jet.partials[static_cast<std::size_t>(dirs[static_cast<std::size_t>(k)])] = r.d[k];
  return jet;
}

}  // namespace brinkmann::dsl
