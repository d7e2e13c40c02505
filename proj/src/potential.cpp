#include "elc/potential.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "elc/errors.hpp"

namespace elc {

namespace {

class Parser {
public:
    Parser(std::string_view text, int n) : text_(text), n_(n) {}

    std::vector<Node> nodes;

    int parse()
    {
        const int root = expr();
        skip_space();
        if (pos_ < text_.size()) fail("unexpected character");
        return root;
    }

private:
    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, std::string code = "syntax_error") const
    {
        throw ParseError(std::move(code), "potential: " + msg, pos_);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Node node)
    {
        nodes.push_back(node);
        return static_cast<int>(nodes.size()) - 1;
    }

    int binary(NodeKind kind, std::size_t offset, int lhs, int rhs)
    {
        return push(Node{.kind = kind, .offset = offset, .lhs = lhs, .rhs = rhs});
    }

    int expr()
    {
        skip_space();
        const std::size_t start = pos_;
        int lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = binary(NodeKind::Add, start, lhs, term());
            } else if (accept('-')) {
                lhs = binary(NodeKind::Sub, start, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term()
    {
        skip_space();
        const std::size_t start = pos_;
        int lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = binary(NodeKind::Mul, start, lhs, unary());
            } else if (accept('/')) {
                lhs = binary(NodeKind::Div, start, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    int unary()
    {
        skip_space();
        const std::size_t start = pos_;
        if (accept('-')) return push(Node{.kind = NodeKind::Neg, .offset = start, .lhs = unary()});
        return power();
    }

    int power()
    {
        skip_space();
        const std::size_t start = pos_;
        int base = primary();
        while (accept('^')) {
            skip_space();
            bool negative = false;
            if (pos_ < text_.size() && text_[pos_] == '-') {
                negative = true;
                ++pos_;
            }
            int e = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), e);
            if (ec == std::errc::result_out_of_range) fail("exponent out of range");
            if (ec != std::errc()) fail("expected integer exponent");
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            base = push(Node{.kind = NodeKind::Pow, .offset = start, .exponent = negative ? -e : e, .lhs = base});
        }
        return base;
    }

    int primary()
    {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
            const std::string_view word = text_.substr(pos_, end - pos_);
            if (word == "x") return variable();
            NodeKind kind;
            if (word == "sin") {
                kind = NodeKind::Sin;
            } else if (word == "cos") {
                kind = NodeKind::Cos;
            } else if (word == "exp") {
                kind = NodeKind::Exp;
            } else if (word == "sqrt") {
                kind = NodeKind::Sqrt;
            } else {
                fail("unknown identifier '" + std::string(word) + "'", "unknown_identifier");
            }
            pos_ = end;
            if (!accept('(')) fail("expected '(' after function name");
            const int arg = expr();
            if (!accept(')')) fail("expected ')'");
            return push(Node{.kind = kind, .offset = start, .lhs = arg});
        }
        fail("expected number, variable, function or '('");
    }

    int number()
    {
        const std::size_t start = pos_;
        double value = 0.0;
        auto [ptr, ec] =
            std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value, std::chars_format::general);
        if (ec != std::errc() || !std::isfinite(value)) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return push(Node{.kind = NodeKind::Number, .offset = start, .number = value});
    }

    int variable()
    {
        const std::size_t start = pos_;
        ++pos_;  // 'x'
        std::int64_t index = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), index);
        if (ec == std::errc::result_out_of_range) {
            pos_ = start;
            fail("variable index out of range", "dimension_overflow");
        }
        if (ec != std::errc()) fail("expected variable index after 'x'");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (index < 1 || index > n_) {
            const std::size_t end = pos_;
            pos_ = start;
            fail("unbound variable '" + std::string(text_.substr(start, end - start)) + "' (dimension " +
                     std::to_string(n_) + ")",
                 "unbound_variable");
        }
        return push(Node{.kind = NodeKind::Variable, .offset = start, .index = static_cast<int>(index - 1)});
    }
};

// Scalar helpers so the evaluator below is written once for double and jets.
struct DoubleOps {
    using T = double;
    static double value(double x) { return x; }
    static double chain(double, double f, double, double) { return f; }
};

template <typename J>
struct JetOps {
    using T = J;
    static double value(const J& x) { return x.value; }
    static J chain(const J& x, double f, double df, double d2f) { return x.chain(f, df, d2f); }
};

template <typename Ops>
class Evaluator {
public:
    using T = typename Ops::T;

    Evaluator(const std::vector<Node>& nodes, std::vector<T> vars, T zero)
        : nodes_(nodes), vars_(std::move(vars)), zero_(std::move(zero))
    {
    }

    T run(int id) const
    {
        T r = eval(id);
        return r;
    }

private:
    const std::vector<Node>& nodes_;
    std::vector<T> vars_;
    T zero_;

    static T make_constant(const T& zero, double c)
    {
        if constexpr (std::is_same_v<T, double>) {
            return c;
        } else {
            T r = zero;
            r.value = c;
            return r;
        }
    }

    [[noreturn]] static void fault(const Node& node, const std::string& what)
    {
        throw DomainError("domain fault: " + what + " at offset " + std::to_string(node.offset), node.offset);
    }

    static void check(const Node& node, double v)
    {
        if (!std::isfinite(v)) fault(node, "non-finite value");
    }

    T eval(int id) const
    {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        switch (node.kind) {
        case NodeKind::Number: return make_constant(zero_, node.number);
        case NodeKind::Variable: return vars_[static_cast<std::size_t>(node.index)];
        case NodeKind::Add: return finite(node, eval(node.lhs) + eval(node.rhs));
        case NodeKind::Sub: return finite(node, eval(node.lhs) - eval(node.rhs));
        case NodeKind::Mul: return finite(node, eval(node.lhs) * eval(node.rhs));
        case NodeKind::Neg: return -eval(node.lhs);
        case NodeKind::Div: {
            const T a = eval(node.lhs);
            const T b = eval(node.rhs);
            const double bv = Ops::value(b);
            if (bv == 0.0) fault(node, "division by zero");
            if constexpr (std::is_same_v<T, double>) {
                return finite(node, a / b);
            } else {
                return finite(node, a * Ops::chain(b, 1.0 / bv, -1.0 / (bv * bv), 2.0 / (bv * bv * bv)));
            }
        }
        case NodeKind::Pow: {
            const T a = eval(node.lhs);
            const double x = Ops::value(a);
            const int p = node.exponent;
            if (p < 0 && x == 0.0) fault(node, "negative power of zero");
            if (p == 0) return make_constant(zero_, 1.0);
            const double f = std::pow(x, p);
            const double df = p * std::pow(x, p - 1);
            const double d2f = (p == 1) ? 0.0 : p * (p - 1.0) * std::pow(x, p - 2);
            return finite(node, Ops::chain(a, f, df, d2f));
        }
        case NodeKind::Sin: {
            const T a = eval(node.lhs);
            const double x = Ops::value(a);
            return finite(node, Ops::chain(a, std::sin(x), std::cos(x), -std::sin(x)));
        }
        case NodeKind::Cos: {
            const T a = eval(node.lhs);
            const double x = Ops::value(a);
            return finite(node, Ops::chain(a, std::cos(x), -std::sin(x), -std::cos(x)));
        }
        case NodeKind::Exp: {
            const T a = eval(node.lhs);
            const double e = std::exp(Ops::value(a));
            return finite(node, Ops::chain(a, e, e, e));
        }
        case NodeKind::Sqrt: {
            const T a = eval(node.lhs);
            const double x = Ops::value(a);
            if (x < 0.0) fault(node, "square root of a negative number");
            const double s = std::sqrt(x);
            if constexpr (std::is_same_v<T, double>) {
                return s;
            } else {
                if (s == 0.0) fault(node, "square root is not differentiable at 0");
                return finite(node, Ops::chain(a, s, 0.5 / s, -0.25 / (x * s)));
            }
        }
        }
        fault(node, "corrupt expression tree");
    }

    static T finite(const Node& node, T v)
    {
        if constexpr (std::is_same_v<T, double>) {
            check(node, v);
        } else {
            check(node, v.value);
            if (!v.grad.allFinite()) fault(node, "non-finite derivative");
        }
        return v;
    }
};

void check_point(const Expr& e, const Eigen::VectorXd& q)
{
    if (q.size() != e.dimension())
        throw Error("dimension_mismatch", "point has dimension " + std::to_string(q.size()) + ", potential has " +
                                              std::to_string(e.dimension()));
}

template <typename J>
J eval_jet(const Expr& e, const Eigen::VectorXd& q)
{
    check_point(e, q);
    const Eigen::Index n = q.size();
    std::vector<J> vars;
    vars.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) vars.push_back(J::variable(q(i), n, i));
    return Evaluator<JetOps<J>>(e.nodes(), std::move(vars), J::constant(0.0, n)).run(e.root());
}

}  // namespace

Expr parse_expr(std::string_view text, int n)
{
    if (n < 0 || n > kMaxDimension)
        throw ParseError("dimension_overflow", "potential: dimension " + std::to_string(n) + " not in [0, " +
                                                   std::to_string(kMaxDimension) + "]", 0);
    Parser p(text, n);
    Expr e;
    e.root_ = p.parse();
    e.nodes_ = std::make_shared<const std::vector<Node>>(std::move(p.nodes));
    e.n_ = n;
    return e;
}

double Expr::eval(const Eigen::VectorXd& q) const
{
    check_point(*this, q);
    std::vector<double> vars(q.data(), q.data() + q.size());
    return Evaluator<DoubleOps>(*nodes_, std::move(vars), 0.0).run(root_);
}

Jet1<double> Expr::jet1(const Eigen::VectorXd& q) const { return eval_jet<Jet1<double>>(*this, q); }

Jet2<double> Expr::jet2(const Eigen::VectorXd& q) const
{
    Jet2<double> j = eval_jet<Jet2<double>>(*this, q);
    j.hess = 0.5 * (j.hess + j.hess.transpose()).eval();
    return j;
}

namespace {

int precedence(NodeKind k)
{
    switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
    }
}

std::string format_number(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string print_node(const std::vector<Node>& nodes, int id)
{
    const Node& node = nodes[static_cast<std::size_t>(id)];
    auto child = [&](int c, int min_prec) {
        std::string s = print_node(nodes, c);
        if (precedence(nodes[static_cast<std::size_t>(c)].kind) < min_prec) return "(" + s + ")";
        return s;
    };
    const int p = precedence(node.kind);
    switch (node.kind) {
    case NodeKind::Number: return format_number(node.number);
    case NodeKind::Variable: return "x" + std::to_string(node.index + 1);
    case NodeKind::Add: return child(node.lhs, p) + " + " + child(node.rhs, p + 1);
    case NodeKind::Sub: return child(node.lhs, p) + " - " + child(node.rhs, p + 1);
    case NodeKind::Mul: return child(node.lhs, p) + "*" + child(node.rhs, p + 1);
    case NodeKind::Div: return child(node.lhs, p) + "/" + child(node.rhs, p + 1);
    case NodeKind::Neg: return "-" + child(node.lhs, p);
    case NodeKind::Pow: return child(node.lhs, p) + "^" + std::to_string(node.exponent);
    case NodeKind::Sin: return "sin(" + print_node(nodes, node.lhs) + ")";
    case NodeKind::Cos: return "cos(" + print_node(nodes, node.lhs) + ")";
    case NodeKind::Exp: return "exp(" + print_node(nodes, node.lhs) + ")";
    case NodeKind::Sqrt: return "sqrt(" + print_node(nodes, node.lhs) + ")";
    }
    return "?";
}

}  // namespace

std::string print(const Expr& e)
{
    if (e.root() < 0) return "";
    return print_node(e.nodes(), e.root());
}

InvarianceCheck check_invariance(const Expr& u, const SkewGeneratorSet& gens, int samples, double tol, double box,
                                 std::mt19937_64& rng)
{
    const int n = u.dimension();
    if (gens.dimension() != n && gens.rank() > 0)
        throw Error("dimension_mismatch", "generators act on a different dimension than the potential");
    InvarianceCheck out;
    if (gens.rank() == 0) return out;
    std::uniform_real_distribution<double> coord(-box, box);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phi(static_cast<std::size_t>(gens.rank()));
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q(i) = coord(rng);
        for (auto& a : phi) a = angle(rng);
        const double base = u.eval(q);
        const double moved = u.eval(gens.group_element(phi) * q);
        const double violation = std::abs(moved - base) / (1.0 + std::abs(base));
        if (violation > out.worst) {
            out.worst = violation;
            out.worst_point = q;
        }
    }
    out.invariant = out.worst <= tol;
    return out;
}

}  // namespace elc
