#pragma once

// Forward-mode jets over n independent variables. Jet1 carries the gradient,
// Jet2 the gradient and the Hessian. Every elementary function goes through
// chain(), which takes f(a), f'(a), f''(a).

#include <Eigen/Dense>

namespace elc {

template <typename Scalar>
struct Jet1 {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Scalar value{};
    Vector grad;

    static Jet1 constant(Scalar c, Eigen::Index n) { return {c, Vector::Zero(n)}; }
    static Jet1 variable(Scalar x, Eigen::Index n, Eigen::Index i)
    {
        Jet1 j = constant(x, n);
        j.grad(i) = Scalar(1);
        return j;
    }
    Eigen::Index size() const { return grad.size(); }

    Jet1 chain(Scalar f, Scalar df, Scalar /*d2f*/) const { return {f, df * grad}; }

    friend Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.value + b.value, a.grad + b.grad}; }
    friend Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.value - b.value, a.grad - b.grad}; }
    friend Jet1 operator-(const Jet1& a) { return {-a.value, -a.grad}; }
    friend Jet1 operator*(const Jet1& a, const Jet1& b)
    {
        return {a.value * b.value, a.value * b.grad + b.value * a.grad};
    }
};

template <typename Scalar>
struct Jet2 {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Scalar value{};
    Vector grad;
    Matrix hess;

    static Jet2 constant(Scalar c, Eigen::Index n) { return {c, Vector::Zero(n), Matrix::Zero(n, n)}; }
    static Jet2 variable(Scalar x, Eigen::Index n, Eigen::Index i)
    {
        Jet2 j = constant(x, n);
        j.grad(i) = Scalar(1);
        return j;
    }
    Eigen::Index size() const { return grad.size(); }

    Jet2 chain(Scalar f, Scalar df, Scalar d2f) const
    {
        return {f, df * grad, df * hess + d2f * grad * grad.transpose()};
    }

    friend Jet2 operator+(const Jet2& a, const Jet2& b)
    {
        return {a.value + b.value, a.grad + b.grad, a.hess + b.hess};
    }
    friend Jet2 operator-(const Jet2& a, const Jet2& b)
    {
        return {a.value - b.value, a.grad - b.grad, a.hess - b.hess};
    }
    friend Jet2 operator-(const Jet2& a) { return {-a.value, -a.grad, -a.hess}; }
    friend Jet2 operator*(const Jet2& a, const Jet2& b)
    {
        const Matrix cross = a.grad * b.grad.transpose();
        return {a.value * b.value, a.value * b.grad + b.value * a.grad,
                a.value * b.hess + b.value * a.hess + cross + cross.transpose()};
    }
};

}  // namespace elc
