#!/usr/bin/env python3
"""Independent brute-force oracle for the small worked values frozen into the C++ tests.

Works directly with permutations in one-line notation and sympy Laurent
polynomials. Kazhdan-Lusztig elements are computed with the classical
c_s * c_w recursion (mu-coefficient correction), which is a different route from
the R-polynomial recursion used by the library. Everything else is done by
explicit Hecke algebra products and generic linear solves.

Composition convention: (x*y)(i) = x(y(i)).
"""
import itertools
import sys

import sympy as sp

v = sp.symbols("v")
ALPHA = 1 / v - v
Q = v ** -2


def compose(x, y):
    return tuple(x[y[i] - 1] for i in range(len(x)))


def inverse(x):
    out = [0] * len(x)
    for i, xi in enumerate(x):
        out[xi - 1] = i + 1
    return tuple(out)


def length(x):
    return sum(1 for i in range(len(x)) for j in range(i + 1, len(x)) if x[i] > x[j])


def gen(n, i):
    p = list(range(1, n + 1))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def transposition(n, i, j):
    p = list(range(1, n + 1))
    p[i - 1], p[j - 1] = p[j - 1], p[i - 1]
    return tuple(p)


def reduced_word(x):
    """Right descents peeled off: x = s_{w1} ... s_{wk}."""
    n = len(x)
    word = []
    while length(x) > 0:
        for i in range(1, n):
            y = compose(x, gen(n, i))
            if length(y) < length(x):
                word.append(i)
                x = y
                break
    return list(reversed(word))


def simplify(e):
    return {k: sp.expand(c) for k, c in e.items() if sp.expand(c) != 0}


def add(a, b, scale=1):
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + scale * c
    return simplify(out)


def right_mul_gen(e, n, i):
    s = gen(n, i)
    out = {}
    for w, c in e.items():
        ws = compose(w, s)
        out[ws] = out.get(ws, 0) + c
        if length(ws) < length(w):
            out[w] = out.get(w, 0) + ALPHA * c
    return simplify(out)


def mul(a, b):
    n = len(next(iter(a)))
    out = {}
    for y, c in b.items():
        part = dict(a)
        for i in reduced_word(y):
            part = right_mul_gen(part, n, i)
        out = add(out, {k: cc * c for k, cc in part.items()})
    return out


def h(x):
    return {x: sp.Integer(1)}


def group(n):
    return sorted(itertools.permutations(range(1, n + 1)), key=lambda p: (length(p), p))


def bruhat_leq(x, y):
    """Tableau criterion for S_n."""
    n = len(x)
    for k in range(1, n + 1):
        a = sorted(x[:k])
        b = sorted(y[:k])
        if any(ai > bi for ai, bi in zip(a, b)):
            return False
    return True


def kl_basis(n):
    """c_w via c_s c_w = c_{sw} + sum_{z<w, sz<z} mu(z,w) c_z."""
    W = group(n)
    e = tuple(range(1, n + 1))
    c = {e: h(e)}
    for w in W:
        if w == e:
            continue
        word = reduced_word(w)
        s_idx = word[0]
        s = gen(n, s_idx)
        u = compose(s, w)  # u < w, w = s u
        cs = {s: sp.Integer(1), e: v}
        prod = mul(cs, c[u])
        for z in W:
            if z in c and length(z) < length(u) and bruhat_leq(z, u) and length(compose(s, z)) < length(z):
                mu = sp.expand(c[u].get(z, 0)).coeff(v, 1)
                if mu != 0:
                    prod = add(prod, c[z], -mu)
        c[w] = prod
    return c


def kl_normalized(c, x, w):
    return sp.expand(v ** (length(x) - length(w)) * c[w].get(x, 0))


def to_q(expr):
    """Rewrite a Laurent expression in v that lies in Z[q] as a polynomial in q."""
    qq = sp.symbols("q")
    expr = sp.expand(expr)
    if expr == 0:
        return sp.Integer(0)
    poly = sp.Poly(sp.expand(expr * v ** 200), v)
    out = 0
    for (deg,), coef in poly.terms():
        e = deg - 200
        assert e <= 0 and e % 2 == 0, expr
        out += coef * qq ** (-e // 2)
    return sp.expand(out)


def bar(expr):
    return sp.expand(expr.subs(v, 1 / v))


def main():
    out = []
    n = 3
    W = group(n)
    e = W[0]
    w0 = W[-1]
    s1, s2 = gen(n, 1), gen(n, 2)
    t13 = transposition(n, 1, 3)

    c = kl_basis(n)
    # J = {s1}: w0^J = s1
    w0J = s1
    left = h(compose(w0, w0J))
    for name, omega in [("(1,3)", t13), ("s2", s2), ("s1", s1)]:
        prod = mul(left, h(omega))
        coef = prod.get(compose(compose(w0, w0J), e), 0)
        rj = sp.expand(v ** (length(e) - length(omega)) * coef)
        out.append(f"R_J[e,{name}] = {to_q(rj)}")

    pw = c[w0].get(e, 0)
    pd = sp.expand(sp.cancel((bar(pw) - pw) / ALPHA))
    p_derived = sp.expand(v ** (length(e) - length(w0) + 1) * pd)
    out.append(f"P_derived[e,w0] = {to_q(p_derived)}")

    # I^tau for tau = s1 (= w0^J): alpha^{-1} (<f^{e,tau}, c_w0> - Pcheck)
    def pairing_f(tau, sigma, X):
        return mul(h(tau), X).get(compose(tau, sigma), 0)

    def i_check(tau, sigma, omega):
        return sp.expand(sp.cancel((pairing_f(tau, sigma, c[omega]) - c[omega].get(sigma, 0)) / ALPHA))

    norm = v ** (length(e) - length(w0) + 1)
    I = sp.expand(norm * i_check(w0J, e, w0))
    Qv = sp.expand(norm * bar(i_check(compose(w0, w0J), e, w0)))
    out.append(f"I_J[e,w0] = {to_q(I)}")
    out.append(f"Q_J[e,w0] = {to_q(Qv)}")

    # gamma: expand c_w0 on the hybrid basis c_{x_J} h_{^J x} by a generic linear solve
    def factor(x):
        # J = {s1}: W_J = {e, s1}; ^J x has minimal length in {x, s1 x}
        y = compose(s1, x)
        rep = x if length(x) < length(y) else y
        xj = compose(x, inverse(rep))
        return xj, rep

    syms = {x: sp.Symbol(f"g_{''.join(map(str, x))}") for x in W}
    combo = {}
    for x in W:
        xj, rep = factor(x)
        hyb = mul(c[xj], h(rep))
        combo = add(combo, {k: cc * syms[x] for k, cc in hyb.items()})
    eqs = [sp.expand(combo.get(x, 0) - c[w0].get(x, 0)) for x in W]
    sol = sp.solve(eqs, list(syms.values()), dict=True)[0]
    for x in W:
        out.append(f"gamma_check[{''.join(map(str, x))},w0] = {sp.expand(sol[syms[x]])}")
    # gamma' for sigma = e: kappa in W_J = {e, s1}, gamma'_kappa = gamma_{kappa ^J e, w0} (normalized)
    for name, kappa in [("e", e), ("s1", s1)]:
        g = sp.expand(v ** (length(kappa) - length(w0)) * sol[syms[kappa]])
        out.append(f"gamma_prime[{name}] = {to_q(g)}")

    # S_4: classical smallest non-trivial KL polynomial
    c4 = kl_basis(4)
    x = (1, 3, 2, 4)
    w = (4, 2, 3, 1)
    out.append(f"P_S4[1324,4231] = {to_q(kl_normalized(c4, x, w))}")
    # count of Bruhat graph edges in S_3 interval [e, w0]
    T = [transposition(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    edges = sum(1 for z in W for t in T if length(compose(t, z)) > length(z))
    out.append(f"S3_bruhat_graph_edges = {edges}")
    # B_3 order by BFS over signed permutation generators
    print("\n".join(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
