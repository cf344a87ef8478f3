"""Small helpers for polynomials over the prime field F_p.

A polynomial is a plain list of ints ``[c0, c1, ...]`` (coefficients mod p,
constant term first) with no trailing zeros; ``[]`` is the zero polynomial.
Just enough of the usual toolbox lives here — gcd, squarefree tests, root
multiplicities — for deciding when residual polynomials separate points and
for reading ramification off reductions.  Everything is exact mod p.
"""

from __future__ import annotations


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def normalize(f, p):
    return trim([c % p for c in f])


def degree(f):
    return len(f) - 1 if f else -1


def is_zero(f):
    return not f


def add(f, g, p):
    out = [0] * max(len(f), len(g))
    for i, c in enumerate(f):
        out[i] += c
    for i, c in enumerate(g):
        out[i] += c
    return normalize(out, p)


def sub(f, g, p):
    out = [0] * max(len(f), len(g))
    for i, c in enumerate(f):
        out[i] += c
    for i, c in enumerate(g):
        out[i] -= c
    return normalize(out, p)


def scale(f, a, p):
    return normalize([c * a for c in f], p)


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return normalize(out, p)


def monic(f, p):
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return scale(f, inv, p)


def divmod_fp(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = normalize(f, p)
    dg, inv = degree(g), pow(g[-1], -1, p)
    q = [0] * max(1, len(f) - dg)
    while degree(f) >= dg:
        c = (f[-1] * inv) % p
        k = degree(f) - dg
        q[k] = c
        for i, gi in enumerate(g):
            f[i + k] = (f[i + k] - c * gi) % p
        f = trim(f)
    return trim(q), f


def gcd(f, g, p):
    f, g = normalize(f, p), normalize(g, p)
    while g:
        f, g = g, divmod_fp(f, g, p)[1]
    return monic(f, p)


def deriv(f, p):
    return normalize([(i * c) % p for i, c in enumerate(f)][1:], p)


def is_squarefree(f, p):
    return degree(gcd(f, deriv(f, p), p)) == 0


def radical(f, p):
    """Product of the distinct monic irreducible factors of f.

    Multiplicities divisible by p make the naive f/gcd(f, f') trick fail
    (the derivative kills exactly those factors), so they are peeled off as
    literal p-th powers — over F_p a polynomial with zero derivative is
    g(X**p) = g(X)**p coefficientwise — and handled recursively.
    """
    f = monic(normalize(f, p), p)
    if not f:
        raise ValueError("zero polynomial has no radical")
    if degree(f) == 0:
        return [1]
    d = deriv(f, p)
    if not d:
        u = [f[i] for i in range(0, len(f), p)]
        return radical(u, p)
    g = gcd(f, d, p)
    w, r = divmod_fp(f, g, p)  # the factors of tame multiplicity, each once
    assert not r
    rest = f
    h = gcd(rest, w, p)
    while degree(h) > 0:
        rest, r = divmod_fp(rest, h, p)
        assert not r
        h = gcd(rest, w, p)
    return mul(w, radical(rest, p), p)


def squarefree_degree(f, p):
    """Degree of the squarefree part (number of distinct roots in a splitting field)."""
    return degree(radical(f, p))


def eval_at(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def root_multiplicity(f, w, p):
    """Multiplicity of X = w as a root of f (0 if not a root)."""
    m = 0
    lin = [(-w) % p, 1]
    while f and eval_at(f, w, p) == 0:
        f, r = divmod_fp(f, lin, p)
        assert not r
        m += 1
    return m


def rational_roots(f, p):
    """dict w -> multiplicity over F_p, plus the rootless cofactor."""
    roots = {}
    g = normalize(f, p)
    for w in range(p):
        m = 0
        lin = [(-w) % p, 1]
        while g and eval_at(g, w, p) == 0:
            g, r = divmod_fp(g, lin, p)
            assert not r
            m += 1
        if m:
            roots[w] = m
    return roots, g


def fmt(f):
    """Human-readable form for error messages, lowest degree first."""
    if not f:
        return "0"
    parts = []
    for i, c in enumerate(f):
        if c == 0:
            continue
        if i == 0:
            parts.append(f"{c}")
        elif i == 1:
            parts.append("X" if c == 1 else f"{c}*X")
        else:
            parts.append(f"X^{i}" if c == 1 else f"{c}*X^{i}")
    return " + ".join(parts)
