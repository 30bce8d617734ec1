"""Independent re-validation of a proof certificate.

Reads only the certificate JSON and a table file. Nothing from the rest of
the package is imported: real numbers come from mpmath at a fixed high
precision (with a second precision as a cross-check), Fibonacci values and
the degenerate ``psi`` identities are checked with plain integers.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

DPS = 150
DPS_CHECK = 200
SLACK = mpf(10) ** -30  # allowed disagreement between our decimals and mpmath


@dataclass
class CheckReport:
    items: list = field(default_factory=list)  # (name, ok, detail)

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.items.append((name, bool(ok), detail))
        return ok

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def failures(self) -> list:
        return [(n, d) for n, ok, d in self.items if not ok]

    def text(self) -> str:
        return "\n".join(f"{'ok  ' if ok else 'FAIL'} {n}" + (f"  ({d})" if d else "")
                         for n, ok, d in self.items)


# -- exact integer helpers ------------------------------------------------

def _fibs(N: int) -> list[int]:
    f = [0, 1]
    while len(f) <= N + 1:
        f.append(f[-1] + f[-2])
    return f


class _Z:
    """``x + y*alpha`` with integer coordinates, ``alpha**2 = alpha + 1``."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x, self.y = x, y

    def __add__(self, o):
        return _Z(self.x + o.x, self.y + o.y)

    def __mul__(self, o):
        if isinstance(o, int):
            return _Z(self.x * o, self.y * o)
        return _Z(self.x * o.x + self.y * o.y, self.x * o.y + self.y * o.x + self.y * o.y)

    def __eq__(self, o):
        return self.x == o.x and self.y == o.y


def _apow(k: int, F: list[int]) -> _Z:
    # alpha**k = F(k-1) + F(k) alpha, k >= 1; alpha**0 = 1
    return _Z(1, 0) if k == 0 else _Z(F[k - 1], F[k])


def psi_is_special(t: int, s: int, r: int, s2: int) -> bool:
    """``sqrt5 * 2**s2 == alpha**r (1 + alpha**-t + alpha**-s)``, cleared of
    negative powers by multiplying with ``alpha**(t+s)``."""
    F = _fibs(t + s + abs(r) + 4)
    sqrt5 = _Z(-1, 2)
    lhs = sqrt5 * (2 ** s2) * _apow(t + s, F)
    rhs = _apow(t + s, F) + _apow(s, F) + _apow(t, F)
    if r >= 0:
        rhs = rhs * _apow(r, F)
    else:
        lhs = lhs * _apow(-r, F)
    return lhs == rhs


# -- real helpers ---------------------------------------------------------

def _consts():
    la = mpmath.log((1 + mpmath.sqrt(5)) / 2)
    return {"la": la, "l2": mpmath.log(2), "gamma": mpmath.log(2) / la,
            "mu": mpmath.log(mpmath.sqrt(5)) / la, "c": la / mpmath.log(2),
            "d": mpmath.log(mpf("0.38")) / mpmath.log(2)}


def _dist(x) -> mpf:
    return abs(x - mpmath.nint(x))


def _cf(x, k: int) -> tuple[list[int], list[int]]:
    a, q = [], []
    q2, q1 = 1, 0
    for _ in range(k):
        ai = int(mpmath.floor(x))
        a.append(ai)
        q2, q1 = q1, ai * q1 + q2
        q.append(q1)
        x = 1 / (x - ai)
    return a, q


def _gamma_cf(k: int) -> tuple[list[int], list[int]]:
    with mp.workdps(DPS):
        c = _consts()
        a1, q1 = _cf(c["gamma"], k)
    with mp.workdps(DPS_CHECK):
        c = _consts()
        a2, _ = _cf(c["gamma"], k)
    if a1 != a2:
        raise ArithmeticError("continued fraction of gamma unstable between precisions")
    return a1, q1


def _encloses(iv: dict, x) -> bool:
    return mpf(iv["lo"]) - SLACK * max(1, abs(x)) <= x <= mpf(iv["hi"]) + SLACK * max(1, abs(x))


# -- search ---------------------------------------------------------------

def enumerate_by_exponent(n_max: int) -> set[tuple[int, int, int, int]]:
    """Solutions found by looping over ``a`` first; for each ``(n, m)`` the
    admissible ``F(l)`` lie in ``[2**a - F(n) - F(m) - r, ... + r]``."""
    F = _fibs(n_max)
    vals = F[2:n_max + 1]  # index i -> F(i + 2)
    top = 3 * F[n_max]
    out = set()
    a = 1
    while (1 << a) <= 2 * top + 2:
        p = 1 << a
        r = math.isqrt(p - 1)
        # F(n) >= S/3 > (p - r)/3 and F(n) <= p + r
        lo_n = bisect.bisect_left(vals, (p - r) // 3) + 2
        hi_n = min(n_max, bisect.bisect_right(vals, p + r) + 1)
        for n in range(max(2, lo_n - 1), hi_n + 1):
            for m in range(2, n + 1):
                t = p - F[n] - F[m]
                i = bisect.bisect_left(vals, t - r)
                j = bisect.bisect_right(vals, t + r)
                for l in range(i + 2, min(j + 2, m + 1)):
                    d = F[n] + F[m] + F[l] - p
                    if d * d < p:
                        out.add((n, m, l, a))
        a += 1
    return out


def _read_table(path) -> set:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if [h.strip() for h in rows[0]] != ["n", "m", "l", "a"]:
        raise ValueError("bad table header")
    return {tuple(int(c) for c in row) for row in rows[1:] if row}


def _check_search(st, rep: CheckReport, table_path) -> None:
    n_max = st["inputs"]["n_max"]
    res = st["results"]
    found = enumerate_by_exponent(n_max)
    listed = {tuple(t) for t in res["solutions"]}
    rep.add("search: solution list equals independent enumeration", found == listed,
            f"{len(found)} vs {len(listed)}")
    rep.add("search: count field", res["count"] == len(found))
    expected_pass = len(found) == res["expected_count"]
    rep.add("search: verdict consistent with expected count",
            (st["verdict"] == "pass") == expected_pass)
    if table_path is not None:
        table = _read_table(table_path)
        rep.add("search: table diff reproduced",
                sorted(map(list, found - table)) == res["table"]["missing"]
                and sorted(map(list, table - found)) == res["table"]["extra"])


# -- first bound ----------------------------------------------------------

def _check_first(st, rep: CheckReport) -> None:
    res = st["results"]
    with mp.workdps(DPS):
        c = _consts()
        base = mpf("1.4") * 30 ** 6 * 3 ** mpf("4.5") * 4 * (1 + mpmath.log(2)) * mpf("1.4") * mpf("0.5")
        C1 = 2 * base
        C2 = 2 * base * mpf("1.7")
        Cmin = C2 + mpmath.log(2 * mpmath.sqrt(5)) / mpmath.log(3)
        C12 = C1 * (2 * Cmin + 5 / mpmath.log(3))
        mine = {"C_lambda1": C1, "C_lambda2": C2, "C_min": Cmin, "C_case12": C12}
        for k, v in mine.items():
            rep.add(f"first-bound: {k} enclosure", _encloses(st["constants"][k], v))

        def f12(n):
            return ((c["c"] * n + c["d"] - 1) / 2 - 1) * c["l2"] - C12 * mpmath.log(n) ** 2

        def f3(n):
            return ((1 - c["c"]) * n - 1) * c["la"] - Cmin * mpmath.log(n)

        for tag, f, fp in (("case12", f12, lambda n: c["c"] / 2 * c["l2"] - 2 * C12 * mpmath.log(n) / n),
                           ("case3", f3, lambda n: (1 - c["c"]) * c["la"] - Cmin / n)):
            N = int(res["cases"][tag]["n_max"]) + 1
            rep.add(f"first-bound: {tag} threshold", f(N) > 0 and fp(N) > 0 and f(N - 1) <= 0)
            a_max = int(res["cases"][tag]["a_max"])
            rep.add(f"first-bound: {tag} a_max", a_max >= min(c["c"] * (N - 1) + 1, N - 1) - 1)
        a_b = max(int(res["cases"][t]["a_max"]) for t in ("case12", "case3"))
        n_b = max(int(res["cases"][t]["n_max"]) for t in ("case12", "case3"))
        rep.add("first-bound: combined", a_b == int(res["a_bound"]) and n_b == int(res["n_bound"]))


# -- reductions -----------------------------------------------------------

def _w_bound(A, B, q: int, eps) -> int:
    return int(mpmath.ceil(mpmath.log(A * q / eps) / mpmath.log(B)))


def _check_stage1(st, first, rep: CheckReport) -> None:
    inp, res = st["inputs"], st["results"]
    M = int(inp["M"])
    rep.add("stage1: M covers first a-bound", M >= int(first["results"]["a_bound"]))
    k = res["convergent_index"]
    _, qs = _gamma_cf(k + 1)
    q = int(res["q"])
    rep.add("stage1: q is the chosen convergent", qs[k] == q)
    first_k = next(i for i, x in enumerate(qs) if x > 6 * M)
    rep.add("stage1: starting convergent is the first with q > 6M", res["tried"][0] == first_k)
    with mp.workdps(DPS):
        c = _consts()
        eps = _dist(c["mu"] * q) - M * _dist(c["gamma"] * q)
        rep.add("stage1: epsilon > 0", eps > 0 and _encloses(res["epsilon"], eps))
        W = _w_bound(4 * mpmath.sqrt(5) / c["la"], (1 + mpmath.sqrt(5)) / 2, q, eps)
        rep.add("stage1: gap bound", W == res["gap_bound"], f"W={W}")
        nb = int(mpmath.ceil(W / (1 - c["c"]))) - 1
        rep.add("stage1: n - a branch", nb == res["n_branch_max"])
        C1 = mpf(st["constants"]["C_lambda1"]["hi"])
        K = C1 * (5 + 2 * (W - 1) * c["la"])

        def g(n):
            return ((c["c"] * n + c["d"] - 1) / 2 - 1) * c["l2"] - K * mpmath.log(n)

        N = int(res["n_bound_after"]) + 1
        rep.add("stage1: follow-up threshold", g(N) > 0 and c["c"] / 2 * c["l2"] - K / N > 0
                and g(N - 1) <= 0)
        rep.add("stage1: follow-up a-bound",
                int(res["a_bound_after"]) >= min(int(c["c"] * (N - 1) + 1), N - 2))


def _check_stage2(st, stage1, rep: CheckReport) -> None:
    inp, res = st["inputs"], st["results"]
    M = int(inp["M"])
    gmax = inp["gap_max"]
    rep.add("stage2: M covers stage-1 a-bound", M >= int(stage1["results"]["a_bound_after"]))
    rep.add("stage2: grid covers the gap bound", gmax >= stage1["results"]["gap_bound"] - 1)
    pairs = {(p["t"], p["s"]): p for p in res["pairs"]}
    rep.add("stage2: every pair t <= s present",
            set(pairs) == {(t, s) for t in range(gmax + 1) for s in range(t, gmax + 1)})
    deepest = max(p["convergent_index"] for p in pairs.values())
    _, qs = _gamma_cf(deepest + 1)
    first_k = next(i for i, x in enumerate(qs) if x > 6 * M)
    bad_q, bad_eps, bad_n, bad_special = [], [], [], []
    specials = []
    with mp.workdps(DPS):
        c = _consts()
        A, B = 4 / c["la"], mpmath.sqrt(2)
        for (t, s), p in pairs.items():
            if p["special"]:
                r, s2 = p["decomposition"]
                if not psi_is_special(t, s, r, s2):
                    bad_special.append((t, s))
                specials.append((t, s))
                continue
            k, q = p["convergent_index"], int(p["q"])
            if not (k >= first_k and qs[k] == q):
                bad_q.append((t, s))
                continue
            psi = mpmath.sqrt(5) / (1 + mpmath.exp(-t * c["la"]) + mpmath.exp(-s * c["la"]))
            mu = mpmath.log(psi) / c["la"]
            eps = _dist(mu * q) - M * _dist(c["gamma"] * q)
            if not eps > 0 or _w_bound(A, B, q, eps) > p["w_bound"]:
                bad_eps.append((t, s))
                continue
            n_max = int(mpmath.ceil((p["w_bound"] - 1 - c["d"] + 1) / c["c"])) - 1
            if n_max > p["n_max"] or p["n_max"] > 550:
                bad_n.append((t, s))
    rep.add("stage2: convergents valid", not bad_q, str(bad_q[:5]))
    rep.add("stage2: epsilon > 0 and w bounds", not bad_eps, str(bad_eps[:5]))
    rep.add("stage2: n bounds", not bad_n, str(bad_n[:5]))
    rep.add("stage2: special decompositions exact", not bad_special, str(bad_special))
    # no missed decomposition: a non-special pair with exact decomposition
    # would have been caught by epsilon <= 0; check the listed set
    listed = {tuple(x) for x in res["special_pairs"]}
    mirrored = set(specials) | {(s, t) for (t, s) in specials}
    rep.add("stage2: special set consistent", listed == mirrored)


def _check_special(st, rep: CheckReport) -> None:
    res = st["results"]
    leg = res["legendre"]
    M = int(leg["M"])
    a, qs = _gamma_cf(leg["N"] + 1)
    rep.add("special: Legendre index", qs[leg["N"]] > M and qs[leg["N"] - 1] <= M)
    rep.add("special: a_M", max(a[: leg["N"] + 1]) == leg["a_M"])
    with mp.workdps(DPS):
        c = _consts()
        for p in res["pairs"]:
            if not psi_is_special(p["t"], p["s"], p["r"], p["s2"]):
                rep.add(f"special: psi({p['t']},{p['s']}) exact", False)
                continue

            def h(n):
                u = c["c"] * n + 1 - p["s2"]
                return ((c["c"] * n + c["d"] - 1) / 2) * c["l2"] - mpmath.log(4 / c["la"]) \
                    - mpmath.log((leg["a_M"] + 2) * u)

            N = p["n_max"] + 1
            u = c["c"] * N + 1 - p["s2"]
            rising = c["c"] / 2 * c["l2"] - c["c"] / u > 0  # h' > 0 from N on
            rep.add(f"special: ({p['t']},{p['s']}) threshold", h(N) > 0 and rising)


def check_certificate(cert: dict, table_path=None) -> CheckReport:
    rep = CheckReport()
    stages = {s["name"]: s for s in cert["stages"]}
    rep.add("certificate: schema", cert.get("schema", "").startswith("fib3pow2-certificate/"))
    if "search" in stages:
        _check_search(stages["search"], rep, table_path)
    if "first-bound" in stages and stages["first-bound"]["verdict"] == "pass":
        _check_first(stages["first-bound"], rep)
    if "stage1" in stages and stages["stage1"]["verdict"] == "pass":
        _check_stage1(stages["stage1"], stages["first-bound"], rep)
    if "stage2" in stages and stages["stage2"]["verdict"] == "pass":
        _check_stage2(stages["stage2"], stages["stage1"], rep)
    if "special" in stages and stages["special"]["verdict"] == "pass":
        _check_special(stages["special"], rep)
    if "conclusion" in stages:
        b = stages["conclusion"]["results"]["branch_n_max"]
        cap = stages["conclusion"]["inputs"]["search_cap"]
        rep.add("conclusion: branch bounds match stages",
                b["stage1_n_minus_a_branch"] == stages["stage1"]["results"]["n_branch_max"]
                and b["stage2_nonspecial"] == stages["stage2"]["results"]["n_max"]
                and b["special"] == stages["special"]["results"]["n_max"])
        rep.add("conclusion: all branches below cap", all(v <= cap for v in b.values()))
    verdicts = all(s["verdict"] == "pass" for s in cert["stages"])
    rep.add("certificate: overall verdict consistent",
            (cert["verdict"] == "PASS") == (verdicts and "conclusion" in stages))
    return rep


def main(argv=None) -> int:
    import argparse
    ap = argparse.ArgumentParser(prog="fib3pow2-check", description=__doc__.splitlines()[0])
    ap.add_argument("certificate")
    ap.add_argument("--table")
    args = ap.parse_args(argv)
    with open(args.certificate) as fh:
        cert = json.load(fh)
    rep = check_certificate(cert, args.table)
    print(rep.text())
    ok = rep.ok and cert["verdict"] == "PASS"
    print("CHECK", "PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
