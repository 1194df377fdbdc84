"""steinberg-lab command line.

Exit codes: 0 success, 1 a verification failed (the JSON report carries the
counterexample), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import CapError, InvariantError
from .functors import derived_limit_dims, functor_from_json, simple_functor
from .lattice import PosetView
from .pf import (M_of_V, ephi_doubling_check, generation_check,
                 steinberg_dual_intertwiner)
from .resolutions import (BE1_check, cross_check_oliver, ext_dims, klim_bridge,
                          tot_resolution)
from .steenrod import (FormProduct, GradedIdeal, a_stability_check,
                       serre_radical_check, squarefree_products)
from .steinberg import (euler_recursion_dims, fault_report, lusztig_complex,
                        random_mutation, steinberg)

VERBS = ("steinberg", "lusztig-check", "limk", "ext", "resolve", "bicomplex-check",
         "mvh", "verify-mv", "verify", "radical-check")
CLI_MAX_N = 3
CLI_MAX_D = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="steinberg-lab", description="Steinberg modules, Lusztig complexes, "
                "derived limits over subspace lattices and the modules M(V;h).")
    p.add_argument("verb", help="one of: " + ", ".join(VERBS))
    p.add_argument("--n", type=int)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--maxdeg", type=int)
    p.add_argument("--variant", type=int, default=1, choices=(1, 2))
    p.add_argument("--functor", help="path to a functor in the JSON functor format")
    p.add_argument("--forms", help="form bitmasks, e.g. '[1,2,3]'")
    p.add_argument("--mmax", type=int, default=2)
    p.add_argument("--mutate", type=int, metavar="SEED",
                   help="flip one seeded bit of a Lusztig differential before checking")
    p.add_argument("--out")
    p.add_argument("--format", default="json", choices=("json", "csv"))
    p.add_argument("--unsafe-caps", action="store_true")
    return p


# ------------------------------------------------------------ helpers

def _need(args, name: str) -> int:
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required for '{args.verb}'")
    return v


def _n(args, lo: int = 0) -> int:
    n = _need(args, "n")
    if n < lo:
        raise UsageError(f"--n must be >= {lo}")
    if n > CLI_MAX_N and not args.unsafe_caps:
        raise UsageError(f"--n {n} exceeds the cap {CLI_MAX_N}; pass --unsafe-caps to lift it")
    return n


def _maxdeg(args, default: int | None = None) -> int:
    d = args.maxdeg if args.maxdeg is not None else default
    if d is None:
        raise UsageError(f"--maxdeg is required for '{args.verb}'")
    if d < 0:
        raise UsageError("--maxdeg must be >= 0")
    if d > CLI_MAX_D and not args.unsafe_caps:
        raise UsageError(f"--maxdeg {d} exceeds the cap {CLI_MAX_D}; pass --unsafe-caps to lift it")
    return d


def _h(args) -> int:
    if args.h < 1:
        raise UsageError("--h must be >= 1")
    return args.h


def _functor(args):
    path = _need(args, "functor")
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"--functor: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"--functor: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        f = functor_from_json(obj)
    except ValueError as exc:
        raise UsageError(f"--functor: {exc}") from exc
    if f.poset.n > CLI_MAX_N and not args.unsafe_caps:
        raise UsageError(f"functor field 'n' = {f.poset.n} exceeds the cap {CLI_MAX_N}")
    try:
        f.check_functoriality()
    except InvariantError as exc:
        raise UsageError(f"--functor: {exc}") from exc
    return f


def _forms(args, n: int) -> FormProduct | None:
    if args.forms is None:
        return None
    try:
        forms = json.loads(args.forms)
        if not isinstance(forms, list) or not all(isinstance(u, int) for u in forms):
            raise ValueError
        return FormProduct(n, tuple(forms))
    except ValueError as exc:
        raise UsageError(f"--forms must be a list of nonzero bitmasks below 2^{n}") from exc


def _lusztig(args, n: int, variant: int) -> dict:
    c = lusztig_complex(n, variant)
    out = {"variant": variant, "dims": c.dims}
    if args.mutate is not None:
        (p, i, j), c = random_mutation(c, np.random.default_rng(args.mutate))
        out["mutation"] = {"seed": args.mutate, "degree": p, "row": i, "col": j}
    rep = fault_report(c)
    out["d2_zero"] = rep["d2_zero"]
    out["homology"] = rep["homology"]
    out["ok"] = not rep["detected"]
    return out


# ------------------------------------------------------------ verbs

def cmd_steinberg(args):
    n = _n(args)
    return {"n": n, "st_dim": steinberg(n, cap=n).dim}, True


def cmd_lusztig(args):
    n = _n(args, 1)
    lu = _lusztig(args, n, args.variant)
    return {"n": n, "st_dim": steinberg(n, cap=n).dim, "lusztig": lu}, lu["ok"]


def cmd_limk(args):
    f = _functor(args)
    dims = derived_limit_dims(f) if len(f.poset) else []
    if args.k is None:
        return {"poset": f.poset.label, "n": f.poset.n, "lim": dims}, True
    k = args.k
    return {"poset": f.poset.label, "n": f.poset.n, "k": k,
            "dim": dims[k] if 0 <= k < len(dims) else 0}, True


def cmd_ext(args):
    f = _functor(args)
    if f.poset.kind != "W":
        raise UsageError("ext needs a functor on the full lattice (poset 'W')")
    dims = ext_dims(f)
    if args.k is None:
        return {"n": f.poset.n, "ext": dims}, True
    k = args.k
    return {"n": f.poset.n, "k": k, "dim": dims[k] if 0 <= k < len(dims) else 0}, True


def _resolve_one(f) -> dict:
    res = tot_resolution(f)
    res.check_natural()
    bad = res.exactness_failures()
    return {"exact": not bad,
            "failures": [{"at": u.key, "degree": k, "homology": h} for u, k, h in bad]}


def cmd_resolve(args):
    if args.functor is not None:
        f = _functor(args)
        if f.poset.kind != "W":
            raise UsageError("resolve needs a functor on the full lattice (poset 'W')")
        rep = _resolve_one(f)
        return {"n": f.poset.n, **rep}, rep["exact"]
    n = _n(args)
    P = PosetView.W(n)
    out = {w.key: _resolve_one(simple_functor(P, w)) for w in P.elements}
    ok = all(r["exact"] for r in out.values())
    return {"n": n, "simples": out}, ok


def cmd_bicomplex(args):
    f = _functor(args)
    if f.poset.kind != "W":
        raise UsageError("bicomplex-check needs a functor on the full lattice (poset 'W')")
    be1, kl = BE1_check(f), klim_bridge(f)
    return {"n": f.poset.n, "e1": be1.to_json(), "klim": kl.to_json()}, be1.ok and kl.ok


def _mv_range(args):
    n = _n(args)
    return n, _h(args), _maxdeg(args)


def cmd_mvh(args):
    n, h, D = _mv_range(args)
    dims = M_of_V(n, h, D, unsafe=args.unsafe_caps)
    return {"n": n, "h": h, "maxdeg": D, "dims": dims,
            "checks": {"ext_cross_check": True}}, True


def cmd_verify_mv(args):
    n, h, D = _mv_range(args)
    dims = M_of_V(n, h, D, unsafe=args.unsafe_caps)
    gen = generation_check(n, h, D, unsafe=args.unsafe_caps)
    dbl = ephi_doubling_check(n, h, D, unsafe=args.unsafe_caps)
    _, inter = steinberg_dual_intertwiner(n, h)
    checks = {"generation": gen.to_json(), "doubling": dbl.to_json(), "intertwiner": inter.to_json()}
    ok = gen.ok and dbl.ok and inter.ok
    return {"n": n, "h": h, "maxdeg": D, "dims": dims, "checks": checks}, ok


def cmd_verify(args):
    n = _n(args, 1)
    checks = {}
    euler = euler_recursion_dims(n)
    st = [steinberg(m, cap=n).dim for m in range(n + 1)]
    checks["steinberg_vs_euler"] = {"ok": st == euler, "st": st, "euler": euler}
    for v in (1, 2):
        checks[f"lusztig_variant_{v}"] = _lusztig(args, n, v)
    P = PosetView.W(n)
    bad_ext, bad_oliver = [], []
    for w in P.elements:
        dims = ext_dims(simple_functor(P, w))
        want = [st[w.dim] if k == w.dim else 0 for k in range(len(dims))]
        if dims != want:
            bad_ext.append({"W": w.key, "ext": dims, "expected": want})
    P0 = PosetView.W0(n)
    for w in P0.elements:
        rep = cross_check_oliver(simple_functor(P0, w))
        if not rep.ok:
            bad_oliver.append({"W": w.key, **rep.to_json()})
    checks["ext_simples"] = {"ok": not bad_ext, "failures": bad_ext}
    checks["oliver_simples"] = {"ok": not bad_oliver, "failures": bad_oliver}
    ok = all(c["ok"] for c in checks.values())
    return {"n": n, "checks": checks}, ok


def cmd_radical(args):
    n = _n(args, 1)
    D = _maxdeg(args, 3)
    if args.mmax < 0:
        raise UsageError("--mmax must be >= 0")
    e = _forms(args, n)
    family = [e] if e is not None else squarefree_products(n, 3)
    rows = []
    for fp in family:
        try:
            rad = [serre_radical_check(fp, d, args.mmax).to_json() for d in range(D + 1)]
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        stab = a_stability_check(GradedIdeal.principal(fp, D)).to_json()
        rows.append({"forms": fp.to_json(), "radical": rad, "a_stability": stab,
                     "ok": stab["ok"] and all(r["ok"] for r in rad)})
    return {"n": n, "maxdeg": D, "mmax": args.mmax, "results": rows}, all(r["ok"] for r in rows)


COMMANDS = {
    "steinberg": cmd_steinberg, "lusztig-check": cmd_lusztig, "limk": cmd_limk, "ext": cmd_ext,
    "resolve": cmd_resolve, "bicomplex-check": cmd_bicomplex, "mvh": cmd_mvh,
    "verify-mv": cmd_verify_mv, "verify": cmd_verify, "radical-check": cmd_radical,
}


def _render(payload: dict, fmt: str) -> str:
    if fmt == "csv":
        if "dims" not in payload or not all(isinstance(x, int) for x in payload["dims"]):
            raise UsageError("--format csv is only available for Poincaré tables (mvh, verify-mv)")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "dim"])
        w.writerows(enumerate(payload["dims"]))
        return buf.getvalue()
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.verb not in COMMANDS:
            raise UsageError(f"unknown verb {args.verb!r}; expected one of {', '.join(VERBS)}")
        payload, ok = COMMANDS[args.verb](args)
        payload = {"command": args.verb, "ok": ok, **payload}
        text = _render(payload, args.format)
    except (UsageError, CapError) as exc:
        print(f"steinberg-lab: error: {exc}", file=stderr)
        return 2
    except InvariantError as exc:
        text = json.dumps({"ok": False, "error": str(exc)}, sort_keys=True, indent=2) + "\n"
        ok = False
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())
