"""``pdsforge`` command line: construct, verify, scheme, product.

Every invocation prints one JSON document (or writes it to ``--out``).
Keys come out in a fixed order and the only run-dependent field is
``wall_time_s``. Exit status is 0 when every check passed, 1 when some
verification failed and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any, Optional, Sequence

import numpy as np

from . import algebra, constructions as C, products
from .errors import PdsForgeError
from .groups import (
    DirectProduct,
    ElementSet,
    Group,
    abelian_group,
    cyclic_group,
    direct_product,
    semidirect_group,
)

SCHEMA_VERSION = "1"
SKEW_DEFINITION = "G is the disjoint union of {1}, D and D^(-1), and D is a difference set"

# construction name -> provenance tag recorded in certificates
PROVENANCE = {
    "affine-g1": "affine-g1/form-classes",
    "affine-g2": "affine-g2/form-classes",
    "affine-abelian": "translation-group/form-classes",
    "affine-scheme-q4": "affine-g2/singular-planes",
    "affine-paley-q4": "affine-g2/half-planes-paley",
    "semidirect-scheme": "zpt-semidirect/cyclic-differences",
    "semidirect-paley": "zpt-semidirect/half-classes-paley",
    "semidirect-latin3": "zpt-semidirect/three-class-fusion",
    "paley-field": "field/nonzero-squares",
    "latin3": "z3sq/three-class-partitions",
    "paley": "product/paley-type",
    "stanton-sprott": "product/twin-prime-power",
    "recipe": "product/class-substitution",
    "combine3": "product/three-class-combination",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# spec strings

def _split_top(s: str, sep: str) -> list[str]:
    """Split on ``sep`` outside parentheses."""
    out, depth, cur = [], 0, ""
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and s.startswith(sep, i):
            out.append(cur)
            cur = ""
            i += len(sep)
            continue
        cur += ch
        i += 1
    out.append(cur)
    return out


def _eps(s: str) -> int:
    if s in ("+1", "1", "+"):
        return 1
    if s in ("-1", "-"):
        return -1
    raise UsageError(f"eps must be +1 or -1, got {s!r}")


def _twist(parts: Sequence[str], default: bool = True) -> bool:
    for w in parts:
        if w == "twisted":
            return True
        if w == "untwisted":
            return False
    return default


def _strip_mod(parts: list[str]) -> list[str]:
    return [x for x in parts if not x.startswith("mod=")]


def parse_group(spec: str) -> Group:
    """Group from its canonical spec string."""
    spec = spec.strip()
    if spec.startswith("product:"):
        body = spec[len("product:"):]
        halves = _split_top(body, "x")
        if len(halves) != 2 or not all(h.startswith("(") and h.endswith(")") for h in halves):
            raise UsageError(f"bad product spec {spec!r}")
        return direct_product(parse_group(halves[0][1:-1]), parse_group(halves[1][1:-1]))
    family, _, rest = spec.partition(":")
    parts = _strip_mod(rest.split(":")) if rest else []
    try:
        if family == "abelian":
            return abelian_group([int(x) for x in parts[0].split(",")])
        if family == "cyclic":
            return cyclic_group(int(parts[0]))
        if family == "field":
            return C.paley_field_set(int(parts[0]))[0]
        if family == "semidirect":
            return semidirect_group(int(parts[0]), int(parts[1]))
        if family in ("affine-g1", "affine-g2"):
            fn = C.affine_g1 if family == "affine-g1" else C.affine_g2
            G = fn(int(parts[0]), int(parts[1]), _eps(parts[2]))[0]
            if G.spec != spec:
                raise UsageError(f"spec {spec!r} does not match the default field modulus ({G.spec})")
            return G
    except (IndexError, ValueError) as exc:
        if isinstance(exc, PdsForgeError):
            raise
        raise UsageError(f"bad group spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown group family {family!r}")


def _ints(parts: Sequence[str], n: int, spec: str) -> list[int]:
    try:
        return [int(x) for x in parts[:n]]
    except ValueError as exc:
        raise UsageError(f"bad parameters in {spec!r}") from exc


def parse_set_factor(spec: str) -> tuple[Group, ElementSet, str]:
    """Factor set spec -> (group, set, construction name)."""
    family, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    if len(parts) < 1:
        raise UsageError(f"factor {spec!r} needs parameters")
    if family == "semidirect-paley":
        p, t = _ints(parts, 2, spec)
        G, D = C.semidirect_paley(p, t, _twist(parts[2:]))
    elif family == "affine-paley-q4":
        G, D = C.affine_paley_q4(_ints(parts, 1, spec)[0])
    elif family == "paley-field":
        G, D, _ = C.paley_field_set(_ints(parts, 1, spec)[0])
    else:
        raise UsageError(f"unknown factor set family {family!r}")
    return G, D, family


def parse_partition_factor(spec: str) -> tuple[Group, C.PartitionScheme, str]:
    """Factor partition spec -> (group, partition, construction name)."""
    family, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    if family in ("affine-g1", "affine-g2", "affine-abelian"):
        if len(parts) < 3:
            raise UsageError(f"{family} needs q:m:eps")
        q, m = _ints(parts, 2, spec)
        fn = {"affine-g1": C.affine_g1, "affine-g2": C.affine_g2, "affine-abelian": C.affine_abelian}[family]
        G, P = fn(q, m, _eps(parts[2]))
    elif family == "affine-scheme-q4":
        G, P = C.affine_scheme_q4(_ints(parts, 1, spec)[0])
    elif family in ("semidirect-scheme", "semidirect-latin3"):
        p, t = _ints(parts, 2, spec)
        fn = C.semidirect_scheme if family == "semidirect-scheme" else C.semidirect_latin3
        G, P = fn(p, t, _twist(parts[2:]))
    elif family == "latin3":
        L, Cp = C.latin3_partitions()
        if parts[:1] == ["L"]:
            P = L
        elif parts[:1] == ["C"]:
            P = Cp
        else:
            raise UsageError("latin3 factor needs :L or :C")
        G = P.owner
    else:
        raise UsageError(f"unknown factor partition family {family!r}")
    return G, P, family


def _paley_labels(family: str, P: C.PartitionScheme) -> list[str]:
    """Labels whose union is the standard Paley-type set of a base scheme."""
    if family == "semidirect-scheme":
        p = P.meta["p"]
        half = (p - 1) // 2
        return [f"P{i}" for i in range(1, half + 1)] + [f"S{j}" for j in range(half + 1)]
    if family == "affine-scheme-q4":
        q = P.meta["q"]
        return ["D1"] + [lab for lab in P.labels if lab.startswith("U_")][: (q + 1) // 2]
    raise UsageError(f"no Paley-type union is defined for {family!r}")


# ---------------------------------------------------------------------------
# payload helpers

def _set_payload(S: ElementSet, cert_dict: dict, hash_only: bool, label: Optional[str] = None) -> dict:
    d: dict[str, Any] = {}
    if label is not None:
        d["label"] = label
    d.update(cert_dict)
    if not hash_only:
        d["ids"] = [int(x) for x in S.ids]
    return d


def _without_group(d: dict) -> dict:
    d.pop("group", None)
    return d


def _partition_payload(G: Group, P, hash_only: bool, threads) -> tuple[dict, bool]:
    rep = algebra.verify_partition(G, P, threads)
    classes = [_set_payload(c, _without_group(cert.to_dict(False)), hash_only, lab)
               for lab, c, cert in zip(P.labels, P.classes, rep.certificates)]
    return {"cover_ok": rep.cover_ok, "problems": rep.problems, "classes": classes}, rep.ok


def _structure(G: Group) -> dict:
    d: dict[str, Any] = {"abelian": G.is_abelian()}
    if G.order <= 10 ** 5:
        d["center_order"] = G.center().size
        d["exponent"] = G.exponent()
    return d


def _family_args(args) -> tuple[Group, Any, str]:
    """Build the construction named by ``--family`` and the flags."""
    fam = args.family
    need = lambda *names: [_require(args, n) for n in names]
    if fam in ("affine-g1", "affine-g2", "affine-abelian"):
        q, m = need("q", "m")
        eps = _eps(args.eps) if args.eps is not None else (1 if fam == "affine-g2" else None)
        if eps is None:
            raise UsageError(f"{fam} needs --eps")
        fn = {"affine-g1": C.affine_g1, "affine-g2": C.affine_g2, "affine-abelian": C.affine_abelian}[fam]
        G, P = fn(q, m, eps)
        return G, P, "partition"
    if fam == "affine-scheme-q4":
        return (*C.affine_scheme_q4(need("q")[0]), "partition")
    if fam == "affine-paley-q4":
        return (*C.affine_paley_q4(need("q")[0]), "set")
    if fam in ("semidirect-scheme", "semidirect-paley", "semidirect-latin3"):
        p, t = need("p", "t")
        fn = {"semidirect-scheme": C.semidirect_scheme, "semidirect-paley": C.semidirect_paley,
              "semidirect-latin3": C.semidirect_latin3}[fam]
        G, X = fn(p, t, args.twisted)
        return G, X, ("set" if fam == "semidirect-paley" else "partition")
    if fam == "paley-field":
        G, D, _ = C.paley_field_set(need("q")[0])
        return G, D, "set"
    if fam == "latin3":
        L, Cp = C.latin3_partitions()
        return L.owner, (L, Cp), "pair"
    raise UsageError(f"unknown family {fam!r}")


def _require(args, name: str):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required for family {args.family}")
    return v


# ---------------------------------------------------------------------------
# commands

def cmd_construct(args) -> tuple[dict, bool]:
    G, X, shape = _family_args(args)
    th = args.threads
    doc: dict[str, Any] = {"provenance": PROVENANCE[args.family], "group": G.descriptor(), "tier": "census"}
    ok = True
    if shape == "set":
        kind = "DS" if args.family == "paley-field" and args.q % 4 == 3 else "PDS"
        cert = algebra.verify_ds(G, X, th) if kind == "DS" else algebra.verify_pds(G, X, th)
        doc["result"] = _set_payload(X, cert.to_dict(False), args.hash_only)
        ok = cert.ok
        if kind == "DS":
            sk = algebra.verify_skew_hadamard(G, X, th)
            doc["checks"] = {"skew_hadamard": sk, "definition": SKEW_DEFINITION}
            ok = ok and sk
    elif shape == "partition":
        doc["result"], ok = _partition_payload(G, X, args.hash_only, th)
        checks: dict[str, Any] = {}
        if hasattr(G, "act"):
            checks.update({k: bool(v) for k, v in C.affine_checks(G).items()})
        checks["structure"] = _structure(G)
        doc["checks"] = checks
        ok = ok and all(v for k, v in checks.items() if k != "structure")
    else:
        parts = {}
        for P in X:
            parts[P.meta["construction"]], part_ok = _partition_payload(G, P, args.hash_only, th)
            ok = ok and part_ok
        doc["result"] = parts
    return doc, ok


def _load_ids(path: str, G: Group) -> list[int]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read set file {path!r}: {exc}") from exc
    if isinstance(data, dict) and "ids" in data:
        data = data["ids"]
    if not isinstance(data, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
        raise UsageError("set file must hold a JSON array of integer element ids")
    bad = [x for x in data if not 0 <= x < G.order]
    if bad:
        raise UsageError(f"element id {bad[0]} out of range for order {G.order}")
    return data


def cmd_verify(args) -> tuple[dict, bool]:
    G = parse_group(args.group)
    S = ElementSet.from_ids(G, _load_ids(args.set_file, G))
    th = args.threads
    doc: dict[str, Any] = {"provenance": "input-file", "group": G.descriptor(), "tier": "census"}
    if args.kind == "pds":
        cert = algebra.verify_pds(G, S, th)
        doc["result"], ok = _set_payload(S, cert.to_dict(False), args.hash_only), cert.ok
    elif args.kind == "ds":
        cert = algebra.verify_ds(G, S, th)
        doc["result"], ok = _set_payload(S, cert.to_dict(False), args.hash_only), cert.ok
    else:
        cert = algebra.verify_ds(G, S, th)
        sk = algebra.verify_skew_hadamard(G, S, th)
        doc["result"] = _set_payload(S, cert.to_dict(False), args.hash_only)
        doc["checks"] = {"skew_hadamard": sk,
                         "definition": SKEW_DEFINITION}
        ok = sk
    return doc, ok


def _parse_mode(mode: str) -> tuple[str, int, int]:
    if mode == "all":
        return "all", 0, 0
    parts = mode.split(":")
    if len(parts) == 3 and parts[0] == "sample":
        try:
            return "sample", int(parts[1]), int(parts[2])
        except ValueError:
            pass
    raise UsageError(f"--mode must be 'all' or 'sample:n:seed', got {mode!r}")


def cmd_scheme(args) -> tuple[dict, bool]:
    G, P, shape = _family_args(args)
    if shape != "partition":
        raise UsageError(f"family {args.family} does not give a partition")
    th = args.threads
    doc: dict[str, Any] = {"provenance": PROVENANCE[args.family], "group": G.descriptor(), "tier": "census",
                           "labels": ["1"] + list(P.labels)}
    if args.action == "constants":
        consts = algebra.scheme_constants(G, P, th)
        symmetric = bool(np.array_equal(consts, consts.transpose(1, 0, 2)))
        doc["result"] = {"symmetric": symmetric, "constants": consts.tolist()}
        return doc, True
    mode, n, seed = _parse_mode(args.mode)
    rep = algebra.verify_amorphic(G, P, mode, n, seed, th)
    doc["result"] = {"mode": rep.mode, "family": rep.family, "checked": rep.checked,
                     "passed": rep.passed, "failures": rep.failures}
    return doc, rep.ok


def _pc_payload(pc: products.ProductCertificate, S: ElementSet, hash_only: bool, label=None) -> dict:
    d: dict[str, Any] = {}
    if label is not None:
        d["label"] = label
    d.update(pc.to_dict(False))
    d["set_hash"] = algebra.set_hash(S)
    if not hash_only:
        d["ids"] = [int(x) for x in S.ids]
    return d


def _factor_info(G: Group, S, name: str) -> dict:
    d = {"construction": name, "group": G.spec}
    if isinstance(S, ElementSet):
        d["set_hash"] = algebra.set_hash(S)
    else:
        d["class_hashes"] = [algebra.set_hash(c) for c in S.classes]
    return d


def cmd_product(args) -> tuple[dict, bool]:
    th = args.threads
    kind = args.kind
    if args.left is None or args.right is None:
        raise UsageError("--left and --right are required")
    doc: dict[str, Any] = {"provenance": PROVENANCE[kind]}
    if kind in ("paley", "stanton-sprott"):
        G, D, ln = parse_set_factor(args.left)
        H, E, rn = parse_set_factor(args.right)
        fn = products.paley_product if kind == "paley" else products.stanton_sprott
        X, S = fn(G, D, H, E, threads=th)
        v = X.order
        cert_kind = "PDS" if kind == "paley" else "DS"
        pc = products.certify(X, S, cert_kind, (v - 1) // 2, th)
        doc.update({"factors": [_factor_info(G, D, ln), _factor_info(H, E, rn)],
                    "group": X.descriptor(), "tier": pc.tier,
                    "result": _pc_payload(pc, S, args.hash_only)})
        if kind == "stanton-sprott":
            doc["checks"] = {"right_factor": "skew Hadamard", "definition": SKEW_DEFINITION}
        return doc, pc.ok
    if kind == "recipe":
        if args.target is None:
            raise UsageError("recipe needs --target (the substitute partition)")
        G, P, ln = parse_partition_factor(args.left)
        H, E, rn = parse_set_factor(args.right)
        Gt, Pt, tn = parse_partition_factor(args.target)
        D = P.union(_paley_labels(ln, P))
        X, S = products.paley_product(G, D, H, E, threads=th)
        R = products.recipe_extract(G, P, H, S, th)
        X2, S2 = products.recipe_instantiate(R, Gt, Pt, H, th)
        _, S_back = products.recipe_instantiate(R, G, P, H, th)
        round_trip = bool(S_back == S)
        v = X.order
        src = products.certify(X, S, "PDS", (v - 1) // 2, th)
        out = products.certify(X2, S2, "PDS", (v - 1) // 2, th)
        same = (src.certificate is None or out.certificate is None
                or src.certificate.params == out.certificate.params)
        doc.update({"factors": [_factor_info(G, P, ln), _factor_info(H, E, rn), _factor_info(Gt, Pt, tn)],
                    "group": X2.descriptor(), "tier": out.tier, "recipe": R.to_dict(),
                    "source": _pc_payload(src, S, True),
                    "result": _pc_payload(out, S2, args.hash_only),
                    "checks": {"round_trip": round_trip, "same_parameters": same}})
        return doc, src.ok and out.ok and round_trip and same
    if kind == "combine3":
        if args.mode not in products.MODES:
            raise UsageError(f"combine3 needs --mode in {sorted(products.MODES)}")
        G, A, ln = parse_partition_factor(args.left)
        H, B, rn = parse_partition_factor(args.right)
        X, Z = products.combine3(G, A, H, B, args.mode)
        expected = Z.meta["expected_family"]
        payload, ok = _partition_payload(X, Z, args.hash_only, th)
        fams = [sorted(algebra.type_families(c["type_tags"])) for c in payload["classes"]]
        family_ok = all(expected in f for f in fams)
        doc.update({"factors": [_factor_info(G, A, ln), _factor_info(H, B, rn)],
                    "group": X.descriptor(), "tier": "census", "result": payload,
                    "checks": {"expected_family": expected, "family_ok": family_ok},
                    "notes": list(Z.meta.get("notes", []))})
        return doc, ok and family_ok
    raise UsageError(f"unknown product kind {kind!r}")


# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the JSON document here instead of stdout")
    p.add_argument("--hash-only", action="store_true", help="omit raw element lists")
    p.add_argument("--threads", type=int, help="census worker cap (default: PDSFORGE_THREADS or CPU count)")


def _add_family(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--eps")
    p.add_argument("--twisted", action="store_true", default=False)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pdsforge", description="Construct and certify partial difference sets.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a family and verify it")
    _add_family(c)
    _add_common(c)

    v = sub.add_parser("verify", help="verify a saved set against a group spec")
    v.add_argument("group")
    v.add_argument("set_file")
    v.add_argument("--kind", choices=["pds", "ds", "skew-hadamard"], default="pds")
    _add_common(v)

    s = sub.add_parser("scheme", help="intersection numbers or fusion checks for a partition")
    s.add_argument("action", choices=["constants", "amorphic"])
    _add_family(s)
    s.add_argument("--mode", default="all")
    _add_common(s)

    pr = sub.add_parser("product", help="product constructions on G x G'")
    pr.add_argument("kind", choices=["paley", "stanton-sprott", "recipe", "combine3"])
    pr.add_argument("--left")
    pr.add_argument("--right")
    pr.add_argument("--target")
    pr.add_argument("--mode")
    _add_common(pr)
    return ap


def _echo(argv: Sequence[str]) -> list[str]:
    """Command echo without the flags that cannot change the result."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--threads"):
            skip = True
            continue
        if a.startswith("--out=") or a.startswith("--threads="):
            continue
        out.append(a)
    return out


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    out = None
    try:
        args = build_parser().parse_args(argv)
        out = args.out
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("--threads must be >= 1")
            os.environ["PDSFORGE_THREADS"] = str(args.threads)
        handler = {"construct": cmd_construct, "verify": cmd_verify,
                   "scheme": cmd_scheme, "product": cmd_product}[args.command]
        body, ok = handler(args)
    except (UsageError, PdsForgeError) as exc:
        err = {"schema_version": SCHEMA_VERSION, "command": _echo(argv), "ok": False,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        _emit(err, out)
        return 2
    doc = {"schema_version": SCHEMA_VERSION, "command": _echo(argv)}
    doc.update(body)
    doc["ok"] = bool(ok)
    doc["wall_time_s"] = round(time.perf_counter() - t0, 6)
    _emit(doc, out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
