"""Command-line front end.

Exit codes: 0 success or pass, 1 verification violations, 2 usage errors,
3 budget or scope errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

from .cells import build_wgraph, cells, cells_json, preorder_to_dot, to_dot, wgraph_json
from .catalog import D4Config, catalog_title, standard_config
from .coxeter import (
    DENSE_BRUHAT_LIMIT,
    LEFT,
    CoxeterError,
    CoxeterSystem,
    EnumerationLimitError,
    build_system,
)
from .gentau import gentau_json, gentau_refine
from .kl import (
    CacheError,
    KLTable,
    ScopeError,
    build_full_table,
    build_interval_table,
    kl_poly,
    load_cache,
    mu,
    mu_tilde,
    save_cache,
)
from .maps import (
    B2Map,
    D4Map,
    DerivedMap,
    KnuthMap,
    PreconditionError,
    b2_maps,
    catalog_type,
    clump_of,
    d4_maps,
    knuth_maps,
)
from .verifier import VERIFY_IDS, run_verification

CACHE_ENV = "KLCELLS_CACHE_DIR"
EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(args, text: str) -> None:
    _sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# Shared helpers


def _system(args) -> CoxeterSystem:
    return build_system(args.group)


def _cache_path(args, sys: CoxeterSystem) -> Path | None:
    d = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV)
    return Path(d) / f"{sys.name}.klcache" if d else None


def _full_table(args, sys: CoxeterSystem) -> KLTable:
    path = _cache_path(args, sys)
    if path is not None and path.is_file():
        return load_cache(sys, path)
    tbl = build_full_table(sys)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(tbl, path)
    return tbl


def _table_for(args, sys: CoxeterSystem, tops: list[int]) -> KLTable:
    """Full table when it fits, else the interval below ``tops``."""
    if sys.size <= DENSE_BRUHAT_LIMIT:
        return _full_table(args, sys)
    return build_interval_table(sys, tops)


def _config(args, sys: CoxeterSystem, side: str = LEFT) -> D4Config:
    lab = getattr(args, "labeling", None)
    if lab:
        parts = [int(p) - 1 for p in lab.replace(",", " ").split()]
        if len(parts) != 4:
            raise UsageError("--labeling needs four generators: label1 label2 center label4")
        return D4Config(side, tuple(parts)).validate(sys)
    return standard_config(sys, side)


def _side(text: str) -> str:
    s = text.upper()
    if s in ("L", "LEFT"):
        return "L"
    if s in ("R", "RIGHT"):
        return "R"
    raise UsageError(f"side must be L or R, got {text!r}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_group_info(args) -> int:
    sys = _system(args)
    info = {
        "group": sys.name,
        "rank": sys.rank,
        "size": sys.size,
        "coxeter_matrix": sys.coxeter_matrix.tolist(),
        "long_element_length": int(sys.length[sys.long_element]),
        "long_element": sys.format(sys.long_element),
    }
    if args.format == "json":
        _out(args, _dump(info))
    else:
        _out(args, "\n".join([
            f"group: {sys.name}",
            f"rank: {sys.rank}",
            f"order: {sys.size}",
            f"length of w0: {info['long_element_length']}",
            "coxeter matrix:",
            *("  " + " ".join(str(x) for x in row) for row in info["coxeter_matrix"]),
        ]))
    return EXIT_OK


def cmd_kl(args) -> int:
    sys = _system(args)
    y, w = sys.parse(args.y), sys.parse(args.w)
    tbl = _table_for(args, sys, [w, y])
    p = kl_poly(tbl, y, w)
    res = {"group": sys.name, "y": sys.format(y), "w": sys.format(w), "P": str(p),
           "coefficients": list(p.coefficients), "mu": mu(tbl, y, w), "mu_tilde": mu_tilde(tbl, y, w)}
    if args.format == "json":
        _out(args, _dump(res))
    else:
        _out(args, f"{res['P']}\nmu = {res['mu']}\nmu~ = {res['mu_tilde']}")
    return EXIT_OK


def cmd_mu(args) -> int:
    sys = _system(args)
    y, w = sys.parse(args.y), sys.parse(args.w)
    tbl = _table_for(args, sys, [w, y])
    res = {"group": sys.name, "y": sys.format(y), "w": sys.format(w),
           "mu": mu(tbl, y, w), "mu_tilde": mu_tilde(tbl, y, w)}
    if args.format == "json":
        _out(args, _dump(res))
    else:
        _out(args, f"mu = {res['mu']}\nmu~ = {res['mu_tilde']}")
    return EXIT_OK


def cmd_cells(args) -> int:
    sys = _system(args)
    tbl = _full_table(args, sys)
    g = build_wgraph(tbl)
    part = cells(g, args.side)
    if args.format == "json":
        _out(args, _dump(cells_json(sys, part)))
    elif args.format == "dot":
        chunks = [to_dot(g, c, name=f"cell{k}") for k, c in enumerate(part.classes)]
        _out(args, "".join(chunks))
    else:
        lines = [f"{len(part.classes)} cells, sizes {sorted(part.sizes(), reverse=True)}"]
        for k, c in enumerate(part.classes):
            lines.append(f"cell {k} ({len(c)}): " + ", ".join(sys.format(w) for w in c))
        _out(args, "\n".join(lines))
    return EXIT_OK


def cmd_wgraph(args) -> int:
    sys = _system(args)
    if args.clump:
        cfg = _config(args, sys, _side(args.side))
        c = clump_of(sys, cfg, sys.parse(args.clump))
        if c is None:
            raise UsageError(f"{args.clump} is not in a clump")
        verts = list(c.members)
    elif args.elements:
        verts = sorted({sys.parse(x) for x in args.elements})
    else:
        verts = None
    tbl = _table_for(args, sys, verts or [sys.long_element])
    g = build_wgraph(tbl, verts)
    if args.format == "json":
        _out(args, _dump(wgraph_json(g)))
    elif args.format == "dot":
        text = to_dot(g)
        if args.preorder:
            text += preorder_to_dot(g, args.preorder)
        _out(args, text)
    else:
        lines = [f"{len(g.vertices)} vertices, {len(g.edges)} edges"]
        for y, w, m in g.edges:
            lines.append(f"{sys.format(y)} -- {sys.format(w)}  weight {m}")
        _out(args, "\n".join(lines))
    return EXIT_OK


def cmd_clump(args) -> int:
    sys = _system(args)
    cfg = _config(args, sys, _side(args.side))
    w = sys.parse(args.word)
    c = clump_of(sys, cfg, w)
    if c is None:
        res = {"group": sys.name, "word": sys.format(w), "clump": None}
        _out(args, _dump(res) if args.format == "json" else f"{sys.format(w)} is not in a clump")
        return EXIT_OK
    res = {
        "group": sys.name,
        "word": sys.format(w),
        "clump": {
            "catalog": catalog_title(c.catalog),
            "size": c.size,
            "coset_rep": sys.format(c.coset_rep),
            "members": [{"word": sys.format(x), "type": c.types[x], "length": int(sys.length[x])}
                        for x in sorted(c.members, key=lambda x: (sys.length[x], x))],
        },
    }
    if args.format == "json":
        _out(args, _dump(res))
    else:
        cl = res["clump"]
        lines = [f"{cl['catalog']} clump of size {cl['size']}, coset rep {cl['coset_rep']}"]
        lines += [f"  {m['type']:<3} {m['word']}" for m in cl["members"]]
        _out(args, "\n".join(lines))
    return EXIT_OK


def _build_map(args, sys: CoxeterSystem):
    kind = args.kind.lower()
    side = _side(args.side)
    params = args.params
    if kind in ("knuth", "b2"):
        if len(params) != 2:
            raise UsageError(f"{kind} maps take two generators, e.g. '{kind} L 3 4 WORD'")
        s, t = (int(p.lstrip("s")) - 1 for p in params)
        cls = KnuthMap if kind == "knuth" else B2Map
        return cls(sys, side, s, t)
    if kind == "d4":
        if len(params) != 1:
            raise UsageError("d4 maps take one name such as 'T(1,C)', 'T(D,2)', 'T4' or 'Tbar4'")
        name = params[0].replace(" ", "")
        cfg = _config(args, sys, side)
        if name.startswith("Tbar"):
            return D4Map(sys, cfg, "bar", int(name[4:]))
        if name.startswith("T(") and name.endswith(")"):
            a, b = name[2:-1].split(",")
            if a in ("C", "D"):
                return D4Map(sys, cfg, f"{a},i", int(b))
            return D4Map(sys, cfg, f"i,{b}", int(a))
        if name.startswith("T") and name[1:].isdigit():
            return D4Map(sys, cfg, "main", int(name[1:]))
        raise UsageError(f"unknown D4 map {params[0]!r}")
    raise UsageError(f"unknown map family {args.kind!r}; choose knuth, b2 or d4")


def cmd_map(args) -> int:
    sys = _system(args)
    T = _build_map(args, sys)
    if args.derived:
        T = DerivedMap(T)
    w = sys.parse(args.word)
    in_domain = T.domain(w)
    img = T.image(w) if in_domain else ()
    res = {"group": sys.name, "map": repr(T), "word": sys.format(w), "in_domain": in_domain,
           "image": [sys.format(x) for x in img]}
    if args.format == "json":
        _out(args, _dump(res))
    elif not in_domain:
        _out(args, f"{sys.format(w)} is not in the domain of {T!r}")
    else:
        _out(args, "\n".join(res["image"]))
    return EXIT_OK if in_domain else EXIT_USAGE


def _family(args, sys: CoxeterSystem, side: str):
    fam = []
    names = [x.strip().lower() for x in args.maps.split(",") if x.strip()]
    for n in names:
        if n == "knuth":
            fam += knuth_maps(sys, side)
        elif n == "b2":
            fam += b2_maps(sys, side)
        elif n == "d4":
            try:
                fam += d4_maps(sys, _config(args, sys, side))
            except CoxeterError:
                pass
        elif n != "u":
            raise UsageError(f"unknown map family {n!r}; choose from knuth, b2, d4, u")
    if "u" in names:
        fam += [DerivedMap(T) for T in fam if T.kind == 2]
    return fam


def cmd_gentau(args) -> int:
    sys = _system(args)
    side = _side(args.side)
    fam = _family(args, sys, side)
    p = gentau_refine(sys, fam, side, args.max_order)
    if args.format == "json":
        _out(args, _dump(gentau_json(sys, p, fam)))
    else:
        lines = [f"{p.num_classes} classes, stable from order {p.order_reached}",
                 "class counts by order: " + " ".join(str(c) for c in p.counts())]
        for k, c in enumerate(p.classes()):
            lines.append(f"class {k} ({len(c)}): " + ", ".join(sys.format(w) for w in c))
        _out(args, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.theorem == "e6":
        reports = run_verification("e6", None, None, e6_budget=args.e6_budget)
    else:
        sys = _system(args)
        tbl = _full_table(args, sys)
        reports = run_verification(args.theorem, sys, tbl, e6_budget=args.e6_budget)
    if args.json or args.format == "json":
        _out(args, _dump({"reports": [r.to_json() for r in reports]}))
    else:
        _out(args, "\n".join(r.to_text() for r in reports))
    if any(r.violations for r in reports):
        return EXIT_VIOLATIONS
    if args.theorem == "e6" and reports[0].skipped:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_cache(args) -> int:
    sys = _system(args)
    path = Path(args.path)
    if args.action == "save":
        tbl = build_full_table(sys)
        save_cache(tbl, path)
        msg = f"saved {tbl.pair_count()} pairs for {sys.name} to {path}"
    else:
        tbl = load_cache(sys, path)
        msg = f"loaded {tbl.pair_count()} pairs for {sys.name} from {path}"
    if args.format == "json":
        _out(args, _dump({"group": sys.name, "action": args.action, "path": str(path),
                          "pairs": tbl.pair_count()}))
    else:
        _out(args, msg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="klcells",
        description="Kazhdan-Lusztig polynomials, W-graphs, cells and edge transport maps "
                    "for finite Coxeter groups.")
    p.add_argument("--cache-dir", default=None,
                   help=f"directory for KL table caches (default ${CACHE_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, formats=("text", "json")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("group", help="A3, B4, D5, E6 ... or a Coxeter matrix file")
        sp.add_argument("--format", choices=formats, default="text")
        sp.set_defaults(func=func)
        return sp

    add("group-info", cmd_group_info, "order, rank and Coxeter matrix")
    sp = add("kl", cmd_kl, "KL polynomial P_{y,w}")
    sp.add_argument("y", help="word such as '1 2 1' or 'e'")
    sp.add_argument("w")
    sp = add("mu", cmd_mu, "mu(y,w) and mu-tilde")
    sp.add_argument("y")
    sp.add_argument("w")
    sp = add("cells", cmd_cells, "left, right or two-sided cells", ("text", "json", "dot"))
    sp.add_argument("--side", default="L", help="L, R or LR")
    sp = add("wgraph", cmd_wgraph, "W-graph edges", ("text", "json", "dot"))
    sp.add_argument("--elements", nargs="*", help="restrict to these words")
    sp.add_argument("--clump", help="restrict to the clump of this word")
    sp.add_argument("--side", default="L")
    sp.add_argument("--labeling", help="D4 labeling: generators for labels 1 2 3 4")
    sp.add_argument("--preorder", choices=("L", "R", "LR"), help="also emit the preorder digraph")
    sp = add("clump", cmd_clump, "D4 clump and types of an element")
    sp.add_argument("word")
    sp.add_argument("--side", default="L")
    sp.add_argument("--labeling")
    sp = add("map", cmd_map, "apply a transport map, e.g. 'map D4 knuth L 3 4 \"4\"'")
    sp.add_argument("kind", help="knuth, b2 or d4")
    sp.add_argument("side", help="L or R")
    sp.add_argument("params", nargs="+", help="generators (knuth, b2) or a D4 map name, then the word")
    sp.add_argument("--derived", action="store_true", help="apply the derived involution U instead")
    sp.add_argument("--labeling")
    sp = add("gentau", cmd_gentau, "generalized tau-invariant classes")
    sp.add_argument("--maps", default="knuth", help="comma list of knuth, b2, d4, u")
    sp.add_argument("--side", default="L")
    sp.add_argument("--max-order", type=int, default=None)
    sp.add_argument("--labeling")
    sp = add("verify", cmd_verify, "exhaustive theorem verification")
    sp.add_argument("theorem", choices=VERIFY_IDS)
    sp.add_argument("--json", action="store_true", help="same as --format json")
    sp.add_argument("--e6-budget", type=float, default=600.0, help="seconds allowed for the E6 example")
    sp = add("cache", cmd_cache, "save or load a KL table cache")
    sp.add_argument("action", choices=("save", "load"))
    sp.add_argument("path")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "map":
        if len(args.params) < 2:
            parser.error("map needs map parameters followed by a word")
        args.word = args.params[-1]
        args.params = args.params[:-1]
    try:
        return args.func(args)
    except (UsageError, CoxeterError, PreconditionError, CacheError) as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_USAGE
    except (EnumerationLimitError, ScopeError) as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    raise SystemExit(main())
