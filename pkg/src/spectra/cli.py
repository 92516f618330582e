"""Command-line entry point: ``spectra <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

import numpy as np
import scipy.io

from . import __version__
from .algebraic import field_from, format_polynomial
from .errors import ParseError, SpectraError
from .spectrum import (UNDETERMINED, check_condition1, compute_delta, compute_V_interval,
                       enumerate_patch)

DEFAULT_TOL = 1e-12


def _provenance(args, extra=None) -> dict:
    p = {"tool": "spectra", "version": __version__, "command": args.command}
    poly = getattr(args, "polynomial", None)
    if poly is not None:
        p["polynomial"] = poly
    for key in ("R", "depth", "steps", "seed", "scale", "margin", "tol"):
        if getattr(args, key, None) is not None:
            p[key] = getattr(args, key)
    if extra:
        p.update(extra)
    return p


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _csv_text(header: List[str], rows, prov: dict) -> str:
    buf = io.StringIO()
    for k, v in prov.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def read_csv(text: str):
    """Parse CSV written by this tool: (provenance dict, header, rows)."""
    prov, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            prov[k] = v
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return prov, rows[0], rows[1:]


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _output(args, payload: dict, header=None, rows=None, extra_prov=None) -> None:
    prov = _provenance(args, extra_prov)
    if args.format == "csv" and header is not None:
        _emit(args, _csv_text(header, rows, prov))
    else:
        _emit(args, _json_text({"provenance": prov, **payload}))


def _point_rows(field, points):
    E = field.embed_all(points)
    rows = []
    for k, p in enumerate(points):
        cont = E[k, field.n_expanding:]
        rows.append([k, " ".join(map(str, p)), float(E[k, 0].real)]
                    + [float(v) for c in cont for v in ((c.real,) if abs(c.imag) == 0 else (c.real, c.imag))])
    return rows


def _point_header(field):
    h = ["index", "coords", "value"]
    for j, r in enumerate(field.contracting_roots):
        h += [f"c{j}"] if r.imag == 0 else [f"c{j}_re", f"c{j}_im"]
    return h


# --- commands -------------------------------------------------------------


def cmd_analyze(args):
    from .transition import build_lambda_R, spectral_data
    f = field_from(args.polynomial, root_tol=args.tol)
    payload = {
        "polynomial": format_polynomial(f.minpoly.coeffs),
        "coeffs": list(f.minpoly.coeffs),
        "degree": f.degree,
        "classification": f.classification,
        "beta": f.beta,
        "roots": [[float(r.real), float(r.imag)] for r in f.roots],
        "n_expanding": f.n_expanding,
    }
    patch = enumerate_patch(f, 1.0)
    spec = spectral_data(build_lambda_R(patch))
    payload.update({"lambda": spec.lam, "mu0": spec.mu0, "patch_size": len(patch)})
    _output(args, payload)


def cmd_spectrum(args):
    f = field_from(args.polynomial, root_tol=args.tol)
    P = enumerate_patch(f, args.R, closed=args.closed)
    header, rows = _point_header(f), _point_rows(f, P.points)
    if args.export_patch:
        E = f.embed_all(P.points)
        doc = {"provenance": _provenance(args), "size": len(P),
               "points": [{"z": list(p), "embedding": [[float(c.real), float(c.imag)] for c in E[k]],
                           "edges": {str(d): int(P.edges[k, c]) for c, d in enumerate((-1, 0, 1))}}
                          for k, p in enumerate(P.points)]}
        with open(args.export_patch, "w") as fh:
            fh.write(_json_text(doc))
    _output(args, {"size": len(P), "points": [list(p) for p in P.points]}, header, rows)


def cmd_delta(args):
    f = field_from(args.polynomial, root_tol=args.tol)
    D = compute_delta(f)
    _output(args, {"size": len(D), "elements": [list(p) for p in D.elements]},
            _point_header(f), _point_rows(f, D.elements))


def _write_mm(path, M, prov, index):
    lines = [f"{k}: {v}" for k, v in prov.items()]
    lines.append("index: " + ";".join(" ".join(map(str, p)) for p in index))
    scipy.io.mmwrite(path, M.tocoo(), comment="\n".join(lines), field="integer")


def cmd_matrices(args):
    from .transition import build_digit_matrices, build_lambda_R, build_M0_pisot
    f = field_from(args.polynomial, root_tol=args.tol)
    if args.kind == "lambda":
        mats = {"lambda": build_lambda_R(enumerate_patch(f, args.R))}
    elif args.kind == "m0":
        mats = {"m0": build_M0_pisot(compute_V_interval(f, margin=args.margin), f)}
    else:
        D = build_digit_matrices(compute_delta(f))
        mats = {f"A{c:+d}": D[c] for c in (-1, 0, 1)}
    if args.format == "matrix-market":
        if not args.out:
            raise SpectraError("matrix-market output needs --out as a file prefix")
        for name, M in mats.items():
            _write_mm(f"{args.out}.{name}.mtx", M.matrix, _provenance(args, {"matrix": name}), M.index)
        return
    payload = {name: {"dim": M.dim, "nnz": M.nnz, "entries": [[i + 1, j + 1, v] for i, j, v in M.entries()],
                      "index": [list(p) for p in M.index]} for name, M in mats.items()}
    rows = [[name, i + 1, j + 1, v] for name, M in mats.items() for i, j, v in M.entries()]
    _output(args, payload, ["matrix", "row", "col", "value"], rows)


def _parse_word(text: str):
    text = text.strip()
    if not text:
        return []
    if "," in text:
        return [int(t) for t in text.split(",")]
    table = {"-": -1, "0": 0, "+": 1, "1": 1}
    if any(ch not in table for ch in text):
        raise ParseError(f"cannot read digit word {text!r}")
    return [table[ch] for ch in text]


def cmd_measure(args):
    from .transition import build_digit_matrices, delta_spectral_data, local_vector
    f = field_from(args.polynomial, root_tol=args.tol)
    D = build_digit_matrices(compute_delta(f))
    spec = delta_spectral_data(D)
    word = _parse_word(args.word)
    for c in word:
        if c not in (-1, 0, 1):
            raise SpectraError(f"digit {c} not in -1, 0, 1")
    z = f.from_word(word)
    v = local_vector(spec, D, word)
    payload = {"word": word, "point": list(z), "value": f.value(z), "lambda": spec.lam,
               "mu": float(v[0]), "mu0": spec.mu0}
    if args.local:
        payload["local_vector"] = [{"v": list(p), "mu": float(x)} for p, x in zip(D.index, v)]
    _output(args, payload)


def cmd_wasserstein(args):
    from .measure_analysis import dimension_report
    r = dimension_report(args.polynomial, margin=args.margin, scale=args.scale)
    d = r.to_dict()
    _output(args, d, list(d.keys()), [list(d.values())])


def cmd_table1(args):
    from .measure_analysis import TABLE1, table1_pipeline
    polys = args.polynomials or [row[0] for row in TABLE1]
    reports = table1_pipeline(polys, margin=args.margin, scale=args.scale, threads=args.threads)
    header = ["polynomial", "beta", "lambda", "bound", "w1", "matrix_size", "entropy_lb", "rowsum_residual", "error"]
    rows = [[r.polynomial, r.beta, r.lam, r.bound, r.w1, r.matrix_size, r.entropy_lb, r.rowsum_residual, r.error or ""]
            for r in reports]
    if args.format == "json":
        _output(args, {"rows": [r.to_dict() for r in reports]})
    else:
        _emit(args, _csv_text(header, rows, _provenance(args)))
    return max(r.exit_code for r in reports)


def cmd_condition1(args):
    f = field_from(args.polynomial, root_tol=args.tol)
    v = check_condition1(f, depth=args.depth)
    _output(args, v.to_dict())
    return 4 if v.status == UNDETERMINED else 0


def cmd_mixing_word(args):
    from .projective import contraction_constants, find_mixing_word
    from .transition import build_digit_matrices
    f = field_from(args.polynomial, root_tol=args.tol)
    D = build_digit_matrices(compute_delta(f))
    mw = find_mixing_word(D)
    cc = contraction_constants(mw, trials=args.trials, seed=args.seed)
    _output(args, {**mw.to_dict(), **cc.to_dict()})


def cmd_golden_walk(args):
    from .golden import LocalVectors, walk, write_walk_csv
    lv = LocalVectors.for_steps(args.steps)
    states = walk(args.steps, lv)
    prov = _provenance(args, {"z": "ln(mu(x)/mu(0))", "mu0": repr(lv.spec.mu0)})
    header = [f"{k}: {v}" for k, v in prov.items()]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_walk_csv(states, lv.spec.mu0, fh, header)
    else:
        write_walk_csv(states, lv.spec.mu0, sys.stdout, header)


COMMANDS = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "delta": cmd_delta,
    "matrices": cmd_matrices,
    "measure": cmd_measure,
    "wasserstein": cmd_wasserstein,
    "table1": cmd_table1,
    "condition1": cmd_condition1,
    "mixing-word": cmd_mixing_word,
    "golden-walk": cmd_golden_walk,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectra", description="Spectra of hyperbolic algebraic integers.")
    p.add_argument("--version", action="version", version=f"spectra {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "matrix-market"], default=None,
                        help="json by default, csv for table1")
    common.add_argument("--out", "-o", default=None, help="output path (stdout if omitted)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root tolerance")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, poly=True, **kw):
        sp_ = sub.add_parser(name, parents=[common], **kw)
        if poly:
            sp_.add_argument("polynomial")
        return sp_

    add("analyze", help="classify beta, report roots, lambda and mu(0)")
    s = add("spectrum", help="spectrum points in the box B(R)")
    s.add_argument("--R", type=float, default=1.0)
    s.add_argument("--closed", action="store_true")
    s.add_argument("--export-patch", default=None)
    add("delta", help="the difference set indexing the local vectors")
    s = add("matrices", help="counting matrices")
    s.add_argument("--kind", choices=["lambda", "digits", "m0"], default="lambda")
    s.add_argument("--R", type=float, default=1.0)
    s.add_argument("--margin", type=float, default=0.01)
    s = add("measure", help="mu at the point coded by a digit word")
    s.add_argument("--word", default="", help='digits as "1,0,-1" or "+0-"')
    s.add_argument("--local", action="store_true", help="include the local vector")
    s = add("wasserstein", help="dimension bound and W1 for a Pisot number")
    s.add_argument("--scale", choices=["unit", "native"], default="unit")
    s.add_argument("--margin", type=float, default=0.01)
    s = add("table1", poly=False, help="the 13-row table of Pisot numbers of degree < 6")
    s.add_argument("polynomials", nargs="*")
    s.add_argument("--scale", choices=["unit", "native"], default="unit")
    s.add_argument("--margin", type=float, default=0.01)
    s.add_argument("--threads", type=int, default=None)
    s = add("condition1", help="check Condition 1")
    s.add_argument("--depth", type=int, default=20)
    s = add("mixing-word", help="mixing word and contraction constants")
    s.add_argument("--trials", type=int, default=10**4)
    s.add_argument("--seed", type=int, default=0)
    s = add("golden-walk", poly=False, help="odometer walk through the golden-mean spectrum")
    s.add_argument("--steps", type=int, default=1000)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "table1" else "json"
    try:
        code = COMMANDS[args.command](args)
    except SpectraError as e:
        sys.stderr.write(json.dumps({**e.to_dict(), "exit_code": e.exit_code}) + "\n")
        return e.exit_code
    except ValueError as e:
        sys.stderr.write(json.dumps({"error": "InputError", "message": str(e), "exit_code": 2}) + "\n")
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
