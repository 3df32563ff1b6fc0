"""Command-line front end.

Every command writes ``<command>.csv`` and ``manifest.json`` into ``--out``.
The manifest embeds the spec text and the full argument list, so
``sysimportance replay DIR/manifest.json`` reruns the command and checks that
each CSV comes out byte-identical.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import platform
import sys
from pathlib import Path

import networkx
import numpy as np
import scipy
import yaml

from . import __version__
from .conditional import DomainError, SystemModel, error_curve, regression_curve
from .copulas import Product
from .importance import DegenerateSampleError, error_study, importance_exact, importance_mc, system_moments
from .marginals import Exponential
from .ordering import (
    ConditionedCopulaPair,
    EQUAL,
    I_LE_J,
    J_LE_I,
    OrderingError,
    concordance_compare,
    empirical_conditioned_copula,
    quantile_crossing,
    series_exponential_conditioned_copula,
    signature_st_order,
)
from .quadrature import QuadratureError
from .sampling import simulate
from .specfile import SpecError, bundled_specs, parse_spec, spec_hash
from .structure import MAX_SIGNATURE_N, StructureError, bivariate_signature, series

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _read_spec(ref: str) -> str:
    path = Path(ref)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    specs = bundled_specs()
    if ref in specs:
        return specs[ref]
    raise SpecError([f"no spec file {ref!r} and no bundled spec of that name (bundled: {', '.join(sorted(specs))})"])


def _verdict(v, i, j):
    return {I_LE_J: f"{i}<={j}", J_LE_I: f"{j}<={i}", EQUAL: "equal"}.get(v, v)


# commands -----------------------------------------------------------------
# Each returns (csv header, csv rows, text for stdout).


def cmd_validate(model: SystemModel, args):
    s = model.structure
    rows = [[j, d.family, json.dumps(d.params, sort_keys=True)] for j, d in enumerate(model.marginals, 1)]
    text = (f"ok: {model.name or 'system'} with {s.n} components, {s.r} minimal path sets, "
            f"{model.copula.family} copula (CI={model.copula.ci})")
    return ["component", "family", "params"], rows, text


def cmd_reliability(model, args):
    t = np.linspace(0.0, model.t_max, args.grid)
    sys_rel = model.system_survival(t)
    comp = model.survivals(t)
    header = ["t", "system"] + [f"component_{j}" for j in range(1, model.n + 1)]
    rows = [[t[a], sys_rel[a], *comp[a]] for a in range(t.size)]
    mean, var = system_moments(model, args.tolerance)
    return header, rows, f"E(T)={mean:.9g}  Var(T)={var:.9g}"


def cmd_importance(model, args):
    header = ["rep", "k", "r2", "var_m", "residual", "mean_m", "mean_t", "var_t"]
    rows, texts = [], []
    if args.method == "exact":
        reports = [importance_exact(model, tolerance=args.tolerance)]
    else:
        reports = [importance_mc(model, args.n, args.seed, rep=r, threads=args.threads) for r in range(args.reps)]
    for r, rep in enumerate(reports):
        for c in rep.components:
            rows.append([r, c.k, c.r2, c.var_m, c.residual, c.mean_m, rep.mean_t, rep.var_t])
        texts.append(rep.table())
    return header, rows, "\n\n".join(texts)


def _component(model, args):
    k = args.component
    if k is None or not 1 <= k <= model.n:
        raise ValueError(f"--component must be given in 1..{model.n}")
    return k


def cmd_curve(model, args):
    k = _component(model, args)
    m_curve = regression_curve(model, k)
    x = m_curve.default_grid(args.grid)
    m = m_curve(x)
    e = error_curve(model, k)(x)
    rows = [[x[a], m[a], e[a]] for a in range(x.size)]
    return ["x", "m", "e"], rows, f"component {k}: {x.size} grid points on [{x[0]:.6g}, {x[-1]:.6g}]"


def _closed_form_series_pair(model):
    return (model.structure.same_as(series(2)) and isinstance(model.copula, Product)
            and all(isinstance(d, Exponential) for d in model.marginals))


def _iid(model):
    first = model.marginals[0]
    return isinstance(model.copula, Product) and all(d == first for d in model.marginals)


def cmd_compare(model, args):
    n = model.n
    closed = _closed_form_series_pair(model)
    sample = None if closed else simulate(model, args.n, args.seed, threads=args.threads)
    copulas = {}
    for k in range(1, n + 1):
        if closed:
            copulas[k] = (series_exponential_conditioned_copula(model.marginals[0].rate, model.marginals[1].rate, k), None, None)
        else:
            copulas[k] = empirical_conditioned_copula(model, k, sample=sample)
    sigs = ({k: bivariate_signature(model.structure, k) for k in range(1, n + 1)}
            if _iid(model) and n <= MAX_SIGNATURE_N else None)
    rows, lines = [], []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            qc = quantile_crossing(model, i, j, args.grid)
            ci, se_i, draws = copulas[i]
            cj, se_j, _ = copulas[j]
            cc = concordance_compare(ConditionedCopulaPair(i, j, ci, cj, se_i=se_i, se_j=se_j, draws=draws))
            if sigs is None:
                st = "n/a"
            else:
                fwd, back = signature_st_order(sigs[i], sigs[j]), signature_st_order(sigs[j], sigs[i])
                st = {(True, True): "equal", (True, False): f"{i}<={j}",
                      (False, True): f"{j}<={i}"}.get((fwd, back), "none")
            why = f"quantile: {qc.reason}; concordance: {cc.reason}"
            rows.append([i, j, _verdict(qc.verdict, i, j), qc.crossings, _verdict(cc.verdict, i, j), st, why])
            lines.append(f"({i},{j})  crossing={_verdict(qc.verdict, i, j):<12} "
                         f"concordance={_verdict(cc.verdict, i, j):<12} signature={st}")
    header = ["i", "j", "quantile_crossing", "crossings", "concordance", "signature_st", "rationale"]
    legend = "i<=j means the sufficient condition for R_i^2 <= R_j^2 holds"
    return header, rows, "\n".join([legend, *lines])


def cmd_signature(model, args):
    ks = [args.component] if args.component else range(1, model.n + 1)
    rows, text = [], []
    for k in ks:
        sig = bivariate_signature(model.structure, k)
        for a in range(model.n):
            for b in range(model.n):
                rows.append([k, a + 1, b + 1, sig.mass[a, b]])
        text.append(f"component {k}:\n{np.array2string(sig.mass, precision=6)}")
    return ["k", "i", "j", "mass"], rows, "\n".join(text)


def cmd_error_study(model, args):
    k = _component(model, args)
    sizes = args.n if isinstance(args.n, list) else [args.n]
    rows, lines = [], []
    for size in sizes:
        st = error_study(model, k, size, args.reps, args.seed, threads=args.threads)
        q1, q2, q3 = st.quartiles
        rows.append([k, size, args.reps, st.exact, st.mean, st.sd, q1, q2, q3, st.median_abs])
        lines.append(f"N={size:<7} mean={st.mean:+.3e}  sd={st.sd:.3e}  median|E|={st.median_abs:.3e}")
    header = ["k", "n", "reps", "exact", "mean", "sd", "q1", "median", "q3", "median_abs"]
    return header, rows, "\n".join(lines)


HANDLERS = {
    "validate": cmd_validate,
    "reliability": cmd_reliability,
    "importance": cmd_importance,
    "curve": cmd_curve,
    "compare": cmd_compare,
    "signature": cmd_signature,
    "error-study": cmd_error_study,
}


# argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sysimportance", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("spec", help="spec file path or bundled spec name")
        sp.add_argument("--out", default="sysimportance-out", help="output directory")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--tolerance", type=float, default=1e-9)
        sp.add_argument("--seed", type=int, default=0)
        return sp

    common(sub.add_parser("validate", help="parse and validate a spec"))
    common(sub.add_parser("reliability", help="system reliability on a grid")).add_argument("--grid", type=int, default=200)
    sp = common(sub.add_parser("importance", help="R^2 for every component"))
    sp.add_argument("--method", choices=("exact", "mc"), default="exact")
    sp.add_argument("--n", type=int, default=5000)
    sp.add_argument("--reps", type=int, default=1)
    sp = common(sub.add_parser("curve", help="regression and error curves of one component"))
    sp.add_argument("--component", type=int, required=True)
    sp.add_argument("--grid", type=int, default=200)
    sp = common(sub.add_parser("compare", help="pairwise sufficient-condition verdicts"))
    sp.add_argument("--grid", type=int, default=199)
    sp.add_argument("--n", type=int, default=100_000, help="draws for empirical copulas")
    sp = common(sub.add_parser("signature", help="bivariate signature matrices"))
    sp.add_argument("--component", type=int)
    sp = common(sub.add_parser("error-study", help="Monte Carlo error dispersion"))
    sp.add_argument("--component", type=int, required=True)
    sp.add_argument("--n", type=int, nargs="+", default=[100, 500, 1000, 1500, 5000])
    sp.add_argument("--reps", type=int, default=100)
    rp = sub.add_parser("replay", help="rerun a manifest and compare outputs")
    rp.add_argument("manifest")
    rp.add_argument("--out", help="output directory (default: a 'replay' folder next to the manifest)")
    return p


def _versions():
    return {
        "sysimportance": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "pyyaml": yaml.__version__,
    }


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def execute(argv, spec_text=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return replay(args.manifest, args.out)
    try:
        if spec_text is None:
            spec_text = _read_spec(args.spec)
        model = parse_spec(spec_text)
        header, rows, text = HANDLERS[args.command](model, args)
    except (SpecError, StructureError) as exc:
        print(f"invalid spec:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QuadratureError, DegenerateSampleError, OrderingError, DomainError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = f"{args.command}.csv"
    body = _csv_text(header, rows)
    (out / name).write_text(body, encoding="utf-8")
    flags = {k: v for k, v in vars(args).items() if k not in ("spec", "out")}
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "flags": flags,
        "spec_text": spec_text,
        "spec_sha256": spec_hash(spec_text),
        "versions": _versions(),
        "outputs": {name: _sha(body)},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def replay(manifest_path, out=None) -> int:
    path = Path(manifest_path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
        argv = list(manifest["argv"])
        spec_text = manifest["spec_text"]
        expected = manifest["outputs"]
    except (OSError, ValueError, KeyError) as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = out or str(path.parent / "replay")
    # Swap the output directory; the spec comes from the manifest, not the disk.
    if "--out" in argv:
        argv[argv.index("--out") + 1] = out
    else:
        argv += ["--out", out]
    code = execute(argv, spec_text=spec_text)
    if code != EXIT_OK:
        return code
    for name, digest in expected.items():
        got = _sha((Path(out) / name).read_text(encoding="utf-8"))
        if got != digest:
            print(f"replay mismatch in {name}", file=sys.stderr)
            return EXIT_NUMERIC
    print(f"replay reproduced {', '.join(sorted(expected))} in {out}")
    return EXIT_OK


def main(argv=None) -> int:
    return execute(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
