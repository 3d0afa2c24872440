"""Command-line front end: evaluate formulas, run simulations, compare both.

Three command groups:
  eval      closed forms and quadrature (I, I-tilde, J, fvector, poisson,
            zerocell, civ, asymptotic, halfsphere)
  simulate  Monte Carlo estimates (fvector, external-angle, civ,
            poisson-hull, distance-law)
  compare   formula vs simulation tables with z-scores (fvector,
            external-angle, civ, poisson, zerocell, asymptotics,
            monotonicity)

Reports are JSON by default, CSV with --format csv, and embed the seed,
version, and the fully resolved parameters, so any run can be reproduced
bit-exactly from its own report. Exit codes: 0 success, 1 comparison
failure, 2 usage or domain error, 3 numerical/degeneracy error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .errors import (
    ConsistencyError,
    DegeneracyError,
    DomainError,
    NumericalError,
)
from .formulas import (
    JProvider,
    affine_surface_area_const,
    expected_external_angle,
    expected_fvector,
    expected_fvector_poisson,
    expected_fvector_zero_cell,
    expected_tangent_civ,
    fvector_asymptotic_const,
    half_sphere_expected_fvector,
    zero_cell_highdim_asymptotic,
)
from .montecarlo import (
    ks_statistic,
    simulate_expected_external_angle,
    simulate_expected_fvector,
    simulate_poisson_fvector,
    simulate_squared_distance,
    simulate_tangent_civ,
)
from .quadrature import asymptotic_I, compute_I, compute_I_tilde
from .sampling import DistParams, SeededStream
from .specfun import regularized_incomplete_beta

KS_CRIT_1PCT = 1.62762  # asymptotic 1% Kolmogorov-Smirnov critical coefficient


def _resolve_seed(arg_seed: Optional[int]) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get("BETAPOLY_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise DomainError(f"BETAPOLY_SEED must be an integer, got {env!r}") from exc
    return 0


def _row(name: str, value: float, sigma: float, n: int, label: str, **extra: Any) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "name": name,
        "value": float(value),
        "sigma": float(sigma),
        "n": int(n),
        "reference_label": label,
    }
    row.update(extra)
    return row


def _provider(args: argparse.Namespace, seed: int) -> JProvider:
    return JProvider(
        seed=seed,
        cache_path=getattr(args, "j_cache", None),
        outer_reps=getattr(args, "reps", None) or 10_000,
        inner_samples=getattr(args, "inner", None) or 1_000,
        threads=getattr(args, "threads", 1),
    )


# ---------------------------------------------------------------------------
# eval


def _eval_quadrature(args: argparse.Namespace, tilde: bool) -> Tuple[List[Dict], Optional[Dict]]:
    fn = compute_I_tilde if tilde else compute_I
    res = fn(args.n, args.k, args.alpha)
    name = "I-tilde" if tilde else "I"
    return [_row(name, res.value, res.abs_err_estimate, res.evaluations, "quadrature")], None


def _eval_J(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    mean, sigma = provider.value(args.family, args.m, args.ell, args.alpha)
    label = "exact-table" if sigma == 0.0 else "monte-carlo"
    n = 1 if sigma == 0.0 else provider.outer_reps
    return [_row("J", mean, sigma, n, label)], None


def _eval_fvector(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    ks = range(args.d) if args.k is None else [args.k]
    rows = []
    terms = None
    for k in ks:
        fv = expected_fvector(args.family, args.d, args.n, args.beta, k, provider)
        rows.append(_row(f"f{k}", fv.value, fv.sigma, 1, "formula"))
        if args.k is not None:
            terms = {str(s): v for s, v in fv.terms.items()}
    return rows, terms


def _eval_poisson(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    ks = range(args.d) if args.k is None else [args.k]
    rows = []
    terms = None
    for k in ks:
        fv = expected_fvector_poisson(args.d, args.alpha, k, provider)
        rows.append(_row(f"f{k}", fv.value, fv.sigma, 1, "formula"))
        if args.k is not None:
            terms = {str(s): v for s, v in fv.terms.items()}
    return rows, terms


def _eval_zerocell(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    ks = range(args.d) if args.k is None else [args.k]
    rows = []
    terms = None
    for k in ks:
        fv = expected_fvector_zero_cell(args.d, args.alpha, k, provider)
        extra = {} if fv.log_value is None else {"log_value": fv.log_value}
        rows.append(_row(f"f{k}", fv.value, fv.sigma, 1, "formula", **extra))
        if args.k is not None:
            terms = {str(s): v for s, v in fv.terms.items()}
    return rows, terms


def _eval_civ(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    js = range(args.k - 1, args.d + 1) if args.j is None else [args.j]
    rows = []
    terms = None
    for j in js:
        fv = expected_tangent_civ(args.family, args.d, args.n, args.k, j, args.beta, provider)
        rows.append(_row(f"v{j}", fv.value, fv.sigma, 1, "formula"))
        if args.j is not None:
            terms = {str(s): v for s, v in fv.terms.items()}
    return rows, terms


def _eval_asymptotic(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    if (args.beta is None) == (args.alpha is None):
        raise DomainError("pass exactly one of --beta (hull limit) or --alpha (zero-cell limit)")
    rows = []
    if args.beta is not None:
        provider = _provider(args, seed)
        fv = fvector_asymptotic_const(args.d, args.k, args.beta, provider)
        rows.append(_row("fvector-limit", fv.value, fv.sigma, 1, "formula"))
        if args.beta == 0.0:
            c = affine_surface_area_const(args.d, args.k, provider)
            rows.append(_row("surface-area-normalization", c.value, c.sigma, 1, "formula"))
    else:
        fv = zero_cell_highdim_asymptotic(args.d, args.k, args.alpha)
        rows.append(
            _row("zerocell-limit", fv.value, fv.sigma, 1, "closed-form", log_value=fv.log_value)
        )
    return rows, None


def _eval_halfsphere(args: argparse.Namespace, seed: int) -> Tuple[List[Dict], Optional[Dict]]:
    provider = _provider(args, seed)
    ks = range(args.d) if args.k is None else [args.k]
    rows = []
    for k in ks:
        fv = half_sphere_expected_fvector(args.d, k, provider, n=args.n)
        rows.append(_row(f"f{k}", fv.value, fv.sigma, 1, "formula"))
    return rows, None


# ---------------------------------------------------------------------------
# simulate


def _simulate_fvector(args: argparse.Namespace, seed: int) -> List[Dict]:
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    ests = simulate_expected_fvector(params, args.n, args.reps, rng, threads=args.threads)
    return [
        _row(f"f{k}", est.mean, est.std_error, est.n_samples, "simulation")
        for k, est in enumerate(ests)
    ]


def _simulate_external_angle(args: argparse.Namespace, seed: int) -> List[Dict]:
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    est = simulate_expected_external_angle(
        params, args.n, args.k, args.reps, rng, inner_samples=args.inner, threads=args.threads
    )
    return [_row("gamma", est.mean, est.std_error, est.n_samples, "simulation")]


def _simulate_civ(args: argparse.Namespace, seed: int) -> List[Dict]:
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    js = range(args.k - 1, args.d + 1) if args.j is None else [args.j]
    rows = []
    for j in js:
        est = simulate_tangent_civ(
            params,
            args.n,
            args.k,
            j,
            args.reps,
            rng.substream(f"civ:{j}"),
            inner_samples=args.inner,
            threads=args.threads,
        )
        rows.append(_row(f"v{j}", est.mean, est.std_error, est.n_samples, "simulation"))
    return rows


def _simulate_poisson_hull(args: argparse.Namespace, seed: int) -> List[Dict]:
    rng = SeededStream(seed, 0)
    ests = simulate_poisson_fvector(args.d, args.alpha, args.reps, rng, threads=args.threads)
    return [
        _row(f"f{k}", est.mean, est.std_error, est.n_samples, "simulation")
        for k, est in enumerate(ests)
    ]


def _distance_law(family: str, d: int, k: int, beta: float) -> Tuple[str, Any]:
    """Reference law of the squared origin-to-affine-hull distance."""
    a = 0.5 * (d - k + 1)
    if family == "beta":
        b = 0.5 * (k - 1) * (d + 1) + k * beta + 1.0

        def cdf(t: float) -> float:
            if t <= 0.0:
                return 0.0
            if t >= 1.0:
                return 1.0
            return regularized_incomplete_beta(t, a, b)

        return f"Beta({a:g},{b:g})", cdf
    b = k * (beta - 0.5 * d)

    def cdf_prime(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return regularized_incomplete_beta(t / (1.0 + t), a, b)

    return f"BetaPrime({a:g},{b:g})", cdf_prime


def _simulate_distance_law(args: argparse.Namespace, seed: int) -> List[Dict]:
    params = DistParams(args.family, args.d, args.beta)
    if not 1 <= args.k <= args.d:
        raise DomainError(f"need 1 <= k <= d, got k = {args.k}")
    rng = SeededStream(seed, 0)
    samples = simulate_squared_distance(params, args.k, args.reps, rng)
    label, cdf = _distance_law(args.family, args.d, args.k, args.beta)
    stat = ks_statistic(samples, cdf)
    crit = KS_CRIT_1PCT / math.sqrt(args.reps)
    return [
        _row("ks_stat", stat, 0.0, args.reps, label),
        _row("ks_crit_1pct", crit, 0.0, args.reps, label),
        _row("ks_pass", 1.0 if stat <= crit else 0.0, 0.0, args.reps, label),
    ]


# ---------------------------------------------------------------------------
# compare


def _cell(
    name: str,
    formula: float,
    formula_sigma: float,
    sim: float,
    sim_sigma: float,
    n: int,
    z_band: float = 3.0,
) -> Dict[str, Any]:
    spread = math.hypot(formula_sigma, sim_sigma)
    z = (formula - sim) / spread if spread > 0.0 else (0.0 if formula == sim else math.inf)
    return {
        "name": name,
        "formula": formula,
        "formula_sigma": formula_sigma,
        "sim": sim,
        "sim_sigma": sim_sigma,
        "z": z,
        "n": n,
        "pass": bool(abs(z) <= z_band),
    }


def _ratio_cell(name: str, ratio: float, band: float, n: int) -> Dict[str, Any]:
    return {
        "name": name,
        "formula": ratio,
        "formula_sigma": 0.0,
        "sim": 1.0,
        "sim_sigma": 0.0,
        "z": (ratio - 1.0) / band,
        "n": n,
        "pass": bool(abs(ratio - 1.0) <= band),
    }


def _compare_fvector(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    sims = simulate_expected_fvector(params, args.n, args.reps, rng, threads=args.threads)
    cells = []
    for k in range(args.d):
        fv = expected_fvector(args.family, args.d, args.n, args.beta, k, provider)
        cells.append(_cell(f"f{k}", fv.value, fv.sigma, sims[k].mean, sims[k].std_error, args.reps))
    return cells


def _compare_external_angle(args: argparse.Namespace, seed: int) -> List[Dict]:
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    fv = expected_external_angle(args.family, args.d, args.n, args.k, args.beta)
    est = simulate_expected_external_angle(
        params, args.n, args.k, args.reps, rng, inner_samples=args.inner, threads=args.threads
    )
    return [_cell("gamma", fv.value, fv.sigma, est.mean, est.std_error, args.reps)]


def _compare_civ(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    params = DistParams(args.family, args.d, args.beta)
    rng = SeededStream(seed, 0)
    cells = []
    for j in range(args.k - 1, args.d + 1):
        fv = expected_tangent_civ(args.family, args.d, args.n, args.k, j, args.beta, provider)
        est = simulate_tangent_civ(
            params,
            args.n,
            args.k,
            j,
            args.reps,
            rng.substream(f"civ:{j}"),
            inner_samples=args.inner,
            threads=args.threads,
        )
        cells.append(_cell(f"v{j}", fv.value, fv.sigma, est.mean, est.std_error, args.reps))
    return cells


def _compare_poisson(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    rng = SeededStream(seed, 0)
    sims = simulate_poisson_fvector(args.d, args.alpha, args.reps, rng, threads=args.threads)
    cells = []
    for k in range(args.d):
        fv = expected_fvector_poisson(args.d, args.alpha, k, provider)
        cells.append(_cell(f"f{k}", fv.value, fv.sigma, sims[k].mean, sims[k].std_error, args.reps))
    return cells


def _compare_zerocell(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    alphas = args.alphas or [1.0, 2.0]
    rng = SeededStream(seed, 0)
    cells = []
    for alpha in alphas:
        sims = simulate_poisson_fvector(
            args.d, alpha, args.reps, rng.substream(f"a:{alpha:.12g}"), threads=args.threads
        )
        for k in range(args.d):
            fv = expected_fvector_zero_cell(args.d, alpha, k, provider)
            # polarity: k-faces of the cell match (d-1-k)-faces of the hull
            sim = sims[args.d - 1 - k]
            cells.append(
                _cell(
                    f"a={alpha:g}/f{k}", fv.value, fv.sigma, sim.mean, sim.std_error, args.reps
                )
            )
    return cells


def _compare_monotonicity(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    n_lo, n_hi = args.d + 1, max(args.n or 15, args.d + 2)
    cells = []
    for k in range(args.d):
        values = [
            expected_fvector(args.family, args.d, n, args.beta, k, provider).value
            for n in range(n_lo, n_hi + 1)
        ]
        margin = min(b - a for a, b in zip(values, values[1:]))
        cells.append(
            {
                "name": f"f{k}/min-increase",
                "formula": margin,
                "formula_sigma": 0.0,
                "sim": 0.0,
                "sim_sigma": 0.0,
                "z": None,
                "n": n_hi - n_lo + 1,
                "pass": bool(margin > 0.0),
            }
        )
    return cells


def _compare_asymptotics(args: argparse.Namespace, seed: int) -> List[Dict]:
    provider = _provider(args, seed)
    n = args.n or 100_000
    cells = []
    r = compute_I_tilde(n, 2, 1.0).value / asymptotic_I("betaPrime", n, 2, 1.0)
    cells.append(_ratio_cell("I-tilde(n,2;1)/asymptotic", r, 0.01, n))
    r = compute_I(n, 2, 2.0).value / asymptotic_I("beta", n, 2, 2.0)
    cells.append(_ratio_cell("I(n,2;2)/asymptotic", r, 0.02, n))
    const = fvector_asymptotic_const(2, 1, 0.0, provider).value
    scaled = expected_fvector("beta", 2, n, 0.0, 1, provider).value * n ** (-1.0 / 3.0)
    cells.append(_ratio_cell("fvector-limit(2,1;0)/asymptotic", scaled / const, 0.05, n))
    return cells


# ---------------------------------------------------------------------------
# report plumbing

_EVAL_HANDLERS = {
    "I": lambda a, s: _eval_quadrature(a, False),
    "I-tilde": lambda a, s: _eval_quadrature(a, True),
    "J": _eval_J,
    "fvector": _eval_fvector,
    "poisson": _eval_poisson,
    "zerocell": _eval_zerocell,
    "civ": _eval_civ,
    "asymptotic": _eval_asymptotic,
    "halfsphere": _eval_halfsphere,
}

_SIMULATE_HANDLERS = {
    "fvector": _simulate_fvector,
    "external-angle": _simulate_external_angle,
    "civ": _simulate_civ,
    "poisson-hull": _simulate_poisson_hull,
    "distance-law": _simulate_distance_law,
}

_COMPARE_HANDLERS = {
    "fvector": _compare_fvector,
    "external-angle": _compare_external_angle,
    "civ": _compare_civ,
    "poisson": _compare_poisson,
    "zerocell": _compare_zerocell,
    "monotonicity": _compare_monotonicity,
    "asymptotics": _compare_asymptotics,
}

_PROVIDER_KEYS = ("reps", "inner", "threads", "j_cache")

# required / accepted argument names per target; echo and default-filling
# both derive from this table
_SCHEMA: Dict[Tuple[str, str], Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    ("eval", "I"): (("n", "k", "alpha"), ()),
    ("eval", "I-tilde"): (("n", "k", "alpha"), ()),
    ("eval", "J"): (("m", "ell", "alpha"), ("family",) + _PROVIDER_KEYS),
    ("eval", "fvector"): (("d", "n"), ("family", "beta", "k") + _PROVIDER_KEYS),
    ("eval", "poisson"): (("d", "alpha"), ("k",) + _PROVIDER_KEYS),
    ("eval", "zerocell"): (("d", "alpha"), ("k",) + _PROVIDER_KEYS),
    ("eval", "civ"): (("d", "n", "k"), ("family", "beta", "j") + _PROVIDER_KEYS),
    ("eval", "asymptotic"): (("d", "k"), ("beta", "alpha") + _PROVIDER_KEYS),
    ("eval", "halfsphere"): (("d",), ("n", "k") + _PROVIDER_KEYS),
    ("simulate", "fvector"): (("d", "n"), ("family", "beta", "reps", "threads")),
    ("simulate", "external-angle"): (
        ("d", "n", "k"),
        ("family", "beta", "reps", "inner", "threads"),
    ),
    ("simulate", "civ"): (("d", "n", "k"), ("family", "beta", "j", "reps", "inner", "threads")),
    ("simulate", "poisson-hull"): (("d", "alpha"), ("reps", "threads")),
    ("simulate", "distance-law"): (("d", "k"), ("family", "beta", "reps")),
    ("compare", "fvector"): (("d", "n"), ("family", "beta") + _PROVIDER_KEYS),
    ("compare", "external-angle"): (("d", "n", "k"), ("family", "beta") + _PROVIDER_KEYS),
    ("compare", "civ"): (("d", "n", "k"), ("family", "beta") + _PROVIDER_KEYS),
    ("compare", "poisson"): (("d",), ("alpha",) + _PROVIDER_KEYS),
    ("compare", "zerocell"): (("d",), ("alphas",) + _PROVIDER_KEYS),
    ("compare", "monotonicity"): (("d",), ("family", "beta", "n", "j_cache")),
    ("compare", "asymptotics"): ((), ("n", "j_cache")),
}


def _param_echo(args: argparse.Namespace) -> Dict[str, Any]:
    required, optional = _SCHEMA[(args.command, args.target)]
    out = {}
    for key in required + optional:
        if getattr(args, key, None) is not None:
            out[key] = getattr(args, key)
    return out


def _comparison_rows(cells: List[Dict]) -> List[Dict]:
    rows = []
    for cell in cells:
        rows.append(
            _row(f"{cell['name']}/formula", cell["formula"], cell["formula_sigma"], 1, "formula")
        )
        rows.append(_row(f"{cell['name']}/sim", cell["sim"], cell["sim_sigma"], cell["n"], "simulation"))
        z = cell["z"] if cell["z"] is not None else 0.0
        rows.append(_row(f"{cell['name']}/z", z, 0.0, cell["n"], "z-score"))
    return rows


def _emit(report: Dict[str, Any], fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value", "sigma", "n", "reference_label"])
        for row in report["results"]:
            writer.writerow(
                [row["name"], repr(row["value"]), repr(row["sigma"]), row["n"], row["reference_label"]]
            )
        writer.writerow(["_meta_seed", report["seed"], "", "", ""])
        writer.writerow(["_meta_version", report["version"], "", "", ""])
        for key in sorted(report["params"]):
            writer.writerow([f"_meta_param_{key}", report["params"][key], "", "", ""])
        text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    specs = {
        "family": dict(type=str, default="beta", choices=["beta", "betaPrime"]),
        "d": dict(type=int, default=2),
        "n": dict(type=int, default=None),
        "k": dict(type=int, default=None),
        "j": dict(type=int, default=None),
        "m": dict(type=int, default=None),
        "ell": dict(type=int, default=None),
        "beta": dict(type=float, default=None),
        "alpha": dict(type=float, default=None),
        "reps": dict(type=int, default=None),
        "inner": dict(type=int, default=512),
        "threads": dict(type=int, default=1),
    }
    for name in names:
        parser.add_argument(f"--{name}", **specs[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betapoly",
        description="Expected f-vectors, angles, and conic intrinsic volumes "
        "of random polytopes: formulas, simulations, and cross-checks.",
    )
    parser.add_argument("--version", action="version", version=f"betapoly {__version__}")
    groups = parser.add_subparsers(dest="command", required=True)

    for group_name, handlers in (
        ("eval", _EVAL_HANDLERS),
        ("simulate", _SIMULATE_HANDLERS),
        ("compare", _COMPARE_HANDLERS),
    ):
        group = groups.add_parser(group_name)
        targets = group.add_subparsers(dest="target", required=True)
        for target_name in handlers:
            sub = targets.add_parser(target_name)
            _add_common(
                sub,
                "family",
                "d",
                "n",
                "k",
                "j",
                "m",
                "ell",
                "beta",
                "alpha",
                "reps",
                "inner",
                "threads",
            )
            if group_name == "compare" and target_name == "zerocell":
                sub.add_argument("--alphas", type=float, action="append", default=None)
            sub.add_argument("--seed", type=int, default=None)
            sub.add_argument("--format", type=str, default="json", choices=["json", "csv"])
            sub.add_argument("--out", type=str, default=None)
            sub.add_argument("--j-cache", dest="j_cache", type=str, default=None)
    return parser


def _fill_defaults(args: argparse.Namespace) -> None:
    """Per-target required arguments and defaults, validated up front."""
    required, optional = _SCHEMA[(args.command, args.target)]
    for field in required:
        if getattr(args, field, None) is None:
            raise DomainError(f"--{field} is required for {args.command} {args.target}")
    # default shape 0 only where the target consumes one; the asymptotic
    # target distinguishes hull vs zero-cell limits by which shape is given
    if "beta" in optional and args.beta is None and (args.command, args.target) != (
        "eval",
        "asymptotic",
    ):
        args.beta = 0.0
    if "alpha" in optional and args.alpha is None and args.target == "poisson":
        args.alpha = 1.0
    if "reps" in required + optional and args.reps is None and args.command != "eval":
        args.reps = 10_000


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = _resolve_seed(args.seed)
        _fill_defaults(args)
        report: Dict[str, Any] = {
            "command": f"{args.command} {args.target}",
            "version": __version__,
            "seed": seed,
            "params": _param_echo(args),
        }
        exit_code = 0
        if args.command == "eval":
            rows, terms = _EVAL_HANDLERS[args.target](args, seed)
            report["results"] = rows
            if terms is not None:
                report["terms"] = terms
        elif args.command == "simulate":
            report["results"] = _SIMULATE_HANDLERS[args.target](args, seed)
        else:
            cells = _COMPARE_HANDLERS[args.target](args, seed)
            report["comparisons"] = cells
            report["passed"] = all(cell["pass"] for cell in cells)
            report["results"] = _comparison_rows(cells)
            exit_code = 0 if report["passed"] else 1
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (NumericalError, DegeneracyError, ConsistencyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    _emit(report, args.format, args.out)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
