"""Batch front end: parameter sweeps, rate/gap comparisons, file emission.

CSV files are the primary artifact; plots are derived views.  Sweeps record
per-row errors instead of aborting, carry a parameter provenance hash on
every row, and are byte-reproducible for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import instanton, keldysh, lindblad, meanfield, model
from .errors import SwitchgapError, ValidationError

SWEEP_VARIABLES = ("detuning", "drive1_mod", "alpha_ss_sq", "kerr",
                   "lambda3_mod", "kappa_phi")
PROTOCOLS = ("fig2", "fig3", "fig4", "custom")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a variable, its grid, base parameters, requested outputs."""

    variable: str
    grid: tuple
    fixed: model.SystemParams
    outputs: frozenset = frozenset({"analytic_rate"})
    n_fock: int | None = None          # None = auto by truncation scan
    label: str = ""
    prefactor: float | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValidationError(f"unknown sweep variable {self.variable!r}")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ValidationError("sweep grid must be nonempty")
        diffs = np.diff(grid)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValidationError("sweep grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)
        bad = set(self.outputs) - {"analytic_rate", "numeric_gap", "instanton_action"}
        if bad:
            raise ValidationError(f"unknown outputs {sorted(bad)}")


CSV_COLUMNS = [
    "label", "sweep_var", "value", "alpha_ss_sq",
    "z1_re", "z1_im", "z2_re", "z2_im", "zu_re", "zu_im",
    "is_1to2", "is_2to1", "gamma_1to2", "gamma_2to1", "gap_analytic",
    "gap_numeric", "instanton_action", "n_fock", "converged",
    "params_hash", "unit", "error",
]


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _apply_sweep_value(params: model.SystemParams, variable: str, value: float):
    """Parameter set at one grid point of the sweep variable."""
    from dataclasses import replace
    if variable == "detuning":
        return replace(params, delta=value)
    if variable == "kerr":
        return replace(params, kerr=value)
    if variable == "kappa_phi":
        return replace(params, kappa_phi=value)
    if variable == "drive1_mod":
        phase = np.angle(params.lambda1) if params.lambda1 != 0 else 0.0
        return replace(params, lambda1=value * np.exp(1j * phase))
    if variable == "lambda3_mod":
        phase = np.angle(params.lambda3) if params.lambda3 != 0 else 0.0
        return replace(params, lambda3=value * np.exp(1j * phase))
    if variable == "alpha_ss_sq":
        return tune_alpha_ss_sq(params, value)
    raise ValidationError(f"unknown sweep variable {variable!r}")


def tune_alpha_ss_sq(params: model.SystemParams, target: float,
                     iters: int = 30) -> model.SystemParams:
    """Adjust the dissipator displacement so the stable amplitude^2 hits target.

    Fixed-point iteration on alpha0_sq; the stable amplitude is read from the
    mean-field solver so that imperfections (detuning, Kerr, cubic drive,
    dephasing drift) are taken into account.
    """
    from dataclasses import replace
    if params.kappa2 <= 0:
        raise ValidationError("alpha_ss_sq sweeps need kappa2 > 0")
    p = params.as_alpha0_form()
    a0sq = complex(p.alpha0_sq) if p.alpha0_sq else complex(target)
    a0sq = complex(target + (params.kappa1 + params.kappa_phi) / (2 * params.kappa2),
                   a0sq.imag)
    for _ in range(iters):
        p = replace(p, alpha0_sq=a0sq)
        nss = _stable_amplitude_sq(p)
        if nss is None:
            break
        if abs(nss - target) < 1e-12:
            break
        a0sq = a0sq + (target - nss)
    return p


def _stable_amplitude_sq(params: model.SystemParams):
    fps = _fixed_points_any(params)
    stable = [p for p in fps.points if p.stability == meanfield.STABLE]
    if not stable:
        return None
    return float(np.mean([abs(p.z) ** 2 for p in stable]))


def _fixed_points_any(params: model.SystemParams):
    """Mean-field fixed points, including the dephasing drift in the flow."""
    if params.kappa_phi == 0:
        return meanfield.fixed_points_general(params)
    # dephasing damps the amplitude at kappa_phi/2; fold it into kappa1 for
    # the fixed-point search, which only sees the drift
    from dataclasses import replace
    eff = replace(params, kappa1=params.kappa1 + params.kappa_phi, kappa_phi=0.0)
    return meanfield.fixed_points_general(eff)


def run_sweep(spec: SweepSpec, seed: int = 0, progress=None) -> list[dict]:
    """Execute a sweep; per-point failures land in the row's error column."""
    rows = []
    for value in spec.grid:
        row = {c: "" for c in CSV_COLUMNS}
        row["label"] = spec.label
        row["sweep_var"] = spec.variable
        row["value"] = float(value)
        row["unit"] = spec.fixed.unit
        try:
            p = _apply_sweep_value(spec.fixed, spec.variable, value)
            row["params_hash"] = p.hash(spec.n_fock)
            fps = _fixed_points_any(p)
            stable = sorted((q for q in fps.points if q.stability == meanfield.STABLE),
                            key=lambda q: -abs(q.z))
            unstable = [q for q in fps.points if q.stability == meanfield.UNSTABLE]
            if stable:
                row["alpha_ss_sq"] = float(np.mean([abs(q.z) ** 2 for q in stable]))
                row["z1_re"], row["z1_im"] = stable[0].z.real, stable[0].z.imag
            if len(stable) > 1:
                row["z2_re"], row["z2_im"] = stable[1].z.real, stable[1].z.imag
            if unstable:
                row["zu_re"], row["zu_im"] = unstable[0].z.real, unstable[0].z.imag
            if "analytic_rate" in spec.outputs and p.kappa_phi == 0:
                rate = keldysh.switching_rates(
                    p, prefactor=spec.prefactor, fps=fps)
                row["is_1to2"] = rate.is_1to2
                row["is_2to1"] = rate.is_2to1
                row["gamma_1to2"] = rate.gamma_1to2
                row["gamma_2to1"] = rate.gamma_2to1
                row["gap_analytic"] = rate.gap
            if "numeric_gap" in spec.outputs:
                n_fock = spec.n_fock
                converged = ""
                if n_fock is None:
                    n_fock, report = lindblad.auto_n_fock(p)
                    converged = report.converged
                method = "dense" if n_fock <= lindblad.DENSE_MAX_N else "iterative"
                sop = lindblad.build_lindbladian(p, n_fock)
                summary = lindblad.dissipative_gap(sop, method=method)
                row["gap_numeric"] = summary.gap
                row["n_fock"] = n_fock
                row["converged"] = converged
                row["params_hash"] = p.hash(n_fock)
            if "instanton_action" in spec.outputs:
                fp0 = stable[0].z
                shot = instanton.shoot_instanton(p, complex(fp0))
                row["instanton_action"] = shot.trajectory.accumulated_action
        except Exception as exc:  # per-row capture by design
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
        if progress:
            progress(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])
    return buf.getvalue()


def fit_prefactor(analytic_is, numeric, anchor: str = "largest_alpha") -> float:
    """Prefactor c such that numeric ~ c * exp(iS).

    ``largest_alpha`` anchors at the final grid point; ``least_squares`` fits
    the intercept of ln(numeric) = ln(c) + iS over the grid.
    """
    analytic_is = np.asarray(analytic_is, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    if analytic_is.size == 0 or analytic_is.shape != numeric.shape:
        raise ValidationError("series must be nonempty and share the grid")
    if np.any(numeric <= 0):
        raise ValidationError("numeric rates must be positive")
    if anchor == "largest_alpha":
        return float(numeric[-1] / np.exp(analytic_is[-1]))
    if anchor == "least_squares":
        return float(np.exp(np.mean(np.log(numeric) - analytic_is)))
    raise ValidationError(f"unknown anchor {anchor!r}")


# -- figure protocols ------------------------------------------------------------


def protocol_sweeps(protocol: str, seed: int = 0) -> list[SweepSpec]:
    """Default sweep specifications reproducing the three studied scenarios.

    Grids are this package's choices (the source figures do not tabulate
    theirs); override via a config file and --variable/--grid for custom runs.
    """
    if protocol == "fig2":
        base = model.kerr_oscillator(kappa1=1.0)
        grid = tuple(np.round(np.linspace(5.5, 7.0, 9), 10) / 2)
        return [SweepSpec(variable="detuning", grid=grid, fixed=base,
                          outputs=frozenset({"analytic_rate", "numeric_gap"}),
                          label="kerr_detuning"),
                SweepSpec(variable="drive1_mod", grid=tuple(np.linspace(4.0, 6.0, 9)),
                          fixed=base,
                          outputs=frozenset({"analytic_rate", "numeric_gap"}),
                          label="kerr_drive1")]
    if protocol == "fig3":
        sweeps = []
        grid = tuple(float(x) for x in range(1, 7))
        for name, values in (("detuning", (0.1, 0.2, 0.4)),
                             ("kerr", (0.1, 0.2, 0.4)),
                             ("lambda3_mod", (0.05, 0.1, 0.2))):
            for v in values:
                if name == "detuning":
                    base = model.dissipative_cat(alpha0_sq=4.0, delta=v)
                elif name == "kerr":
                    base = model.dissipative_cat(alpha0_sq=4.0, kerr=v)
                else:
                    base = model.dissipative_cat(alpha0_sq=4.0, lambda3=complex(v))
                sweeps.append(SweepSpec(
                    variable="alpha_ss_sq", grid=grid, fixed=base,
                    outputs=frozenset({"analytic_rate", "numeric_gap"}),
                    label=f"cat_{name}_{v:g}"))
        return sweeps
    if protocol == "fig4":
        sweeps = []
        grid = tuple(float(x) for x in range(1, 6))
        for kphi in (0.1, 0.2, 0.4):
            base = model.dephased_cat(alpha0_sq=4.0, kappa_phi=kphi)
            sweeps.append(SweepSpec(
                variable="alpha_ss_sq", grid=grid, fixed=base,
                outputs=frozenset({"numeric_gap"}),
                label=f"dephased_{kphi:g}"))
        return sweeps
    raise ValidationError(f"unknown protocol {protocol!r} (custom runs need --variable)")


def emit_plot(rows: list[dict], kind: str, path: str):
    """Log-scale line/scatter rendering of a sweep table (purely presentational)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "switchgap"

    labels = sorted({r["label"] for r in rows})
    fig, axes = plt.subplots(1, max(len(labels), 1),
                             figsize=(4 * max(len(labels), 1), 3.2), squeeze=False)
    for ax, label in zip(axes[0], labels or [""]):
        sub = [r for r in rows if r["label"] == label and not r.get("error")]
        xs = [float(r["value"]) if r["alpha_ss_sq"] == "" else float(r["alpha_ss_sq"])
              for r in sub]
        for col, style in (("gap_analytic", "-"), ("gamma_1to2", "--"),
                           ("gamma_2to1", ":")):
            ys = [(x, float(r[col])) for x, r in zip(xs, sub) if r.get(col) != ""]
            if ys:
                ax.plot([p[0] for p in ys], [p[1] for p in ys], style, label=col)
        dots = [(x, float(r["gap_numeric"])) for x, r in zip(xs, sub)
                if r.get("gap_numeric") != ""]
        if dots:
            ax.plot([p[0] for p in dots], [p[1] for p in dots], "o", label="gap_numeric")
        ax.set_yscale("log")
        ax.set_title(label or kind)
        ax.set_xlabel(rows[0]["sweep_var"] if rows else "")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# -- argument parsing ------------------------------------------------------------


def _add_param_args(sp):
    sp.add_argument("--config", help="key-value config file")
    sp.add_argument("--section", help="config section to use")
    sp.add_argument("--preset", choices=model.PRESET_NAMES)
    sp.add_argument("--alpha0", type=float, help="cat displacement alpha_0")
    sp.add_argument("--alpha0-sq", type=float, help="cat displacement alpha_0^2 (real part)")
    sp.add_argument("--kappa-phi", type=float, default=None)
    sp.add_argument("--kappa1", type=float, default=None)
    for key in ("delta", "kerr", "kappa2"):
        sp.add_argument(f"--{key}", type=float, default=None)
    for key in ("lambda1", "lambda2", "lambda3"):
        sp.add_argument(f"--{key}-re", type=float, default=None)
        sp.add_argument(f"--{key}-im", type=float, default=None)
        sp.add_argument(f"--{key}-mod", type=float, default=None)
        sp.add_argument(f"--{key}-arg", type=float, default=None)


def _params_from_args(args) -> model.SystemParams:
    if args.config:
        params = model.load_config(args.config, section=args.section)
    elif args.preset == "kerr_oscillator":
        params = model.kerr_oscillator(kappa1=args.kappa1 if args.kappa1 else 1.0)
    elif args.preset == "dissipative_cat":
        params = model.dissipative_cat(
            alpha0=args.alpha0,
            alpha0_sq=args.alpha0_sq if args.alpha0 is None else None,
            delta=args.delta or 0.0, kerr=args.kerr or 0.0)
    elif args.preset == "dephased_cat":
        params = model.dephased_cat(alpha0_sq=args.alpha0_sq or 4.0,
                                    kappa_phi=args.kappa_phi or 0.0)
    else:
        params = model.SystemParams(kappa2=1.0)
    overrides = {}
    for key in ("delta", "kerr", "kappa1", "kappa2", "kappa_phi"):
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None and (args.preset is None or key not in
                                 ("delta", "kerr") or args.preset != "dissipative_cat"):
            overrides[key] = flag
    for key in ("lambda1", "lambda2", "lambda3"):
        re = getattr(args, f"{key}_re")
        im = getattr(args, f"{key}_im")
        mod = getattr(args, f"{key}_mod")
        arg = getattr(args, f"{key}_arg")
        if mod is not None:
            val = model.complex_from_polar(mod, arg or 0.0)
            overrides[f"{key}_re"] = val.real
            overrides[f"{key}_im"] = val.imag
        elif re is not None or im is not None:
            overrides[f"{key}_re"] = re or 0.0
            overrides[f"{key}_im"] = im or 0.0
    if overrides:
        params = model.params_from_dict(overrides, base=params)
    return params


def _write_out(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="switchgap",
        description="Switching rates of bistable driven-dissipative bosonic modes")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for all stochastic sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fixed-points", help="mean-field fixed points table")
    _add_param_args(sp)
    sp.add_argument("--out", help="CSV output path")

    sp = sub.add_parser("rate", help="analytic switching rates and gap")
    _add_param_args(sp)
    sp.add_argument("--prefactor", type=float, default=None)

    sp = sub.add_parser("check-db", help="detailed-balance condition report")
    _add_param_args(sp)
    sp.add_argument("--samples", type=int, default=200)

    sp = sub.add_parser("potential", help="potential on a grid as CSV")
    _add_param_args(sp)
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--extent", type=float, default=3.0)
    sp.add_argument("--points", type=int, default=41)

    sp = sub.add_parser("gap", help="numeric dissipative gap")
    _add_param_args(sp)
    sp.add_argument("--n-fock", type=int, default=None)
    sp.add_argument("--method", choices=("dense", "iterative"), default=None)

    sp = sub.add_parser("instanton", help="repulsive-plane shooting")
    _add_param_args(sp)
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--n-theta", type=int, default=720)
    sp.add_argument("--eps", type=float, default=1e-5)
    sp.add_argument("--from-sign", type=int, choices=(1, -1), default=1)

    sp = sub.add_parser("sweep", help="figure protocols and custom sweeps")
    _add_param_args(sp)
    sp.add_argument("--protocol", choices=PROTOCOLS, default="custom")
    sp.add_argument("--variable", choices=SWEEP_VARIABLES)
    sp.add_argument("--grid", help="comma-separated grid values")
    sp.add_argument("--outputs", default="analytic_rate",
                    help="comma list from analytic_rate,numeric_gap,instanton_action")
    sp.add_argument("--n-fock", type=int, default=None)
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--plot", help="SVG plot path")

    sp = sub.add_parser("fit-prefactor", help="fit prefactor from a sweep CSV")
    sp.add_argument("csv", help="sweep CSV with gap_numeric and iS columns")
    sp.add_argument("--anchor", choices=("largest_alpha", "least_squares"),
                    default="largest_alpha")

    args = parser.parse_args(argv)
    np.random.seed(args.seed)

    if args.command == "fixed-points":
        params = _params_from_args(args)
        fps = _fixed_points_any(params)
        lines = ["z_re,z_im,stability,eig1_re,eig1_im,eig2_re,eig2_im,residual"]
        print(f"# fixed points ({len(fps.points)}), bistable={fps.bistable}, "
              f"unit={params.unit}")
        print(f"{'z':>28}  {'stability':>9}  {'eigenvalues':>34}  residual")
        for q in fps.points:
            res = meanfield.residual(params, q.z)
            e1, e2 = q.jacobian_eigs
            print(f"{q.z:>28.6g}  {q.stability:>9}  {e1:>16.4g} {e2:>16.4g}  {res:.1e}")
            lines.append(f"{q.z.real!r},{q.z.imag!r},{q.stability},"
                         f"{e1.real!r},{e1.imag!r},{e2.real!r},{e2.imag!r},{res!r}")
        if args.out:
            _write_out("\n".join(lines) + "\n", args.out)
        return 0

    if args.command == "rate":
        params = _params_from_args(args)
        rate = keldysh.switching_rates(params, prefactor=args.prefactor)
        print(f"iS(1->2) = {rate.is_1to2:.6f}")
        print(f"iS(2->1) = {rate.is_2to1:.6f}")
        print(f"Gamma(1->2) = {rate.gamma_1to2:.6e} {params.unit}")
        print(f"Gamma(2->1) = {rate.gamma_2to1:.6e} {params.unit}")
        print(f"gap = {rate.gap:.6e} {params.unit} (prefactor {rate.prefactor})")
        return 0

    if args.command == "check-db":
        params = _params_from_args(args)
        print(f"{'condition':>16} {'max curl':>12} {'verdict':>8}")
        for which in (keldysh.ANSATZ_ZPRIME, keldysh.FOKKER_PLANCK_Z):
            rep = keldysh.check_curl_condition(params, which,
                                               n_samples=args.samples, seed=args.seed)
            print(f"{which:>16} {rep.max_curl:>12.3e} "
                  f"{'pass' if rep.passed else 'FAIL':>8}  "
                  f"(evaluated {rep.n_evaluated}, skipped {rep.n_skipped})")
        return 0

    if args.command == "potential":
        params = _params_from_args(args)
        xs = np.linspace(-args.extent, args.extent, args.points)
        lines = ["re,im,phi"]
        for yi in xs:
            for xi in xs:
                try:
                    phi = keldysh.potential_phi(params, complex(xi, yi))
                except SwitchgapError:
                    phi = float("nan")
                lines.append(f"{xi!r},{yi!r},{phi!r}")
        _write_out("\n".join(lines) + "\n", args.out)
        return 0

    if args.command == "gap":
        params = _params_from_args(args)
        n_fock = args.n_fock
        note = ""
        if n_fock is None:
            n_fock, report = lindblad.auto_n_fock(params)
            note = f"converged={report.converged} (changes {report.rel_changes})"
        method = args.method or ("dense" if n_fock <= lindblad.DENSE_MAX_N
                                 else "iterative")
        sop = lindblad.build_lindbladian(params, n_fock)
        summary = lindblad.dissipative_gap(sop, method=method)
        moments = lindblad.steady_state_moments(summary, ["a", "a2", "n"])
        print(f"gap = {summary.gap:.6e} {params.unit} (N={n_fock}, {method}) {note}")
        print(f"<a> = {moments[0]:.4g}  <a^2> = {moments[1]:.4g}  <n> = {moments[2]:.4g}")
        return 0

    if args.command == "instanton":
        params = _params_from_args(args)
        fps = _fixed_points_any(params)
        stable = sorted((q for q in fps.points if q.stability == meanfield.STABLE),
                        key=lambda q: -q.z.real)
        fp = stable[0].z if args.from_sign > 0 else stable[-1].z
        shot = instanton.shoot_instanton(params, complex(fp), eps=args.eps,
                                         n_theta=args.n_theta)
        tr = shot.trajectory
        lines = ["t,bcl_re,bcl_im,bclbar_re,bclbar_im,bq_re,bq_im,bqbar_re,bqbar_im,"
                 "action,density_drift"]
        for t, s, act in zip(tr.times, tr.states, tr.running_action):
            dens = keldysh.lindbladian_density(params, s)
            lines.append(",".join(repr(v) for v in (
                t, s.b_cl.real, s.b_cl.imag, s.b_cl_bar.real, s.b_cl_bar.imag,
                s.b_q.real, s.b_q.imag, s.b_q_bar.real, s.b_q_bar.imag,
                act, abs(dens))))
        if args.out:
            _write_out("\n".join(lines) + "\n", args.out)
        print(f"theta* = {shot.theta:.6f}, closest approach = "
              f"{shot.closest_approach:.3e}, action = {tr.accumulated_action:.6f}, "
              f"density drift = {tr.max_density_drift:.2e}")
        return 0

    if args.command == "sweep":
        if args.protocol != "custom":
            specs = protocol_sweeps(args.protocol, seed=args.seed)
        else:
            if not args.variable or not args.grid:
                parser.error("custom sweeps need --variable and --grid")
            params = _params_from_args(args)
            grid = tuple(float(x) for x in args.grid.split(","))
            outputs = frozenset(args.outputs.split(","))
            specs = [SweepSpec(variable=args.variable, grid=grid, fixed=params,
                               outputs=outputs, n_fock=args.n_fock, label="custom")]
        all_rows = []
        for spec in specs:
            all_rows.extend(run_sweep(spec, seed=args.seed))
        text = rows_to_csv(all_rows)
        _write_out(text, args.out)
        if args.plot:
            emit_plot(all_rows, args.protocol, args.plot)
        n_err = sum(1 for r in all_rows if r["error"])
        if n_err:
            print(f"{n_err} row(s) recorded errors", file=sys.stderr)
            return 2
        return 0

    if args.command == "fit-prefactor":
        with open(args.csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
        pairs = [(float(r["is_1to2"]), float(r["is_2to1"]), float(r["gap_numeric"]))
                 for r in rows
                 if r.get("gap_numeric") and r.get("is_1to2") and not r.get("error")]
        if not pairs:
            raise ValidationError("CSV has no usable rows (need iS and gap_numeric)")
        is_mean = [np.log((np.exp(a) + np.exp(b)) / 2) for a, b, _ in pairs]
        gaps = [g for _, _, g in pairs]
        c = fit_prefactor(is_mean, gaps, anchor=args.anchor)
        print(f"prefactor ({args.anchor}) = {c:.6g}")
        return 0

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
