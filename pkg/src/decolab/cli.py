"""Command-line front end.

Scenario files (JSON) in, delimited tables out; curve-producing
subcommands also render a matplotlib figure next to the CSV.  All runs
are deterministic for a fixed seed and output files are written
atomically (temp-then-rename).

Exit codes: 0 success, 2 scenario/schema violation, 3 regime violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import cavity, despagnat, feasibility, oracle, realclock, zurek
from .core import (Bath, ParameterError, PhysicalConstants, PhysicalScenario,
                   QubitAmplitudes, RegimeError, partial_trace, sample_bath,
                   trace_distance)
from .undecidability import Projector, undecidability_margin


class SchemaError(ValueError):
    """Scenario file violates the documented schema."""


# ---------------------------------------------------------------------------
# scenario loading


def _fail(path: str, msg: str):
    raise SchemaError(f"{path}: {msg}")


def _get(obj, path, key, typ, required=True, default=None):
    if key not in obj:
        if required:
            _fail(f"{path}.{key}", "missing required field")
        return default
    val = obj[key]
    if typ is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, typ) or isinstance(val, bool):
        _fail(f"{path}.{key}", f"expected {typ.__name__}, got {type(val).__name__}")
    return val


def load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return doc


def _coupling_law(doc, path):
    law = _get(doc, path, "coupling", dict)
    kind = _get(law, f"{path}.coupling", "law", str)
    if kind == "fixed":
        return _get(law, f"{path}.coupling", "value", float)
    if kind == "uniform":
        return (_get(law, f"{path}.coupling", "low", float),
                _get(law, f"{path}.coupling", "high", float))
    _fail(f"{path}.coupling.law", f"unknown law {kind!r}")


def _system(doc, path) -> QubitAmplitudes:
    if "system" not in doc:
        s = 1.0 / math.sqrt(2.0)
        return QubitAmplitudes(s, s)
    sysd = _get(doc, path, "system", dict)
    a = _get(sysd, f"{path}.system", "a", list)
    b = _get(sysd, f"{path}.system", "b", list)
    try:
        return QubitAmplitudes(complex(a[0], a[1]), complex(b[0], b[1]))
    except (ParameterError, IndexError, TypeError) as exc:
        _fail(f"{path}.system", str(exc))


def _bath(doc, path, seed_override) -> Bath:
    n = _get(doc, path, "n", int)
    if n < 1:
        _fail(f"{path}.n", "must be >= 1")
    seed = seed_override if seed_override is not None else _get(doc, path, "seed", int)
    law = _coupling_law(doc, path)
    try:
        return sample_bath(n, law, seed)
    except ParameterError as exc:
        _fail(f"{path}.coupling", str(exc))


def _clock(doc, path) -> realclock.ClockChannel:
    if "clock" not in doc:
        return realclock.ClockChannel()
    cd = _get(doc, path, "clock", dict)
    try:
        return realclock.ClockChannel(
            t_planck=_get(cd, f"{path}.clock", "t_planck", float,
                          required=False, default=5.39e-44),
            clock_exponent=_get(cd, f"{path}.clock", "clock_exponent", float,
                                required=False, default=1.0 / 3.0))
    except ParameterError as exc:
        _fail(f"{path}.clock", str(exc))


def _grid(doc, path, key="times") -> np.ndarray:
    g = _get(doc, path, key, dict)
    start = _get(g, f"{path}.{key}", "start", float)
    stop = _get(g, f"{path}.{key}", "stop", float)
    num = _get(g, f"{path}.{key}", "num", int)
    if num < 1:
        _fail(f"{path}.{key}.num", "must be >= 1")
    if start < 0 or stop < start:
        _fail(f"{path}.{key}", "need 0 <= start <= stop")
    return np.linspace(start, stop, num)


def _pass_params(doc, path, f_default=0.0) -> cavity.PassParams:
    pd = _get(doc, path, "pass", dict)
    p = f"{path}.pass"
    try:
        return cavity.PassParams(
            f=_get(pd, p, "f", float, required=False, default=f_default),
            B=_get(pd, p, "B", float),
            gamma1=_get(pd, p, "gamma1", float),
            gamma2=_get(pd, p, "gamma2", float),
            tau=_get(pd, p, "tau", float),
            hbar=_get(pd, p, "hbar", float, required=False, default=cavity.HBAR_SI))
    except ParameterError as exc:
        _fail(p, str(exc))


def _scenario_physical(doc, path, preset_name=None) -> PhysicalScenario:
    pd = dict(_get(doc, path, "physical", dict, required=False, default={}))
    p = f"{path}.physical"
    preset_name = preset_name or pd.pop("preset", None)
    if preset_name is not None:
        presets = feasibility.load_presets()
        if preset_name not in presets:
            _fail(p, f"unknown preset {preset_name!r}; have {sorted(presets)}")
        sp = presets[preset_name]
        pd.setdefault("mass", sp.mass)
        pd.setdefault("gamma1", sp.gamma)
        pd.setdefault("gamma2", sp.gamma)
    defaults = {"B": 1.0, "d": 1e-13, "L": 1e-2, "v": 1e3, "tau": 2e-5, "N": 1}
    for key, val in defaults.items():
        pd.setdefault(key, val)
    try:
        return PhysicalScenario(
            mass=float(pd["mass"]), gamma1=float(pd["gamma1"]),
            gamma2=float(pd["gamma2"]), B=float(pd["B"]), d=float(pd["d"]),
            L=float(pd["L"]), v=float(pd["v"]), tau=float(pd["tau"]),
            N=int(pd["N"]))
    except (KeyError, ParameterError, TypeError, ValueError) as exc:
        _fail(p, str(exc))


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-decolab-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.17g}"
    return str(x)


def write_table(path: str, header: list[str], rows: list[list],
                fmt: str) -> str:
    """Write rows as CSV or JSON (list of records); returns the file path."""
    if fmt == "json":
        path = os.path.splitext(path)[0] + ".json"
        records = [dict(zip(header, row)) for row in rows]
        data = json.dumps(records, indent=2, sort_keys=True,
                          default=_fmt).encode() + b"\n"
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(x) for x in row) for row in rows]
        data = ("\n".join(lines) + "\n").encode()
    _atomic_write(path, data)
    return path


def save_figure(fig, path: str) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": "decolab"})
    plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands


def cmd_zurek_run(args) -> int:
    doc = load_scenario(args.scenario)
    bath = _bath(doc, "$", args.seed)
    ch = _clock(doc, "$")
    grid = _grid(doc, "$")
    rows = []
    for t in grid:
        z = zurek.z_factor(bath, float(t))
        zd_log = z.log_mag + realclock.damped_log_factor(bath, float(t), ch)
        rows.append([float(t), z.log_mag / math.log(10.0), z.phase,
                     zd_log / math.log(10.0)])
    header = ["t_s", "log10_abs_z", "phase_rad", "log10_abs_z_damped"]
    out = write_table(os.path.join(args.out, "zurek_curve.csv"), header, rows,
                      args.format)
    report = zurek.revival_scan(bath, [float(t) for t in grid])
    peak_rows = [[t, mag] for t, mag in report.peaks]
    write_table(os.path.join(args.out, "zurek_revivals.csv"),
                ["t_s", "abs_z"], peak_rows, args.format)
    if args.plot:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(grid, [r[1] for r in rows], label="log10 |z(t)|")
        ax.plot(grid, [r[3] for r in rows], label="log10 |z(t)| damped")
        ax.axhline(report.log_floor / math.log(10.0), ls="--", color="gray",
                   label="interference floor")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("log10 magnitude")
        ax.legend()
        fig.tight_layout()
        save_figure(fig, os.path.join(args.out, "zurek_curve.png"))
    print(f"wrote {out}; {len(report.peaks)} revival peak(s) above floor")
    return 0


def cmd_revival_scan(args) -> int:
    doc = load_scenario(args.scenario)
    bath = _bath(doc, "$", args.seed)
    grid = _grid(doc, "$")
    report = zurek.revival_scan(bath, [float(t) for t in grid])
    rows = [[t, lg / math.log(10.0)]
            for t, lg in zip(report.scan_times, report.log_magnitudes)]
    out = write_table(os.path.join(args.out, "revival_scan.csv"),
                      ["t_s", "log10_abs_z"], rows, args.format)
    write_table(os.path.join(args.out, "revival_peaks.csv"),
                ["t_s", "abs_z"], [[t, m] for t, m in report.peaks],
                args.format)
    if args.plot:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(report.scan_times,
                [lg / math.log(10.0) for lg in report.log_magnitudes])
        ax.axhline(report.log_floor / math.log(10.0), ls="--", color="gray")
        for t, _ in report.peaks:
            ax.axvline(t, color="tab:red", alpha=0.3)
        ax.set_xlabel("t [s]")
        ax.set_ylabel("log10 |z|")
        fig.tight_layout()
        save_figure(fig, os.path.join(args.out, "revival_scan.png"))
    print(f"wrote {out}; floor log10 = {report.log_floor / math.log(10.0):.3f}")
    return 0


def cmd_cavity_run(args) -> int:
    doc = load_scenario(args.scenario)
    p = _pass_params(doc, "$")
    bath = _bath(doc, "$", args.seed)
    sysq = _system(doc, "$")
    n_list = _get(doc, "$", "n_list", list, required=False,
                  default=list(range(1, bath.n + 1)))
    rows = []
    for n in n_list:
        if not isinstance(n, int) or n < 1 or n > bath.n:
            _fail("$.n_list", f"entries must be integers in [1, {bath.n}]")
        sub = Bath(bath.spins[:n])
        bv = cavity.branch_vectors(sysq, sub, p)
        ab = cavity.inner_ab(bv)
        off_log10 = cavity.offdiagonal_log_magnitude(sysq, bv) / math.log(10.0)
        rows.append([n, cavity.inner_aa(bv), cavity.inner_bb(bv),
                     ab.log_mag / math.log(10.0), ab.phase, off_log10])
    header = ["n", "ln_inner_aa", "ln_inner_bb", "log10_abs_inner_ab",
              "phase_inner_ab_rad", "log10_abs_rho_offdiag"]
    out = write_table(os.path.join(args.out, "cavity_rho.csv"), header, rows,
                      args.format)
    if args.plot:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot([r[0] for r in rows], [r[5] for r in rows], marker="o")
        ax.set_xlabel("passes N")
        ax.set_ylabel("log10 |rho_{+-}|")
        fig.tight_layout()
        save_figure(fig, os.path.join(args.out, "cavity_rho.png"))
    print(f"wrote {out}")
    return 0


def cmd_despagnat(args) -> int:
    doc = load_scenario(args.scenario)
    p = _pass_params(doc, "$")
    bath = _bath(doc, "$", args.seed)
    sysq = _system(doc, "$")
    ch = _clock(doc, "$")
    m_uni = despagnat.m_expect_unitary(sysq, bath, p)
    term = despagnat.m_expect_damped_term(sysq, bath, p, bath.n, ch)
    m_damp = 2.0 * term.to_complex().real
    kres = despagnat.k_exponent(bath.n, p.B, p.gamma1, p.gamma2, p.tau, ch,
                                p.hbar)
    verdict = ("distinguishable" if despagnat.collapse_distinguishable(kres.k)
               else "undecidable")
    header = ["n", "m_unitary", "m_collapsed", "m_damped",
              "log10_abs_m_damped_bound", "k", "k_lower_bound", "verdict"]
    rows = [[bath.n, m_uni, despagnat.m_expect_collapsed(), m_damp,
             (term.log_mag + math.log(2.0)) / math.log(10.0),
             kres.k, kres.lower_bound, verdict]]
    out = write_table(os.path.join(args.out, "despagnat.csv"), header, rows,
                      args.format)
    print(f"wrote {out}; <M> unitary = {m_uni:.6g}, damped = {m_damp:.6g}, "
          f"K = {kres.k:.6g} -> {verdict}")
    return 0


def cmd_feasibility(args) -> int:
    if args.scenario:
        doc = load_scenario(args.scenario)
        s = _scenario_physical(doc, "$", preset_name=args.preset)
    elif args.preset:
        s = _scenario_physical({"physical": {}}, "$", preset_name=args.preset)
    else:
        raise SchemaError("feasibility needs --scenario or --preset")
    n = int(float(args.n)) if args.n is not None else s.N
    report = feasibility.full_report(s, n)
    rows = [[c.name, c.lhs, c.rhs, c.direction, "pass" if c.passed else "fail",
             c.margin_log10] for c in report.checks]
    rows.append(["overall", math.nan, math.nan, "",
                 "pass" if report.overall else "fail", math.nan])
    out = write_table(os.path.join(args.out, "feasibility.csv"),
                      ["check", "lhs", "rhs", "direction", "result",
                       "margin_log10"], rows, args.format)
    flagged = ", ".join(c.name for c in report.checks if not c.passed)
    print(f"wrote {out}; overall "
          f"{'PASS' if report.overall else 'FAIL'}"
          + (f" (failing: {flagged})" if flagged else ""))
    return 0


def _three_spin_state(c1: complex, c2: complex) -> np.ndarray:
    psi = np.zeros(8, dtype=complex)
    s = 1.0 / math.sqrt(2.0)
    psi[0b001] = c1 * s   # |+,+,->
    psi[0b010] = c1 * s   # |+,-,+>
    psi[0b100] = c2       # |-,+,+>
    return psi


def cmd_undecide(args) -> int:
    doc = load_scenario(args.scenario)
    c1 = _get(doc, "$", "c1", float, required=False, default=1.0 / math.sqrt(2))
    c2 = _get(doc, "$", "c2", float, required=False, default=1.0 / math.sqrt(2))
    norm = math.hypot(c1, c2)
    if norm == 0:
        _fail("$.c1", "c1 and c2 cannot both vanish")
    c1, c2 = c1 / norm, c2 / norm
    eps = _get(doc, "$", "epsilon", float, required=False, default=1e-12)
    grid = _grid(doc, "$", key="theta_grid")
    psi = _three_spin_state(c1, c2)
    plus = Projector(np.diag([1.0, 0.0]).astype(complex))
    minus = Projector(np.diag([0.0, 1.0]).astype(complex))
    rows = []
    event_theta = None
    for th in grid:
        res = undecidability_margin(psi, [plus, minus], float(th), eps)
        rows.append([float(th), res.margin, int(res.event)])
        if res.event and event_theta is None:
            event_theta = float(th)
    out = write_table(os.path.join(args.out, "undecidability.csv"),
                      ["theta", "margin", "event"], rows, args.format)
    if args.plot:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.semilogy([r[0] for r in rows],
                    [max(r[1], 1e-300) for r in rows])
        ax.axhline(eps, ls="--", color="gray", label="event threshold")
        ax.set_xlabel("dephasing theta")
        ax.set_ylabel("trace-distance margin")
        ax.legend()
        fig.tight_layout()
        save_figure(fig, os.path.join(args.out, "undecidability.png"))
    msg = (f"event at theta = {event_theta:g}" if event_theta is not None
           else "no event on this grid")
    print(f"wrote {out}; {msg}")
    return 0


def cmd_oracle_check(args) -> int:
    """Cross-validate every analytic formula against the dense simulator."""
    rng = np.random.default_rng(args.seed if args.seed is not None else 20240901)
    worst: dict[str, float] = {}

    def note(name, dev):
        worst[name] = max(worst.get(name, 0.0), dev)

    def rand_system():
        x = rng.normal(size=4)
        x /= np.linalg.norm(x)
        return QubitAmplitudes(complex(x[0], x[1]), complex(x[2], x[3]))

    # Zurek reduced density vs dense partial trace, N = 1..6
    for n in range(1, 7):
        for trial in range(5):
            bath = sample_bath(n, (0.5, 3.0), seed=int(rng.integers(2 ** 31)))
            sysq = rand_system()
            t = float(rng.uniform(0.0, 5.0))
            rho = zurek.reduced_density(sysq, bath, t)
            st = oracle.dense_evolve_zurek(oracle.dense_from_product(sysq, bath),
                                           bath, t)
            dense_rho = partial_trace(st.density(), [0], [2] * (n + 1))
            note("zurek_reduced_density",
                 float(np.max(np.abs(rho.entries - dense_rho.entries))))

    # cavity branch product and <M> vs dense, ultra-weak coupling
    p = cavity.PassParams(f=0.0, B=1.0, gamma1=3 * math.pi, gamma2=math.pi,
                          tau=1.0, hbar=1.0)
    for n in range(1, 5):
        for trial in range(5):
            bath = sample_bath(n, (1e-12 * p.bg_minus, 5e-12 * p.bg_minus),
                               seed=int(rng.integers(2 ** 31)))
            sysq = rand_system()
            bv = cavity.branch_vectors(sysq, bath, p)
            rho = cavity.reduced_density_needle(sysq, bv)
            st = oracle.dense_evolve_cavity(oracle.dense_from_product(sysq, bath),
                                            bath, p)
            dense_rho = partial_trace(st.density(), [0], [2] * (n + 1))
            note("cavity_reduced_density",
                 float(np.max(np.abs(rho.entries - dense_rho.entries))))
            note("despagnat_m_unitary",
                 abs(despagnat.m_expect_unitary(sysq, bath, p)
                     - oracle.dense_m_expect(st)))

    # closed form vs RK4
    for trial in range(10):
        spin = sample_bath(1, (0.5, 3.0), seed=int(rng.integers(2 ** 31))).spins[0]
        sysq = rand_system()
        pp = cavity.PassParams(f=spin.coupling, B=1.0,
                               gamma1=float(rng.uniform(1, 3)),
                               gamma2=float(rng.uniform(0.1, 0.9)),
                               tau=float(rng.uniform(0.1, 1.0)), hbar=1.0)
        closed = cavity.single_pass_closed(sysq, spin, pp)
        numeric = cavity.single_pass_numeric(sysq, spin, pp, steps=2000)
        note("single_pass_closed_vs_rk4",
             float(np.max(np.abs(closed.as_vector() - numeric.as_vector()))))

    rows = [[name, dev] for name, dev in sorted(worst.items())]
    write_table(os.path.join(args.out, "oracle_check.csv"),
                ["check", "max_abs_deviation"], rows, args.format)
    ok = all(dev < args.tolerance for _, dev in rows)
    for name, dev in rows:
        print(f"{'PASS' if dev < args.tolerance else 'FAIL'} {name}: "
              f"max deviation {dev:.3g}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decolab",
        description="spin-bath decoherence and undecidability laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, scenario_required=True):
        sp.add_argument("--scenario", required=scenario_required,
                        help="path to a JSON scenario file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
        sp.add_argument("--preset", default=None, help="species preset name")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--no-plot", dest="plot", action="store_false",
                        help="skip figure rendering")

    common(sub.add_parser("zurek-run", help="|z(t)| curves and revivals"))
    common(sub.add_parser("revival-scan", help="|z| over a time grid"))
    common(sub.add_parser("cavity-run", help="needle density matrix vs N"))
    common(sub.add_parser("despagnat", help="global-observable expectations"))
    sp = sub.add_parser("feasibility", help="inequality ladder report")
    common(sp, scenario_required=False)
    sp.add_argument("--n", default=None,
                    help="environment size (accepts 1e5 style)")
    common(sub.add_parser("undecide", help="undecidability margin vs theta"))
    sp = sub.add_parser("oracle-check", help="dense cross-validation suite")
    common(sp, scenario_required=False)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    handlers = {
        "zurek-run": cmd_zurek_run,
        "revival-scan": cmd_revival_scan,
        "cavity-run": cmd_cavity_run,
        "despagnat": cmd_despagnat,
        "feasibility": cmd_feasibility,
        "undecide": cmd_undecide,
        "oracle-check": cmd_oracle_check,
    }
    try:
        return handlers[args.command](args)
    except SchemaError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return 3
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
