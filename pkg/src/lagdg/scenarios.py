"""Experiment runners behind the CLI: spectra, rules, operators, and the
coupled shallow-water test suite (coupling validation, wavetrain
absorption, Gaussian absorption, convergence study).

Every runner takes a flat configuration dict, writes deterministic CSV
output plus a manifest of all resolved parameters, and returns the table
rows it produced.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .advection import SchemeVariant, assemble
from .basis import BasisSpec
from .coupled import (
    CoupledModel,
    SigmoidDamping,
    SWEConfig,
    run_simulation,
    swe_system,
)
from .dg import DGOperator, DGState, Mesh1D, edge_values, eval_at_centers, project_dg
from .diagnostics import energy_error, error_norms, reflection_ratio
from .quadrature import build_rule
from .semiinf import HyperbolicSystem, default_rule
from .spectrum import classify

FLOAT_FORMAT = "%.8e"


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


def format_float(x: float) -> str:
    return FLOAT_FORMAT % float(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, (int, float, np.floating)) and not isinstance(v, bool)
                              else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_manifest(outdir: Path, resolved: dict) -> None:
    path = outdir / "run_manifest.json"
    path.write_text(json.dumps(resolved, indent=2, sort_keys=True, default=str) + "\n")


# --------------------------------------------------------------------------
# config plumbing


def parse_config_file(path) -> dict:
    """Flat ``key = value`` file; values parse as JSON with string fallback."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = parse_value(value.strip())
    return cfg


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_config(defaults: dict, cfg: dict, scenario: str) -> dict:
    merged = dict(defaults)
    unknown = [k for k in cfg if k not in defaults and k not in ("scenario", "output_dir", "seed")]
    if unknown:
        raise ConfigError(f"unknown keys for scenario {scenario!r}: {unknown}")
    merged.update({k: v for k, v in cfg.items() if k in defaults})
    merged["scenario"] = scenario
    merged["seed"] = int(cfg.get("seed", 0))
    return merged


# --------------------------------------------------------------------------
# single-domain DG reference model


class DGOnlyModel:
    """DG on [0, length]; transmissive or solid-wall right boundary."""

    def __init__(self, cfg: SWEConfig, mesh: Mesh1D, p: int, left_bc=None,
                 reflect_right: bool = False):
        self.cfg = cfg
        self.mesh = mesh
        self.p = p
        self.left_bc = left_bc
        self.reflect_right = reflect_right
        self.op = DGOperator(swe_system(cfg), mesh, p)
        self._e_right = edge_values(p)[1]
        self._shape = (mesh.n_elements, 2, p + 1)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        coeffs = y.reshape(self._shape)
        values, mask = self.left_bc(t) if self.left_bc is not None else (None, None)
        right = None
        if self.reflect_right:
            tr = coeffs[-1] @ self._e_right
            right = np.array([tr[0], -tr[1]])
        return self.op.rhs(coeffs, t, values, mask, right).ravel()

    def initial_state(self, h_fun, u_fun) -> np.ndarray:
        return project_dg([h_fun, u_fun], self.mesh, self.p).coeffs.ravel()

    def centers_view(self, y: np.ndarray) -> np.ndarray:
        return eval_at_centers(DGState(y.reshape(self._shape), self.p))


# --------------------------------------------------------------------------
# spectrum / rule / operator scenarios

SPECTRUM_DEFAULTS = {
    "form": "modal", "basis": "functions", "nodes": "glr", "direction": "outflow",
    "beta": 1.0, "M": 50, "u": None, "q_left": 1.0, "tol_stability": 1e-8,
}


def run_spectrum(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    u = cfg["u"]
    if u is None:
        u = 1.0 if cfg["direction"] == "inflow" else -1.0
    variant = SchemeVariant(cfg["form"], cfg["basis"], cfg["nodes"], cfg["direction"], cfg["q_left"])
    op = assemble(variant, float(cfg["beta"]), int(cfg["M"]), float(u))
    report = classify(op, float(cfg["tol_stability"]))
    lam = report.eigenvalues
    write_csv(outdir / "eigenvalues.csv", ["re", "im"], [(z.real, z.imag) for z in lam])
    summary = {
        "max_real_part": report.max_real_part,
        "spectral_radius": report.spectral_radius,
        "stable": bool(report.stable),
    }
    (outdir / "summary.json").write_text(json.dumps(summary, sort_keys=True) + "\n")
    write_manifest(outdir, {**cfg, "u": u})
    return summary


RULE_DEFAULTS = {"nodes": "gl", "basis": "polynomials", "beta": 1.0, "M": 10}


def run_rule(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    rule = build_rule(cfg["nodes"], cfg["basis"], float(cfg["beta"]), int(cfg["M"]))
    write_csv(outdir / "rule.csv", ["node", "weight"], zip(rule.nodes, rule.weights))
    write_manifest(outdir, cfg)
    return {"n_nodes": rule.n}


OPERATOR_DEFAULTS = dict(SPECTRUM_DEFAULTS)


def run_operator(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    u = cfg["u"]
    if u is None:
        u = 1.0 if cfg["direction"] == "inflow" else -1.0
    variant = SchemeVariant(cfg["form"], cfg["basis"], cfg["nodes"], cfg["direction"], cfg["q_left"])
    op = assemble(variant, float(cfg["beta"]), int(cfg["M"]), float(u))
    write_csv(outdir / "operator_a.csv", [f"c{j}" for j in range(op.n)], op.A)
    write_csv(outdir / "operator_g.csv", ["g"], [(v,) for v in op.g])
    write_manifest(outdir, {**cfg, "u": u})
    return {"n": op.n, "dof_offset": op.dof_offset}


# --------------------------------------------------------------------------
# coupled shallow-water scenarios


def _snapshot_csv(outdir: Path, name: str, model: CoupledModel, y: np.ndarray) -> None:
    state = model.unpack(y)
    centers = model.mesh.centers
    vals = eval_at_centers(state.dg)
    rows = [(x, vals[i, 0], vals[i, 1]) for i, x in enumerate(centers)]
    rule = default_rule(model.spec)
    from .semiinf import reconstruct

    semi_vals = reconstruct(state.semi, rule.nodes)
    rows += [(model.mesh.length + z, semi_vals[0, i], semi_vals[1, i]) for i, z in enumerate(rule.nodes)]
    write_csv(outdir / name, ["x", "h", "u"], rows)


def _gaussian(h1: float, x0: float, sigma: float):
    return lambda x: h1 * np.exp(-(((x - x0) / sigma) ** 2))


COUPLING_VALIDATION_DEFAULTS = {
    "L": 10000.0, "nx": 1250, "p": 1, "semi_nodes": 181, "beta": 0.0025,
    "H": 1.0, "U": 0.0, "grav": 9.81,
    "h1_list": [0.1, 0.5], "sigma_list": [1000.0, 500.0],
    "x0_ingoing": 12000.0, "x0_outgoing": 5000.0,
    "dt_ingoing": 0.5, "nt_ingoing": 2200,
    "T_outgoing": 1000.0, "nt_outgoing": 8400,
    "ref_length": 20000.0, "directions": ["ingoing", "outgoing"],
    "write_snapshots": False,
}


def _validation_row(cfg: dict, direction: str, h1: float, sigma: float,
                    outdir: Path) -> dict:
    swe = SWEConfig(H=cfg["H"], U=cfg["U"], grav=cfg["grav"], damping=None)
    mesh = Mesh1D(cfg["L"], int(cfg["nx"]))
    spec = BasisSpec("functions", float(cfg["beta"]), int(cfg["semi_nodes"]) - 1)
    model = CoupledModel(swe, mesh, int(cfg["p"]), spec)

    ingoing = direction == "ingoing"
    x0 = cfg["x0_ingoing"] if ingoing else cfg["x0_outgoing"]
    if ingoing:
        dt = float(cfg["dt_ingoing"])
        n_steps = int(cfg["nt_ingoing"])
    else:
        n_steps = int(cfg["nt_outgoing"])
        dt = float(cfg["T_outgoing"]) / n_steps

    h_fun = _gaussian(h1, x0, sigma)
    u_fun = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    y0 = model.pack(model.initial_state(h_fun, u_fun))

    ref_nx = int(round(cfg["ref_length"] / mesh.dz))
    ref = DGOnlyModel(swe, Mesh1D(ref_nx * mesh.dz, ref_nx), int(cfg["p"]))
    yr0 = ref.initial_state(h_fun, u_fun)

    yT = run_simulation(model.rhs, y0, 0.0, dt, n_steps,
                        max_speed=model.max_speed(), min_dz=mesh.dz, cfl_max=0.4)
    yrT = run_simulation(ref.rhs, yr0, 0.0, dt, n_steps,
                         max_speed=model.max_speed(), min_dz=mesh.dz, cfl_max=0.4)

    num = eval_at_centers(model.unpack(yT).dg)
    refv = ref.centers_view(yrT)[: mesh.n_elements]
    eh = error_norms(num[:, 0], refv[:, 0], relative=ingoing)
    eu = error_norms(num[:, 1], refv[:, 1], relative=ingoing)
    if cfg.get("write_snapshots"):
        _snapshot_csv(outdir, f"snapshot_{direction}_h{h1}_s{int(sigma)}.csv", model, yT)
    return {
        "x0": x0, "h1": h1, "sigma": sigma,
        "e1_h": eh.e1, "e1_u": eu.e1, "e2_h": eh.e2, "e2_u": eu.e2,
        "einf_h": eh.einf, "einf_u": eu.einf, "relative": ingoing,
    }


def run_coupling_validation(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    tasks = [(d, h1, s) for d in cfg["directions"] for h1 in cfg["h1_list"] for s in cfg["sigma_list"]]
    rows = _map_rows(lambda t: _validation_row(cfg, *t, outdir), tasks, jobs)
    write_csv(
        outdir / "results.csv",
        ["x0", "h1", "sigma", "e1_h", "e1_u", "e2_h", "e2_u", "einf_h", "einf_u"],
        [(r["x0"], r["h1"], r["sigma"], r["e1_h"], r["e1_u"], r["e2_h"], r["e2_u"],
          r["einf_h"], r["einf_u"]) for r in rows],
    )
    write_manifest(outdir, cfg)
    return {"rows": rows}


WAVETRAIN_DEFAULTS = {
    "L": 5000.0, "nx": 600, "p": 1, "semi_nodes": 30, "beta": 0.0143,
    "H": 1.0, "U": 0.0, "grav": 9.81,
    "amplitude_list": [0.025, 0.05], "wavenumber": 30,
    "T": 5000.0, "cfl": 0.3333333333333333,
    "dgamma": 0.1, "alpha": 0.1, "sigma_over_l0": 0.05,
    "ref_margin": 500.0,
    "write_snapshots": False,
}


def _wavetrain_row(cfg: dict, amplitude: float, outdir: Path) -> dict:
    c = float(np.sqrt(cfg["grav"] * cfg["H"]))
    mesh = Mesh1D(cfg["L"], int(cfg["nx"]))
    spec = BasisSpec("functions", float(cfg["beta"]), int(cfg["semi_nodes"]) - 1)
    layer = default_rule(spec).nodes[-1]
    damping = SigmoidDamping(dgamma=cfg["dgamma"], L0=layer, alpha=cfg["alpha"],
                             sigma=cfg["sigma_over_l0"] * layer)
    swe = SWEConfig(H=cfg["H"], U=cfg["U"], grav=cfg["grav"], damping=damping)

    wavelength = cfg["L"] / float(cfg["wavenumber"])
    period = wavelength / c
    mask = np.array([False, True])

    def left_bc(t):
        return np.array([0.0, amplitude * np.sin(2 * np.pi * t / period)]), mask

    dt = cfg["cfl"] * mesh.dz / c
    n_steps = int(np.ceil(cfg["T"] / dt))
    dt = cfg["T"] / n_steps

    model = CoupledModel(swe, mesh, int(cfg["p"]), spec, left_bc=left_bc)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    y0 = model.pack(model.initial_state(zero, zero))

    ref_len = cfg["L"] + c * cfg["T"] + cfg["ref_margin"]
    ref_nx = int(np.ceil(ref_len / mesh.dz))
    ref = DGOnlyModel(SWEConfig(H=cfg["H"], U=cfg["U"], grav=cfg["grav"]),
                      Mesh1D(ref_nx * mesh.dz, ref_nx), int(cfg["p"]), left_bc=left_bc)
    yr0 = np.zeros(ref_nx * 2 * (int(cfg["p"]) + 1))

    yT = run_simulation(model.rhs, y0, 0.0, dt, n_steps,
                        max_speed=c, min_dz=mesh.dz, cfl_max=0.4)
    yrT = run_simulation(ref.rhs, yr0, 0.0, dt, n_steps,
                         max_speed=c, min_dz=mesh.dz, cfl_max=0.4)

    num = eval_at_centers(model.unpack(yT).dg)
    refv = ref.centers_view(yrT)[: mesh.n_elements]
    eh = error_norms(num[:, 0], refv[:, 0], relative=True)
    eu = error_norms(num[:, 1], refv[:, 1], relative=True)
    e_en = energy_error(num[:, 0], refv[:, 0], num[:, 1], refv[:, 1], cfg["grav"], cfg["H"])
    if cfg.get("write_snapshots"):
        _snapshot_csv(outdir, f"snapshot_wavetrain_A{amplitude}.csv", model, yT)
    return {
        "amplitude": amplitude, "wavenumber": cfg["wavenumber"], "nx": cfg["nx"],
        "beta": cfg["beta"], "e2_h": eh.e2, "einf_h": eh.einf,
        "e2_u": eu.e2, "einf_u": eu.einf, "e_en": e_en,
    }


def run_wavetrain(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    rows = _map_rows(lambda a: _wavetrain_row(cfg, a, outdir), list(cfg["amplitude_list"]), jobs)
    write_csv(
        outdir / "results.csv",
        ["amplitude", "wavenumber", "nx", "beta", "e2_h", "einf_h", "e2_u", "einf_u", "e_en"],
        [(r["amplitude"], r["wavenumber"], r["nx"], r["beta"], r["e2_h"], r["einf_h"],
          r["e2_u"], r["einf_u"], r["e_en"]) for r in rows],
    )
    write_manifest(outdir, cfg)
    return {"rows": rows}


ABSORPTION_DEFAULTS = {
    "D": 10000.0, "x0": 7500.0, "sigma": 500.0, "h1": 0.1, "p": 1,
    "H": 1.0, "U": 0.0, "grav": 9.81,
    "rows": [[40, 400, 600, 0.0035714285714285713],
             [30, 300, 450, 0.0035714285714285713],
             [20, 200, 300, 0.0035714285714285713],
             [10, 100, 150, 0.0035714285714285713]],
    "dgamma": 0.1, "alpha": 0.1, "sigma_over_l0": 0.05,
    "ref_length": 15000.0,
    "write_snapshots": False,
}


def _absorption_row(cfg: dict, row, outdir: Path) -> dict:
    semi_nodes, nx, steps, beta = int(row[0]), int(row[1]), int(row[2]), float(row[3])
    c = float(np.sqrt(cfg["grav"] * cfg["H"]))
    T = cfg["D"] / (2.0 * c)
    dt = T / steps
    mesh = Mesh1D(cfg["D"], nx)
    spec = BasisSpec("functions", beta, semi_nodes - 1)
    layer = default_rule(spec).nodes[-1]
    damping = SigmoidDamping(dgamma=cfg["dgamma"], L0=layer, alpha=cfg["alpha"],
                             sigma=cfg["sigma_over_l0"] * layer)
    swe_damped = SWEConfig(H=cfg["H"], U=cfg["U"], grav=cfg["grav"], damping=damping)
    swe_plain = SWEConfig(H=cfg["H"], U=cfg["U"], grav=cfg["grav"])

    h_fun = _gaussian(cfg["h1"], cfg["x0"], cfg["sigma"])
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    model = CoupledModel(swe_damped, mesh, int(cfg["p"]), spec)
    y0 = model.pack(model.initial_state(h_fun, zero))

    wall = DGOnlyModel(swe_plain, mesh, int(cfg["p"]), reflect_right=True)
    yw0 = wall.initial_state(h_fun, zero)

    ref_nx = int(round(cfg["ref_length"] / mesh.dz))
    ref = DGOnlyModel(swe_plain, Mesh1D(ref_nx * mesh.dz, ref_nx), int(cfg["p"]))
    yr0 = ref.initial_state(h_fun, zero)

    yT = run_simulation(model.rhs, y0, 0.0, dt, steps, max_speed=c, min_dz=mesh.dz, cfl_max=0.4)
    ywT = run_simulation(wall.rhs, yw0, 0.0, dt, steps, max_speed=c, min_dz=mesh.dz, cfl_max=0.4)
    yrT = run_simulation(ref.rhs, yr0, 0.0, dt, steps, max_speed=c, min_dz=mesh.dz, cfl_max=0.4)

    num = eval_at_centers(model.unpack(yT).dg)
    wallv = wall.centers_view(ywT)
    refv = ref.centers_view(yrT)[: mesh.n_elements]
    e_en = energy_error(num[:, 0], refv[:, 0], num[:, 1], refv[:, 1], cfg["grav"], cfg["H"])
    e_wall = energy_error(wallv[:, 0], refv[:, 0], wallv[:, 1], refv[:, 1], cfg["grav"], cfg["H"])
    rho = reflection_ratio(e_en, e_wall)
    if cfg.get("write_snapshots"):
        _snapshot_csv(outdir, f"snapshot_absorption_N{semi_nodes}.csv", model, yT)
    return {
        "semi_nodes": semi_nodes, "nx": nx, "steps": steps, "beta": beta,
        "resid_h": float(np.max(np.abs(num[:, 0] - refv[:, 0]))),
        "resid_u": float(np.max(np.abs(num[:, 1] - refv[:, 1]))),
        "e_en": e_en, "e_en_wall": e_wall, "rho": rho,
    }


def run_gaussian_absorption(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    rows = _map_rows(lambda r: _absorption_row(cfg, r, outdir), list(cfg["rows"]), jobs)
    write_csv(
        outdir / "results.csv",
        ["semi_nodes", "nx", "steps", "beta", "resid_h", "resid_u", "e_en", "rho"],
        [(r["semi_nodes"], r["nx"], r["steps"], r["beta"], r["resid_h"], r["resid_u"],
          r["e_en"], r["rho"]) for r in rows],
    )
    write_manifest(outdir, cfg)
    return {"rows": rows}


CONVERGENCE_DEFAULTS = {
    "u": 1.0, "p": 1, "T": 0.5, "nx_list": [50, 100, 200], "cfl": 0.1,
}


def _advection_system(u: float) -> HyperbolicSystem:
    a = np.array([[u]])
    sgn = np.array([u])
    return HyperbolicSystem(
        d=1, coeff_a=lambda q, z: a,
        eig=lambda q, z: (np.eye(1), sgn, np.eye(1)),
        is_constant=True,
    )


def dg_advection_error(u: float, p: int, nx: int, T: float, cfl: float) -> float:
    """L2 error of p-degree DG for q_t + u q_z = 0 with exact inflow data."""
    sys = _advection_system(u)
    mesh = Mesh1D(1.0, nx)
    op = DGOperator(sys, mesh, p)
    exact = lambda x, t: np.sin(2 * np.pi * (x - u * t))
    state0 = project_dg([lambda x: exact(x, 0.0)], mesh, p)
    mask = np.array([True])
    shape = state0.coeffs.shape

    def rhs(t, y):
        return op.rhs(y.reshape(shape), t, np.array([exact(0.0, t)]), mask, None).ravel()

    dt = cfl * mesh.dz / abs(u)
    n_steps = int(np.ceil(T / dt))
    dt = T / n_steps
    yT = run_simulation(rhs, state0.coeffs.ravel(), 0.0, dt, n_steps)
    num = eval_at_centers(DGState(yT.reshape(shape), p))[:, 0]
    ref = exact(mesh.centers, T)
    return float(np.sqrt(mesh.dz * np.sum((num - ref) ** 2)))


def run_convergence(cfg: dict, outdir: Path, jobs: int = 1) -> dict:
    nx_list = [int(n) for n in cfg["nx_list"]]
    errs = _map_rows(
        lambda nx: dg_advection_error(float(cfg["u"]), int(cfg["p"]), nx, float(cfg["T"]), float(cfg["cfl"])),
        nx_list, jobs)
    orders = [float("nan")] + [float(np.log2(errs[i - 1] / errs[i])) for i in range(1, len(errs))]
    rows = list(zip(nx_list, errs, orders))
    write_csv(outdir / "results.csv", ["nx", "l2_error", "order"], rows)
    write_manifest(outdir, cfg)
    return {"rows": [{"nx": n, "l2_error": e, "order": o} for n, e, o in rows]}


# --------------------------------------------------------------------------


def _map_rows(fn, items, jobs: int):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


@dataclass(frozen=True)
class Scenario:
    name: str
    defaults: dict
    runner: object


SCENARIOS = {
    "spectrum": Scenario("spectrum", SPECTRUM_DEFAULTS, run_spectrum),
    "rule": Scenario("rule", RULE_DEFAULTS, run_rule),
    "operator": Scenario("operator", OPERATOR_DEFAULTS, run_operator),
    "coupling_validation": Scenario("coupling_validation", COUPLING_VALIDATION_DEFAULTS,
                                    run_coupling_validation),
    "wavetrain": Scenario("wavetrain", WAVETRAIN_DEFAULTS, run_wavetrain),
    "gaussian_absorption": Scenario("gaussian_absorption", ABSORPTION_DEFAULTS,
                                    run_gaussian_absorption),
    "convergence": Scenario("convergence", CONVERGENCE_DEFAULTS, run_convergence),
}


def run_scenario(cfg: dict, outdir, jobs: int = 1) -> dict:
    name = cfg.get("scenario")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}")
    scenario = SCENARIOS[name]
    resolved = resolve_config(scenario.defaults, cfg, name)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return scenario.runner(resolved, outdir, jobs)
