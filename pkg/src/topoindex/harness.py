"""Scenario drivers: flat key=value configuration, seeded parameter sweeps,
and deterministic CSV/JSON artifacts.

Every run is a pure function of its configuration: rows are emitted in a
fixed order, floats are formatted with a fixed precision, and each row
carries the configuration hash and the library version, so identical
configurations produce byte-identical CSV files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field
from dataclasses import replace as dataclasses_replace

import numpy as np

from . import __version__
from .indices import (
    GapPolicy,
    bulk_index,
    check_theta_odd,
    edge_index,
    fn_poly,
    fredholm_certificate,
    homotopy_path_check,
    kernel_parity,
    kitaev_index,
    minimal_fn_degree,
)
from .lattice import OperatorMatrix, bulk_geometry, flux_phase, half_space_projector
from .locality import decay_profile, schatten_norm
from .models import (
    BhzParams,
    apply_flux_twist,
    build_bhz,
    build_qwz,
    build_tr,
    truncate_to_edge,
)
from .spectral import eig_hermitian, fermi_projection, make_switch, spectral_projection
from .sule import (
    build_v,
    center_multiplicity,
    compactness_probe,
    export_basis,
    load_basis,
    resolvent_probe,
    sule_extract,
    sule_summability,
)

__all__ = [
    "ScenarioConfig",
    "RunResult",
    "run_scenario",
    "run_phase_diagram",
    "run_fermi_sweep",
    "run_bec",
    "run_kitaev_check",
    "run_locality",
    "run_sule",
    "run_homotopy",
    "write_csv",
    "write_summary",
]

SCENARIOS = (
    "phase-diagram",
    "fermi-sweep",
    "bec",
    "kitaev-check",
    "locality",
    "sule",
    "homotopy-check",
)

# flat config keys (key=value, one per line, '#' comments)
CONFIG_KEYS = (
    "scenario",
    "model.a",
    "model.W",
    "model.lambda_mix",
    "geometry.L",
    "geometry.bc",
    "mu",
    "mu_grid",
    "delta.lo",
    "delta.hi",
    "g.lo",
    "g.hi",
    "seeds",
    "flavor",
)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip() != "")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in str(text).split(",") if tok.strip() != "")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully serializable description of one scenario run.

    Grid-valued fields (a, W, L, mu_grid, seeds) accept several values;
    scenarios that need a single value use the first entry.
    """

    scenario: str = "phase-diagram"
    a_values: tuple[float, ...] = (1.0,)
    W_values: tuple[float, ...] = (0.0,)
    lambda_mix: float = 0.0
    L_values: tuple[int, ...] = (16,)
    bc: str = "open"
    mu: float = 0.0
    mu_grid: tuple[float, ...] = ()
    delta: tuple[float, float] = (-0.3, 0.3)
    g_ramp: tuple[float, float] = (-0.2, 0.2)
    seeds: tuple[int, ...] = (0,)
    flavor: str = "z"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; pick one of {SCENARIOS}")
        if self.flavor not in ("z", "z2"):
            raise ValueError("flavor must be 'z' or 'z2'")
        if not (self.a_values and self.W_values and self.L_values and self.seeds):
            raise ValueError("a, W, L and seeds must be non-empty")
        if not self.delta[0] < self.delta[1]:
            raise ValueError("delta.lo must be < delta.hi")
        if not self.delta[0] <= self.g_ramp[0] < self.g_ramp[1] <= self.delta[1]:
            raise ValueError("the g ramp interval must sit inside delta")

    # --- serialization -------------------------------------------------
    def to_mapping(self) -> dict:
        return {
            "scenario": self.scenario,
            "model.a": ",".join(f"{v:.12g}" for v in self.a_values),
            "model.W": ",".join(f"{v:.12g}" for v in self.W_values),
            "model.lambda_mix": f"{self.lambda_mix:.12g}",
            "geometry.L": ",".join(str(v) for v in self.L_values),
            "geometry.bc": self.bc,
            "mu": f"{self.mu:.12g}",
            "mu_grid": ",".join(f"{v:.12g}" for v in self.mu_grid),
            "delta.lo": f"{self.delta[0]:.12g}",
            "delta.hi": f"{self.delta[1]:.12g}",
            "g.lo": f"{self.g_ramp[0]:.12g}",
            "g.hi": f"{self.g_ramp[1]:.12g}",
            "seeds": ",".join(str(s) for s in self.seeds),
            "flavor": self.flavor,
        }

    def canonical(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in sorted(self.to_mapping().items())) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ScenarioConfig":
        unknown = set(mapping) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "scenario" in mapping:
            kwargs["scenario"] = mapping["scenario"].strip()
        if "model.a" in mapping:
            kwargs["a_values"] = _floats(mapping["model.a"])
        if "model.W" in mapping:
            kwargs["W_values"] = _floats(mapping["model.W"])
        if "model.lambda_mix" in mapping:
            kwargs["lambda_mix"] = float(mapping["model.lambda_mix"])
        if "geometry.L" in mapping:
            kwargs["L_values"] = _ints(mapping["geometry.L"])
        if "geometry.bc" in mapping:
            kwargs["bc"] = mapping["geometry.bc"].strip()
        if "mu" in mapping:
            kwargs["mu"] = float(mapping["mu"])
        if "mu_grid" in mapping:
            kwargs["mu_grid"] = _floats(mapping["mu_grid"])
        delta = list(cls.delta)
        if "delta.lo" in mapping:
            delta[0] = float(mapping["delta.lo"])
        if "delta.hi" in mapping:
            delta[1] = float(mapping["delta.hi"])
        kwargs["delta"] = tuple(delta)
        ramp = list(cls.g_ramp)
        if "g.lo" in mapping:
            ramp[0] = float(mapping["g.lo"])
        if "g.hi" in mapping:
            ramp[1] = float(mapping["g.hi"])
        kwargs["g_ramp"] = tuple(ramp)
        if "seeds" in mapping:
            kwargs["seeds"] = _ints(mapping["seeds"])
        if "flavor" in mapping:
            kwargs["flavor"] = mapping["flavor"].strip()
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        mapping = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                mapping[key.strip()] = value.strip()
        return cls.from_mapping(mapping)


@dataclass
class RunResult:
    """Rows plus summary of one scenario run; rows hold raw Python values
    (formatting happens in write_csv so that figures can reuse them)."""

    scenario: str
    fieldnames: list
    rows: list
    summary: dict
    extras: dict = field(default_factory=dict)  # plot-ready arrays, not persisted here

    @property
    def unreliable_rows(self) -> int:
        return sum(1 for r in self.rows if not r.get("reliable", True))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (np.floating,)):
        return f"{float(value):.12g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name, "")) for name in fieldnames])


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else str(v)
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def write_summary(outdir, result: RunResult, cfg: ScenarioConfig) -> dict:
    summary = {
        "scenario": result.scenario,
        "config": cfg.to_mapping(),
        "config_hash": cfg.config_hash(),
        "version": __version__,
        "rows": len(result.rows),
        "unreliable_rows": result.unreliable_rows,
    }
    summary.update(_json_safe(result.summary))
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# --- model construction ------------------------------------------------


def _build(cfg: ScenarioConfig, a: float, W: float, L: int, seed: int):
    """Hamiltonian + optional time reversal for one grid point; the model
    family follows the flavor (two-band for Z, four-band TRI for Z2)."""
    if cfg.flavor == "z":
        g = bulk_geometry(L, 2, bc=cfg.bc)
        H = build_qwz(g, a=a, W=W, seed=seed)
        return H, None
    g = bulk_geometry(L, 4, bc=cfg.bc)
    H = build_bhz(g, BhzParams(a=a, W=W, lambda_mix=cfg.lambda_mix, seed=seed))
    return H, build_tr(g)


def _stamp(cfg: ScenarioConfig, row: dict) -> dict:
    row["config"] = cfg.config_hash()
    row["version"] = __version__
    return row


# --- scenario drivers ----------------------------------------------------


def run_phase_diagram(cfg: ScenarioConfig, outdir) -> RunResult:
    """bulk_index over the (a, W, seed) grid at the configured Fermi level."""
    L = cfg.L_values[0]
    fields = [
        "a", "W", "seed", "L", "flavor", "value", "raw", "residual",
        "gap_ratio", "reliable", "config", "version",
    ]
    rows = []
    for a in cfg.a_values:
        for W in cfg.W_values:
            for seed in cfg.seeds:
                H, theta = _build(cfg, a, W, L, seed)
                rep = bulk_index(H, cfg.mu, theta=theta, flavor=cfg.flavor)
                rows.append(_stamp(cfg, {
                    "a": a, "W": W, "seed": seed, "L": L, "flavor": cfg.flavor,
                    "value": rep.value, "raw": rep.raw, "residual": rep.residual,
                    "gap_ratio": rep.raw if cfg.flavor == "z2" else float("nan"),
                    "reliable": rep.reliable,
                }))
    return RunResult("phase-diagram", fields, rows, {})


def run_fermi_sweep(cfg: ScenarioConfig, outdir) -> RunResult:
    """bulk_index along the mu grid; the value must be constant over any
    grid inside a mobility gap, and a violation triggers a locality
    diagnostic of the Fermi projection at the offending mu."""
    a, W, L = cfg.a_values[0], cfg.W_values[0], cfg.L_values[0]
    mu_grid = cfg.mu_grid or (cfg.mu,)
    fields = [
        "a", "W", "seed", "L", "mu", "flavor", "value", "residual",
        "constant", "loc_mu_hat", "reliable", "config", "version",
    ]
    rows = []
    violations = []
    for seed in cfg.seeds:
        H, theta = _build(cfg, a, W, L, seed)
        spec = eig_hermitian(H)
        first = None
        for mu in mu_grid:
            rep = bulk_index(H, mu, theta=theta, flavor=cfg.flavor, spec=spec)
            if first is None:
                first = rep.value
            constant = rep.value == first
            loc_mu_hat = float("nan")
            if not constant:
                P = fermi_projection(spec, mu)
                loc_mu_hat = decay_profile(P, mode="offdiag").mu_hat
                violations.append({"seed": seed, "mu": mu, "loc_mu_hat": loc_mu_hat})
            rows.append(_stamp(cfg, {
                "a": a, "W": W, "seed": seed, "L": L, "mu": mu,
                "flavor": cfg.flavor, "value": rep.value, "residual": rep.residual,
                "constant": constant, "loc_mu_hat": loc_mu_hat,
                "reliable": rep.reliable,
            }))
    return RunResult("fermi-sweep", fields, rows, {"violations": violations})


def run_bec(cfg: ScenarioConfig, outdir) -> RunResult:
    """Bulk index against the edge index of the y >= 0 Dirichlet
    restriction, one disorder realization per row.

    The bulk index is evaluated on an open square (the flux phase is
    single-valued only there), while the edge strip is cut from a torus
    sample so its wrap direction stays periodic; the disorder field is a
    pure function of (seed, x, y), so both samples see the same
    realization on shared sites.
    """
    a, W, L = cfg.a_values[0], cfg.W_values[0], cfg.L_values[0]
    switch = make_switch(cfg.g_ramp[0], cfg.g_ramp[1])
    fields = [
        "a", "W", "seed", "L", "flavor", "bulk_value", "bulk_raw",
        "edge_value", "edge_raw", "edge_residual", "agree", "reliable",
        "config", "version",
    ]
    open_cfg = dataclasses_replace(cfg, bc="open")
    torus_cfg = dataclasses_replace(cfg, bc="periodic")
    rows = []
    for seed in cfg.seeds:
        H_open, theta = _build(open_cfg, a, W, L, seed)
        bulk = bulk_index(H_open, cfg.mu, theta=theta, flavor=cfg.flavor)
        H, _ = _build(torus_cfg, a, W, L, seed)
        spec = eig_hermitian(H)
        He, _ = truncate_to_edge(H)
        if cfg.flavor == "z":
            edge = edge_index(He, spec, cfg.delta, switch, flavor="z")
        else:
            edge = edge_index(
                He, spec, cfg.delta, switch, flavor="z2", mu=cfg.mu,
                twist_builder=lambda th, He=He: apply_flux_twist(He, th, spin_resolved=True),
            )
        rows.append(_stamp(cfg, {
            "a": a, "W": W, "seed": seed, "L": L, "flavor": cfg.flavor,
            "bulk_value": bulk.value, "bulk_raw": bulk.raw,
            "edge_value": edge.value, "edge_raw": edge.raw,
            "edge_residual": edge.residual,
            "agree": bulk.value == edge.value,
            "reliable": bulk.reliable and edge.reliable,
        }))
    return RunResult("bec", fields, rows, {})


def run_kitaev_check(cfg: ScenarioConfig, outdir) -> RunResult:
    """Flux-insertion index against the half-space (Kitaev) index, plus the
    flux-to-half-space deformation stages, per (W, seed)."""
    a, L = cfg.a_values[0], cfg.L_values[0]
    fields = [
        "a", "W", "seed", "L", "flavor", "bulk_value", "bulk_raw",
        "kitaev_value", "kitaev_raw", "raw_diff",
        "stage0", "stage1", "stage2", "stage3", "stage4", "stages_equal",
        "reliable", "config", "version",
    ]
    rows = []
    for W in cfg.W_values:
        for seed in cfg.seeds:
            H, theta = _build(cfg, a, W, L, seed)
            spec = eig_hermitian(H)
            bulk = bulk_index(H, cfg.mu, theta=theta, flavor=cfg.flavor, spec=spec)
            P = fermi_projection(spec, cfg.mu)
            kit = kitaev_index(P, theta=theta, flavor=cfg.flavor)
            row = {
                "a": a, "W": W, "seed": seed, "L": L, "flavor": cfg.flavor,
                "bulk_value": bulk.value, "bulk_raw": bulk.raw,
                "kitaev_value": kit.value, "kitaev_raw": kit.raw,
                "raw_diff": abs(bulk.raw - kit.raw) if cfg.flavor == "z" else float("nan"),
                "stage0": "", "stage1": "", "stage2": "", "stage3": "",
                "stage4": "", "stages_equal": "",
                "reliable": bulk.reliable and kit.reliable,
            }
            if cfg.flavor == "z":
                stages = homotopy_path_check(H, cfg.mu, spec=spec)
                for i, rep in enumerate(stages):
                    row[f"stage{i}"] = rep.value
                row["stages_equal"] = len({rep.value for rep in stages}) == 1
                row["reliable"] = row["reliable"] and all(rep.reliable for rep in stages)
            rows.append(_stamp(cfg, row))
    return RunResult("kitaev-check", fields, rows, {})


def run_locality(cfg: ScenarioConfig, outdir) -> RunResult:
    """Locality diagnostics per system size: off-diagonal envelope of the
    Fermi projection, Schatten-3 size of its commutator with the flux
    phase, and (for TRI data) the Theta-oddness of P U P + P_perp."""
    a, W, seed = cfg.a_values[0], cfg.W_values[0], cfg.seeds[0]
    fields = [
        "L", "a", "W", "seed", "flavor", "schatten3_commutator",
        "p_mu_hat", "p_amplitude", "theta_odd_defect", "reliable",
        "config", "version",
    ]
    rows = []
    envelopes = {}
    for L in cfg.L_values:
        H, theta = _build(cfg, a, W, L, seed)
        spec = eig_hermitian(H)
        P = fermi_projection(spec, cfg.mu)
        U = flux_phase(P.geometry)
        comm = P.data @ U.data - U.data @ P.data
        s3 = schatten_norm(comm, 3)
        env = decay_profile(P, mode="offdiag")
        envelopes[L] = env
        env.to_csv(os.path.join(outdir, f"locality_envelope_L{L}.csv"))
        odd = float("nan")
        if theta is not None:
            F = P.data @ U.data @ P.data + np.eye(P.dim) - P.data
            odd = check_theta_odd(F, theta)
        rows.append(_stamp(cfg, {
            "L": L, "a": a, "W": W, "seed": seed, "flavor": cfg.flavor,
            "schatten3_commutator": s3, "p_mu_hat": env.mu_hat,
            "p_amplitude": env.amplitude, "theta_odd_defect": odd,
            "reliable": True,
        }))
    artifacts = [f"locality_envelope_L{L}.csv" for L in cfg.L_values]
    return RunResult("locality", fields, rows, {"artifacts": artifacts}, {"envelopes": envelopes})


def run_sule(cfg: ScenarioConfig, outdir) -> RunResult:
    """Localized-basis extraction on the spectral window delta, with basis
    export + reload check, flux-phase compactness probe, localization-center
    statistics, and resolvent decay probes."""
    a, W, L, seed = cfg.a_values[0], cfg.W_values[0], cfg.L_values[0], cfg.seeds[0]
    H, theta = _build(cfg, a, W, L, seed)
    spec = eig_hermitian(H)
    basis = sule_extract(spec, cfg.delta)
    Q = spectral_projection(spec, cfg.delta)
    U = flux_phase(H.geometry)

    fields = [
        "n", "eigenvalue", "center_x", "center_y", "envelope_slope",
        "envelope_residual", "reliable", "config", "version",
    ]
    rows = []
    for n in range(basis.rank):
        env = basis.envelopes[n]
        rows.append(_stamp(cfg, {
            "n": n, "eigenvalue": basis.eigenvalues[n],
            "center_x": basis.centers[n][0], "center_y": basis.centers[n][1],
            "envelope_slope": env.slope, "envelope_residual": env.residual,
            "reliable": env.slope < 0,
        }))

    # export + reload round trip
    json_path = os.path.join(outdir, "sule_basis.json")
    csv_path = os.path.join(outdir, "sule_vectors.csv")
    export_basis(basis, json_path, csv_path)
    reloaded = load_basis(json_path)
    roundtrip = float(np.max(np.abs(reloaded.reconstruction().data - Q.data))) if basis.rank else 0.0

    # compactness of (U - V)Q and the index of the compressed flux phase
    V = build_v(basis, Q)
    comp = compactness_probe(U, V, Q)
    sv_rows = [
        {"k": k + 1, "s": s, "schatten3_partial": p3}
        for k, (s, p3) in enumerate(zip(comp.singular_values, comp.schatten3_partial))
    ]
    write_csv(os.path.join(outdir, "sule_singular_values.csv"),
              ["k", "s", "schatten3_partial"], sv_rows)
    F = Q.data @ U.data @ Q.data + np.eye(Q.dim) - Q.data
    parity = kernel_parity(OperatorMatrix(F, Q.geometry), GapPolicy(), paired=cfg.flavor == "z2")

    # resolvent probes at midpoints of the largest spectral spacings near mu
    w = spec.eigenvalues
    mids = (w[1:] + w[:-1]) / 2
    spacing = np.diff(w)
    near = np.abs(mids - cfg.mu) < (cfg.delta[1] - cfg.delta[0])
    order = np.argsort(-spacing * near)
    E_list = sorted(float(mids[i]) for i in order[:3] if near[i])
    res = resolvent_probe(spec, E_list, (1e-3, 1e-2, 1e-1)) if E_list else None
    if res is not None:
        write_csv(os.path.join(outdir, "sule_resolvent.csv"),
                  ["E", "eps", "mu_hat", "amplitude", "residual", "uniform_in_eps"],
                  list(res.to_rows()))

    summary = {
        "rank": basis.rank,
        "orthonormality_defect": basis.orthonormality_defect(),
        "reconstruction_defect": float(np.max(np.abs(basis.reconstruction().data - Q.data))),
        "max_eigen_residual": float(basis.eigen_residuals(H).max()) if basis.rank else 0.0,
        "all_slopes_negative": bool(np.all(basis.slopes() < 0)) if basis.rank else True,
        "summability": sule_summability(basis.centers),
        "center_multiplicity": center_multiplicity(basis.centers),
        "quq_parity": parity.value,
        "quq_parity_reliable": parity.reliable,
        "compactness": comp.to_dict(),
        "roundtrip_defect": roundtrip,
        "resolvent_uniform": res.uniform_in_eps if res is not None else {},
        "artifacts": ["sule_basis.json", "sule_vectors.csv", "sule_singular_values.csv"]
        + (["sule_resolvent.csv"] if res is not None else []),
    }
    return RunResult("sule", fields, rows, summary, {"compactness": comp, "basis": basis})


def run_homotopy(cfg: ScenarioConfig, outdir) -> RunResult:
    """Flat-exponential polynomial table (degree, sup distance to
    exp(-2 pi i a) on [0, 1]) plus the invertibility certificate of the
    minimal degree applied to A = P Lambda_2 P of the configured model."""
    a, W, L, seed = cfg.a_values[0], cfg.W_values[0], cfg.L_values[0], cfg.seeds[0]
    n_min = minimal_fn_degree(target=0.25)
    fields = ["N", "sup_distance", "phi_sum", "reliable", "config", "version"]
    rows = []
    for N in range(1, max(20, n_min) + 1):
        poly = fn_poly(N)
        rows.append(_stamp(cfg, {
            "N": N, "sup_distance": poly.sup_distance(),
            "phi_sum": float(abs(np.sum(poly.phis))),
            "reliable": True,
        }))
    H, _ = _build(cfg, a, W, L, seed)
    spec = eig_hermitian(H)
    P = fermi_projection(spec, cfg.mu)
    lam2 = half_space_projector(P.geometry, 2)
    A = OperatorMatrix(P.data @ lam2.data @ P.data, P.geometry)
    cert = fredholm_certificate(A, n_min)
    cert["confined_envelope"].to_csv(os.path.join(outdir, "homotopy_certificate_envelope.csv"))
    summary = {
        "minimal_N": n_min,
        "certificate": {
            "N": cert["N"],
            "exp_distance": cert["exp_distance"],
            "smallest_singular_value": cert["smallest_singular_value"],
            "sup_distance_grid": cert["sup_distance_grid"],
        },
        "artifacts": ["homotopy_certificate_envelope.csv"],
    }
    return RunResult("homotopy-check", fields, rows, summary)


_DRIVERS = {
    "phase-diagram": run_phase_diagram,
    "fermi-sweep": run_fermi_sweep,
    "bec": run_bec,
    "kitaev-check": run_kitaev_check,
    "locality": run_locality,
    "sule": run_sule,
    "homotopy-check": run_homotopy,
}


def run_scenario(cfg: ScenarioConfig, outdir) -> RunResult:
    """Run the configured scenario, writing its CSV table, artifacts and
    summary.json into outdir."""
    os.makedirs(outdir, exist_ok=True)
    result = _DRIVERS[cfg.scenario](cfg, outdir)
    write_csv(os.path.join(outdir, f"{cfg.scenario}.csv"), result.fieldnames, result.rows)
    write_summary(outdir, result, cfg)
    return result
