"""Seeded verification suites and experiments behind the command line."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, fields as dc_fields
from typing import Optional

import numpy as np

from . import algebra as alg
from . import fields as fld
from . import functionals as fn
from .gns import gns, validate_gns
from .reps import (
    RankJumpError,
    Representation,
    embed_preimage,
    local_lift,
    membership_rep_xi,
    random_representation,
    random_unit_vector,
    rep_distance,
    rotation_plane,
    rotation_unitary,
    theta,
)

SCHEMA_VERSION = "1.0"

TOLERANCES = {
    "c_star_identity": 1e-10,
    "submultiplicativity": 1e-10,
    "basis_completeness": 1e-12,
    "unitize": 1e-12,
    "jordan": 1e-10,
    "homogeneity": 1e-10,
    "unitization": 1e-12,
    "gns_reproduction": 1e-9,
    "gns_norm": 1e-10,
    "gns_homomorphism": 1e-9,
    "rotation": 1e-10,
    "rotation_norm": 1e-9,
    "surjectivity": 1e-9,
    "lift_exactness": 1e-9,
    "polar_factorization": 1e-10,
    "polar_intertwining": 1e-9,
    "positive_commutation": 1e-8,
    "essential_sandwich": 1e-10,
    "audit": fld.AUDIT_TOL,
    "duality": 1e-7,
    "preimage_spread": 1e-8,
    "adversarial_min_defect": 0.05,
}

# names fixed by problem structure rather than floating-point noise
_STRUCTURAL = {"audit", "adversarial_min_defect"}

COUNTS = {
    "elements": 100,
    "functionals": 200,
    "rotations": 1000,
    "pairs": 500,
    "representations": 100,
    "intertwiners": 200,
    "lift_pairs": 20,
    "spread_probes": 10,
}

EXPERIMENTS = ("verify", "lift-experiment", "duality-roundtrip")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    block_dims: tuple = (2, 1)
    ambient_dim: Optional[int] = None
    seed: int = 0
    samples: Optional[int] = None
    counts: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    tol_profile: str = "default"
    experiment: str = "verify"
    lift_steps: int = 12
    base_rank: Optional[int] = None
    preimages: int = 10

    def __post_init__(self):
        try:
            self.block_dims = tuple(int(n) for n in self.block_dims)
            self.descriptor = alg.AlgebraDescriptor(self.block_dims)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.ambient_dim is not None and self.ambient_dim < self.descriptor.d_min:
            raise ConfigError(f"ambient_dim {self.ambient_dim} below d_min = {self.descriptor.d_min}")
        if self.tol_profile not in ("default", "strict"):
            raise ConfigError(f"unknown tolerance profile {self.tol_profile!r}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        unknown = set(self.tolerances) - set(TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
        unknown = set(self.counts) - set(COUNTS)
        if unknown:
            raise ConfigError(f"unknown sample counts: {sorted(unknown)}")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.lift_steps < 3:
            raise ConfigError("lift_steps must be at least 3")

    @property
    def d(self) -> int:
        return self.ambient_dim if self.ambient_dim is not None else self.descriptor.d_min

    def tol(self, name: str) -> float:
        if name in self.tolerances:
            return float(self.tolerances[name])
        base = TOLERANCES[name]
        if self.tol_profile == "strict" and name not in _STRUCTURAL:
            return base / 10
        return base

    def count(self, name: str) -> int:
        if name in self.counts:
            return int(self.counts[name])
        if self.samples is not None:
            return self.samples
        return COUNTS[name]

    def to_json(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in dc_fields(self)}
        out["block_dims"] = list(self.block_dims)
        out["ambient_dim"] = self.d
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        names = {f.name for f in dc_fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    bound: str = "upper"  # "lower": measured must reach the tolerance

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.measured):
            return False
        if self.bound == "lower":
            return self.measured >= self.tolerance
        return self.measured <= self.tolerance

    def to_json(self) -> dict:
        return {**asdict(self), "passed": self.passed}


@dataclass
class Report:
    config: ExperimentConfig
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    def add(self, name, measured, tolerance, bound="upper") -> Check:
        c = Check(name, float(measured), float(tolerance), bound)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.notes.get("regime", "supported") == "supported"

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_json(),
            "passed": self.passed,
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.name)],
            "tables": self.tables,
            "notes": self.notes,
            "wall_clock_seconds": self.wall_clock,
        }


def _xi(cfg: ExperimentConfig) -> np.ndarray:
    return random_unit_vector(cfg.d, [cfg.seed, 99])


# suites


def algebra_checks(cfg: ExperimentConfig, rep: Report):
    desc = cfg.descriptor
    n = cfg.count("elements")
    cstar = submult = complete = unit_rt = 0.0
    _, embed = alg.unitize(desc)
    for k in range(n):
        a = alg.random_element(desc, [cfg.seed, 1, k, 0])
        b = alg.random_element(desc, [cfg.seed, 1, k, 1])
        na = alg.norm(a)
        cstar = max(cstar, abs(alg.norm(a.adjoint() * a) - na**2) / (1 + na**2))
        submult = max(submult, alg.norm(a * b) - na * alg.norm(b))
        rebuilt = sum((c * e for c, e in zip(a.coords(), alg.canonical_basis(desc))), alg.AlgebraElement.zero(desc))
        complete = max(complete, max(np.abs(x - y).max() for x, y in zip(rebuilt.blocks, a.blocks)))
        lam = complex(*np.random.default_rng([cfg.seed, 1, k, 2]).standard_normal(2))
        back, mu = alg.deunitize(embed(a, lam))
        unit_rt = max(unit_rt, alg.norm(back - a), abs(mu - lam))
    rep.add("algebra.c_star_identity", cstar, cfg.tol("c_star_identity"))
    rep.add("algebra.submultiplicativity", submult, cfg.tol("submultiplicativity"))
    rep.add("algebra.basis_completeness", complete, cfg.tol("basis_completeness"))
    rep.add("algebra.unitize_roundtrip", unit_rt, cfg.tol("unitize"))


def functional_checks(cfg: ExperimentConfig, rep: Report):
    desc = cfg.descriptor
    n = cfg.count("functionals")
    jordan = homog = rt = state_def = dist_viol = 0.0
    for k in range(n):
        h = fn.random_hermitian_functional(desc, [cfg.seed, 2, k])
        plus, minus = fn.jordan_decompose(h)
        jordan = max(jordan, abs(fn.functional_norm(h) - fn.functional_norm(plus) - fn.functional_norm(minus)))
        phi = fn.random_functional(desc, [cfg.seed, 3, k], fn.QUASI_STATE)
        psi = fn.random_functional(desc, [cfg.seed, 4, k], fn.QUASI_STATE)
        a = alg.random_element(desc, [cfg.seed, 5, k])
        t = phi.trace().real
        if t > 0:
            homog = max(homog, abs(fn.pair(phi, a) - t * fn.pair(phi.scale(1 / t), a)))
        pt, qt = fn.to_unitization(phi), fn.to_unitization(psi)
        rt = max(rt, fn.qstate_distance(fn.from_unitization(pt), phi))
        eig = min(np.linalg.eigvalsh(b).min() for b in pt.density_blocks)
        state_def = max(state_def, abs(pt.trace().real - 1.0), max(-eig, 0.0))
        d0 = fn.qstate_distance(phi, psi)
        d1 = fn.qstate_distance(pt, qt)
        dist_viol = max(dist_viol, d0 - d1, d1 - d0 - abs(t - psi.trace().real))
    rank = np.linalg.matrix_rank(np.array([f.pairing_row() for f in fn.density_frame(desc)]))
    rep.add("functionals.jordan_additivity", jordan, cfg.tol("jordan"))
    rep.add("functionals.homogeneity_extension", homog, cfg.tol("homogeneity"))
    rep.add("functionals.unitization_roundtrip", rt, cfg.tol("unitization"))
    rep.add("functionals.unitization_state_defect", state_def, cfg.tol("unitization"))
    rep.add("functionals.unitization_distance_bounds", dist_viol, cfg.tol("unitization"))
    rep.add("functionals.pairing_rank_deficit", desc.dim - rank, 0)


def gns_checks(cfg: ExperimentConfig, rep: Report):
    desc = cfg.descriptor
    repro = normd = hom = deficit = 0.0
    over = 0
    for k in range(cfg.count("functionals")):
        phi = fn.random_functional(desc, [cfg.seed, 6, k], fn.QUASI_STATE)
        t = gns(phi)
        r = validate_gns(t, phi)
        repro, normd, hom = max(repro, r.reproduction_defect), max(normd, r.norm_defect), max(hom, r.homomorphism_defect)
        deficit = max(deficit, r.space_dim - r.cyclicity_rank)
        over = max(over, t.space_dim - desc.max_cyclic_dim)
    rep.add("gns.reproduction", repro, cfg.tol("gns_reproduction"))
    rep.add("gns.norm", normd, cfg.tol("gns_norm"))
    rep.add("gns.homomorphism", hom, cfg.tol("gns_homomorphism"))
    rep.add("gns.cyclicity_deficit", deficit, 0)
    rep.add("gns.dimension_excess", over, 0)


def rotation_checks(cfg: ExperimentConfig, rep: Report):
    d = cfg.d
    mapping = unitarity = norm_gap = ident = 0.0
    eye = np.eye(d)
    for k in range(cfg.count("rotations")):
        a = random_unit_vector(d, [cfg.seed, 7, k, 0])
        b = random_unit_vector(d, [cfg.seed, 7, k, 1])
        U = rotation_unitary(a, b)
        mapping = max(mapping, np.linalg.norm(U @ a - b))
        unitarity = max(unitarity, np.linalg.norm(U.conj().T @ U - eye, 2))
        norm_gap = max(norm_gap, abs(np.linalg.norm(U - eye, 2) - np.linalg.norm(a - b)))
        plane = rotation_plane(a, b)
        if plane is not None:
            ap, bp = plane
            ident = max(ident, abs(np.vdot(ap - bp, a - b)), abs(np.linalg.norm(a - b) - np.linalg.norm(ap - bp)))
    rep.add("reps.rotation_map", mapping, cfg.tol("rotation"))
    rep.add("reps.rotation_unitarity", unitarity, cfg.tol("rotation"))
    rep.add("reps.rotation_norm", norm_gap, cfg.tol("rotation_norm"))
    rep.add("reps.rotation_identities", ident, cfg.tol("rotation"))


def surjectivity_checks(cfg: ExperimentConfig, rep: Report):
    desc, d, xi = cfg.descriptor, cfg.d, _xi(cfg)
    worst = 0.0
    excess = -d
    state_viol = 0
    for k in range(cfg.count("functionals")):
        phi = fn.random_functional(desc, [cfg.seed, 8, k], fn.QUASI_STATE)
        pi = embed_preimage(phi, xi, d)
        worst = max(worst, fn.qstate_distance(theta(pi, xi), phi))
        excess = max(excess, pi.essential_rank() - (d - 1))
    for k in range(cfg.count("representations")):
        pi = random_representation(desc, d, [cfg.seed, 9, k])
        if membership_rep_xi(pi, xi) and fn.classify(theta(pi, xi), 1e-9) != fn.STATE:
            state_viol += 1
        st = fn.random_functional(desc, [cfg.seed, 10, k], fn.STATE)
        pi = embed_preimage(st, xi, d)
        if not membership_rep_xi(pi, xi) or fn.classify(theta(pi, xi), 1e-9) != fn.STATE:
            state_viol += 1
    rep.add("reps.surjectivity", worst, cfg.tol("surjectivity"))
    rep.add("reps.essential_rank_excess", max(excess, 0), 0)
    rep.add("reps.state_witness_violations", state_viol, 0)


def continuity_checks(cfg: ExperimentConfig, rep: Report):
    desc, d, xi = cfg.descriptor, cfg.d, _xi(cfg)
    ratio = excess = 0.0
    for k in range(cfg.count("pairs")):
        p1 = random_representation(desc, d, [cfg.seed, 11, k, 0])
        p2 = random_representation(desc, d, [cfg.seed, 11, k, 1])
        dist = rep_distance(p1, p2)
        q = fn.qstate_distance(theta(p1, xi), theta(p2, xi))
        excess = max(excess, q - desc.dim * dist)
        # equal representations drawn twice give a ratio of rounding errors
        if dist > 1e-9:
            ratio = max(ratio, q / dist)
    # the bound is attained for one-dimensional algebras, so allow rounding on top of it
    rep.add("reps.continuity_ratio", ratio, desc.dim + 1e-12)
    rep.add("reps.continuity_excess", excess, 1e-12)


def lift_table(cfg: ExperimentConfig, pair_index: int) -> tuple[list, dict]:
    """Rows (n, ||phi'_n - phi||, rep_distance(lift_n, pi), theta defect) for one seeded pair."""
    desc, d, xi = cfg.descriptor, cfg.d, _xi(cfg)
    phi = fn.random_functional(desc, [cfg.seed, 12, pair_index], fn.QUASI_STATE, rank=cfg.base_rank)
    target = fn.random_functional(desc, [cfg.seed, 13, pair_index], fn.QUASI_STATE)
    pi = embed_preimage(phi, xi, d)
    base = local_lift(pi, xi, phi)
    baseline = {"rep_distance": rep_distance(base, pi), "theta_defect": fn.qstate_distance(theta(base, xi), phi)}
    rows = []
    for n in range(1, cfg.lift_steps + 1):
        phi_n = phi + (target - phi).scale(2.0**-n)
        row = {"n": n, "target_distance": fn.qstate_distance(phi_n, phi)}
        try:
            lifted = local_lift(pi, xi, phi_n)
        except RankJumpError:
            row.update(rep_distance=None, theta_defect=None, flagged=True)
        else:
            row.update(
                rep_distance=rep_distance(lifted, pi),
                theta_defect=fn.qstate_distance(theta(lifted, xi), phi_n),
                flagged=False,
            )
        rows.append(row)
    return rows, baseline


def monotone_violations(rows: list, start: int = 3) -> int:
    tail = [r["rep_distance"] for r in rows if r["n"] >= start and not r["flagged"]]
    return sum(1 for x, y in zip(tail, tail[1:]) if not y < x)


def lift_checks(cfg: ExperimentConfig, rep: Report, n_pairs: Optional[int] = None, keep_tables: bool = False):
    n_pairs = cfg.count("lift_pairs") if n_pairs is None else n_pairs
    exact = base_dist = 0.0
    viol = flagged = supported_rows = 0
    for k in range(n_pairs):
        rows, baseline = lift_table(cfg, k)
        base_dist = max(base_dist, baseline["rep_distance"], baseline["theta_defect"])
        for r in rows:
            if r["flagged"]:
                flagged += 1
            else:
                supported_rows += 1
                exact = max(exact, r["theta_defect"])
        viol += monotone_violations(rows)
        if keep_tables:
            rep.tables[f"lift_pair_{k:03d}"] = {"baseline": baseline, "rows": rows}
    rep.add("reps.lift_identity", base_dist, cfg.tol("lift_exactness"))
    rep.add("reps.lift_exactness", exact, cfg.tol("lift_exactness"))
    rep.add("reps.lift_monotone_violations", viol, 0)
    rep.notes["lift_flagged_rows"] = flagged
    if flagged and not supported_rows:
        rep.notes["regime"] = "unsupported"
    elif flagged:
        rep.notes["regime"] = "partially supported"


def polar_checks(cfg: ExperimentConfig, rep: Report):
    desc, d = cfg.descriptor, cfg.d
    fact = inter = comm = 0.0
    for k in range(cfg.count("intertwiners")):
        kind = fld.ALL_KINDS[k % len(fld.ALL_KINDS)]
        s = fld.sample_intertwiner(desc, d, kind, [cfg.seed, 14, k])
        U, P = fld.polar_decompose_intertwiner(s.S, s.pi1, s.pi2)
        fact = max(fact, np.abs(U @ P - s.S).max())
        inter = max(inter, fld.intertwiner_defect(U, s.pi1, s.pi2), fld.intertwiner_defect(P, s.pi1, s.pi1))
    for k in range(cfg.count("representations")):
        pi, P = fld.sample_positive_self_intertwiner(desc, d, [cfg.seed, 15, k])
        T = fld.field_from_element(alg.random_element(desc, [cfg.seed, 16, k]), d)
        r = fld.positive_commutation_check(T, pi, P)
        comm = max(comm, r.unitary_commutator, r.positive_commutator)
    rep.add("fields.polar_factorization", fact, cfg.tol("polar_factorization"))
    rep.add("fields.polar_intertwining", inter, cfg.tol("polar_intertwining"))
    rep.add("fields.positive_commutation", comm, cfg.tol("positive_commutation"))


def sandwich_checks(cfg: ExperimentConfig, rep: Report):
    desc, d = cfg.descriptor, cfg.d
    worst = 0.0
    for k in range(cfg.count("representations")):
        T = fld.field_from_element(alg.random_element(desc, [cfg.seed, 17, k]), d)
        if k == 0:
            pi = Representation.zero(desc, d)
        else:
            pi = random_representation(desc, d, [cfg.seed, 18, k])
        worst = max(worst, fld.essential_sandwich_check(T, pi))
    rep.add("fields.essential_sandwich", worst, cfg.tol("essential_sandwich"))


def adversarial_checks(cfg: ExperimentConfig, rep: Report):
    desc, d, xi = cfg.descriptor, cfg.d, _xi(cfg)
    for name in ("constant", "trace"):
        T = fld.ADVERSARIAL_FIELDS[name](desc, d)
        audit = fld.compatibility_audit(T, seed=0, n_samples=50, tol=cfg.tol("audit"))
        rep.add(f"fields.adversarial_{name}_defect", audit.max_defect, cfg.tol("adversarial_min_defect"), "lower")
        try:
            fld.reconstruct_element(T, xi, audit=audit)
            refused = 0
        except fld.AuditFailure:
            refused = 1
        rep.add(f"fields.adversarial_{name}_refused", refused, 1, "lower")


def duality_checks(cfg: ExperimentConfig, rep: Report, keep_rows: bool = False):
    desc, d, xi = cfg.descriptor, cfg.d, _xi(cfg)
    errors = {fld.QUASI_STATES: 0.0, fld.STATES_ONLY: 0.0}
    residual = audit_max = spread = 0.0
    rows = []
    probes = fn.density_frame(desc)
    for k in range(cfg.count("elements")):
        a = alg.random_element(desc, [cfg.seed, 19, k])
        T = fld.field_from_element(a, d)
        audit = fld.compatibility_audit(T, seed=k, n_samples=25, tol=cfg.tol("audit"))
        audit_max = max(audit_max, audit.max_defect)
        row = {"k": k, "audit_max_defect": audit.max_defect}
        for mode in errors:
            rec = fld.reconstruct_element(T, xi, mode, audit=audit)
            err = alg.norm(rec.element - a)
            errors[mode] = max(errors[mode], err)
            residual = max(residual, rec.residual)
            row[f"error_{mode}"] = err
        if k < cfg.count("spread_probes"):
            phi = probes[k % len(probes)]
            spread = max(spread, fld.preimage_spread(T, xi, phi, cfg.preimages, seed=k))
        rows.append(row)
    rep.add("fields.element_audit", audit_max, cfg.tol("audit"))
    rep.add("fields.duality_quasi_states", errors[fld.QUASI_STATES], cfg.tol("duality"))
    rep.add("fields.duality_states_only", errors[fld.STATES_ONLY], cfg.tol("duality"))
    rep.add("fields.duality_residual", residual, cfg.tol("duality"))
    rep.add("fields.preimage_spread", spread, cfg.tol("preimage_spread"))
    if keep_rows:
        rep.tables["duality"] = rows


def run_suite(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg)
    start = time.perf_counter()
    algebra_checks(cfg, rep)
    functional_checks(cfg, rep)
    gns_checks(cfg, rep)
    rotation_checks(cfg, rep)
    surjectivity_checks(cfg, rep)
    continuity_checks(cfg, rep)
    lift_checks(cfg, rep, n_pairs=min(3, cfg.count("lift_pairs")))
    polar_checks(cfg, rep)
    sandwich_checks(cfg, rep)
    adversarial_checks(cfg, rep)
    duality_checks(cfg, rep)
    rep.wall_clock = time.perf_counter() - start
    return rep


def lift_experiment(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg)
    start = time.perf_counter()
    lift_checks(cfg, rep, keep_tables=True)
    rep.wall_clock = time.perf_counter() - start
    return rep


def duality_roundtrip(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg)
    start = time.perf_counter()
    duality_checks(cfg, rep, keep_rows=True)
    adversarial_checks(cfg, rep)
    rep.wall_clock = time.perf_counter() - start
    return rep


RUNNERS = {"verify": run_suite, "lift-experiment": lift_experiment, "duality-roundtrip": duality_roundtrip}
