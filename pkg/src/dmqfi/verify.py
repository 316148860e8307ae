"""Self-verification suite run by ``dmqfi verify``.

Each check exercises one invariant end to end and reports pass/fail with a
short detail string.  ``quick`` shrinks the random-draw counts and grids.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import eigh, fidelity, max_eig_sym3
from .qfi import (
    WeightFn,
    c_matrix,
    direction_grid_max,
    fidelity_qfi_oracle,
    fisher_in_direction,
    qfi,
    qfi_of_state,
    sld_weights,
)
from .spin_model import Z_HAT, ModelParams, analytic_spectrum, build_hamiltonian, total_sz
from .sweeps import Axis, SweepSpec, preset, run_sweep
from .thermal import closed_form_state, gibbs_state

SEED = 20160101


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def faulty_weights(pi: np.ndarray, pj: np.ndarray) -> np.ndarray:
    """Deliberately wrong pair weights, used to prove the suite can fail."""
    return 1.25 * sld_weights(pi, pj)


def random_params(rng: np.random.Generator, *, t_range=(0.05, 5.0), span=3.0) -> ModelParams:
    while True:
        J, B, b, D = rng.uniform(-span, span, 4)
        if J != 0.0:
            break
    return ModelParams(J=J, B=B, b=b, D=D, T=rng.uniform(*t_range))


class _Suite:
    def __init__(self, quick: bool, weight: WeightFn | None):
        self.quick = quick
        self.weight = weight
        self.rng = np.random.default_rng(SEED)

    def n(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    def qfi(self, params: ModelParams, **kw) -> float:
        return qfi(params, weight=self.weight, **kw).qfi_per_particle

    def eigensolver(self) -> str:
        worst = 0.0
        for _ in range(self.n(20, 5)):
            a = self.rng.normal(size=(16, 16)) + 1j * self.rng.normal(size=(16, 16))
            a = a + a.conj().T
            es = eigh(a)
            v = es.vectors
            res = np.linalg.norm(a @ v - v * es.values) / np.linalg.norm(a)
            orth = np.max(np.abs(v.conj().T @ v - np.eye(16)))
            worst = max(worst, res, orth)
        assert worst < 1e-12, f"residual {worst:.2e}"
        return f"max residual {worst:.1e}"

    def spectrum_equivalence(self) -> str:
        worst = 0.0
        for _ in range(self.n(1000, 100)):
            p = random_params(self.rng)
            h = build_hamiltonian(p)
            an = analytic_spectrum(p)
            worst = max(worst, np.max(np.abs(np.sort(an.energies) - eigh(h).values)))
            for e, v in an.pairs():
                worst = max(worst, np.linalg.norm(h @ v - e * v))
        assert worst < 1e-12, f"deviation {worst:.2e}"
        return f"max deviation {worst:.1e}"

    def state_equivalence(self) -> str:
        worst = 0.0
        for _ in range(self.n(1000, 100)):
            p = random_params(self.rng)
            a = closed_form_state(p).matrix
            b = gibbs_state(build_hamiltonian(p), p.T).matrix
            worst = max(worst, np.max(np.abs(a - b)))
        assert worst < 1e-10, f"deviation {worst:.2e}"
        return f"max entry difference {worst:.1e}"

    def c_matrix_structure(self) -> str:
        worst = 0.0
        for _ in range(self.n(1000, 100)):
            p = random_params(self.rng)
            c = c_matrix(closed_form_state(p), 2, weight=self.weight)
            worst = max(worst, abs(c[2, 2]), abs(c[0, 1]), abs(c[0, 2]), abs(c[1, 2]), abs(c[0, 0] - c[1, 1]))
        assert worst < 1e-10, f"off-pattern entry {worst:.2e}"
        return f"max off-pattern entry {worst:.1e}"

    def block_structure(self) -> str:
        worst = 0.0
        for _ in range(self.n(50, 10)):
            p = random_params(self.rng).replace(N=int(self.rng.integers(2, 5)))
            h = build_hamiltonian(p)
            sz = total_sz(p.N)
            worst = max(worst, np.max(np.abs(h @ sz - sz @ h)))
        assert worst < 1e-13, f"commutator {worst:.2e}"
        return f"max |[H, Sz]| {worst:.1e}"

    def limits(self) -> str:
        ferro = self.qfi(ModelParams(J=-1.0, T=0.01))
        anti = self.qfi(ModelParams(J=1.0, T=0.01))
        assert abs(ferro - 2.0) < 1e-3, f"ferro T=0.01 QFI {ferro!r}"
        assert abs(anti) < 1e-3, f"antiferro T=0.01 QFI {anti!r}"
        hot = max(self.qfi(random_params(self.rng, t_range=(1e3, 1e3))) for _ in range(self.n(100, 20)))
        assert hot < 1e-3, f"T=1000 QFI {hot!r}"
        return f"ferro {ferro:.6f}, antiferro {anti:.1e}, hot max {hot:.1e}"

    def b_d_equivalence(self) -> str:
        xs = np.linspace(0.0, 3.0, self.n(32, 8))
        worst = 0.0
        for J in (-1.0, 1.0):
            for B in (0.0, 1.0):
                for T in (0.3, 0.7, 1.5):
                    for x in xs:
                        base = ModelParams(J=J, B=B, T=T)
                        d = abs(self.qfi(base.replace(b=x)) - self.qfi(base.replace(D=x)))
                        worst = max(worst, d)
        assert worst < 1e-10, f"gap {worst:.2e}"
        return f"max gap {worst:.1e}"

    def oracle_agreement(self) -> str:
        grid_worst = fid_worst = 0.0
        for _ in range(self.n(200, 10)):
            p = random_params(self.rng, t_range=(0.1, 2.0))
            state = closed_form_state(p)
            result = qfi_of_state(state, p, weight=self.weight)
            grid, _ = direction_grid_max(state, 2, 128)
            fid = fidelity_qfi_oracle(state, result.n_opt, 2, 1e-3)
            grid_worst = max(grid_worst, abs(grid - result.qfi_per_particle))
            tol = max(1e-4, 1e-2 * result.qfi_per_particle)
            fid_worst = max(fid_worst, abs(fid - result.qfi_per_particle) / tol)
        assert grid_worst < 1e-3, f"grid gap {grid_worst:.2e}"
        assert fid_worst < 1.0, f"fidelity gap {fid_worst:.2f} x tolerance"
        return f"grid gap {grid_worst:.1e}, fidelity gap {fid_worst:.2e} x tolerance"

    def z_insensitivity(self) -> str:
        worst = 0.0
        for _ in range(self.n(100, 20)):
            p = random_params(self.rng)
            state = closed_form_state(p)
            worst = max(worst, abs(fisher_in_direction(state, Z_HAT, 2)))
        assert worst < 1e-10, f"z-axis Fisher {worst:.2e}"
        return f"max z-axis Fisher {worst:.1e}"

    def fidelity_properties(self) -> str:
        worst = 0.0
        for _ in range(self.n(50, 10)):
            a = closed_form_state(random_params(self.rng))
            b = closed_form_state(random_params(self.rng))
            worst = max(worst, abs(fidelity(a, b) - fidelity(b, a)), abs(fidelity(a, a) - 1.0))
        assert worst < 1e-10, f"asymmetry {worst:.2e}"
        return f"max asymmetry {worst:.1e}"

    def parity_symmetry(self) -> str:
        worst = 0.0
        for _ in range(self.n(200, 30)):
            p = random_params(self.rng)
            ref = self.qfi(p)
            flips = (
                p.replace(B=-p.B, b=-p.b, D=-p.D),
                p.replace(D=-p.D),
                p.replace(b=-p.b),
                p.replace(B=-p.B),
            )
            worst = max(worst, *(abs(self.qfi(q) - ref) for q in flips))
        assert worst < 1e-10, f"gap {worst:.2e}"
        return f"max gap {worst:.1e}"

    def _table(self, name: str, sign: str):
        return run_sweep(preset(name, sign, self.n(64, 12)), workers=1)

    def fig2_snl(self) -> str:
        ferro = max(r.qfi for r in self._table("fig2_Db", "ferro").rows)
        anti = max(r.qfi for r in self._table("fig2_Db", "antiferro").rows)
        assert ferro > 1.0, f"ferro max {ferro!r} never exceeds 1"
        assert anti <= 1.0 + 1e-9, f"antiferro max {anti!r} exceeds 1"
        return f"ferro max {ferro:.4f}, antiferro max {anti:.4f}"

    def field_preference(self) -> str:
        bad = []
        for x in np.linspace(3.0 / 16, 3.0, 16):
            fb = self.qfi(ModelParams(J=-1.0, b=x, T=0.7))
            fB = self.qfi(ModelParams(J=-1.0, B=x, T=0.7))
            ab = self.qfi(ModelParams(J=1.0, b=x, T=0.7))
            aB = self.qfi(ModelParams(J=1.0, B=x, T=0.7))
            if fb < fB - 1e-9:
                bad.append(f"ferro x={x!r}: b {fb!r} < B {fB!r}")
            if aB < ab - 1e-9:
                bad.append(f"antiferro x={x!r}: B {aB!r} < b {ab!r}")
        assert not bad, "; ".join(bad)
        return "16 points, no violations"

    def sweep_determinism(self) -> str:
        spec = SweepSpec(Axis("T", 0.2, 2.0, 6), Axis("D", 0.0, 2.0, 5), ModelParams(J=-1.0), "determinism")
        first = run_sweep(spec, workers=1).to_csv()
        again = run_sweep(spec, workers=1).to_csv()
        assert first == again, "serial re-run differs"
        if not self.quick:
            parallel = run_sweep(spec, workers=2).to_csv()
            assert first == parallel, "parallel run differs"
        return "byte-identical"

    def top_eigenpair(self) -> str:
        worst = 0.0
        for _ in range(self.n(50, 10)):
            c = self.rng.normal(size=(3, 3))
            c = c + c.T
            c_max, n = max_eig_sym3(c)
            dirs = self.rng.normal(size=(10_000, 3))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            rayleigh = np.einsum("di,ij,dj->d", dirs, c, dirs).max()
            worst = max(worst, rayleigh - c_max, abs(n @ c @ n - c_max))
        assert worst < 1e-10, f"dominance gap {worst:.2e}"
        return "dominates sampled Rayleigh quotients"


CHECKS: list[tuple[str, str]] = [
    ("eigensolver_reconstruction", "eigensolver"),
    ("spectrum_equivalence", "spectrum_equivalence"),
    ("state_equivalence", "state_equivalence"),
    ("c_matrix_structure", "c_matrix_structure"),
    ("hamiltonian_block_structure", "block_structure"),
    ("temperature_limits", "limits"),
    ("b_D_equivalence", "b_d_equivalence"),
    ("oracle_agreement", "oracle_agreement"),
    ("z_insensitivity", "z_insensitivity"),
    ("fidelity_properties", "fidelity_properties"),
    ("top_eigenpair", "top_eigenpair"),
    ("parity_symmetry", "parity_symmetry"),
    ("fig2_snl", "fig2_snl"),
    ("field_preference", "field_preference"),
    ("sweep_determinism", "sweep_determinism"),
]


def run_suite(
    quick: bool = False,
    inject_fault: bool = False,
    progress: Callable[[CheckResult], None] | None = None,
) -> list[CheckResult]:
    suite = _Suite(quick, faulty_weights if inject_fault else None)
    out = []
    for name, method in CHECKS:
        start = time.perf_counter()
        try:
            detail = getattr(suite, method)()
            passed = True
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}" if not isinstance(exc, AssertionError) else str(exc)
            passed = False
        result = CheckResult(name, passed, detail, time.perf_counter() - start)
        out.append(result)
        if progress is not None:
            progress(result)
    return out
