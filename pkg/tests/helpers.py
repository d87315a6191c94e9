"""Shared test utilities: random admissible angle trajectories."""
import numpy as np

from invariant_stirap.invariant import AngleTrajectory


def random_trajectory(rng, t_f=4.0):
    """Smooth trajectory with gamma confined to [0.1, 1.45] (cot gamma finite)."""
    c = rng.uniform(0.35, 1.2)
    a = rng.uniform(0.0, min(c - 0.1, 1.45 - c))
    w1, p1 = rng.uniform(0.2, 3.0), rng.uniform(0, 2 * np.pi)
    b0, b1 = rng.uniform(-1, 1), rng.uniform(-1, 1)
    b2, w2, p2 = rng.uniform(0, 1), rng.uniform(0.2, 3.0), rng.uniform(0, 2 * np.pi)
    return AngleTrajectory(
        gamma=lambda t: c + a * np.sin(w1 * np.asarray(t) + p1),
        beta=lambda t: b0 + b1 * np.asarray(t) + b2 * np.sin(w2 * np.asarray(t) + p2),
        gamma_dot=lambda t: a * w1 * np.cos(w1 * np.asarray(t) + p1),
        beta_dot=lambda t: b1 + b2 * w2 * np.cos(w2 * np.asarray(t) + p2),
        t_f=t_f,
    )


# One line per acceptance (sub)criterion, echoed in the pytest terminal summary.
ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, passed: bool, detail: str) -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
