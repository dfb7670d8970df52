"""Benchmark problems with a known objective and black-box constraints

    - p1: f = cos(2 x1) cos(x2) + sin(x1), subject to cos(x1) cos(x2) - sin(x1) sin(x2) <= -0.5, on [0, 6]^2
    - p2: f = sin(x1) + x2, subject to sin(x1) sin(x2) <= -0.95, on [0, 6]^2
    - p3: f = x1 + x2, subject to 1.5 - x1 - 2 x2 - 0.5 sin(2 pi (x1^2 - 2 x2)) <= 0 and x1^2 + x2^2 - 1.5 <= 0,
      on [0, 1]^2

p1 and p2 both have two disjoint feasible regions, p2's being the smaller.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .exceptions import Message, NoFeasibleGridPointError, OutOfDomainError
from .resources import CandidateSet, ConstraintSpec, Objective, all_satisfied

logger = logging.getLogger(__name__)

DEFAULT_GRID_COUNT = 20000


@dataclass(frozen=True)
class BenchmarkProblem:
    name: str
    key: int
    bounds: tuple[tuple[float, float], ...]
    objective: Objective
    constraint_funcs: tuple[Callable[[np.ndarray], np.ndarray], ...]
    specs: tuple[ConstraintSpec, ...]
    radius: float
    formulas: tuple[str, ...]

    @property
    def n_dims(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    def in_domain(self, inputs) -> np.ndarray:
        inputs = np.array(inputs, dtype=float, ndmin=2)
        return np.all((inputs >= self.lower) & (inputs <= self.upper), axis=1)

    def constraints(self, inputs) -> np.ndarray:
        """True constraint values, shape (points, constraints)"""
        inputs = np.array(inputs, dtype=float, ndmin=2)
        return np.stack([c(inputs) for c in self.constraint_funcs], axis=1)

    def oracle(self, inputs) -> np.ndarray:
        inputs = np.array(inputs, dtype=float, ndmin=2)
        if not np.all(self.in_domain(inputs)):
            bad = inputs[~self.in_domain(inputs)][0]
            raise OutOfDomainError(Message.out_of_domain_error(bad, self.name))
        return self.constraints(inputs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bounds": [list(b) for b in self.bounds],
            "objective": self.objective.description,
            "constraints": [
                {**spec.to_dict(), "formula": formula}
                for spec, formula in zip(self.specs, self.formulas)
            ],
            "tolerance_radius": self.radius,
        }


def _p1_objective(x: np.ndarray) -> np.ndarray:
    return np.cos(2 * x[:, 0]) * np.cos(x[:, 1]) + np.sin(x[:, 0])


def _p1_constraint(x: np.ndarray) -> np.ndarray:
    return np.cos(x[:, 0]) * np.cos(x[:, 1]) - np.sin(x[:, 0]) * np.sin(x[:, 1])


def _p2_objective(x: np.ndarray) -> np.ndarray:
    return np.sin(x[:, 0]) + x[:, 1]


def _p2_constraint(x: np.ndarray) -> np.ndarray:
    return np.sin(x[:, 0]) * np.sin(x[:, 1])


def _p3_objective(x: np.ndarray) -> np.ndarray:
    return x[:, 0] + x[:, 1]


def _p3_constraint1(x: np.ndarray) -> np.ndarray:
    return (
        1.5 - x[:, 0] - 2 * x[:, 1] - 0.5 * np.sin(2 * np.pi * (x[:, 0] ** 2 - 2 * x[:, 1]))
    )


def _p3_constraint2(x: np.ndarray) -> np.ndarray:
    return x[:, 0] ** 2 + x[:, 1] ** 2 - 1.5


PROBLEMS = {
    "p1": BenchmarkProblem(
        name="p1",
        key=1,
        bounds=((0.0, 6.0), (0.0, 6.0)),
        objective=Objective("p1", _p1_objective, description="cos(2 x1) cos(x2) + sin(x1)"),
        constraint_funcs=(_p1_constraint,),
        specs=(ConstraintSpec(-0.5, name="c"),),
        radius=0.15,
        formulas=("cos(x1) cos(x2) - sin(x1) sin(x2)",),
    ),
    "p2": BenchmarkProblem(
        name="p2",
        key=2,
        bounds=((0.0, 6.0), (0.0, 6.0)),
        objective=Objective("p2", _p2_objective, description="sin(x1) + x2"),
        constraint_funcs=(_p2_constraint,),
        specs=(ConstraintSpec(-0.95, name="c"),),
        radius=0.15,
        formulas=("sin(x1) sin(x2)",),
    ),
    "p3": BenchmarkProblem(
        name="p3",
        key=3,
        bounds=((0.0, 1.0), (0.0, 1.0)),
        objective=Objective("p3", _p3_objective, description="x1 + x2"),
        constraint_funcs=(_p3_constraint1, _p3_constraint2),
        specs=(ConstraintSpec(0.0, name="c1"), ConstraintSpec(0.0, name="c2")),
        radius=0.0125,
        formulas=(
            "1.5 - x1 - 2 x2 - 0.5 sin(2 pi (x1^2 - 2 x2))",
            "x1^2 + x2^2 - 1.5",
        ),
    ),
}


def get_problem(name: str) -> BenchmarkProblem:
    try:
        return PROBLEMS[name.lower()]
    except KeyError:
        raise ValueError(f"Unknown problem {name}, expected one of {sorted(PROBLEMS)}") from None


def evaluate(problem: BenchmarkProblem, x) -> tuple[float, list[float]]:
    """Exact objective and constraint values at one in-domain point"""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.n_dims or not problem.in_domain(x)[0]:
        raise OutOfDomainError(Message.out_of_domain_error(x, problem.name))
    cost = float(problem.objective(x)[0])
    return cost, [float(v) for v in problem.constraints(x)[0]]


@dataclass(frozen=True)
class NoiseConfig:
    tau: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tau < 0:
            raise ValueError(f"The noise level must be non-negative, got {self.tau}")


class NoiseStream:
    """Counter-based Gaussian noise: draw i of repetition r is fixed by (seed, problem, r, i) alone, so two
    acquisitions run on the same repetition face the same noise at the same evaluation index
    """

    def __init__(self, noise: NoiseConfig, problem_key: int, repetition: int) -> None:
        self.noise = noise
        self.problem_key = problem_key
        self.repetition = repetition
        self.counter = 0

    def draw(self, eval_index: int, size: int) -> np.ndarray:
        if self.noise.tau == 0:
            return np.zeros(size)
        rng = np.random.default_rng(
            [self.noise.seed, self.problem_key, self.repetition, eval_index]
        )
        return rng.normal(0.0, self.noise.tau, size)

    def next(self, size: int) -> np.ndarray:
        values = self.draw(self.counter, size)
        self.counter += 1
        return values


def noisy_evaluate(
    problem: BenchmarkProblem, x, noise: NoiseConfig, stream: NoiseStream
) -> tuple[float, list[float]]:
    """Objective (uncorrupted) and constraint values with independent N(0, tau^2) noise on each constraint"""
    cost, constraints = evaluate(problem, x)
    perturbation = stream.next(len(constraints)) if noise.tau > 0 else np.zeros(len(constraints))
    return cost, [c + float(e) for c, e in zip(constraints, perturbation)]


def grid_shape(n_dims: int, count: int) -> tuple[int, ...]:
    """Smallest equal per-dimension point count whose product reaches `count`"""
    m = max(2, int(round(count ** (1.0 / n_dims))))
    while m**n_dims < count:
        m += 1
    while m > 2 and (m - 1) ** n_dims >= count:
        m -= 1
    return (m,) * n_dims


def make_grid(problem: BenchmarkProblem, count: int = DEFAULT_GRID_COUNT) -> CandidateSet:
    """Uniform rectangular grid over the domain, truncated in row-major order to exactly `count` points

    Args:
        problem (BenchmarkProblem): the problem
        count (int, optional): the number of candidates. Defaults to 20000 (142 x 142 truncated).

    Returns:
        CandidateSet: the grid with its objective values
    """
    if count < 4:
        raise ValueError(f"A grid needs at least 4 points, got {count}")
    shape = grid_shape(problem.n_dims, count)
    axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(problem.bounds, shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1)[:count]
    return CandidateSet.from_objective(points, problem.objective)


@dataclass(frozen=True)
class OptimizerOracle:
    index: int
    candidate_id: int
    inputs: tuple[float, ...]
    cost: float
    radius: float

    def within_radius(self, x) -> bool:
        return bool(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(self.inputs)) <= self.radius)


def find_grid_optimum(problem: BenchmarkProblem, grid: CandidateSet) -> OptimizerOracle:
    """Brute-force scan for the lowest-cost grid point satisfying the true constraints (lowest index on ties)"""
    if len(grid) == 0:
        raise ValueError("The grid is empty")
    feasible = all_satisfied(problem.constraints(grid.inputs), problem.specs)
    if not feasible.any():
        raise NoFeasibleGridPointError(Message.no_feasible_grid_point_error(problem.name))
    index = int(np.argmin(np.where(feasible, grid.costs, np.inf)))
    return OptimizerOracle(
        index,
        int(grid.ids[index]),
        tuple(float(v) for v in grid.inputs[index]),
        float(grid.costs[index]),
        problem.radius,
    )


def feasible_fraction(problem: BenchmarkProblem, grid: CandidateSet) -> float:
    return float(all_satisfied(problem.constraints(grid.inputs), problem.specs).mean())


def feasible_components(problem: BenchmarkProblem, count: int = DEFAULT_GRID_COUNT) -> int:
    """Number of connected feasible regions of the grid under 8-neighbour adjacency"""
    shape = grid_shape(problem.n_dims, count)
    grid = make_grid(problem, count)
    feasible = np.zeros(int(np.prod(shape)), dtype=bool)
    feasible[: len(grid)] = all_satisfied(problem.constraints(grid.inputs), problem.specs)
    structure = np.ones((3,) * problem.n_dims, dtype=bool)
    _, components = ndimage.label(feasible.reshape(shape), structure=structure)
    return int(components)


def export_problems(path: Optional[str] = None) -> list[dict]:
    definitions = [problem.to_dict() for problem in PROBLEMS.values()]
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(definitions, f, indent=2)
    return definitions
