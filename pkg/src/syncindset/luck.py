"""(k, n)-luck games and the sharpness strategy on their independent set games.

Question q in [kn] (1-based labels), a single answer. The players win on
(x, y) iff x = y or both x > n and y > n. All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ValidationError
from .games import SynchronousGame, uniform_distribution
from .indepset import IndepStrategy, sync_loss_indep
from .lifting import reduce_game


@dataclass(frozen=True)
class LuckParams:
    k: int
    n: int

    def __post_init__(self):
        if int(self.k) != self.k or int(self.n) != self.n or self.k < 2 or self.n < 1:
            raise ValidationError(f"luck game needs integers k >= 2, n >= 1, got k={self.k}, n={self.n}")

    @property
    def t(self) -> int:
        return self.k * self.n


def _wins(x: int, y: int, n: int) -> bool:
    return x == y or (x > n and y > n)


def make_luck_game(p: LuckParams) -> SynchronousGame:
    kn, n = p.t, p.n
    v = np.zeros((kn, kn, 1, 1), dtype=bool)
    for x in range(1, kn + 1):
        for y in range(1, kn + 1):
            v[x - 1, y - 1, 0, 0] = _wins(x, y, n)
    return SynchronousGame(list(range(1, kn + 1)), [1], uniform_distribution(kn), v)


def luck_value(p: LuckParams) -> Fraction:
    """(k-1)^2/k^2 + 1/(k^2 n)."""
    k, n = p.k, p.n
    return Fraction((k - 1) ** 2, k * k) + Fraction(1, k * k * n)


def luck_value_by_summation(p: LuckParams) -> Fraction:
    """Direct count of winning question pairs, independent of the closed form."""
    kn = p.t
    won = sum(_wins(x, y, p.n) for x in range(1, kn + 1) for y in range(1, kn + 1))
    return Fraction(won, kn * kn)


def sharpness_strategy(p: LuckParams) -> IndepStrategy:
    """Index i answers vertex i if i > n, else vertex i + n (1-based)."""
    kn, n = p.t, p.n
    choice = [(i if i > n else i + n) - 1 for i in range(1, kn + 1)]
    vertices = [(q, 0) for q in range(kn)]
    return IndepStrategy.deterministic(choice, vertices)


def sharpness_report(p: LuckParams) -> dict:
    k, n, t = p.k, p.n, p.t
    eps = Fraction(1, k) - Fraction(1, k * k)
    game = reduce_game(make_luck_game(p))
    loss, breakdown = sync_loss_indep(game, sharpness_strategy(p))
    value = luck_value(p)
    strategy_value = 1 - loss
    lower = 1 - 2 * eps / t
    return {
        "k": k,
        "n": n,
        "t": t,
        "eps": eps,
        "game_value": value,
        "game_value_upper": 1 - eps,
        "game_value_ok": value <= 1 - eps,
        "strategy_loss": loss,
        "strategy_loss_closed_form": Fraction(1, k * k * n),
        "same_vertex_term": breakdown.same_vertex,
        "adjacent_term": breakdown.adjacent,
        "strategy_value": strategy_value,
        "strategy_value_lower": lower,
        "strategy_value_ok": strategy_value >= lower,
    }
