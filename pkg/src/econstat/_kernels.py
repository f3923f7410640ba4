# Compiled inner loops for the money-exchange simulation.
# Balances are int64 minor units; every applied transfer debits and credits
# the same integer amount, so the total is conserved bit-exactly.
import math

import numba
import numpy as np

RULE_CONSTANT = 0
RULE_UNIFORM = 1
RULE_PROPORTIONAL = 2
RULE_SAVING = 3

BOUND_NODEBT = 0
BOUND_LIMIT = 1
BOUND_RESERVE = 2
BOUND_UNLIMITED = 3


@numba.njit(cache=True, inline="always")
def round_minor(x):
    return np.int64(math.floor(x + 0.5))


@numba.njit(cache=True, inline="always")
def _neg(m):
    return -m if m < 0 else 0


@numba.njit(cache=True)
def needs_uniform(rule_kind):
    return rule_kind == RULE_UNIFORM or rule_kind == RULE_SAVING


@numba.njit(cache=True)
def attempt(balances, i, j, u, rule_kind, rule_param, lambdas, bound_kind, bound_param, debt):
    """Try one transfer from payer ``i`` to payee ``j``.

    ``u`` is a uniform draw in [0, 1) (ignored by deterministic rules).
    Returns ``(applied, new_debt)``.
    """
    mi = balances[i]
    mj = balances[j]
    if rule_kind == RULE_CONSTANT:
        dm = np.int64(rule_param)
    elif rule_kind == RULE_UNIFORM:
        dm = round_minor((1.0 - u) * rule_param)
    elif rule_kind == RULE_PROPORTIONAL:
        dm = round_minor(rule_param * (mi if mi > 0 else 0))
    else:
        li = lambdas[i]
        lj = lambdas[j]
        pool = (1.0 - li) * mi + (1.0 - lj) * mj
        new_i = round_minor(li * mi + u * pool)
        dm = mi - new_i

    new_i = mi - dm
    new_j = mj + dm
    if bound_kind == BOUND_NODEBT:
        if new_i < 0 or new_j < 0:
            return False, debt
    elif bound_kind == BOUND_LIMIT:
        if new_i < -bound_param or new_j < -bound_param:
            return False, debt
    elif bound_kind == BOUND_RESERVE:
        di = _neg(new_i) - _neg(mi)
        dj = _neg(new_j) - _neg(mj)
        borrowed = (di if di > 0 else 0) + (dj if dj > 0 else 0)
        if borrowed > 0 and borrowed > bound_param - debt:
            return False, debt
        debt += di + dj
    balances[i] = new_i
    balances[j] = new_j
    return True, debt


@numba.njit(cache=True, nogil=True)
def run_attempts(balances, rng, n_attempts, rule_kind, rule_param, lambdas, bound_kind, bound_param, debt):
    """Run ``n_attempts`` transactions on uniformly drawn ordered pairs.

    Returns ``(rejections, debt)``.
    """
    n = balances.shape[0]
    draw_u = needs_uniform(rule_kind)
    rejected = 0
    for _ in range(n_attempts):
        i = int(rng.random() * n)
        j = int(rng.random() * (n - 1))
        if j >= i:
            j += 1
        u = rng.random() if draw_u else 0.0
        ok, debt = attempt(balances, i, j, u, rule_kind, rule_param, lambdas, bound_kind, bound_param, debt)
        if not ok:
            rejected += 1
    return rejected, debt
