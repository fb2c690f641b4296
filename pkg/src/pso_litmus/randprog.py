"""Random loop-free litmus programs for differential testing."""

from __future__ import annotations

import random

from .lang import (SKIP, Assign, Cmp, Fnc, If, Lit, Program, Read, Reg, Write, seq)


def _atomic(rng: random.Random, globals_, regs, vals, assigned: list):
    kind = rng.choices(("write", "read", "fence", "assign"), weights=(4, 4, 1, 1))[0]
    if kind == "write":
        # registers are only used once assigned, so printed programs re-parse
        if assigned and rng.random() < 0.25:
            return Write(rng.choice(globals_), Reg(rng.choice(assigned)))
        return Write(rng.choice(globals_), Lit(rng.choice(vals)))
    if kind == "fence":
        return Fnc()
    reg = rng.choice(regs)
    if reg not in assigned:
        assigned.append(reg)
    if kind == "read":
        return Read(reg, rng.choice(globals_))
    return Assign(reg, Lit(rng.choice(vals)))


def random_thread(rng: random.Random, globals_, regs, vals, max_statements: int):
    stmts: list = []
    assigned: list = []
    for _ in range(rng.randint(1, max_statements)):
        if assigned and rng.random() < 0.1:
            cond = Cmp("=", Reg(rng.choice(assigned)), Lit(rng.choice(vals)))
            stmts.append(If(cond, _atomic(rng, globals_, regs, vals, assigned), SKIP))
        else:
            stmts.append(_atomic(rng, globals_, regs, vals, assigned))
    return seq(stmts)


def random_program(rng: random.Random | int, n_threads: int = 2, max_statements: int = 4,
                   globals_=("x", "y"), vals=(0, 1), regs_per_thread: int = 2) -> Program:
    """A loop-free program with at most `max_statements` statements per thread."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    registers = tuple(tuple(f"r{t}{k}" for k in range(1, regs_per_thread + 1))
                      for t in range(1, n_threads + 1))
    threads = tuple(random_thread(rng, globals_, registers[t], vals, max_statements)
                    for t in range(n_threads))
    return Program(threads, tuple(globals_), registers, tuple(vals), None, "random")


def random_programs(count: int, seed: int = 0, **kw) -> list[Program]:
    rng = random.Random(seed)
    return [random_program(rng, **kw) for _ in range(count)]
