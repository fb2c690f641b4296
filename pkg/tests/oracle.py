"""Independent brute-force PSO interpreter for straight-line programs.

Kept deliberately naive: explicit flush steps, plain dicts and lists, no
sharing with the package's machines.  Used to freeze expected outcomes.
"""

from pso_litmus.lang import Assign, Fnc, Lit, Read, Reg, Skip, Write, flatten


def _ops(cmd):
    out = []
    for c in flatten(cmd):
        if isinstance(c, Skip):
            continue
        if isinstance(c, Write):
            out.append(("w", c.var, c.expr))
        elif isinstance(c, Read):
            out.append(("r", c.var, c.reg))
        elif isinstance(c, Fnc):
            out.append(("f",))
        elif isinstance(c, Assign):
            out.append(("a", c.reg, c.expr))
        else:
            raise ValueError("oracle handles straight-line programs only")
    return out


def _val(expr, regs):
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Reg):
        return regs[expr.name]
    raise ValueError("oracle handles literals and registers only")


def pso_outcomes(p):
    threads = [_ops(t) for t in p.threads]
    names = p.all_registers()
    n = len(threads)
    start = (tuple([0] * n), tuple(tuple(0 for _ in r) for r in p.registers),
             tuple(0 for _ in p.globals), tuple(tuple(() for _ in p.globals) for _ in range(n)))
    seen, stack, finals = {start}, [start], set()
    gi = {x: i for i, x in enumerate(p.globals)}
    while stack:
        pcs, regs, mem, wb = stack.pop()
        succ = []
        # flushes
        for t in range(n):
            for xi in range(len(p.globals)):
                if wb[t][xi]:
                    mem2 = list(mem)
                    mem2[xi] = wb[t][xi][0]
                    wb2 = [list(row) for row in wb]
                    wb2[t][xi] = wb[t][xi][1:]
                    succ.append((pcs, regs, tuple(mem2), tuple(tuple(r) for r in wb2)))
        for t in range(n):
            if pcs[t] == len(threads[t]):
                continue
            op = threads[t][pcs[t]]
            env = dict(zip(p.registers[t], regs[t]))
            pcs2 = pcs[:t] + (pcs[t] + 1,) + pcs[t + 1:]
            if op[0] == "w":
                xi = gi[op[1]]
                wb2 = [list(row) for row in wb]
                wb2[t][xi] = wb[t][xi] + (_val(op[2], env),)
                succ.append((pcs2, regs, mem, tuple(tuple(r) for r in wb2)))
            elif op[0] == "r":
                xi = gi[op[1]]
                v = wb[t][xi][-1] if wb[t][xi] else mem[xi]
                env[op[2]] = v
                regs2 = regs[:t] + (tuple(env[r] for r in p.registers[t]),) + regs[t + 1:]
                succ.append((pcs2, regs2, mem, wb))
            elif op[0] == "a":
                env[op[1]] = _val(op[2], env)
                regs2 = regs[:t] + (tuple(env[r] for r in p.registers[t]),) + regs[t + 1:]
                succ.append((pcs2, regs2, mem, wb))
            elif not any(wb[t]):
                succ.append((pcs2, regs, mem, wb))
        if all(pcs[t] == len(threads[t]) for t in range(n)):
            env = {}
            for t in range(n):
                env.update(zip(p.registers[t], regs[t]))
            finals.add(tuple(sorted(env.items())))
        for s in succ:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    assert set(names) == {r for f in finals for r, _ in f} or not finals or not names
    return finals
