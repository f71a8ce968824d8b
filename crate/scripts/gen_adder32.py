#!/usr/bin/env python3
"""Emit a 32-bit ripple-carry adder netlist in the old Bristol text format.

Gate mix: 127 AND, 61 XOR, 187 INV (375 gates, 439 wires, 64 inputs,
33 outputs). Inputs are a[0..32] then b[0..32], least significant bit
first; outputs are s[0..32] followed by the carry out.
"""
import sys

N_IN = 64
N_OUT = 33
gates = []
next_wire = N_IN
out_base = None  # filled after counting


def new():
    global next_wire
    w = next_wire
    next_wire += 1
    return w


def g2(op, a, b, out=None):
    o = new() if out is None else out
    gates.append(f"2 1 {a} {b} {o} {op}")
    return o


def inv(a, out=None):
    o = new() if out is None else out
    gates.append(f"1 1 {a} {o} INV")
    return o


def orr(ng, nx, out=None):
    # out = !( !g & !x )
    y = g2("AND", ng, nx)
    return inv(y, out)


TOTAL_W = 439
OUT = [TOTAL_W - N_OUT + i for i in range(N_OUT)]
a = list(range(32))
b = list(range(32, 64))

# bit 0: s = (a|b) & !(a&b), carry = a&b
na = inv(a[0]); nb = inv(b[0])
o = inv(g2("AND", na, nb))
g = g2("AND", a[0], b[0])
ng = inv(g)
g2("AND", o, ng, OUT[0])
c = g

for i in range(1, 32):
    last = i == 31
    cout = OUT[32] if last else None
    if i <= 29:
        p = g2("XOR", a[i], b[i])
        g2("XOR", p, c, OUT[i])
        g = g2("AND", a[i], b[i])
        o = inv(g2("AND", inv(a[i]), inv(b[i])))
        x = g2("AND", c, o)
        c = orr(inv(g), inv(x), cout)
    elif i == 30:
        p = g2("XOR", a[i], b[i])
        g2("XOR", p, c, OUT[i])
        g = g2("AND", a[i], b[i])
        x = g2("AND", c, p)
        c = orr(inv(g), inv(x), cout)
    else:
        g = g2("AND", a[i], b[i])
        o = inv(g2("AND", inv(a[i]), inv(b[i])))
        ng = inv(g)
        p = g2("AND", o, ng)
        g2("XOR", p, c, OUT[i])
        x = g2("AND", c, p)
        c = orr(ng, inv(x), cout)

assert next_wire == TOTAL_W - N_OUT, next_wire
assert len(gates) == 375, len(gates)
sys.stdout.write(f"{len(gates)} {TOTAL_W}\n32 32 {N_OUT}\n\n")
sys.stdout.write("\n".join(gates) + "\n")
