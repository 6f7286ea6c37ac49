"""Regenerates the bundled fixtures. Deterministic: fixed seeds, no inputs."""
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures")

UNIT_HEADER = ("# name bus p_min p_max ramp_up ramp_down min_up min_down "
               "cost no_load start_up init init_mw init_h")


def write_case(path, name, reference, buses, lines, units):
    with open(path, "w") as f:
        f.write("ucflex-case 1\n")
        f.write(f"name {name}\nreference {reference}\n\n[buses]\n")
        for b in buses:
            f.write(f"{b}\n")
        f.write("\n[lines]\n# name from to reactance rating\n")
        for l in lines:
            f.write(" ".join(str(x) for x in l) + "\n")
        f.write(f"\n[units]\n{UNIT_HEADER}\n")
        for u in units:
            f.write(" ".join(str(x) for x in u) + "\n")


def write_demand(path, step, buses, rows):
    with open(path, "w") as f:
        f.write(f"# step_hours: {step}\n")
        f.write("period," + ",".join(buses) + "\n")
        for t, row in enumerate(rows, start=1):
            f.write(f"{t}," + ",".join(f"{v:.2f}" for v in row) + "\n")


def fixture_dir(name):
    d = os.path.join(OUT, name)
    os.makedirs(d, exist_ok=True)
    return d


def two_bus():
    d = fixture_dir("two_bus")
    write_case(os.path.join(d, "case.txt"), "two-bus", "gen", ["gen", "load"],
               [["tie", "gen", "load", 0.1, 220]],
               [["cheap", "gen", 0, 300, 300, 300, 0, 0, 10, 0, 0, "on", 150, 4],
                ["local", "load", 10, 200, 200, 200, 0, 0, 40, 0, 100, "off", 0, 4]])
    rows = [[0, v] for v in (150, 180, 215, 250, 240, 200, 170, 150)]
    write_demand(os.path.join(d, "demand.csv"), 1.0, ["gen", "load"], rows)


# Six buses, eight units, 96 quarter hours. Buses 4-6 carry the load; bus 6
# sits behind the 3-6 and 2-6 corridors and its evening demand pushes line
# L36 past 95% of its rating for about an hour around the peak.
SIX_LINES = [
    ["L12", 1, 2, 0.20, 0], ["L14", 1, 4, 0.20, 0], ["L15", 1, 5, 0.30, 0],
    ["L23", 2, 3, 0.25, 0], ["L24", 2, 4, 0.10, 0], ["L25", 2, 5, 0.30, 0],
    ["L26", 2, 6, 0.20, 400], ["L36", 3, 6, 0.10, 120], ["L35", 3, 5, 0.26, 0],
    ["L45", 4, 5, 0.40, 0], ["L56", 5, 6, 0.30, 0],
]
SIX_UNITS = [
    ["G1", 1, 100, 300, 150, 150, 4, 4, 18, 300, 1500, "on", 200, 8],
    ["G2", 1, 60, 200, 120, 120, 3, 3, 20, 200, 900, "on", 150, 6],
    ["G3", 2, 50, 220, 120, 120, 3, 3, 23, 180, 700, "off", 0, 6],
    ["G4", 2, 20, 100, 100, 100, 1, 1, 31, 60, 200, "off", 0, 4],
    ["G5", 3, 30, 150, 100, 100, 2, 2, 26, 120, 500, "on", 60, 5],
    ["G6", 3, 10, 80, 120, 120, 1, 1, 45, 40, 150, "off", 0, 4],
    ["G7", 6, 10, 60, 120, 120, 1, 1, 55, 30, 120, "off", 0, 4],
    ["G8", 6, 20, 100, 100, 100, 1, 1, 40, 80, 300, "off", 0, 4],
]
# System demand knots (hour, MW), joined by half-cosine segments.
SIX_PROFILE = [(0, 420), (4, 380), (6, 400), (8.5, 640), (12, 660), (14.5, 600),
               (17, 700), (19, 840), (21, 720), (24, 450)]


def knot_curve(knots, h):
    for (h0, v0), (h1, v1) in zip(knots, knots[1:]):
        if h0 <= h <= h1:
            w = 0.5 - 0.5 * math.cos(math.pi * (h - h0) / (h1 - h0))
            return v0 + w * (v1 - v0)
    return knots[-1][1]


def six_bus_profile(seed, periods=96, noise=3.0):
    rng = random.Random(seed)
    rows = []
    for t in range(periods):
        h = (t + 0.5) * 24.0 / periods
        total = knot_curve(SIX_PROFILE, h) + rng.uniform(-noise, noise)
        share6 = 0.22 + 0.10 * math.exp(-((h - 19.0) / 1.4) ** 2)
        rest = total * (1 - share6)
        rows.append([0.0, 0.0, 0.0, 0.45 * rest, 0.55 * rest, total * share6])
    return rows


def six_bus():
    d = fixture_dir("six_bus")
    write_case(os.path.join(d, "case.txt"), "six-bus", 1, range(1, 7), SIX_LINES, SIX_UNITS)
    write_demand(os.path.join(d, "demand.csv"), 0.25, [str(b) for b in range(1, 7)],
                 six_bus_profile(seed=7))


# Three buses, 24 hours. The east load sits behind a 160 MW corridor and its
# sharp peaks exceed what the corridor plus the small east unit can carry
# once a few hours are averaged together.
def corridor():
    d = fixture_dir("corridor")
    write_case(os.path.join(d, "case.txt"), "corridor", "west", ["west", "mid", "east"],
               [["wm", "west", "mid", 0.1, 0], ["me", "mid", "east", 0.1, 160],
                ["we", "west", "east", 0.3, 0]],
               [["base", "west", 60, 400, 60, 60, 4, 4, 12, 100, 2000, "on", 100, 10],
                ["mid", "mid", 20, 150, 80, 80, 2, 2, 24, 40, 400, "on", 30, 4],
                ["peak", "east", 10, 80, 80, 80, 1, 1, 60, 20, 100, "off", 0, 3]])
    east = [70, 65, 62, 60, 62, 70, 95, 140, 175, 160, 140, 130,
            128, 130, 135, 150, 190, 230, 240, 215, 170, 130, 100, 80]
    west = [60, 58, 55, 55, 56, 62, 80, 100, 110, 105, 100, 98,
            96, 98, 100, 110, 125, 140, 145, 135, 115, 95, 80, 70]
    write_demand(os.path.join(d, "demand.csv"), 1.0, ["west", "east"],
                 [[w, e] for w, e in zip(west, east)])


# Five buses in MATPOWER layout with a sidecar for the unit fields MATPOWER
# lacks. Generator 4 is out of service and branch 7 is open.
def five_bus_matpower():
    d = fixture_dir("five_bus_matpower")
    with open(os.path.join(d, "case.m"), "w") as f:
        f.write("function mpc = five_bus\n")
        f.write("mpc.version = '2';\nmpc.baseMVA = 100;\n\n")
        f.write("%% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin\n")
        f.write("mpc.bus = [\n")
        for bus, kind in ((1, 3), (2, 1), (3, 2), (4, 1), (5, 2)):
            f.write(f"\t{bus}\t{kind}\t0\t0\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;\n")
        f.write("];\n\n")
        f.write("%% bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin\n")
        f.write("mpc.gen = [\n")
        for bus, pmax, pmin, status in ((1, 250, 50, 1), (3, 150, 20, 1), (5, 120, 10, 1),
                                        (5, 60, 0, 0)):
            f.write(f"\t{bus}\t0\t0\t0\t0\t1\t100\t{status}\t{pmax}\t{pmin};\n")
        f.write("];\n\n")
        f.write("%% fbus tbus r x b rateA rateB rateC ratio angle status\n")
        f.write("mpc.branch = [\n")
        for fb, tb, x, rate, status in ((1, 2, 0.06, 0, 1), (1, 4, 0.10, 0, 1),
                                        (2, 3, 0.08, 0, 1), (2, 4, 0.12, 120, 1),
                                        (3, 5, 0.09, 0, 1), (4, 5, 0.15, 0, 1),
                                        (1, 5, 0.20, 0, 0)):
            f.write(f"\t{fb}\t{tb}\t0.01\t{x}\t0\t{rate}\t0\t0\t0\t0\t{status};\n")
        f.write("];\n\n")
        f.write("%% model startup shutdown n c2 c1 c0\n")
        f.write("mpc.gencost = [\n")
        for su, c2, c1, c0 in ((800, 0.004, 16, 150), (300, 0.01, 24, 60),
                               (150, 0.02, 33, 30), (0, 0, 50, 0)):
            f.write(f"\t2\t{su}\t0\t3\t{c2}\t{c1}\t{c0};\n")
        f.write("];\n")
    with open(os.path.join(d, "sidecar.txt"), "w") as f:
        f.write("ucflex-sidecar 1\n")
        f.write("# gen_row ramp_up ramp_down min_up min_down init init_mw init_h\n")
        f.write("1 120 120 4 4 on 150 8\n")
        f.write("2 80 80 2 2 off 0 4\n")
        f.write("3 100 100 1 1 off 0 4\n")
        f.write("4 60 60 1 1 off 0 4\n")
    rng = random.Random(11)
    rows = []
    for t in range(24):
        h = t + 0.5
        total = 180 + 90 * math.exp(-((h - 11) / 3.0) ** 2) + 130 * math.exp(-((h - 19) / 2.0) ** 2)
        total += rng.uniform(-4, 4)
        rows.append([0.4 * total, 0.35 * total, 0.25 * total])
    write_demand(os.path.join(d, "demand.csv"), 1.0, ["2", "4", "5"], rows)


if __name__ == "__main__":
    two_bus()
    six_bus()
    corridor()
    five_bus_matpower()
